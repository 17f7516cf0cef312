#pragma once

// Subcommands behind the bivop executable.  Each command writes its files
// into one output directory together with run-manifest.txt and returns the
// process exit status: 0 success, 1 tolerance failure, 2 usage or parse
// error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bivop/besov_grid.hpp"
#include "bivop/config.hpp"
#include "bivop/harness.hpp"

namespace bivop {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Provenance record for one invocation.
struct RunManifest {
    std::string subcommand;
    std::string config_text;
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
    int exit_code = 0;
    std::string note;

    void write(const std::filesystem::path& dir) const {
        std::ofstream os(dir / "run-manifest.txt");
        os << "tool_version: " << kToolVersion << '\n';
        os << "subcommand: " << subcommand << '\n';
        os << "config_hash: " << fnv1a_hex(config_text) << '\n';
        os << "seed: " << seed << '\n';
        os << "started: " << started << '\n';
        os << "finished: " << finished << '\n';
        os << "exit_code: " << exit_code << '\n';
        if (!note.empty()) os << "note: " << note << '\n';
        os << "outputs:\n";
        for (const auto& o : outputs) os << "  " << o << '\n';
        os << "config:\n";
        std::istringstream lines(config_text);
        std::string line;
        while (std::getline(lines, line)) os << "  " << line << '\n';
    }
};

namespace detail {

/// Runs body(dir, manifest) and writes the manifest whatever happens.
template <class Body>
int with_manifest(const std::string& name, const ExperimentConfig& c, std::ostream& err, Body&& body) {
    namespace fs = std::filesystem;
    RunManifest m;
    m.subcommand = name;
    m.config_text = canonical_config_text(c);
    m.seed = c.seed;
    m.started = utc_timestamp();
    const fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        err << "error: cannot create output directory '" << c.out << "': " << ec.message() << '\n';
        return kExitUsage;
    }
    int code = kExitOk;
    try {
        code = body(dir, m);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        m.note = e.what();
        code = kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        m.note = e.what();
        code = kExitFailure;
    }
    m.exit_code = code;
    m.finished = utc_timestamp();
    m.write(dir);
    return code;
}

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& file, RunManifest& m) {
    std::ofstream os(dir / file);
    if (!os) throw std::runtime_error("cannot write " + (dir / file).string());
    m.outputs.push_back(file);
    return os;
}

inline nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return fmt_num(v);
}

}  // namespace detail

inline int cmd_verify_dois(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("verify-dois", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        const auto rows = operator_integral_checks(c);
        auto os = detail::open_output(dir, "dois.csv", m);
        write_check_csv(os, rows);
        const CheckRow* worst = nullptr;
        for (const auto& r : rows)
            if (!worst || !(r.residual <= worst->residual)) worst = &r;
        if (!worst) return int{kExitOk};
        out << "checks: " << rows.size() << "  worst: " << worst->check << " dim=" << worst->dim
            << " trial=" << worst->trial << " residual=" << fmt_num(worst->residual) << '\n';
        if (!(worst->residual <= c.tolerance)) {
            err << "tolerance " << fmt_num(c.tolerance) << " exceeded by " << worst->check << " dim=" << worst->dim
                << " trial=" << worst->trial << '\n';
            return int{kExitFailure};
        }
        return int{kExitOk};
    });
}

inline int cmd_verify_identities(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("verify-identities", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        const IdentitySuite s = identity_suite(c);
        {
            auto os = detail::open_output(dir, "identities.csv", m);
            write_identity_csv(os, s.rows);
        }
        {
            auto os = detail::open_output(dir, "identities_mixed.csv", m);
            write_identity_csv(os, s.mixed);
        }
        const IdentityRow* w = s.worst();
        if (!w) return int{kExitOk};
        out << "rows: " << s.rows.size() << "  worst: " << w->theorem << " dim=" << w->dim << " sigma=" << fmt_num(w->sigma)
            << " seed=" << w->seed << " residual=" << fmt_num(w->residual) << '\n';
        if (!(w->residual <= c.tolerance)) {
            err << "tolerance " << fmt_num(c.tolerance) << " exceeded by " << w->theorem << " dim=" << w->dim
                << " sigma=" << fmt_num(w->sigma) << " seed=" << w->seed << " residual=" << fmt_num(w->residual) << '\n';
            return int{kExitFailure};
        }
        return int{kExitOk};
    });
}

inline int cmd_scan(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("scan", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        const ScanResult res = scan(c);
        {
            auto os = detail::open_output(dir, "scan.csv", m);
            write_scan_csv(os, res);
        }
        nlohmann::ordered_json j;
        j["schema"] = kScanCsvVersion;
        j["config_hash"] = config_hash(c);
        j["config"] = canonical_config_text(c);
        j["wall_seconds"] = res.wall_seconds;
        j["max_identity_residual"] = res.max_identity_residual;
        double global = 0.0;
        for (const auto& s : res.cells) {
            j["cells"].push_back({{"dim", s.cell.dim},
                                  {"p", fmt_p(s.cell.p)},
                                  {"sigma", s.cell.sigma},
                                  {"max_ratio", s.max_ratio},
                                  {"max_ratio_sigma_sup", s.max_ratio_sigma_sup},
                                  {"ok", s.ok},
                                  {"failures", s.failures}});
            if (std::isfinite(s.cell.p)) global = std::max(global, s.max_ratio);
        }
        j["empirical_constant_finite_p"] = global;
        {
            auto os = detail::open_output(dir, "scan_summary.json", m);
            os << j.dump(2) << '\n';
        }
        for (const auto& s : res.cells)
            out << "dim=" << s.cell.dim << " p=" << fmt_p(s.cell.p) << " sigma=" << fmt_num(s.cell.sigma)
                << " max_ratio=" << fmt_num(s.max_ratio) << " ok=" << s.ok << " failures=" << s.failures << '\n';
        if (!res.all_identities_hold()) {
            err << "identity residual above tolerance in at least one trial (max " << fmt_num(res.max_identity_residual)
                << ")\n";
            return int{kExitFailure};
        }
        return int{kExitOk};
    });
}

/// Hill climbing per configured dimension.  With p = 2 the run is a
/// control: the summary also records the random-scan maximum for the same
/// dimensions.
inline int cmd_search(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("search", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        std::vector<SearchResult> runs;
        for (int d : c.search.dims) runs.push_back(counterexample_search(c, d));
        {
            auto os = detail::open_output(dir, "search.csv", m);
            write_search_csv(os, runs);
        }
        nlohmann::ordered_json j;
        j["config_hash"] = config_hash(c);
        j["p"] = fmt_p(c.search.p);
        for (const auto& r : runs) {
            j["runs"].push_back({{"dim", r.dim},
                                 {"best_ratio", detail::number(r.best.ratio)},
                                 {"proposals", r.trajectory.empty() ? 0 : r.trajectory.back().iteration}});
            out << "dim=" << r.dim << " p=" << fmt_p(r.p) << " best_ratio=" << fmt_num(r.best.ratio) << '\n';
        }
        if (c.search.p == 2.0) {
            ExperimentConfig sc = c;
            sc.dims = c.search.dims;
            sc.ps = {2.0};
            sc.sigmas = {c.search.sigma};
            const ScanResult res = scan(sc);
            double ceiling = 0.0;
            for (const auto& s : res.cells) ceiling = std::max(ceiling, s.max_ratio);
            double best = 0.0;
            for (const auto& r : runs) best = std::max(best, r.best.ratio);
            j["control"] = {{"scan_ceiling", ceiling}, {"search_best", best}, {"below_scan_ceiling", best < ceiling}};
            out << "control: scan_ceiling=" << fmt_num(ceiling) << " search_best=" << fmt_num(best) << '\n';
        }
        auto os = detail::open_output(dir, "search_summary.json", m);
        os << j.dump(2) << '\n';
        return int{kExitOk};
    });
}

inline int cmd_converge(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("converge", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        const ConvergenceStudy s = convergence_study(c);
        {
            auto os = detail::open_output(dir, "converge.csv", m);
            write_convergence_csv(os, s);
        }
        nlohmann::ordered_json j;
        j["config_hash"] = config_hash(c);
        bool decreasing = true;
        for (std::size_t i = 0; i < s.fits.size(); ++i) {
            j["fits"].push_back({{"pair", i},
                                 {"slope", s.fits[i].slope},
                                 {"constant", s.fits[i].constant},
                                 {"decreasing", s.fits[i].decreasing}});
            out << "pair=" << i << " slope=" << fmt_num(s.fits[i].slope) << " C=" << fmt_num(s.fits[i].constant)
                << " decreasing=" << (s.fits[i].decreasing ? "yes" : "no") << '\n';
            decreasing = decreasing && s.fits[i].decreasing;
        }
        auto os = detail::open_output(dir, "converge_summary.json", m);
        os << j.dump(2) << '\n';
        if (!decreasing) {
            err << "error sequence not strictly decreasing for at least one pair\n";
            return int{kExitFailure};
        }
        return int{kExitOk};
    });
}

inline int cmd_sharp(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
    return detail::with_manifest("sharp", c, err, [&](const std::filesystem::path& dir, RunManifest& m) {
        const auto rows = sharp_study(c);
        auto os = detail::open_output(dir, "sharp.csv", m);
        write_sharp_csv(os, rows);
        double constant = 0.0;
        for (const auto& r : rows) constant = std::max(constant, r.ratio);
        out << "rows: " << rows.size() << "  constant: " << fmt_num(constant) << '\n';
        return int{kExitOk};
    });
}

struct BesovRequest {
    std::optional<std::string> file;
    std::optional<std::string> inline_terms;
    std::optional<double> sigma;  // random function of this band
    int terms = 10;
    std::uint64_t seed = 1;
    bool real = false;
    bool approximate = false;
};

/// Prints both norms and the per-piece table.  Reads terms from a file,
/// from an inline list, or draws a random function.
inline int cmd_besov(const BesovRequest& req, std::ostream& out, std::ostream& err) {
    TrigPolynomial2 f;
    try {
        if (req.file) {
            std::ifstream in(*req.file);
            if (!in) {
                err << "error: cannot open '" << *req.file << "'\n";
                return kExitUsage;
            }
            f = read_trig(in, req.real);
        } else if (req.inline_terms) {
            f = parse_trig(*req.inline_terms, req.real);
        } else if (req.sigma) {
            f = random_bandlimited(*req.sigma, req.terms, req.seed);
        } else {
            err << "error: besov needs --file, --inline or --sigma\n";
            return kExitUsage;
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const BesovReport rep = besov_report(f);
    out << "sigma: " << fmt_num(f.sigma()) << '\n';
    out << "sup_norm: " << fmt_num(sup_norm_value(f)) << '\n';
    out << "inhomogeneous: " << fmt_num(rep.inhomogeneous) << '\n';
    out << "homogeneous: " << fmt_num(rep.homogeneous) << '\n';
    out << "low_piece_sup: " << fmt_num(rep.low_sup) << '\n';
    out << "n,terms,sup,weighted\n";
    for (const auto& p : rep.pieces)
        out << p.n << ',' << p.terms << ',' << fmt_num(p.sup) << ',' << fmt_num(p.weighted) << '\n';
    if (req.approximate) {
        try {
            const GridEstimate g = grid_besov_inhomogeneous(sample_on_grid(f, 128), std::max(f.sigma(), 1.0));
            out << "grid_inhomogeneous: " << fmt_num(g.value) << " +- " << fmt_num(g.error_estimate) << '\n';
        } catch (const std::invalid_argument& e) {
            out << "grid_inhomogeneous: unavailable (" << e.what() << ")\n";
        }
    }
    return kExitOk;
}

}  // namespace bivop
