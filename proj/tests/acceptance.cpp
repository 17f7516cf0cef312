// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "bivop/cli.hpp"

using namespace bivop;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v, int digits = 3) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

Outcome identity_suite_criterion() {
    ExperimentConfig c;
    c.threads = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const IdentitySuite s = identity_suite(c);
    const double wall = seconds_since(t0);
    std::map<std::string, std::pair<double, int>> per;  // worst residual, count
    for (const auto& r : s.rows) {
        auto& e = per[r.theorem];
        e.first = std::max(e.first, r.residual);
        ++e.second;
    }
    bool ok = wall <= 60.0;
    std::string d;
    for (const auto& [name, e] : per) {
        ok = ok && e.first <= 1e-8;
        d += name + " max=" + num(e.first) + " (n=" + std::to_string(e.second) + ") ";
    }
    double mixed = 0.0;
    for (const auto& r : s.mixed) mixed = std::max(mixed, r.residual);
    d += "| mixed pairing max=" + num(mixed) + " (not asserted) | " + num(wall) + " s";
    return {ok, d};
}

struct CheckMaxima {
    std::map<std::string, std::pair<double, int>> by_check;
};

CheckMaxima run_checks() {
    ExperimentConfig c;  // 50 brute-force trials, 20 duality instances x 10 probes
    CheckMaxima m;
    for (const auto& r : operator_integral_checks(c)) {
        auto& e = m.by_check[r.check];
        e.first = std::max(e.first, r.residual);
        ++e.second;
    }
    return m;
}

Outcome bruteforce_criterion(const CheckMaxima& m) {
    const auto& t = m.by_check.at("toi_bruteforce");
    const auto& d = m.by_check.at("doi_bruteforce");
    return {t.first <= 1e-12 && d.first <= 1e-12 && t.second == 50 && d.second == 50,
            "toi max=" + num(t.first) + " over " + std::to_string(t.second) + ", doi max=" + num(d.first) + " over " +
                std::to_string(d.second)};
}

Outcome duality_criterion(const CheckMaxima& m) {
    const auto& f = m.by_check.at("duality_first_kind");
    const auto& s = m.by_check.at("duality_second_kind");
    return {f.first <= 1e-10 && s.first <= 1e-10 && f.second == 20,
            "first kind max=" + num(f.first) + ", second kind max=" + num(s.first) + " over " + std::to_string(f.second) +
                " instances x 10 probes"};
}

Outcome besov_criterion() {
    // partition of unity on 10^4 log-spaced points
    double worst_partition = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double t = std::pow(10.0, -4.0 + 8.0 * i / 9999.0);
        double homog = 0.0;
        for (int n = -40; n <= 40; ++n) homog += lp_weight(t, n);
        double inhom = lp_weight_zero(t);
        for (int n = 1; n <= 40; ++n) inhom += lp_weight(t, n);
        worst_partition = std::max({worst_partition, std::abs(homog - 1.0), std::abs(inhom - 1.0)});
    }
    // coefficient-level reconstruction
    bool weights_exact = true;
    double worst_coeff = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const TrigPolynomial2 f = random_bandlimited(std::ldexp(1.0, static_cast<int>(seed % 7)), 12, seed, {8, true});
        for (const auto& t : f.terms()) {
            double w = lp_weight_zero(t.radius());
            for (int n = 1; n <= 12; ++n) w += lp_weight(t.radius(), n);
            weights_exact = weights_exact && w == 1.0;
        }
        auto rebuilt = lp_piece_zero(f).spectrum();
        for (int n = 1; n <= 12; ++n)
            for (const auto& [xi, c] : lp_piece(f, n).spectrum()) rebuilt[xi] += c;
        for (const auto& [xi, c] : f.spectrum()) {
            const auto it = rebuilt.find(xi);
            const double err = it == rebuilt.end() ? kInf : std::abs(it->second - c) / std::abs(c);
            worst_coeff = std::max(worst_coeff, err);
        }
    }
    // constants
    bool constants_ok = true;
    for (Complex c : {Complex(1.0), Complex(-2.5), Complex(3.0, 4.0), Complex(1e-7)}) {
        const BesovReport r = besov_report(TrigPolynomial2::constant(c));
        constants_ok = constants_ok && r.homogeneous == 0.0 && r.inhomogeneous == std::abs(c);
    }
    const bool ok = worst_partition <= 1e-10 && weights_exact && worst_coeff <= 4 * std::numeric_limits<double>::epsilon() &&
                    constants_ok;
    return {ok, "partition max dev=" + num(worst_partition) + ", weights sum to 1 bitwise: " +
                    (weights_exact ? "yes" : "no") + ", coefficient rel err max=" + num(worst_coeff) +
                    ", constants: " + (constants_ok ? "ok" : "wrong")};
}

Outcome regularization_criterion() {
    ExperimentConfig c;  // 10 GUE pairs, 8 x 8, eps = 2^0 .. 2^-20
    const ConvergenceStudy s = convergence_study(c);
    double lo = kInf, hi = 0.0, cmax = 0.0;
    bool decreasing = true;
    for (const auto& f : s.fits) {
        lo = std::min(lo, f.slope);
        hi = std::max(hi, f.slope);
        cmax = std::max(cmax, f.constant);
        decreasing = decreasing && f.decreasing;
    }
    return {decreasing && lo >= 1.0, "decreasing: " + std::string(decreasing ? "yes" : "no") + ", fitted slopes " +
                                         num(lo, 6) + ".." + num(hi, 6) + " over " + std::to_string(s.fits.size()) +
                                         " pairs, max C=" + num(cmax)};
}

struct ScanOutcomes {
    Outcome finite_p;
    Outcome operator_norm;
};

ScanOutcomes scan_criteria() {
    ExperimentConfig c;
    c.ps = {1.0, 1.5, 2.0, kInf};
    c.sigmas = {1.0, 4.0};
    c.trials = 100;
    c.threads = 0;
    const ScanResult r = scan(c);
    ScanOutcomes o;

    bool ok = r.wall_seconds <= 600.0 && r.all_identities_hold();
    double worst_spread = 0.0, constant = 0.0;
    int failures = 0;
    for (const auto& s : r.cells) failures += s.failures;
    for (double p : {1.0, 1.5, 2.0})
        for (double sigma : c.sigmas) {
            const double spread = dimension_spread(r.cells, p, sigma);
            ok = ok && spread <= 3.0;
            worst_spread = std::max(worst_spread, spread);
        }
    for (const auto& s : r.cells)
        if (std::isfinite(s.cell.p)) constant = std::max(constant, s.max_ratio);
    o.finite_p = {ok && failures == 0, "worst max/min of per-dim cell maxima=" + num(worst_spread) +
                                           ", empirical constant=" + num(constant, 4) + ", identity residual max=" +
                                           num(r.max_identity_residual) + ", failed trials=" + std::to_string(failures) +
                                           ", scan wall " + num(r.wall_seconds) + " s"};

    std::map<int, double> by_dim;
    std::string per_sigma;
    for (const auto& s : r.cells)
        if (std::isinf(s.cell.p)) by_dim[s.cell.dim] = std::max(by_dim[s.cell.dim], s.max_ratio);
    for (double sigma : c.sigmas) {
        double d4 = 0.0, d32 = 0.0;
        for (const auto& s : r.cells)
            if (std::isinf(s.cell.p) && s.cell.sigma == sigma) {
                if (s.cell.dim == 4) d4 = s.max_ratio;
                if (s.cell.dim == 32) d32 = s.max_ratio;
            }
        per_sigma += " sigma=" + num(sigma) + ": " + num(d4, 4) + " -> " + num(d32, 4) + ";";
    }
    std::string trend;
    for (const auto& [d, v] : by_dim) trend += " " + std::to_string(d) + ":" + num(v, 4);
    o.operator_norm = {by_dim[32] > by_dim[4], "max rho by dim" + trend + " |" + per_sigma};
    return o;
}

Outcome sharp_criterion() {
    ExperimentConfig c;
    c.threads = 0;
    const auto rows = sharp_study(c);
    double constant = 0.0;
    bool finite = true, coefficient_bound = true;
    std::map<double, double> by_sigma;
    for (const auto& r : rows) {
        finite = finite && std::isfinite(r.ratio);
        coefficient_bound = coefficient_bound && r.norm_sharp <= r.coefficient_l1 * (1 + 1e-12);
        constant = std::max(constant, r.ratio);
        by_sigma[r.sigma] = std::max(by_sigma[r.sigma], r.ratio);
    }
    std::string trend;
    for (const auto& [s, v] : by_sigma) trend += " " + num(s) + ":" + num(v, 3);
    return {finite && coefficient_bound && std::isfinite(constant),
            "constant=" + num(constant, 4) + " over " + std::to_string(rows.size()) + " instances; max by sigma" + trend};
}

Outcome determinism_criterion() {
    ExperimentConfig base;
    base.dims = {3, 5};
    base.ps = {1.0, kInf};
    base.sigmas = {2.0};
    base.trials = 3;
    base.threads = 2;
    base.identities.dims = {2, 4};
    base.identities.sigmas = {1.0};
    base.identities.seeds = 2;
    base.doi_trials = 4;
    base.duality_trials = 2;
    base.duality_probes = 2;
    base.search.dims = {3};
    base.search.restarts = 2;
    base.search.iterations = 10;
    base.converge.pairs = 2;
    base.sharp.dims = {3};
    base.sharp.sigmas = {1, 8};
    base.sharp.trials = 2;
    using Command = int (*)(const ExperimentConfig&, std::ostream&, std::ostream&);
    const std::vector<std::pair<Command, std::vector<std::string>>> commands = {
        {cmd_scan, {"scan.csv"}},
        {cmd_verify_identities, {"identities.csv", "identities_mixed.csv"}},
        {cmd_verify_dois, {"dois.csv"}},
        {cmd_search, {"search.csv"}},
        {cmd_converge, {"converge.csv"}},
        {cmd_sharp, {"sharp.csv"}},
    };
    const fs::path root = fs::temp_directory_path() / "bivop_acceptance_determinism";
    fs::remove_all(root);
    int compared = 0;
    std::string differing;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        std::string bytes[2];
        for (int run = 0; run < 2; ++run) {
            ExperimentConfig c = base;
            c.out = (root / (std::to_string(i) + (run ? "b" : "a"))).string();
            std::ostringstream out, err;
            commands[i].first(c, out, err);
            for (const auto& file : commands[i].second) {
                std::ifstream in(fs::path(c.out) / file);
                std::stringstream ss;
                ss << in.rdbuf();
                bytes[run] += ss.str();
            }
        }
        ++compared;
        if (bytes[0] != bytes[1] || bytes[0].empty()) differing += " " + commands[i].second.front();
    }
    fs::remove_all(root);
    return {differing.empty(), std::to_string(compared) + " subcommands run twice" +
                                   (differing.empty() ? ", all CSV byte-identical" : ", differing:" + differing)};
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << name << ": " << o.detail << std::endl;
        if (!o.pass) ++failed;
    };
    auto guarded = [](const std::function<Outcome()>& f) {
        try {
            return f();
        } catch (const std::exception& e) {
            return Outcome{false, std::string("exception: ") + e.what()};
        }
    };
    report(1, "identity suite", guarded(identity_suite_criterion));
    CheckMaxima checks;
    std::string check_error;
    try {
        checks = run_checks();
    } catch (const std::exception& e) {
        check_error = e.what();
    }
    report(2, "brute-force oracle", check_error.empty() ? guarded([&] { return bruteforce_criterion(checks); })
                                                        : Outcome{false, "exception: " + check_error});
    report(3, "duality realization", check_error.empty() ? guarded([&] { return duality_criterion(checks); })
                                                         : Outcome{false, "exception: " + check_error});
    report(4, "Besov machinery", guarded(besov_criterion));
    report(5, "regularization", guarded(regularization_criterion));
    ScanOutcomes scans;
    try {
        scans = scan_criteria();
    } catch (const std::exception& e) {
        scans.finite_p = scans.operator_norm = Outcome{false, std::string("exception: ") + e.what()};
    }
    report(6, "Lipschitz bound footprint (p = 1, 1.5, 2)", scans.finite_p);
    report(7, "operator-norm contrast (p = inf)", scans.operator_norm);
    report(8, "f# estimate footprint", guarded(sharp_criterion));
    report(9, "CLI determinism", guarded(determinism_criterion));
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
