#pragma once

// Experiment driver: Lipschitz ratios of (A, B) -> f(A, B) in Schatten
// norms, the identity suite for operator differences, randomized checks of
// the operator integrals, hill-climbing search for large ratios, and the
// regularization study.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "bivop/besov.hpp"
#include "bivop/opcalc.hpp"
#include "bivop/toi.hpp"

namespace bivop {

// ---------------------------------------------------------------------------
// Configuration

struct SearchConfig {
    double p = kInf;
    std::vector<int> dims{4, 8, 16};
    double sigma = 4.0;
    int restarts = 16;
    int iterations = 500;
    int rejection_limit = 50;  // consecutive rejections before the step is halved
    double initial_step = 0.25;
};

struct ConvergeConfig {
    int dim = 8;
    int pairs = 10;
    int k_min = 0;
    int k_max = 20;
};

struct IdentityConfig {
    std::vector<int> dims{2, 3, 4, 8, 16};
    std::vector<double> sigmas{1.0, 4.0, 16.0};
    int seeds = 20;
    double scale = 1.0;  // S_2 size of A1 - A2 and B1 - B2
};

struct SharpConfig {
    std::vector<int> dims{4, 8, 16, 32};
    std::vector<double> sigmas{1, 2, 4, 8, 16, 32, 64};
    int trials = 20;
};

struct ExperimentConfig {
    std::vector<int> dims{4, 8, 16, 32};
    std::vector<double> ps{1.0, 1.5, 2.0};
    std::vector<double> sigmas{1.0, 4.0};
    int trials = 100;
    double scale = 0.1;             // Schatten-p size of A1 - A2 and B1 - B2
    double spectrum_radius = 8.0;   // base spectra uniform on [-r, r]
    int terms = 10;                 // frequency draws per random function
    std::uint64_t seed = 20240601;
    double tolerance = 1e-8;
    int threads = 0;                // 0: hardware concurrency
    std::string out = "out";
    SearchConfig search;
    ConvergeConfig converge;
    IdentityConfig identities;
    SharpConfig sharp;
    int doi_trials = 50;
    int duality_trials = 20;
    int duality_probes = 10;
};

inline void validate(const ExperimentConfig& c) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (c.trials < 1) fail("trials must be >= 1");
    if (c.dims.empty() || c.ps.empty() || c.sigmas.empty()) fail("dims, ps and sigmas must be nonempty");
    for (int d : c.dims)
        if (d < 2) fail("dims must be >= 2");
    for (double p : c.ps)
        if (!(p >= 1.0)) fail("p entries must lie in [1, inf]");
    for (double s : c.sigmas)
        if (!(s > 0.0)) fail("sigmas must be positive");
    if (!(c.scale > 0.0)) fail("scale must be positive");
    if (!(c.spectrum_radius > 0.0)) fail("spectrum_radius must be positive");
    if (c.terms < 1) fail("terms must be >= 1");
    if (!(c.tolerance >= 0.0)) fail("tolerance must be nonnegative");
    if (c.threads < 0) fail("threads must be >= 0");
    if (!(c.search.p > 2.0) && c.search.p != 2.0) fail("search.p must be 2 (control) or > 2");
    if (c.search.restarts < 1 || c.search.iterations < 0 || c.search.rejection_limit < 1) fail("bad search budget");
    for (int d : c.search.dims)
        if (d < 2) fail("search.dims must be >= 2");
    if (c.converge.dim < 1 || c.converge.pairs < 1 || c.converge.k_max < c.converge.k_min) fail("bad converge section");
    if (c.identities.seeds < 1) fail("identities.seeds must be >= 1");
    for (int d : c.identities.dims)
        if (d < 1) fail("identities.dims must be >= 1");
    if (c.sharp.trials < 1) fail("sharp.trials must be >= 1");
}

// ---------------------------------------------------------------------------
// Formatting helpers shared by the CSV writers

inline std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_p(double p) { return std::isinf(p) ? "inf" : fmt_num(p); }

// ---------------------------------------------------------------------------
// Work pool: runs job(i) for i in [0, count) and keeps results by index.

template <class R, class Job>
std::vector<R> run_indexed(std::size_t count, int threads, Job&& job) {
    std::vector<R> out(count);
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) out[i] = job(i);
    };
    if (workers <= 1) {
        worker();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

// ---------------------------------------------------------------------------
// Lipschitz ratios

struct RatioReport {
    int dim = 0;
    double p = 2.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::size_t cell = 0;
    int trial = 0;
    double norm_da = 0.0;
    double norm_db = 0.0;
    double opdiff = 0.0;
    double besov = 0.0;
    double sup = 0.0;
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double ratio_sigma_sup = std::numeric_limits<double>::quiet_NaN();  // opdiff / (sigma ||f||_inf max(...))
    double identity_residual = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";  // ok | degenerate | identity_failure | error: ...
    double wall_seconds = 0.0;

    bool degenerate() const { return status == "degenerate"; }
};

/// rho = ||f(A1,B1) - f(A2,B2)||_p / (||f||_B max(||A1-A2||_p, ||B1-B2||_p)),
/// the operator difference taken from the double operator integrals.
template <Bivariate F>
RatioReport lipschitz_ratio(const F& f, double besov_norm, const OperatorPair& first, const OperatorPair& second,
                            double p) {
    RatioReport r;
    r.dim = static_cast<int>(first.dim());
    r.p = p;
    r.besov = besov_norm;
    r.norm_da = schatten_norm(first.a().matrix() - second.a().matrix(), p);
    r.norm_db = schatten_norm(first.b().matrix() - second.b().matrix(), p);
    r.opdiff = schatten_norm(eval_f_AB(f, first) - eval_f_AB(f, second), p);
    const double denom = besov_norm * std::max(r.norm_da, r.norm_db);
    if (!(denom > 0.0)) {
        r.status = "degenerate";
        return r;
    }
    r.ratio = r.opdiff / denom;
    return r;
}

inline RatioReport lipschitz_ratio(const TrigPolynomial2& f, const OperatorPair& first, const OperatorPair& second,
                                   double p) {
    RatioReport r = lipschitz_ratio(f, besov_norm_inhomogeneous(f), first, second, p);
    r.sigma = f.sigma();
    r.sup = sup_norm_value(f);
    const double d = r.sigma * r.sup * std::max(r.norm_da, r.norm_db);
    if (d > 0.0) r.ratio_sigma_sup = r.opdiff / d;
    return r;
}

/// ||X - Y||_F / ||Y||_F, or the absolute gap when Y = 0.
inline double relative_residual(const ComplexMatrix& x, const ComplexMatrix& y) {
    const double s = y.norm();
    return (x - y).norm() / (s > 0.0 ? s : 1.0);
}

struct ScanCell {
    int dim = 0;
    double p = 0.0;
    double sigma = 0.0;
};

struct CellSummary {
    ScanCell cell;
    double max_ratio = 0.0;
    double max_ratio_sigma_sup = 0.0;
    int ok = 0;
    int failures = 0;
};

struct ScanResult {
    std::vector<RatioReport> rows;
    std::vector<CellSummary> cells;
    double max_identity_residual = 0.0;
    double wall_seconds = 0.0;

    bool all_identities_hold() const {
        return std::none_of(rows.begin(), rows.end(), [](const RatioReport& r) { return r.status == "identity_failure"; });
    }
};

inline std::vector<ScanCell> scan_cells(const ExperimentConfig& c) {
    std::vector<ScanCell> cells;
    for (int d : c.dims)
        for (double p : c.ps)
            for (double s : c.sigmas) cells.push_back({d, p, s});
    return cells;
}

/// Random quadruple: base spectra uniform on [-r, r] in Haar bases, and
/// perturbations of Schatten-p size exactly `scale`.
struct RandomQuadruple {
    HermitianMatrix a1, b1, a2, b2;
};

inline RandomQuadruple draw_quadruple(Stream& rng, int n, double p, double scale, double radius) {
    RandomQuadruple q;
    q.a1 = random_hermitian_spectrum(rng, n, -radius, radius);
    q.b1 = random_hermitian_spectrum(rng, n, -radius, radius);
    q.a2 = q.a1 + random_unit_hermitian(rng, n, p) * scale;
    q.b2 = q.b1 + random_unit_hermitian(rng, n, p) * scale;
    return q;
}

/// One scan trial; the stream depends only on (seed, cell, trial).
inline RatioReport scan_trial(const ExperimentConfig& c, std::size_t cell_index, const ScanCell& cell, int trial) {
    const auto t0 = std::chrono::steady_clock::now();
    RatioReport r;
    try {
        Stream rng(c.seed, {static_cast<std::uint64_t>(cell_index), static_cast<std::uint64_t>(trial)});
        const TrigPolynomial2 f = random_bandlimited(cell.sigma, c.terms, rng.next_u64());
        const RandomQuadruple q = draw_quadruple(rng, cell.dim, cell.p, c.scale, c.spectrum_radius);
        const OperatorPair first(q.a1, q.b1);
        const OperatorPair second(q.a2, q.b2);
        r = lipschitz_ratio(f, first, second, cell.p);
        // sigma is the band of the draw, not the largest frequency that happened to land
        r.sigma = cell.sigma;
        const double d = cell.sigma * r.sup * std::max(r.norm_da, r.norm_db);
        r.ratio_sigma_sup = d > 0.0 ? r.opdiff / d : std::numeric_limits<double>::quiet_NaN();
        const Quadruple quad(q.a1, q.b1, q.a2, q.b2);
        const ComplexMatrix direct = eval_f_AB(f, first) - eval_f_AB(f, second);
        r.identity_residual = relative_residual(diff_full(f, quad, FullDifferenceRoute::via_a2_b1), direct);
        if (!(r.identity_residual <= c.tolerance)) r.status = "identity_failure";
    } catch (const std::exception& e) {
        r.status = std::string("error: ") + e.what();
    }
    r.dim = cell.dim;
    r.p = cell.p;
    r.sigma = cell.sigma;
    r.seed = c.seed;
    r.cell = cell_index;
    r.trial = trial;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline ScanResult scan(const ExperimentConfig& c) {
    validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    const auto cells = scan_cells(c);
    const std::size_t per_cell = static_cast<std::size_t>(c.trials);
    ScanResult res;
    res.rows = run_indexed<RatioReport>(cells.size() * per_cell, c.threads, [&](std::size_t i) {
        const std::size_t ci = i / per_cell;
        return scan_trial(c, ci, cells[ci], static_cast<int>(i % per_cell));
    });
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        CellSummary s;
        s.cell = cells[ci];
        for (std::size_t t = 0; t < per_cell; ++t) {
            const RatioReport& r = res.rows[ci * per_cell + t];
            if (r.status != "ok") {
                ++s.failures;
                continue;
            }
            ++s.ok;
            s.max_ratio = std::max(s.max_ratio, r.ratio);
            s.max_ratio_sigma_sup = std::max(s.max_ratio_sigma_sup, r.ratio_sigma_sup);
        }
        res.cells.push_back(s);
    }
    for (const auto& r : res.rows)
        if (std::isfinite(r.identity_residual)) res.max_identity_residual = std::max(res.max_identity_residual, r.identity_residual);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

inline constexpr const char* kScanCsvVersion = "bivop-scan-v1";

/// Wall time is left out so that reruns give identical bytes.
inline void write_scan_csv(std::ostream& os, const ScanResult& res) {
    os << "# " << kScanCsvVersion << '\n';
    os << "dim,p,sigma,cell,trial,seed,norm_dA,norm_dB,opdiff,besov_norm,sup_norm,ratio,ratio_sigma_sup,"
          "identity_residual,status\n";
    for (const auto& r : res.rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        os << r.dim << ',' << fmt_p(r.p) << ',' << fmt_num(r.sigma) << ',' << r.cell << ',' << r.trial << ',' << r.seed
           << ',' << fmt_num(r.norm_da) << ',' << fmt_num(r.norm_db) << ',' << fmt_num(r.opdiff) << ','
           << fmt_num(r.besov) << ',' << fmt_num(r.sup) << ',' << fmt_num(r.ratio) << ',' << fmt_num(r.ratio_sigma_sup)
           << ',' << fmt_num(r.identity_residual) << ',' << status << '\n';
    }
}

/// Largest over smallest per-dimension maximum of rho for fixed (p, sigma).
inline double dimension_spread(const std::vector<CellSummary>& cells, double p, double sigma) {
    double lo = kInf, hi = 0.0;
    for (const auto& s : cells)
        if (s.cell.p == p && s.cell.sigma == sigma && s.ok > 0) {
            lo = std::min(lo, s.max_ratio);
            hi = std::max(hi, s.max_ratio);
        }
    return lo > 0.0 && std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Identity suite

struct IdentityRow {
    std::string theorem;
    int dim = 0;
    double sigma = 0.0;
    int seed = 0;
    double residual = 0.0;
};

struct IdentitySuite {
    std::vector<IdentityRow> rows;   // asserted representations
    std::vector<IdentityRow> mixed;  // first term closing with E_B2, second opening with E_A2; recorded only

    const IdentityRow* worst() const {
        const IdentityRow* w = nullptr;
        for (const auto& r : rows)
            if (!w || !(r.residual <= w->residual)) w = &r;
        return w;
    }
};

/// Residuals ||route - direct||_F / ||direct||_F where direct comes from the
/// double operator integrals and route from the triple operator integrals.
inline IdentitySuite identity_suite(const ExperimentConfig& c) {
    struct Cell {
        int dim;
        double sigma;
        int seed;
    };
    std::vector<Cell> cells;
    for (int d : c.identities.dims)
        for (double s : c.identities.sigmas)
            for (int k = 0; k < c.identities.seeds; ++k) cells.push_back({d, s, k});
    struct Out {
        std::vector<IdentityRow> rows;
        IdentityRow mixed;
    };
    auto outs = run_indexed<Out>(cells.size(), c.threads, [&](std::size_t i) {
        const Cell& cell = cells[i];
        Stream rng(c.seed, {0x1d, static_cast<std::uint64_t>(cell.dim), static_cast<std::uint64_t>(cell.sigma * 1024),
                            static_cast<std::uint64_t>(cell.seed)});
        const TrigPolynomial2 f = random_bandlimited(cell.sigma, c.terms, rng.next_u64());
        const RandomQuadruple q = draw_quadruple(rng, cell.dim, 2.0, c.identities.scale, c.spectrum_radius);
        const Quadruple quad(q.a1, q.b1, q.a2, q.b2);
        const ComplexMatrix f11 = eval_f_AB(f, quad.e_a1, quad.e_b1);
        const ComplexMatrix f21 = eval_f_AB(f, quad.e_a2, quad.e_b1);
        const ComplexMatrix f22 = eval_f_AB(f, quad.e_a2, quad.e_b2);
        const ComplexMatrix first = diff_first_variable(f, q.a1, quad.e_a1, q.a2, quad.e_a2, quad.e_b1);
        const ComplexMatrix second = diff_second_variable(f, quad.e_a2, q.b1, quad.e_b1, q.b2, quad.e_b2);
        Out o;
        auto row = [&](const char* name, double res) { return IdentityRow{name, cell.dim, cell.sigma, cell.seed, res}; };
        o.rows.push_back(row("first_variable", relative_residual(first, f11 - f21)));
        o.rows.push_back(row("second_variable", relative_residual(second, f21 - f22)));
        for (auto route : {FullDifferenceRoute::via_a2_b1, FullDifferenceRoute::via_a1_b2})
            o.rows.push_back(row(route_name(route), relative_residual(diff_full(f, quad, route), f11 - f22)));
        o.mixed = row("full_mixed_B2_A2", relative_residual(diff_full_mixed(f, quad), f11 - f22));
        return o;
    });
    IdentitySuite s;
    for (auto& o : outs) {
        s.rows.insert(s.rows.end(), o.rows.begin(), o.rows.end());
        s.mixed.push_back(o.mixed);
    }
    return s;
}

inline void write_identity_csv(std::ostream& os, const std::vector<IdentityRow>& rows) {
    os << "# bivop-identities-v1\n";
    os << "theorem,dim,sigma,seed,residual\n";
    for (const auto& r : rows)
        os << r.theorem << ',' << r.dim << ',' << fmt_num(r.sigma) << ',' << r.seed << ',' << fmt_num(r.residual) << '\n';
}

// ---------------------------------------------------------------------------
// Randomized checks of the operator integrals against explicit sums

struct CheckRow {
    std::string check;
    int dim = 0;
    int trial = 0;
    double residual = 0.0;
};

namespace detail {

inline ComplexMatrix random_matrix(Stream& rng, Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
    return m;
}

template <class F>
ComplexMatrix projector_sum2(const F& f, const SpectralDecomposition& ea, const SpectralDecomposition& eb) {
    ComplexMatrix out = ComplexMatrix::Zero(ea.dim(), eb.dim());
    for (Eigen::Index i = 0; i < ea.dim(); ++i) {
        const ComplexMatrix p = ea.projector(i);
        for (Eigen::Index j = 0; j < eb.dim(); ++j) out += Complex(f(ea.eigenvalues(i), eb.eigenvalues(j))) * (p * eb.projector(j));
    }
    return out;
}

template <class K>
ComplexMatrix projector_sum3(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                             const SpectralDecomposition& e2, const ComplexMatrix& r, const SpectralDecomposition& e3) {
    ComplexMatrix out = ComplexMatrix::Zero(e1.dim(), e3.dim());
    for (Eigen::Index j = 0; j < e1.dim(); ++j) {
        const ComplexMatrix pt = e1.projector(j) * t;
        for (Eigen::Index k = 0; k < e2.dim(); ++k) {
            const ComplexMatrix ptqr = pt * e2.projector(k) * r;
            for (Eigen::Index l = 0; l < e3.dim(); ++l)
                out += Complex(psi(e1.eigenvalues(j), e2.eigenvalues(k), e3.eigenvalues(l))) * (ptqr * e3.projector(l));
        }
    }
    return out;
}

}  // namespace detail

/// Brute-force projector sums for the double and triple integrals (n <= 4),
/// and the trace pairings of both kinds against direct evaluation.
inline std::vector<CheckRow> operator_integral_checks(const ExperimentConfig& c) {
    std::vector<CheckRow> rows;
    for (int t = 0; t < c.doi_trials; ++t) {
        Stream rng(c.seed, {0xd0, static_cast<std::uint64_t>(t)});
        const int n = 1 + t % 4;
        const TrigPolynomial2 f = random_bandlimited(4.0, c.terms, rng.next_u64());
        const auto ea = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        const auto eb = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        const auto ec = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        rows.push_back({"doi_bruteforce", n, t, relative_residual(eval_f_AB(f, ea, eb), detail::projector_sum2(f, ea, eb))});
        const ComplexMatrix tm = detail::random_matrix(rng, n, n);
        const ComplexMatrix rm = detail::random_matrix(rng, n, n);
        const auto psi = divided_difference_kernel(f, 1 + t % 2);
        rows.push_back({"toi_bruteforce", n, t,
                        relative_residual(toi_eval(psi, ea, tm, eb, rm, ec), detail::projector_sum3(psi, ea, tm, eb, rm, ec))});
    }
    for (int t = 0; t < c.duality_trials; ++t) {
        Stream rng(c.seed, {0xd1, static_cast<std::uint64_t>(t)});
        const int n = 2 + t % 7;
        const TrigPolynomial2 f = random_bandlimited(4.0, c.terms, rng.next_u64());
        const auto e1 = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        const auto e2 = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        const auto e3 = eigh(random_hermitian_spectrum(rng, n, -c.spectrum_radius, c.spectrum_radius));
        const ComplexMatrix tm = detail::random_matrix(rng, n, n);
        const ComplexMatrix rm = detail::random_matrix(rng, n, n);
        const auto psi = divided_difference_kernel(f, 1 + t % 2);
        const ComplexMatrix w = toi_eval(psi, e1, tm, e2, rm, e3);
        double first = 0.0, second = 0.0;
        for (int probe = 0; probe < c.duality_probes; ++probe) {
            const ComplexMatrix q = detail::random_matrix(rng, n, n);
            const Complex want = (w * q).trace();
            const double scale = w.norm() * q.norm();
            first = std::max(first, std::abs(toi_functional_first_kind(psi, e1, tm, e2, rm, e3, q) - want) / scale);
            second = std::max(second, std::abs(toi_functional_second_kind(psi, e1, tm, e2, rm, e3, q) - want) / scale);
        }
        rows.push_back({"duality_first_kind", n, t, first});
        rows.push_back({"duality_second_kind", n, t, second});
    }
    return rows;
}

inline void write_check_csv(std::ostream& os, const std::vector<CheckRow>& rows) {
    os << "# bivop-dois-v1\n";
    os << "check,dim,trial,residual\n";
    for (const auto& r : rows) os << r.check << ',' << r.dim << ',' << r.trial << ',' << fmt_num(r.residual) << '\n';
}

// ---------------------------------------------------------------------------
// Counterexample search

/// Search state: matrices plus complex coefficients on a fixed frequency set.
struct SearchInstance {
    HermitianMatrix a1, b1, da, db;
    std::vector<FrequencyTerm> terms;

    TrigPolynomial2 function() const { return TrigPolynomial2(terms, false); }
};

struct SearchStep {
    int restart = 0;
    int iteration = 0;  // global proposal counter
    double best = 0.0;  // best rho so far over all restarts
    double step = 0.0;
};

struct SearchResult {
    int dim = 0;
    double p = 0.0;
    std::vector<SearchStep> trajectory;
    RatioReport best;
};

namespace detail {

inline HermitianMatrix unit_direction(const HermitianMatrix& h, double p, double scale) {
    const double n = schatten_norm(h.matrix(), p);
    return n > 0.0 ? h * (scale / n) : h;
}

inline RatioReport evaluate(const SearchInstance& s, double p) {
    const TrigPolynomial2 f = s.function();
    const OperatorPair first(s.a1, s.b1);
    const OperatorPair second(s.a1 + s.da, s.b1 + s.db);
    return lipschitz_ratio(f, first, second, p);
}

}  // namespace detail

/// Random-restart hill climbing on rho.  Proposals add Gaussian noise of
/// relative size `step` to every component of the current instance; the
/// perturbations are renormalized to Schatten-p size `scale` so that only
/// their directions move.
inline SearchResult counterexample_search(const ExperimentConfig& c, int dim, std::uint64_t salt = 0) {
    const SearchConfig& sc = c.search;
    const double p = sc.p;
    SearchResult res;
    res.dim = dim;
    res.p = p;
    double best = -1.0;
    int counter = 0;
    for (int restart = 0; restart < sc.restarts; ++restart) {
        Stream rng(c.seed, {0x5ea, salt, static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(restart)});
        SearchInstance cur;
        {
            const TrigPolynomial2 f0 = random_bandlimited(sc.sigma, c.terms, rng.next_u64());
            cur.terms = f0.terms();
            const RandomQuadruple q = draw_quadruple(rng, dim, p, c.scale, c.spectrum_radius);
            cur.a1 = q.a1;
            cur.b1 = q.b1;
            cur.da = q.a2 - q.a1;
            cur.db = q.b2 - q.b1;
        }
        RatioReport cur_rep = detail::evaluate(cur, p);
        double cur_val = cur_rep.degenerate() ? 0.0 : cur_rep.ratio;
        if (cur_val > best) {
            best = cur_val;
            res.best = cur_rep;
        }
        double step = sc.initial_step;
        res.trajectory.push_back({restart, counter, best, step});
        int rejections = 0;
        for (int it = 0; it < sc.iterations; ++it) {
            ++counter;
            SearchInstance prop = cur;
            const double radius = c.spectrum_radius;
            prop.a1 = prop.a1 + random_hermitian(rng, dim) * (step * radius / std::sqrt(static_cast<double>(dim)));
            prop.b1 = prop.b1 + random_hermitian(rng, dim) * (step * radius / std::sqrt(static_cast<double>(dim)));
            prop.da = detail::unit_direction(prop.da + random_unit_hermitian(rng, dim, p) * (step * c.scale), p, c.scale);
            prop.db = detail::unit_direction(prop.db + random_unit_hermitian(rng, dim, p) * (step * c.scale), p, c.scale);
            double mag = 0.0;
            for (const auto& t : prop.terms) mag = std::max(mag, std::abs(t.coeff));
            for (auto& t : prop.terms) t.coeff += step * mag * rng.complex_normal();
            RatioReport rep;
            try {
                rep = detail::evaluate(prop, p);
            } catch (const NumericalError&) {
                rep.status = "degenerate";
            }
            const double val = rep.degenerate() ? 0.0 : rep.ratio;
            if (val > cur_val) {
                cur = std::move(prop);
                cur_val = val;
                rejections = 0;
                if (val > best) {
                    best = val;
                    res.best = rep;
                }
            } else if (++rejections >= sc.rejection_limit) {
                step *= 0.5;
                rejections = 0;
            }
            res.trajectory.push_back({restart, counter, best, step});
        }
    }
    res.best.seed = c.seed;
    return res;
}

inline void write_search_csv(std::ostream& os, const std::vector<SearchResult>& runs) {
    os << "# bivop-search-v1\n";
    os << "dim,p,restart,iteration,best_ratio,step\n";
    for (const auto& r : runs)
        for (const auto& s : r.trajectory)
            os << r.dim << ',' << fmt_p(r.p) << ',' << s.restart << ',' << s.iteration << ',' << fmt_num(s.best) << ','
               << fmt_num(s.step) << '\n';
}

// ---------------------------------------------------------------------------
// Regularization study

/// ||A1(eps) - A2(eps) - (A1 - A2)||_{S_2} for each eps.
inline std::vector<double> regularization_convergence(const HermitianMatrix& a1, const HermitianMatrix& a2,
                                                      const std::vector<double>& eps_schedule) {
    const auto e1 = eigh(a1);
    const auto e2 = eigh(a2);
    const ComplexMatrix diff = a1.matrix() - a2.matrix();
    std::vector<double> out;
    out.reserve(eps_schedule.size());
    for (double eps : eps_schedule) out.push_back((regularize(e1, eps) - regularize(e2, eps) - diff).norm());
    return out;
}

inline std::vector<double> dyadic_schedule(int k_min, int k_max) {
    std::vector<double> eps;
    for (int k = k_min; k <= k_max; ++k) eps.push_back(std::ldexp(1.0, -k));
    return eps;
}

struct SlopeFit {
    double slope = 0.0;      // least squares fit of log(err) against log(eps)
    double constant = 0.0;   // max err / eps over the schedule
    bool decreasing = false;
};

inline SlopeFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& err) {
    SlopeFit fit;
    const std::size_t n = eps.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(eps[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        fit.constant = std::max(fit.constant, err[i] / eps[i]);
    }
    const double dn = static_cast<double>(n);
    fit.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    fit.decreasing = true;
    for (std::size_t i = 1; i < n; ++i)
        if (!(err[i] < err[i - 1])) fit.decreasing = false;
    return fit;
}

struct ConvergenceRow {
    int pair = 0;
    double eps = 0.0;
    double error = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    std::vector<SlopeFit> fits;  // one per pair
};

/// GUE pairs of the configured size over eps = 2^-k_min .. 2^-k_max.
inline ConvergenceStudy convergence_study(const ExperimentConfig& c) {
    ConvergenceStudy s;
    const auto eps = dyadic_schedule(c.converge.k_min, c.converge.k_max);
    for (int i = 0; i < c.converge.pairs; ++i) {
        Stream rng(c.seed, {0xc0, static_cast<std::uint64_t>(i)});
        const HermitianMatrix a1 = random_hermitian(rng, c.converge.dim);
        const HermitianMatrix a2 = random_hermitian(rng, c.converge.dim);
        const auto err = regularization_convergence(a1, a2, eps);
        for (std::size_t k = 0; k < eps.size(); ++k) s.rows.push_back({i, eps[k], err[k]});
        s.fits.push_back(fit_loglog(eps, err));
    }
    return s;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceStudy& s) {
    os << "# bivop-converge-v1\n";
    os << "pair,eps,error\n";
    for (const auto& r : s.rows) os << r.pair << ',' << fmt_num(r.eps) << ',' << fmt_num(r.error) << '\n';
}

// ---------------------------------------------------------------------------
// Sharp-kernel estimate study

struct SharpRow {
    int dim = 0;
    double sigma = 0.0;
    int trial = 0;
    double norm_sharp = 0.0;  // ||f#(A,B)||_inf
    double sup = 0.0;
    double coefficient_l1 = 0.0;
    double ratio = 0.0;       // norm_sharp / ((1 + sigma) sup)
};

/// ||f#(A,B)||_inf / ((1 + sigma) ||f||_inf) over random pairs with spectra
/// in [-r, r].
inline std::vector<SharpRow> sharp_study(const ExperimentConfig& c) {
    struct Cell {
        int dim;
        double sigma;
        int trial;
    };
    std::vector<Cell> cells;
    for (int d : c.sharp.dims)
        for (double s : c.sharp.sigmas)
            for (int t = 0; t < c.sharp.trials; ++t) cells.push_back({d, s, t});
    return run_indexed<SharpRow>(cells.size(), c.threads, [&](std::size_t i) {
        const Cell& cell = cells[i];
        Stream rng(c.seed, {0x5a, static_cast<std::uint64_t>(cell.dim), static_cast<std::uint64_t>(cell.sigma * 1024),
                            static_cast<std::uint64_t>(cell.trial)});
        const TrigPolynomial2 f = random_bandlimited(cell.sigma, c.terms, rng.next_u64());
        const OperatorPair pair(random_hermitian_spectrum(rng, cell.dim, -c.spectrum_radius, c.spectrum_radius),
                                random_hermitian_spectrum(rng, cell.dim, -c.spectrum_radius, c.spectrum_radius));
        SharpRow r;
        r.dim = cell.dim;
        r.sigma = cell.sigma;
        r.trial = cell.trial;
        r.norm_sharp = operator_norm(eval_f_sharp(f, pair));
        r.sup = sup_norm_value(f);
        r.coefficient_l1 = f.coefficient_l1();
        r.ratio = r.norm_sharp / ((1.0 + cell.sigma) * r.sup);
        return r;
    });
}

inline void write_sharp_csv(std::ostream& os, const std::vector<SharpRow>& rows) {
    os << "# bivop-sharp-v1\n";
    os << "dim,sigma,trial,norm_sharp,sup_norm,coefficient_l1,ratio\n";
    for (const auto& r : rows)
        os << r.dim << ',' << fmt_num(r.sigma) << ',' << r.trial << ',' << fmt_num(r.norm_sharp) << ',' << fmt_num(r.sup)
           << ',' << fmt_num(r.coefficient_l1) << ',' << fmt_num(r.ratio) << '\n';
}

}  // namespace bivop
