#pragma once

// Littlewood-Paley analysis of trigonometric polynomials on R^2 and the
// Besov norms built from it:
//
//   homogeneous    sum_{n in Z}  2^n ||f_n||_inf
//   inhomogeneous  ||f^[0]||_inf + sum_{n >= 1} 2^n ||f_n||_inf
//
// where f_n multiplies the coefficient at frequency xi by w(|xi|/2^n) and
// f^[0] by 1 - sum_{n>=1} w(|xi|/2^n).  For trigonometric polynomials all of
// this is exact coefficient arithmetic; only the sup norms are numerical.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bivop/linalg.hpp"
#include "bivop/rng.hpp"

namespace bivop {

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Window

/// Dyadic window: zero outside (1/2, 2), sin^2 rise on [1/2, 1] in the
/// variable log2(2t), and on [1, 2] the complementary fall defined literally
/// as 1 - w(t/2).  Because of that definition w(t) + w(t/2) == 1 holds
/// exactly in floating point on [1, 2].  The profile is C^1.
inline double window_value(double t) {
    if (!(t > 0.5) || !(t < 2.0)) return 0.0;
    if (t <= 1.0) {
        const double s = std::clamp(std::log2(2.0 * t), 0.0, 1.0);
        const double v = std::sin(0.5 * kPi * s);
        return v * v;
    }
    return 1.0 - window_value(0.5 * t);
}

/// Weight of the n-th Littlewood-Paley piece at frequency radius r.
inline double lp_weight(double r, int n) { return window_value(std::ldexp(r, -n)); }

/// Weight of the low-frequency piece: 1 - sum_{n>=1} w(r/2^n).
inline double lp_weight_zero(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 4.0) return 0.0;
    double s = 0.0;
    for (int n = 1; n <= 3; ++n) s += lp_weight(r, n);
    return 1.0 - s;
}

// ---------------------------------------------------------------------------
// Trigonometric polynomials

struct FrequencyTerm {
    double xi1 = 0.0;
    double xi2 = 0.0;
    Complex coeff{};

    double radius() const { return std::hypot(xi1, xi2); }
};

/// f(x, y) = sum_k c_k exp(i (xi1_k x + xi2_k y)).  When constructed as
/// real, every term (xi, c) is matched by (-xi, conj(c)) so f is real.
class TrigPolynomial2 {
public:
    TrigPolynomial2() = default;

    explicit TrigPolynomial2(std::vector<FrequencyTerm> terms, bool real = false)
        : terms_(std::move(terms)), real_(real) {
        for (const auto& t : terms_)
            if (!std::isfinite(t.xi1) || !std::isfinite(t.xi2) || !std::isfinite(t.coeff.real()) ||
                !std::isfinite(t.coeff.imag()))
                throw std::invalid_argument("TrigPolynomial2: non-finite term");
        if (real_ && !conjugate_symmetric(terms_))
            throw std::invalid_argument("TrigPolynomial2: terms are not conjugate-symmetric");
    }

    static TrigPolynomial2 constant(Complex c) {
        const bool real = c.imag() == 0.0;
        return TrigPolynomial2({{0.0, 0.0, c}}, real);
    }

    const std::vector<FrequencyTerm>& terms() const { return terms_; }
    bool is_real() const { return real_; }
    bool empty() const { return terms_.empty(); }

    /// Largest frequency radius present (0 for the empty polynomial).
    double sigma() const {
        double s = 0.0;
        for (const auto& t : terms_) s = std::max(s, t.radius());
        return s;
    }

    /// Sum of coefficient moduli; an upper bound for the sup norm.
    double coefficient_l1() const {
        double s = 0.0;
        for (const auto& t : terms_) s += std::abs(t.coeff);
        return s;
    }

    Complex operator()(double x, double y) const {
        Complex s{};
        for (const auto& t : terms_) s += t.coeff * std::polar(1.0, t.xi1 * x + t.xi2 * y);
        return s;
    }

    Complex dx(double x, double y) const {
        Complex s{};
        for (const auto& t : terms_) s += kI * t.xi1 * t.coeff * std::polar(1.0, t.xi1 * x + t.xi2 * y);
        return s;
    }

    Complex dy(double x, double y) const {
        Complex s{};
        for (const auto& t : terms_) s += kI * t.xi2 * t.coeff * std::polar(1.0, t.xi1 * x + t.xi2 * y);
        return s;
    }

    /// F(i, j) = f(xs[i], ys[j]) using per-term separable exponentials.
    ComplexMatrix table(const RealVector& xs, const RealVector& ys) const {
        ComplexMatrix out = ComplexMatrix::Zero(xs.size(), ys.size());
        ComplexVector ex(xs.size());
        ComplexVector ey(ys.size());
        for (const auto& t : terms_) {
            for (Eigen::Index i = 0; i < xs.size(); ++i) ex(i) = t.coeff * std::polar(1.0, t.xi1 * xs(i));
            for (Eigen::Index j = 0; j < ys.size(); ++j) ey(j) = std::polar(1.0, t.xi2 * ys(j));
            out.noalias() += ex * ey.transpose();
        }
        return out;
    }

    /// x -> f(c x): every frequency multiplied by c.
    TrigPolynomial2 dilated(double c) const {
        std::vector<FrequencyTerm> t = terms_;
        for (auto& term : t) {
            term.xi1 *= c;
            term.xi2 *= c;
        }
        return TrigPolynomial2(std::move(t), real_);
    }

    TrigPolynomial2 scaled(Complex s) const {
        std::vector<FrequencyTerm> t = terms_;
        for (auto& term : t) term.coeff *= s;
        return TrigPolynomial2(std::move(t), real_ && s.imag() == 0.0);
    }

    /// Drop terms whose coefficient is exactly zero.
    TrigPolynomial2 pruned() const {
        std::vector<FrequencyTerm> t;
        for (const auto& term : terms_)
            if (term.coeff != Complex{}) t.push_back(term);
        return TrigPolynomial2(std::move(t), real_);
    }

    /// Coefficients summed per distinct frequency, ordered by (xi1, xi2).
    std::map<std::pair<double, double>, Complex> spectrum() const {
        std::map<std::pair<double, double>, Complex> m;
        for (const auto& t : terms_) m[{t.xi1 + 0.0, t.xi2 + 0.0}] += t.coeff;
        return m;
    }

    static bool conjugate_symmetric(const std::vector<FrequencyTerm>& terms) {
        std::map<std::pair<double, double>, Complex> m;
        double scale = 0.0;
        for (const auto& t : terms) {
            m[{t.xi1 + 0.0, t.xi2 + 0.0}] += t.coeff;
            scale = std::max(scale, std::abs(t.coeff));
        }
        const double tol = 1e-12 * scale;
        for (const auto& [xi, c] : m) {
            const std::pair<double, double> mirror{-xi.first + 0.0, -xi.second + 0.0};
            const auto it = m.find(mirror);
            const Complex partner = it == m.end() ? Complex{} : it->second;
            if (std::abs(partner - std::conj(c)) > tol) return false;
        }
        return true;
    }

private:
    std::vector<FrequencyTerm> terms_;
    bool real_ = false;
};

// ---------------------------------------------------------------------------
// Littlewood-Paley pieces

inline TrigPolynomial2 lp_piece(const TrigPolynomial2& f, int n) {
    std::vector<FrequencyTerm> out;
    for (const auto& t : f.terms()) {
        const double w = lp_weight(t.radius(), n);
        if (w != 0.0) out.push_back({t.xi1, t.xi2, t.coeff * w});
    }
    return TrigPolynomial2(std::move(out), f.is_real());
}

inline TrigPolynomial2 lp_piece_zero(const TrigPolynomial2& f) {
    std::vector<FrequencyTerm> out;
    for (const auto& t : f.terms()) {
        const double w = lp_weight_zero(t.radius());
        if (w != 0.0) out.push_back({t.xi1, t.xi2, t.coeff * w});
    }
    return TrigPolynomial2(std::move(out), f.is_real());
}

/// Indices n whose annulus (2^{n-1}, 2^{n+1}) meets a nonzero frequency radius.
inline std::vector<int> lp_active_indices(const TrigPolynomial2& f) {
    std::vector<int> ns;
    for (const auto& t : f.terms()) {
        const double r = t.radius();
        if (r == 0.0) continue;
        const int e = static_cast<int>(std::floor(std::log2(r)));
        for (int n = e - 1; n <= e + 2; ++n)
            if (lp_weight(r, n) != 0.0) ns.push_back(n);
    }
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

// ---------------------------------------------------------------------------
// Sup norm

/// Per-axis frequency lattice: every xi1 is an integer multiple of h1 and
/// every xi2 of h2 (h = 0 marks an axis with no dependence).
struct FrequencyLattice {
    double h1 = 0.0;
    double h2 = 0.0;
    int k1_max = 0;
    int k2_max = 0;

    double period1() const { return h1 > 0.0 ? 2.0 * kPi / h1 : 0.0; }
    double period2() const { return h2 > 0.0 ? 2.0 * kPi / h2 : 0.0; }
};

namespace detail {

/// Smallest h > 0 such that every value is an integer multiple of h, with
/// denominators of the ratios to the smallest value bounded by max_den.
inline std::optional<double> common_step(const std::vector<double>& values, long max_den, long max_lcm) {
    std::vector<double> nz;
    for (double v : values)
        if (v != 0.0) nz.push_back(std::abs(v));
    if (nz.empty()) return 0.0;
    const double base = *std::min_element(nz.begin(), nz.end());
    long l = 1;
    for (double v : nz) {
        const double r = v / base;
        long q_found = 0;
        for (long q = 1; q <= max_den; ++q) {
            const double pq = std::round(r * static_cast<double>(q));
            if (std::abs(r * static_cast<double>(q) - pq) <= 1e-9 * r * static_cast<double>(q)) {
                q_found = q;
                break;
            }
        }
        if (q_found == 0) return std::nullopt;
        l = std::lcm(l, q_found);
        if (l > max_lcm) return std::nullopt;
    }
    return base / static_cast<double>(l);
}

}  // namespace detail

inline std::optional<FrequencyLattice> detect_lattice(const TrigPolynomial2& f, int max_index = 4096) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& t : f.terms()) {
        a.push_back(t.xi1);
        b.push_back(t.xi2);
    }
    const auto h1 = detail::common_step(a, 64, 4096);
    const auto h2 = detail::common_step(b, 64, 4096);
    if (!h1 || !h2) return std::nullopt;
    FrequencyLattice lat{*h1, *h2, 0, 0};
    for (const auto& t : f.terms()) {
        if (lat.h1 > 0.0) lat.k1_max = std::max(lat.k1_max, static_cast<int>(std::lround(std::abs(t.xi1) / lat.h1)));
        if (lat.h2 > 0.0) lat.k2_max = std::max(lat.k2_max, static_cast<int>(std::lround(std::abs(t.xi2) / lat.h2)));
    }
    if (lat.k1_max > max_index || lat.k2_max > max_index) return std::nullopt;
    return lat;
}

struct SupNormOptions {
    int points_per_wavelength = 16;  // grid density relative to the top frequency
    int min_points = 16;             // per periodic axis
    int refine_candidates = 8;       // grid maxima polished by Newton ascent
    int newton_steps = 30;
    long max_grid_points = 1L << 22;
};

struct SupNormResult {
    double value = 0.0;       // max |f| over all evaluated points: a lower bound
    double grid_step = 0.0;   // largest grid spacing used
    double upper_gap = 0.0;   // heuristic: value * (sigma * step)^2 / 2 before polishing
    bool periodic = false;    // false when no frequency lattice was found
};

namespace detail {

inline int next_pow2(long v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}

/// Maximize |f|^2 locally starting from (x, y); returns the best value found.
inline double polish_max(const TrigPolynomial2& f, double x, double y, int steps) {
    double best = std::norm(f(x, y));
    for (int it = 0; it < steps; ++it) {
        Complex v{}, fx{}, fy{}, fxx{}, fxy{}, fyy{};
        for (const auto& t : f.terms()) {
            const Complex e = t.coeff * std::polar(1.0, t.xi1 * x + t.xi2 * y);
            v += e;
            fx += kI * t.xi1 * e;
            fy += kI * t.xi2 * e;
            fxx -= t.xi1 * t.xi1 * e;
            fxy -= t.xi1 * t.xi2 * e;
            fyy -= t.xi2 * t.xi2 * e;
        }
        const double gx = 2.0 * std::real(std::conj(v) * fx);
        const double gy = 2.0 * std::real(std::conj(v) * fy);
        const double hxx = 2.0 * (std::norm(fx) + std::real(std::conj(v) * fxx));
        const double hyy = 2.0 * (std::norm(fy) + std::real(std::conj(v) * fyy));
        const double hxy = 2.0 * std::real(std::conj(fx) * fy + std::conj(v) * fxy);
        const double det = hxx * hyy - hxy * hxy;
        double dx = 0.0;
        double dy = 0.0;
        if (hxx < 0.0 && det > 0.0) {
            dx = -(hyy * gx - hxy * gy) / det;
            dy = -(-hxy * gx + hxx * gy) / det;
        } else {
            const double curv = std::max({std::abs(hxx), std::abs(hyy), 1e-300});
            dx = gx / curv;
            dy = gy / curv;
        }
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            const double cand = std::norm(f(x + dx, y + dy));
            if (cand > best) {
                best = cand;
                x += dx;
                y += dy;
                improved = true;
                break;
            }
            dx *= 0.5;
            dy *= 0.5;
        }
        if (!improved) break;
    }
    return std::sqrt(best);
}

}  // namespace detail

/// max |f| over a uniform grid on the fundamental cell of the frequency
/// lattice, followed by Newton polishing of the best grid points.  The
/// result is a value actually attained by f, so it never overestimates the
/// true supremum.  Pass `lattice` to reuse the lattice of a parent function.
inline SupNormResult sup_norm(const TrigPolynomial2& f, const SupNormOptions& opts = {},
                              std::optional<FrequencyLattice> lattice = std::nullopt) {
    SupNormResult res;
    if (f.empty()) {
        res.periodic = true;
        return res;
    }
    if (!lattice) lattice = detect_lattice(f);
    const double sigma = f.sigma();
    if (sigma == 0.0) {
        res.value = std::abs(f(0.0, 0.0));
        res.periodic = true;
        return res;
    }

    struct Candidate {
        double value;
        double x;
        double y;
    };
    std::vector<Candidate> cands;

    if (lattice) {
        res.periodic = true;
        const auto axis_points = [&](int kmax) -> int {
            if (kmax == 0) return 1;
            return detail::next_pow2(std::max<long>(opts.min_points, static_cast<long>(opts.points_per_wavelength) * kmax));
        };
        const int n1 = axis_points(lattice->k1_max);
        const int n2 = axis_points(lattice->k2_max);
        const double step1 = lattice->h1 > 0.0 ? lattice->period1() / n1 : 0.0;
        const double step2 = lattice->h2 > 0.0 ? lattice->period2() / n2 : 0.0;
        res.grid_step = std::max(step1, step2);

        // Integer lattice indices; phases 2 pi k j / N reduced exactly mod N.
        std::map<long, std::vector<std::pair<long, Complex>>> by_k2;
        for (const auto& t : f.terms()) {
            const long k1 = lattice->h1 > 0.0 ? std::lround(t.xi1 / lattice->h1) : 0;
            const long k2 = lattice->h2 > 0.0 ? std::lround(t.xi2 / lattice->h2) : 0;
            by_k2[k2].push_back({k1, t.coeff});
        }
        std::vector<Complex> roots1(static_cast<std::size_t>(n1));
        std::vector<Complex> roots2(static_cast<std::size_t>(n2));
        for (int j = 0; j < n1; ++j) roots1[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * j / n1);
        for (int j = 0; j < n2; ++j) roots2[static_cast<std::size_t>(j)] = std::polar(1.0, 2.0 * kPi * j / n2);
        auto mod = [](long a, long m) { return ((a % m) + m) % m; };

        // g[k2][j] = sum over terms with that k2 of c exp(2 pi i k1 j / n1)
        std::vector<long> k2s;
        std::vector<std::vector<Complex>> g;
        for (const auto& [k2, list] : by_k2) {
            std::vector<Complex> row(static_cast<std::size_t>(n1));
            for (int j = 0; j < n1; ++j) {
                Complex s{};
                for (const auto& [k1, c] : list) s += c * roots1[static_cast<std::size_t>(mod(k1 * j, n1))];
                row[static_cast<std::size_t>(j)] = s;
            }
            k2s.push_back(k2);
            g.push_back(std::move(row));
        }
        const std::size_t keep = static_cast<std::size_t>(std::max(1, opts.refine_candidates));
        for (int l = 0; l < n2; ++l) {
            for (int j = 0; j < n1; ++j) {
                Complex s{};
                for (std::size_t m = 0; m < k2s.size(); ++m)
                    s += g[m][static_cast<std::size_t>(j)] * roots2[static_cast<std::size_t>(mod(k2s[m] * l, n2))];
                const double v = std::abs(s);
                if (cands.size() < keep || v > cands.back().value) {
                    Candidate c{v, j * step1, l * step2};
                    auto pos = std::upper_bound(cands.begin(), cands.end(), c,
                                                [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
                    cands.insert(pos, c);
                    if (cands.size() > keep) cands.pop_back();
                }
            }
        }
    } else {
        // No lattice: sample a large box around the origin.
        double rmin = sigma;
        for (const auto& t : f.terms())
            if (t.radius() > 0.0) rmin = std::min(rmin, t.radius());
        const double half_width = 2.0 * kPi * 8.0 / rmin;
        const double want_step = 2.0 * kPi / (opts.points_per_wavelength * sigma);
        long n = static_cast<long>(std::ceil(2.0 * half_width / want_step));
        n = std::min<long>(n, static_cast<long>(std::sqrt(static_cast<double>(opts.max_grid_points))));
        n = std::max<long>(n, 2);
        const double step = 2.0 * half_width / static_cast<double>(n - 1);
        res.grid_step = step;
        const std::size_t keep = static_cast<std::size_t>(std::max(1, opts.refine_candidates));
        RealVector xs(n);
        for (long i = 0; i < n; ++i) xs(i) = -half_width + step * static_cast<double>(i);
        const ComplexMatrix tab = f.table(xs, xs);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                const double v = std::abs(tab(i, j));
                if (cands.size() < keep || v > cands.back().value) {
                    Candidate c{v, xs(i), xs(j)};
                    auto pos = std::upper_bound(cands.begin(), cands.end(), c,
                                                [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
                    cands.insert(pos, c);
                    if (cands.size() > keep) cands.pop_back();
                }
            }
    }

    double best = 0.0;
    for (const auto& c : cands) best = std::max(best, c.value);
    res.upper_gap = 0.5 * best * (sigma * res.grid_step) * (sigma * res.grid_step);
    for (const auto& c : cands) best = std::max(best, detail::polish_max(f, c.x, c.y, opts.newton_steps));
    res.value = best;
    return res;
}

inline double sup_norm_value(const TrigPolynomial2& f) { return sup_norm(f).value; }

// ---------------------------------------------------------------------------
// Besov norms

struct BesovPiece {
    int n = 0;            // dyadic index; the low-frequency piece is reported separately
    std::size_t terms = 0;
    double sup = 0.0;
    double weighted = 0.0;  // 2^n * sup
};

struct BesovReport {
    double homogeneous = 0.0;
    double inhomogeneous = 0.0;
    double low_sup = 0.0;                    // ||f^[0]||_inf
    std::vector<BesovPiece> pieces;          // every n with a nonempty piece (n in Z)
};

/// Both Besov norms plus the piece table; sup norms computed once per piece.
inline BesovReport besov_report(const TrigPolynomial2& f, const SupNormOptions& opts = {}) {
    BesovReport rep;
    const auto lattice = detect_lattice(f);
    for (int n : lp_active_indices(f)) {
        const TrigPolynomial2 piece = lp_piece(f, n);
        if (piece.empty()) continue;
        BesovPiece bp;
        bp.n = n;
        bp.terms = piece.terms().size();
        bp.sup = sup_norm(piece, opts, lattice).value;
        bp.weighted = std::ldexp(bp.sup, n);
        rep.homogeneous += bp.weighted;
        if (n >= 1) rep.inhomogeneous += bp.weighted;
        rep.pieces.push_back(bp);
    }
    const TrigPolynomial2 low = lp_piece_zero(f);
    rep.low_sup = sup_norm(low, opts, lattice).value;
    rep.inhomogeneous += rep.low_sup;
    return rep;
}

inline double besov_norm_inhomogeneous(const TrigPolynomial2& f) { return besov_report(f).inhomogeneous; }

inline double besov_norm_homogeneous(const TrigPolynomial2& f) {
    const auto lattice = detect_lattice(f);
    double s = 0.0;
    for (int n : lp_active_indices(f)) {
        const TrigPolynomial2 piece = lp_piece(f, n);
        if (!piece.empty()) s += std::ldexp(sup_norm(piece, {}, lattice).value, n);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Random bandlimited functions

struct BandlimitedOptions {
    int lattice_resolution = 8;       // frequencies on (sigma / resolution) Z^2
    bool zero_frequency_first = false;  // first draw is the constant term
};

/// Real trigonometric polynomial with term_count frequency draws uniform in
/// the disk of radius sigma (snapped to a square lattice of spacing
/// sigma/resolution), complex Gaussian coefficients mirrored to conjugate
/// pairs, normalized to sup norm 1.
inline TrigPolynomial2 random_bandlimited(double sigma, int term_count, std::uint64_t seed,
                                          const BandlimitedOptions& opts = {}) {
    if (!(sigma > 0.0)) throw std::invalid_argument("random_bandlimited: sigma must be positive");
    if (term_count < 1) throw std::invalid_argument("random_bandlimited: term_count must be >= 1");
    if (opts.lattice_resolution < 1) throw std::invalid_argument("random_bandlimited: lattice_resolution must be >= 1");
    Stream rng(seed, {0x6c70ULL});
    const double h = sigma / opts.lattice_resolution;
    const long kmax = opts.lattice_resolution;
    std::map<std::pair<long, long>, Complex> coeffs;
    for (int t = 0; t < term_count; ++t) {
        long k1 = 0;
        long k2 = 0;
        Complex c;
        if (t == 0 && opts.zero_frequency_first) {
            c = std::abs(rng.normal()) + 0.5;
        } else {
            for (;;) {
                const double r = sigma * std::sqrt(rng.uniform());
                const double th = 2.0 * kPi * rng.uniform();
                k1 = std::lround(r * std::cos(th) / h);
                k2 = std::lround(r * std::sin(th) / h);
                if (k1 * k1 + k2 * k2 <= kmax * kmax) break;
            }
            c = rng.complex_normal();
        }
        if (k1 == 0 && k2 == 0) {
            coeffs[{0, 0}] += c.real();
        } else {
            coeffs[{k1, k2}] += c;
            coeffs[{-k1, -k2}] += std::conj(c);
        }
    }
    std::vector<FrequencyTerm> terms;
    for (const auto& [k, c] : coeffs)
        if (c != Complex{}) terms.push_back({h * static_cast<double>(k.first), h * static_cast<double>(k.second), c});
    TrigPolynomial2 f(std::move(terms), true);
    const double s = sup_norm_value(f);
    if (s == 0.0) throw NumericalError("random_bandlimited: degenerate draw");
    return f.scaled(1.0 / s);
}

// ---------------------------------------------------------------------------
// Text format: one line per term "xi1 xi2 re im"; '#' starts a comment.

inline void write_trig(std::ostream& os, const TrigPolynomial2& f) {
    const auto old_prec = os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& t : f.terms())
        os << t.xi1 << ' ' << t.xi2 << ' ' << t.coeff.real() << ' ' << t.coeff.imag() << '\n';
    os.precision(old_prec);
}

/// Parses the term list; with `real` set, conjugate symmetry is enforced and
/// a violation is reported against the last line read.
inline TrigPolynomial2 read_trig(std::istream& is, bool real = false) {
    std::vector<FrequencyTerm> terms;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> vals;
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
                vals.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(lineno, "malformed number '" + tok + "'");
            }
        }
        if (vals.empty()) continue;
        if (vals.size() != 4) throw ParseError(lineno, "expected 4 fields 'xi1 xi2 re im', got " + std::to_string(vals.size()));
        for (double v : vals)
            if (!std::isfinite(v)) throw ParseError(lineno, "non-finite value");
        terms.push_back({vals[0], vals[1], {vals[2], vals[3]}});
    }
    if (real && !TrigPolynomial2::conjugate_symmetric(terms))
        throw ParseError(lineno, "terms are not conjugate-symmetric but a real function was requested");
    return TrigPolynomial2(std::move(terms), real);
}

/// Inline term list: terms separated by ';' or newlines.
inline TrigPolynomial2 parse_trig(const std::string& text, bool real = false) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ';', '\n');
    std::istringstream is(s);
    return read_trig(is, real);
}

}  // namespace bivop
