#pragma once

// Approximate Littlewood-Paley pathway on sampled periodic functions.  Only
// used to cross-check the exact coefficient pathway in besov.hpp: results
// carry a heuristic error estimate and depend on the sampling density.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "bivop/besov.hpp"

namespace bivop {

/// Samples on an N x N uniform grid over the square cell [0, L)^2.
struct GridFunction2 {
    double period = 0.0;
    int n = 0;
    std::vector<Complex> samples;  // samples[i * n + j] = f(i L/n, j L/n)

    double step() const { return period / n; }
};

struct GridEstimate {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Samples a trigonometric polynomial whose frequencies all lie on one
/// square lattice h Z^2.  n must be a power of two.
inline GridFunction2 sample_on_grid(const TrigPolynomial2& f, int n) {
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("sample_on_grid: n must be a power of two");
    std::vector<double> comps;
    for (const auto& t : f.terms()) {
        comps.push_back(t.xi1);
        comps.push_back(t.xi2);
    }
    const auto h = detail::common_step(comps, 64, 4096);
    if (!h) throw std::invalid_argument("sample_on_grid: frequencies are not on a common lattice");
    GridFunction2 g;
    g.period = *h > 0.0 ? 2.0 * kPi / *h : 2.0 * kPi;
    g.n = n;
    g.samples.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    RealVector xs(n);
    for (int i = 0; i < n; ++i) xs(i) = g.period * i / n;
    const ComplexMatrix tab = f.table(xs, xs);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.samples[static_cast<std::size_t>(i * n + j)] = tab(i, j);
    return g;
}

namespace detail {

inline void fft2(std::vector<Complex>& data, int n, bool inverse) {
    Eigen::FFT<double> fft;
    std::vector<Complex> in(static_cast<std::size_t>(n));
    std::vector<Complex> out(static_cast<std::size_t>(n));
    for (int pass = 0; pass < 2; ++pass) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const std::size_t idx = pass == 0 ? static_cast<std::size_t>(a * n + b) : static_cast<std::size_t>(b * n + a);
                in[static_cast<std::size_t>(b)] = data[idx];
            }
            if (inverse) fft.inv(out, in);
            else fft.fwd(out, in);
            for (int b = 0; b < n; ++b) {
                const std::size_t idx = pass == 0 ? static_cast<std::size_t>(a * n + b) : static_cast<std::size_t>(b * n + a);
                data[idx] = out[static_cast<std::size_t>(b)];
            }
        }
    }
}

/// Multiplies the spectrum by weight(|xi|) and transforms back.
template <class W>
GridFunction2 radial_multiplier(const GridFunction2& g, W&& weight) {
    GridFunction2 out = g;
    detail::fft2(out.samples, g.n, false);
    const double base = 2.0 * kPi / g.period;
    for (int a = 0; a < g.n; ++a)
        for (int b = 0; b < g.n; ++b) {
            const int ka = a < g.n / 2 ? a : a - g.n;
            const int kb = b < g.n / 2 ? b : b - g.n;
            out.samples[static_cast<std::size_t>(a * g.n + b)] *= weight(base * std::hypot(ka, kb));
        }
    detail::fft2(out.samples, g.n, true);
    return out;
}

}  // namespace detail

inline GridFunction2 grid_lp_piece(const GridFunction2& g, int n) {
    return detail::radial_multiplier(g, [n](double r) { return lp_weight(r, n); });
}

inline GridFunction2 grid_lp_piece_zero(const GridFunction2& g) {
    return detail::radial_multiplier(g, [](double r) { return lp_weight_zero(r); });
}

/// Grid maximum of |g|; the error estimate assumes the function is band
/// limited to `sigma` and uses the curvature bound sigma^2 |g|.
inline GridEstimate grid_sup(const GridFunction2& g, double sigma) {
    GridEstimate e;
    for (const auto& v : g.samples) e.value = std::max(e.value, std::abs(v));
    const double s = sigma * g.step();
    e.error_estimate = 0.5 * e.value * s * s;
    return e;
}

/// Inhomogeneous Besov norm on the grid pathway.
inline GridEstimate grid_besov_inhomogeneous(const GridFunction2& g, double sigma) {
    GridEstimate total = grid_sup(grid_lp_piece_zero(g), sigma);
    for (int n = 1; std::ldexp(1.0, n - 1) < sigma; ++n) {
        const GridEstimate piece = grid_sup(grid_lp_piece(g, n), sigma);
        total.value += std::ldexp(piece.value, n);
        total.error_estimate += std::ldexp(piece.error_estimate, n);
    }
    return total;
}

}  // namespace bivop
