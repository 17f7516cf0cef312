#pragma once

// Divided-difference kernels and finite-dimensional triple operator integrals
//
//   W = sum_{j,k,l} Psi(a_j, b_k, c_l) P_j T Q_k R S_l
//
// together with the representations of operator differences
// f(A1, B) - f(A2, B), f(A, B1) - f(A, B2) and f(A1, B1) - f(A2, B2) as such
// integrals.  In finite dimension the integrals are exact sums, so both kinds
// of Haagerup-like integrals reduce to the same elementwise contraction; the
// trace-duality definitions are provided separately to confirm this.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "bivop/function2.hpp"
#include "bivop/linalg.hpp"
#include "bivop/opcalc.hpp"

namespace bivop {

// ---------------------------------------------------------------------------
// Divided differences

/// (f(x1, y) - f(x2, y)) / (x1 - x2); the partial derivative in x at the
/// midpoint when |x1 - x2| <= delta.
template <DifferentiableBivariate F>
Complex dd1(const F& f, double x1, double x2, double y, double delta = 0.0) {
    if (std::abs(x1 - x2) <= delta) return Complex(f.dx(0.5 * (x1 + x2), y));
    return (Complex(f(x1, y)) - Complex(f(x2, y))) / (x1 - x2);
}

/// (f(x, y1) - f(x, y2)) / (y1 - y2); the partial derivative in y at the
/// midpoint when |y1 - y2| <= delta.
template <DifferentiableBivariate F>
Complex dd2(const F& f, double x, double y1, double y2, double delta = 0.0) {
    if (std::abs(y1 - y2) <= delta) return Complex(f.dy(x, 0.5 * (y1 + y2)));
    return (Complex(f(x, y1)) - Complex(f(x, y2))) / (y1 - y2);
}

/// Dense table Psi(a_j, b_k, c_l).
class KernelTensor {
public:
    KernelTensor(Eigen::Index n1, Eigen::Index n2, Eigen::Index n3)
        : n1_(n1), n2_(n2), n3_(n3), data_(static_cast<std::size_t>(n1 * n2 * n3)) {}

    Complex& operator()(Eigen::Index j, Eigen::Index k, Eigen::Index l) {
        return data_[static_cast<std::size_t>((k * n1_ + j) * n3_ + l)];
    }
    Complex operator()(Eigen::Index j, Eigen::Index k, Eigen::Index l) const {
        return data_[static_cast<std::size_t>((k * n1_ + j) * n3_ + l)];
    }

    Eigen::Index n1() const { return n1_; }
    Eigen::Index n2() const { return n2_; }
    Eigen::Index n3() const { return n3_; }

private:
    Eigen::Index n1_, n2_, n3_;
    std::vector<Complex> data_;
};

/// Anything callable as Psi(x1, x2, x3) -> complex.
template <class K>
concept TrivariateKernel = requires(const K& k, double a, double b, double c) {
    { k(a, b, c) } -> std::convertible_to<Complex>;
};

template <class K>
concept TabulableKernel = requires(const K& k, const RealVector& a, const RealVector& b, const RealVector& c) {
    { k.tabulate(a, b, c) } -> std::convertible_to<KernelTensor>;
};

/// Divided difference of f in one variable, as a three-argument kernel.
/// variable 1: Psi(x1, x2, y) = (f(x1,y) - f(x2,y)) / (x1 - x2)
/// variable 2: Psi(x, y1, y2) = (f(x,y1) - f(x,y2)) / (y1 - y2)
template <DifferentiableBivariate F>
struct DividedDifferenceKernel {
    F f;
    int variable = 1;
    double delta = 0.0;

    Complex operator()(double u, double v, double w) const {
        return variable == 1 ? dd1(f, u, v, w, delta) : dd2(f, u, v, w, delta);
    }

    /// Table over spectral points, built from two value tables of f.
    KernelTensor tabulate(const RealVector& a, const RealVector& b, const RealVector& c) const {
        KernelTensor out(a.size(), b.size(), c.size());
        if (variable == 1) {
            const ComplexMatrix fa = kernel_table(f, a, c);
            const ComplexMatrix fb = kernel_table(f, b, c);
            for (Eigen::Index k = 0; k < b.size(); ++k)
                for (Eigen::Index j = 0; j < a.size(); ++j) {
                    const double gap = a(j) - b(k);
                    if (std::abs(gap) <= delta) {
                        const double mid = 0.5 * (a(j) + b(k));
                        for (Eigen::Index l = 0; l < c.size(); ++l) out(j, k, l) = Complex(f.dx(mid, c(l)));
                    } else {
                        for (Eigen::Index l = 0; l < c.size(); ++l) out(j, k, l) = (fa(j, l) - fb(k, l)) / gap;
                    }
                }
        } else {
            const ComplexMatrix fb = kernel_table(f, a, b);
            const ComplexMatrix fc = kernel_table(f, a, c);
            for (Eigen::Index k = 0; k < b.size(); ++k)
                for (Eigen::Index j = 0; j < a.size(); ++j)
                    for (Eigen::Index l = 0; l < c.size(); ++l) {
                        const double gap = b(k) - c(l);
                        out(j, k, l) = std::abs(gap) <= delta ? Complex(f.dy(a(j), 0.5 * (b(k) + c(l))))
                                                              : (fb(j, k) - fc(j, l)) / gap;
                    }
        }
        return out;
    }
};

template <DifferentiableBivariate F>
DividedDifferenceKernel<F> divided_difference_kernel(F f, int variable, double delta = 0.0) {
    if (variable != 1 && variable != 2) throw std::invalid_argument("divided_difference_kernel: variable must be 1 or 2");
    if (!(delta >= 0.0)) throw std::invalid_argument("divided_difference_kernel: delta must be nonnegative");
    return DividedDifferenceKernel<F>{std::move(f), variable, delta};
}

template <TrivariateKernel K>
KernelTensor tabulate_kernel(const K& psi, const RealVector& a, const RealVector& b, const RealVector& c) {
    if constexpr (TabulableKernel<K>) {
        return psi.tabulate(a, b, c);
    } else {
        KernelTensor out(a.size(), b.size(), c.size());
        for (Eigen::Index k = 0; k < b.size(); ++k)
            for (Eigen::Index j = 0; j < a.size(); ++j)
                for (Eigen::Index l = 0; l < c.size(); ++l) out(j, k, l) = Complex(psi(a(j), b(k), c(l)));
        return out;
    }
}

// ---------------------------------------------------------------------------
// Triple operator integrals

/// sum_{j,k,l} Psi(a_j, b_k, c_l) P_j T Q_k R S_l in O(n^4):
/// with T~ = U1* T U2 and R~ = U2* R U3,
/// X(j, l) = sum_k Psi(j, k, l) T~(j, k) R~(k, l) and W = U1 X U3*.
template <TrivariateKernel K>
ComplexMatrix toi_eval(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                       const SpectralDecomposition& e2, const ComplexMatrix& r, const SpectralDecomposition& e3) {
    const Eigen::Index n1 = e1.dim();
    const Eigen::Index n2 = e2.dim();
    const Eigen::Index n3 = e3.dim();
    if (t.rows() != n1 || t.cols() != n2 || r.rows() != n2 || r.cols() != n3)
        throw std::invalid_argument("toi_eval: dimension mismatch");
    const KernelTensor tab = tabulate_kernel(psi, e1.eigenvalues, e2.eigenvalues, e3.eigenvalues);
    const ComplexMatrix tt = e1.eigenvectors.adjoint() * t * e2.eigenvectors;
    const ComplexMatrix rt = e2.eigenvectors.adjoint() * r * e3.eigenvectors;
    ComplexMatrix x = ComplexMatrix::Zero(n1, n3);
    for (Eigen::Index k = 0; k < n2; ++k)
        for (Eigen::Index j = 0; j < n1; ++j) {
            const Complex tjk = tt(j, k);
            for (Eigen::Index l = 0; l < n3; ++l) {
                const Complex v = tab(j, k, l);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    throw NumericalError("toi_eval: kernel is not finite at spectral triple (" +
                                         std::to_string(e1.eigenvalues(j)) + ", " + std::to_string(e2.eigenvalues(k)) +
                                         ", " + std::to_string(e3.eigenvalues(l)) + ")");
                x(j, l) += v * tjk * rt(k, l);
            }
        }
    return e1.eigenvectors * x * e3.eigenvectors.adjoint();
}

namespace detail {

/// Psi with its arguments rotated: (x2, x3, x1) -> Psi(x1, x2, x3).
template <class K>
struct RotatedLeft {
    const K& psi;
    Complex operator()(double x2, double x3, double x1) const { return Complex(psi(x1, x2, x3)); }
};

/// (x3, x1, x2) -> Psi(x1, x2, x3).
template <class K>
struct RotatedRight {
    const K& psi;
    Complex operator()(double x3, double x1, double x2) const { return Complex(psi(x1, x2, x3)); }
};

}  // namespace detail

/// First-kind integral as a functional on Q:
///   Q -> trace( (sum Psi dE2 R dE3 Q dE1) T ).
template <TrivariateKernel K>
Complex toi_functional_first_kind(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                                  const SpectralDecomposition& e2, const ComplexMatrix& r,
                                  const SpectralDecomposition& e3, const ComplexMatrix& q) {
    const ComplexMatrix inner = toi_eval(detail::RotatedLeft<K>{psi}, e2, r, e3, q, e1);
    return (inner * t).trace();
}

/// Second-kind integral as a functional on Q:
///   Q -> trace( (sum Psi dE3 Q dE1 T dE2) R ).
template <TrivariateKernel K>
Complex toi_functional_second_kind(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                                   const SpectralDecomposition& e2, const ComplexMatrix& r,
                                   const SpectralDecomposition& e3, const ComplexMatrix& q) {
    const ComplexMatrix inner = toi_eval(detail::RotatedRight<K>{psi}, e3, q, e1, t, e2);
    return (inner * r).trace();
}

enum class IntegralKind { first, second };

/// The operator W determined by trace(W Q) = functional(Q), recovered
/// entry by entry from matrix units: W(a, b) = functional(E_ba).
template <TrivariateKernel K>
ComplexMatrix toi_eval_by_duality(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                                  const SpectralDecomposition& e2, const ComplexMatrix& r,
                                  const SpectralDecomposition& e3, IntegralKind kind) {
    const Eigen::Index n1 = e1.dim();
    const Eigen::Index n3 = e3.dim();
    ComplexMatrix w(n1, n3);
    ComplexMatrix unit = ComplexMatrix::Zero(n3, n1);
    for (Eigen::Index a = 0; a < n1; ++a)
        for (Eigen::Index b = 0; b < n3; ++b) {
            unit(b, a) = 1.0;
            w(a, b) = kind == IntegralKind::first ? toi_functional_first_kind(psi, e1, t, e2, r, e3, unit)
                                                  : toi_functional_second_kind(psi, e1, t, e2, r, e3, unit);
            unit(b, a) = 0.0;
        }
    return w;
}

// ---------------------------------------------------------------------------
// Operator differences

struct DifferenceOptions {
    /// Divided differences switch to derivatives below this fraction of the
    /// diameter of the union of the two spectra involved.
    double relative_delta = 1e-8;
};

inline double coincidence_threshold(const SpectralDecomposition& x, const SpectralDecomposition& y,
                                    const DifferenceOptions& opts) {
    const double lo = std::min(x.eigenvalues.minCoeff(), y.eigenvalues.minCoeff());
    const double hi = std::max(x.eigenvalues.maxCoeff(), y.eigenvalues.maxCoeff());
    return opts.relative_delta * (hi - lo);
}

/// sum dd1 f(x1, x2, y) dE_{A1}(x1) (A1 - A2) dE_{A2}(x2) dE_B(y)
/// which equals f(A1, B) - f(A2, B).
template <DifferentiableBivariate F>
ComplexMatrix diff_first_variable(const F& f, const HermitianMatrix& a1, const SpectralDecomposition& e_a1,
                                  const HermitianMatrix& a2, const SpectralDecomposition& e_a2,
                                  const SpectralDecomposition& e_b, const DifferenceOptions& opts = {}) {
    if (a1.dim() != a2.dim() || a1.dim() != e_b.dim()) throw std::invalid_argument("diff_first_variable: dimension mismatch");
    const auto kernel = DividedDifferenceKernel<const F&>{f, 1, coincidence_threshold(e_a1, e_a2, opts)};
    const ComplexMatrix id = ComplexMatrix::Identity(a1.dim(), a1.dim());
    return toi_eval(kernel, e_a1, ComplexMatrix(a1.matrix() - a2.matrix()), e_a2, id, e_b);
}

template <DifferentiableBivariate F>
ComplexMatrix diff_first_variable(const F& f, const HermitianMatrix& a1, const HermitianMatrix& a2,
                                  const HermitianMatrix& b, const DifferenceOptions& opts = {}) {
    return diff_first_variable(f, a1, eigh(a1), a2, eigh(a2), eigh(b), opts);
}

/// sum dd2 f(x, y1, y2) dE_A(x) dE_{B1}(y1) (B1 - B2) dE_{B2}(y2)
/// which equals f(A, B1) - f(A, B2).
template <DifferentiableBivariate F>
ComplexMatrix diff_second_variable(const F& f, const SpectralDecomposition& e_a, const HermitianMatrix& b1,
                                   const SpectralDecomposition& e_b1, const HermitianMatrix& b2,
                                   const SpectralDecomposition& e_b2, const DifferenceOptions& opts = {}) {
    if (b1.dim() != b2.dim() || b1.dim() != e_a.dim()) throw std::invalid_argument("diff_second_variable: dimension mismatch");
    const auto kernel = DividedDifferenceKernel<const F&>{f, 2, coincidence_threshold(e_b1, e_b2, opts)};
    const ComplexMatrix id = ComplexMatrix::Identity(b1.dim(), b1.dim());
    return toi_eval(kernel, e_a, id, e_b1, ComplexMatrix(b1.matrix() - b2.matrix()), e_b2);
}

template <DifferentiableBivariate F>
ComplexMatrix diff_second_variable(const F& f, const HermitianMatrix& a, const HermitianMatrix& b1,
                                   const HermitianMatrix& b2, const DifferenceOptions& opts = {}) {
    return diff_second_variable(f, eigh(a), b1, eigh(b1), b2, eigh(b2), opts);
}

/// Which intermediate pair the full difference passes through.
///   via_a2_b1: first-variable term closes with dE_{B1}, second-variable term opens with dE_{A2}
///   via_a1_b2: first-variable term closes with dE_{B2}, second-variable term opens with dE_{A1}
enum class FullDifferenceRoute { via_a2_b1, via_a1_b2 };

inline const char* route_name(FullDifferenceRoute r) {
    return r == FullDifferenceRoute::via_a2_b1 ? "full_via_A2B1" : "full_via_A1B2";
}

/// Spectral data for a quadruple (A1, B1), (A2, B2).
struct Quadruple {
    HermitianMatrix a1, b1, a2, b2;
    SpectralDecomposition e_a1, e_b1, e_a2, e_b2;

    Quadruple(HermitianMatrix a1_, HermitianMatrix b1_, HermitianMatrix a2_, HermitianMatrix b2_)
        : a1(std::move(a1_)), b1(std::move(b1_)), a2(std::move(a2_)), b2(std::move(b2_)) {
        const auto n = a1.dim();
        if (b1.dim() != n || a2.dim() != n || b2.dim() != n) throw std::invalid_argument("Quadruple: dimension mismatch");
        e_a1 = eigh(a1);
        e_b1 = eigh(b1);
        e_a2 = eigh(a2);
        e_b2 = eigh(b2);
    }

    Eigen::Index dim() const { return a1.dim(); }
};

/// f(A1, B1) - f(A2, B2) as the sum of a first-variable and a
/// second-variable triple operator integral.
template <DifferentiableBivariate F>
ComplexMatrix diff_full(const F& f, const Quadruple& q, FullDifferenceRoute route, const DifferenceOptions& opts = {}) {
    if (route == FullDifferenceRoute::via_a2_b1)
        return diff_first_variable(f, q.a1, q.e_a1, q.a2, q.e_a2, q.e_b1, opts) +
               diff_second_variable(f, q.e_a2, q.b1, q.e_b1, q.b2, q.e_b2, opts);
    return diff_first_variable(f, q.a1, q.e_a1, q.a2, q.e_a2, q.e_b2, opts) +
           diff_second_variable(f, q.e_a1, q.b1, q.e_b1, q.b2, q.e_b2, opts);
}

template <DifferentiableBivariate F>
ComplexMatrix diff_full(const F& f, const HermitianMatrix& a1, const HermitianMatrix& b1, const HermitianMatrix& a2,
                        const HermitianMatrix& b2, FullDifferenceRoute route, const DifferenceOptions& opts = {}) {
    return diff_full(f, Quadruple(a1, b1, a2, b2), route, opts);
}

/// Mixed pairing that the two routes above do not cover: first-variable term
/// closing with dE_{B2}, second-variable term opening with dE_{A2}.  Not an
/// identity in general; used only to record residuals.
template <DifferentiableBivariate F>
ComplexMatrix diff_full_mixed(const F& f, const Quadruple& q, const DifferenceOptions& opts = {}) {
    return diff_first_variable(f, q.a1, q.e_a1, q.a2, q.e_a2, q.e_b2, opts) +
           diff_second_variable(f, q.e_a2, q.b1, q.e_b1, q.b2, q.e_b2, opts);
}

}  // namespace bivop
