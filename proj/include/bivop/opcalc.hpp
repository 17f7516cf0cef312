#pragma once

// Functions f(A, B) of two non-commuting Hermitian matrices as double
// operator integrals sum_ij f(lambda_i, mu_j) P_i Q_j, and the variant that
// routes through f#(s, t) = f(s, t) / (1 - i t), the construction that stays
// meaningful when B is unbounded.

#include <utility>

#include "bivop/function2.hpp"
#include "bivop/linalg.hpp"

namespace bivop {

/// A pair of Hermitian matrices of equal size with cached eigendecompositions.
class OperatorPair {
public:
    OperatorPair(HermitianMatrix a, HermitianMatrix b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.dim() != b_.dim()) throw std::invalid_argument("OperatorPair: A and B differ in dimension");
        ea_ = eigh(a_);
        eb_ = eigh(b_);
    }

    const HermitianMatrix& a() const { return a_; }
    const HermitianMatrix& b() const { return b_; }
    const SpectralDecomposition& spectrum_a() const { return ea_; }
    const SpectralDecomposition& spectrum_b() const { return eb_; }
    Eigen::Index dim() const { return a_.dim(); }

private:
    HermitianMatrix a_;
    HermitianMatrix b_;
    SpectralDecomposition ea_;
    SpectralDecomposition eb_;
};

/// sum_ij phi(x_i, y_j) P_i Q R_j, computed as U1 (Phi o (U1* Q U2)) U2*.
template <Bivariate F>
ComplexMatrix double_operator_integral(const F& phi, const SpectralDecomposition& e1, const ComplexMatrix& q,
                                       const SpectralDecomposition& e2) {
    if (q.rows() != e1.dim() || q.cols() != e2.dim())
        throw std::invalid_argument("double_operator_integral: dimension mismatch");
    const ComplexMatrix table = kernel_table(phi, e1.eigenvalues, e2.eigenvalues);
    const ComplexMatrix inner = e1.eigenvectors.adjoint() * q * e2.eigenvectors;
    return e1.eigenvectors * table.cwiseProduct(inner) * e2.eigenvectors.adjoint();
}

/// f(A, B) for spectral data of A and B.
template <Bivariate F>
ComplexMatrix eval_f_AB(const F& f, const SpectralDecomposition& ea, const SpectralDecomposition& eb) {
    if (ea.dim() != eb.dim()) throw std::invalid_argument("eval_f_AB: dimension mismatch");
    const ComplexMatrix table = kernel_table(f, ea.eigenvalues, eb.eigenvalues);
    const ComplexMatrix overlap = ea.eigenvectors.adjoint() * eb.eigenvectors;
    return ea.eigenvectors * table.cwiseProduct(overlap) * eb.eigenvectors.adjoint();
}

template <Bivariate F>
ComplexMatrix eval_f_AB(const F& f, const OperatorPair& pair) {
    return eval_f_AB(f, pair.spectrum_a(), pair.spectrum_b());
}

/// f#(s, t) = f(s, t) / (1 - i t).
template <Bivariate F>
struct SharpKernel {
    F f;

    Complex operator()(double s, double t) const { return Complex(f(s, t)) / Complex(1.0, -t); }

    ComplexMatrix table(const RealVector& xs, const RealVector& ys) const {
        ComplexMatrix out = kernel_table(f, xs, ys);
        for (Eigen::Index j = 0; j < ys.size(); ++j) out.col(j) /= Complex(1.0, -ys(j));
        return out;
    }
};

/// f_natural(s, t) = f(s, t) / (1 - i s).  Only the kernel is provided: in
/// finite dimension (I - iA) f_natural(A, B) coincides with f(A, B), and the
/// possible non-density of its domain has no matrix analogue.
template <Bivariate F>
struct NaturalKernel {
    F f;

    Complex operator()(double s, double t) const { return Complex(f(s, t)) / Complex(1.0, -s); }

    ComplexMatrix table(const RealVector& xs, const RealVector& ys) const {
        ComplexMatrix out = kernel_table(f, xs, ys);
        for (Eigen::Index i = 0; i < xs.size(); ++i) out.row(i) /= Complex(1.0, -xs(i));
        return out;
    }
};

template <Bivariate F>
SharpKernel<F> f_sharp_kernel(F f) {
    return SharpKernel<F>{std::move(f)};
}

template <Bivariate F>
NaturalKernel<F> f_natural_kernel(F f) {
    return NaturalKernel<F>{std::move(f)};
}

/// f#(A, B), a contraction-weighted version of f(A, B).
template <Bivariate F>
ComplexMatrix eval_f_sharp(const F& f, const OperatorPair& pair) {
    return eval_f_AB(SharpKernel<const F&>{f}, pair);
}

struct RegularizedEvaluation {
    ComplexMatrix value;       // f#(A, B) (I - iB)
    double norm_b = 0.0;       // ||B||_inf
    double agreement_gap = 0.0;  // ||value - f(A,B)||_F / ||f(A,B)||_F  (absolute when f(A,B) = 0)
};

/// f(A, B) computed as f#(A, B)(I - iB), with the deviation from the direct
/// double operator integral as a conditioning diagnostic.
template <Bivariate F>
RegularizedEvaluation eval_f_AB_regularized(const F& f, const OperatorPair& pair) {
    RegularizedEvaluation out;
    out.value = eval_f_sharp(f, pair) * shift_operator(pair.b());
    out.norm_b = std::max(std::abs(pair.spectrum_b().eigenvalues(0)),
                          std::abs(pair.spectrum_b().eigenvalues(pair.dim() - 1)));
    const ComplexMatrix direct = eval_f_AB(f, pair);
    const double scale = direct.norm();
    out.agreement_gap = (out.value - direct).norm() / (scale > 0.0 ? scale : 1.0);
    return out;
}

}  // namespace bivop
