#pragma once

// Independent reference computations used only by the tests.  Nothing here
// goes through the contraction shortcuts of the library: spectral integrals
// are summed projector by projector.

#include <complex>

#include <Eigen/Dense>

#include "bivop/linalg.hpp"

namespace bivop::oracle {

/// sum_ij f(lambda_i, mu_j) P_i Q_j with explicit rank-one projectors.
template <class F>
ComplexMatrix projector_sum(const F& f, const SpectralDecomposition& ea, const SpectralDecomposition& eb) {
    const auto n = ea.dim();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ComplexMatrix p = ea.projector(i);
        for (Eigen::Index j = 0; j < n; ++j)
            out += Complex(f(ea.eigenvalues(i), eb.eigenvalues(j))) * (p * eb.projector(j));
    }
    return out;
}

/// sum_{jkl} Psi(a_j, b_k, c_l) P_j T Q_k R S_l, one product per triple.
template <class K>
ComplexMatrix triple_projector_sum(const K& psi, const SpectralDecomposition& e1, const ComplexMatrix& t,
                                   const SpectralDecomposition& e2, const ComplexMatrix& r,
                                   const SpectralDecomposition& e3) {
    ComplexMatrix out = ComplexMatrix::Zero(e1.dim(), e3.dim());
    for (Eigen::Index j = 0; j < e1.dim(); ++j) {
        const ComplexMatrix pj = e1.projector(j);
        for (Eigen::Index k = 0; k < e2.dim(); ++k) {
            const ComplexMatrix qk = e2.projector(k);
            for (Eigen::Index l = 0; l < e3.dim(); ++l)
                out += Complex(psi(e1.eigenvalues(j), e2.eigenvalues(k), e3.eigenvalues(l))) *
                       (pj * t * qk * r * e3.projector(l));
        }
    }
    return out;
}

/// g(H) for Hermitian H via Eigen's own self-adjoint solver.
template <class G>
ComplexMatrix matrix_function(const ComplexMatrix& h, const G& g) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    ComplexMatrix v = es.eigenvectors();
    ComplexMatrix d = ComplexMatrix::Zero(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i) d(i, i) = Complex(g(es.eigenvalues()(i)));
    return v * d * v.adjoint();
}

inline double relative_error(const ComplexMatrix& got, const ComplexMatrix& want) {
    const double scale = want.norm();
    return (got - want).norm() / (scale > 0.0 ? scale : 1.0);
}

}  // namespace bivop::oracle
