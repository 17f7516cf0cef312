#pragma once

// Dense complex linear algebra core: Hermitian eigendecomposition by cyclic
// Jacobi rotations, Schatten norms, the resolvent (I - iB)^{-1} and the
// epsilon-regularization A(I - i eps A)^{-1} of a self-adjoint matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bivop/rng.hpp"

namespace bivop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when an iterative routine fails or a computed value is not finite.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on malformed text input; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

inline void require_finite(const ComplexMatrix& m, const char* what) {
    if (m.size() == 0) throw std::invalid_argument(std::string(what) + ": empty matrix");
    if (!all_finite(m)) throw NumericalError(std::string(what) + ": non-finite entry");
}

/// A self-adjoint matrix.  Construction symmetrizes the input as (M + M*)/2,
/// so entries(i,j) == conj(entries(j,i)) holds bit for bit afterwards.  The
/// Frobenius norm of the discarded anti-Hermitian part is kept.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    explicit HermitianMatrix(const ComplexMatrix& m) {
        if (m.rows() != m.cols()) throw std::invalid_argument("HermitianMatrix: matrix is not square");
        require_finite(m, "HermitianMatrix");
        const Eigen::Index n = m.rows();
        m_.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            m_(i, i) = Complex(m(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < n; ++j) {
                const Complex v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                m_(i, j) = v;
                m_(j, i) = std::conj(v);
            }
        }
        correction_ = (m - m_).norm();
    }

    static HermitianMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                                              static_cast<Eigen::Index>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
        return HermitianMatrix(m);
    }

    static HermitianMatrix zero(Eigen::Index n) { return HermitianMatrix(ComplexMatrix::Zero(n, n)); }

    Eigen::Index dim() const { return m_.rows(); }
    const ComplexMatrix& matrix() const { return m_; }
    double correction_norm() const { return correction_; }

    HermitianMatrix operator+(const HermitianMatrix& o) const { return HermitianMatrix(ComplexMatrix(m_ + o.m_)); }
    HermitianMatrix operator-(const HermitianMatrix& o) const { return HermitianMatrix(ComplexMatrix(m_ - o.m_)); }
    HermitianMatrix operator*(double s) const { return HermitianMatrix(ComplexMatrix(m_ * s)); }

private:
    ComplexMatrix m_;
    double correction_ = 0.0;
};

/// Eigenvalues (ascending) and the unitary whose columns are the matching
/// eigenvectors.  Column i spans the range of the rank-one spectral
/// projector of eigenvalue i; repeated eigenvalues are kept as separate atoms.
struct SpectralDecomposition {
    RealVector eigenvalues;
    ComplexMatrix eigenvectors;
    Eigen::Index source_dim = 0;

    Eigen::Index dim() const { return source_dim; }

    /// U diag(g(lambda)) U*.
    template <class G>
    ComplexMatrix apply(G&& g) const {
        ComplexMatrix scaled = eigenvectors;
        for (Eigen::Index j = 0; j < source_dim; ++j) scaled.col(j) *= Complex(g(eigenvalues(j)));
        return scaled * eigenvectors.adjoint();
    }

    ComplexMatrix reconstruct() const {
        return apply([](double l) { return Complex(l, 0.0); });
    }

    /// Rank-one spectral projector u_i u_i*.
    ComplexMatrix projector(Eigen::Index i) const { return eigenvectors.col(i) * eigenvectors.col(i).adjoint(); }

    double spectral_diameter() const {
        if (source_dim == 0) return 0.0;
        return eigenvalues(source_dim - 1) - eigenvalues(0);
    }
};

struct JacobiOptions {
    int max_sweeps = 64;
};

/// Hermitian eigendecomposition by cyclic Jacobi rotations with a fixed
/// row-major sweep order.  Eigenvectors are phase-normalized so that their
/// first non-negligible component is positive real, then sorted by
/// eigenvalue with lexicographic tie-breaking on the normalized vectors.
inline SpectralDecomposition eigh(const HermitianMatrix& h, JacobiOptions opts = {}) {
    const Eigen::Index n = h.dim();
    if (n == 0) throw std::invalid_argument("eigh: empty matrix");
    ComplexMatrix a = h.matrix();
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double scale = a.norm();

    auto off_norm = [&a, n]() {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) s += std::norm(a(i, j));
        return std::sqrt(2.0 * s);
    };

    const double target = 1e-3 * std::numeric_limits<double>::epsilon() * scale;
    bool converged = (scale == 0.0) || off_norm() <= target;
    for (int sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double r = std::abs(a(p, q));
                if (r == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Negligible against both diagonal entries: drop it outright.
                if (sweep > 3 && std::abs(app) + 100.0 * r == std::abs(app) &&
                    std::abs(aqq) + 100.0 * r == std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const Complex phase = a(p, q) / r;  // e^{i phi}
                const double tau = (aqq - app) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on (p, q); A <- J* A J, V <- V J.
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp + jqp * akq;
                    a(k, q) = s * akp + jqq * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(jqp) * aqk;
                    a(q, k) = s * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp + jqp * vkq;
                    v(k, q) = s * vkp + jqq * vkq;
                }
            }
        }
        converged = off_norm() <= target;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "eigh: Jacobi iteration did not converge after " << opts.max_sweeps
            << " sweeps; off-diagonal residual " << off_norm() << " (matrix norm " << scale << ")";
        throw NumericalError(msg.str());
    }

    for (Eigen::Index j = 0; j < n; ++j) {
        const double cutoff = 1e-12;
        for (Eigen::Index k = 0; k < n; ++k) {
            const double m = std::abs(v(k, j));
            if (m > cutoff) {
                v.col(j) *= std::conj(v(k, j)) / m;
                v(k, j) = Complex(m, 0.0);
                break;
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    auto lex_less = [&v, n](Eigen::Index x, Eigen::Index y) {
        for (Eigen::Index k = 0; k < n; ++k) {
            if (v(k, x).real() != v(k, y).real()) return v(k, x).real() < v(k, y).real();
            if (v(k, x).imag() != v(k, y).imag()) return v(k, x).imag() < v(k, y).imag();
        }
        return false;
    };
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        const double lx = a(x, x).real();
        const double ly = a(y, y).real();
        if (lx != ly) return lx < ly;
        return lex_less(x, y);
    });

    SpectralDecomposition out;
    out.source_dim = n;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.eigenvalues(j) = a(src, src).real();
        out.eigenvectors.col(j) = v.col(src);
    }
    return out;
}

/// Singular values in descending order.
inline RealVector singular_values(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues();
}

/// Schatten norm (sum s_i^p)^{1/p}; p = kInf gives the operator norm.
inline double schatten_norm(const ComplexMatrix& m, double p) {
    if (std::isnan(p) || p < 1.0) throw std::domain_error("schatten_norm: exponent must satisfy p >= 1");
    if (m.size() == 0) return 0.0;
    const RealVector s = singular_values(m);
    const double top = s.maxCoeff();
    if (top == 0.0) return 0.0;
    if (std::isinf(p)) return top;
    if (p == 2.0) return m.norm();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i) / top, p);
    return top * std::pow(acc, 1.0 / p);
}

inline double operator_norm(const ComplexMatrix& m) { return schatten_norm(m, kInf); }

/// A(eps) = A (I - i eps A)^{-1}, evaluated in the eigenbasis of A.
inline ComplexMatrix regularize(const SpectralDecomposition& a, double eps) {
    if (!(eps > 0.0)) throw std::domain_error("regularize: eps must be positive");
    return a.apply([eps](double l) { return Complex(l, 0.0) / Complex(1.0, -eps * l); });
}

inline ComplexMatrix regularize(const HermitianMatrix& a, double eps) { return regularize(eigh(a), eps); }

/// (I - i eps A)^{-1}.
inline ComplexMatrix regularizing_resolvent(const SpectralDecomposition& a, double eps) {
    return a.apply([eps](double l) { return 1.0 / Complex(1.0, -eps * l); });
}

/// (I - iB)^{-1}; its operator norm never exceeds one.
inline ComplexMatrix resolvent_shift(const SpectralDecomposition& b) {
    return b.apply([](double l) { return 1.0 / Complex(1.0, -l); });
}

inline ComplexMatrix resolvent_shift(const HermitianMatrix& b) { return resolvent_shift(eigh(b)); }

/// I - iB.
inline ComplexMatrix shift_operator(const HermitianMatrix& b) {
    return ComplexMatrix::Identity(b.dim(), b.dim()) - kI * b.matrix();
}

// ---------------------------------------------------------------------------
// Random ensembles

/// GUE-type Hermitian matrix (X + X*)/2 with standard complex Gaussian X.
inline HermitianMatrix random_hermitian(Stream& rng, Eigen::Index n) {
    ComplexMatrix x(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.complex_normal();
    return HermitianMatrix(ComplexMatrix(0.5 * (x + x.adjoint())));
}

/// Haar unitary: Gram-Schmidt on a complex Gaussian matrix with the usual
/// phase correction.
inline ComplexMatrix random_unitary(Stream& rng, Eigen::Index n) {
    ComplexMatrix x(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.complex_normal();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < j; ++k) {
                const Complex proj = x.col(k).dot(x.col(j));
                x.col(j) -= proj * x.col(k);
            }
        x.col(j) /= x.col(j).norm();
    }
    return x;
}

/// U diag(d) U* with Haar U and eigenvalues uniform on [lo, hi].
inline HermitianMatrix random_hermitian_spectrum(Stream& rng, Eigen::Index n, double lo, double hi) {
    const ComplexMatrix u = random_unitary(rng, n);
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = rng.uniform(lo, hi);
    return HermitianMatrix(ComplexMatrix(u * d * u.adjoint()));
}

/// Hermitian matrix of unit Schatten-p norm drawn from the GUE direction.
inline HermitianMatrix random_unit_hermitian(Stream& rng, Eigen::Index n, double p) {
    const HermitianMatrix g = random_hermitian(rng, n);
    const double nrm = schatten_norm(g.matrix(), p);
    if (nrm == 0.0) throw NumericalError("random_unit_hermitian: zero draw");
    return g * (1.0 / nrm);
}

// ---------------------------------------------------------------------------
// Plain-text matrix format:
//   dim <rows> <cols>
//   re,im re,im ...        (one line per row)

inline void write_matrix(std::ostream& os, const ComplexMatrix& m) {
    const auto old_prec = os.precision(std::numeric_limits<double>::max_digits10);
    os << "dim " << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ' ';
            os << m(i, j).real() << ',' << m(i, j).imag();
        }
        os << '\n';
    }
    os.precision(old_prec);
}

inline ComplexMatrix read_matrix(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(lineno, "missing header 'dim <rows> <cols>'");
    std::istringstream header(line);
    std::string tag;
    long rows = 0;
    long cols = 0;
    if (!(header >> tag >> rows >> cols) || tag != "dim" || rows <= 0 || cols <= 0)
        throw ParseError(lineno, "expected header 'dim <rows> <cols>' with positive sizes");
    ComplexMatrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (!next_line()) throw ParseError(lineno, "expected " + std::to_string(rows) + " rows");
        std::istringstream row(line);
        std::string cell;
        long j = 0;
        while (row >> cell) {
            if (j >= cols) throw ParseError(lineno, "too many entries in row");
            const auto comma = cell.find(',');
            if (comma == std::string::npos) throw ParseError(lineno, "entry '" + cell + "' is not of the form re,im");
            try {
                std::size_t used_re = 0;
                std::size_t used_im = 0;
                const std::string re_s = cell.substr(0, comma);
                const std::string im_s = cell.substr(comma + 1);
                const double re = std::stod(re_s, &used_re);
                const double im = std::stod(im_s, &used_im);
                if (used_re != re_s.size() || used_im != im_s.size()) throw std::invalid_argument(cell);
                m(i, j) = Complex(re, im);
            } catch (const std::exception&) {
                throw ParseError(lineno, "malformed entry '" + cell + "'");
            }
            ++j;
        }
        if (j != cols) throw ParseError(lineno, "expected " + std::to_string(cols) + " entries in row");
    }
    if (!all_finite(m)) throw ParseError(lineno, "non-finite entry");
    return m;
}

}  // namespace bivop
