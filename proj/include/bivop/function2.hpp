#pragma once

#include <concepts>
#include <functional>
#include <sstream>
#include <utility>

#include "bivop/linalg.hpp"

namespace bivop {

/// Anything callable as f(x, y) -> complex.
template <class F>
concept Bivariate = requires(const F& f, double x, double y) {
    { f(x, y) } -> std::convertible_to<Complex>;
};

/// A bivariate function that also knows its partial derivatives.
template <class F>
concept DifferentiableBivariate = Bivariate<F> && requires(const F& f, double x, double y) {
    { f.dx(x, y) } -> std::convertible_to<Complex>;
    { f.dy(x, y) } -> std::convertible_to<Complex>;
};

/// Types that can fill a whole value table f(xs[i], ys[j]) at once.
template <class F>
concept Tabulable = requires(const F& f, const RealVector& xs, const RealVector& ys) {
    { f.table(xs, ys) } -> std::convertible_to<ComplexMatrix>;
};

/// Type-erased bivariate function with optional partial derivatives.
struct Function2 {
    std::function<Complex(double, double)> value;
    std::function<Complex(double, double)> d1;
    std::function<Complex(double, double)> d2;

    Complex operator()(double x, double y) const { return value(x, y); }

    Complex dx(double x, double y) const {
        if (!d1) throw std::logic_error("Function2: no derivative in the first variable");
        return d1(x, y);
    }

    Complex dy(double x, double y) const {
        if (!d2) throw std::logic_error("Function2: no derivative in the second variable");
        return d2(x, y);
    }
};

/// (x, y) -> g(x) h(y).
template <class G, class H>
Function2 separable(G g, H h) {
    return Function2{[g, h](double x, double y) { return Complex(g(x)) * Complex(h(y)); }, {}, {}};
}

namespace detail {

inline std::string point_label(double x, double y) {
    std::ostringstream os;
    os.precision(17);
    os << '(' << x << ", " << y << ')';
    return os.str();
}

}  // namespace detail

/// F(i, j) = f(xs[i], ys[j]); throws NumericalError naming the first
/// spectral point where f is not finite.
template <Bivariate F>
ComplexMatrix kernel_table(const F& f, const RealVector& xs, const RealVector& ys) {
    ComplexMatrix out;
    if constexpr (Tabulable<F>) {
        out = f.table(xs, ys);
    } else {
        out.resize(xs.size(), ys.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i)
            for (Eigen::Index j = 0; j < ys.size(); ++j) out(i, j) = Complex(f(xs(i), ys(j)));
    }
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        for (Eigen::Index j = 0; j < ys.size(); ++j)
            if (!std::isfinite(out(i, j).real()) || !std::isfinite(out(i, j).imag()))
                throw NumericalError("function value is not finite at spectral point " +
                                     detail::point_label(xs(i), ys(j)));
    return out;
}

}  // namespace bivop
