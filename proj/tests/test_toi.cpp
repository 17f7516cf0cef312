#include <gtest/gtest.h>

#include <cmath>

#include "bivop/besov.hpp"
#include "bivop/toi.hpp"
#include "oracles.hpp"

using namespace bivop;

namespace {

Function2 poly(std::function<Complex(double, double)> v, std::function<Complex(double, double)> d1,
               std::function<Complex(double, double)> d2) {
    return Function2{std::move(v), std::move(d1), std::move(d2)};
}

const Function2 kX = poly([](double x, double) { return x; }, [](double, double) { return 1.0; },
                          [](double, double) { return 0.0; });
const Function2 kY = poly([](double, double y) { return y; }, [](double, double) { return 0.0; },
                          [](double, double) { return 1.0; });
const Function2 kXY = poly([](double x, double y) { return x * y; }, [](double, double y) { return y; },
                           [](double x, double) { return x; });
const Function2 kXSquared = poly([](double x, double) { return x * x; }, [](double x, double) { return 2 * x; },
                                 [](double, double) { return 0.0; });

// e^{i(x + y)} and e^{ixy} with derivatives
const Function2 kExpSum = poly([](double x, double y) { return std::exp(Complex(0, x + y)); },
                               [](double x, double y) { return kI * std::exp(Complex(0, x + y)); },
                               [](double x, double y) { return kI * std::exp(Complex(0, x + y)); });
const Function2 kExpProd = poly([](double x, double y) { return std::exp(Complex(0, x * y)); },
                                [](double x, double y) { return kI * y * std::exp(Complex(0, x * y)); },
                                [](double x, double y) { return kI * x * std::exp(Complex(0, x * y)); });

HermitianMatrix herm(Stream& rng, Eigen::Index n, double scale = 1.0) { return random_hermitian(rng, n) * scale; }

ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

}  // namespace

TEST(DividedDifference, Examples) {
    EXPECT_EQ(dd1(kX, 2.0, 5.0, 1.0), Complex(1.0));
    EXPECT_EQ(dd1(kXSquared, 1.0, 3.0, 0.0), Complex(4.0));
    const Function2 e = poly([](double x, double) { return std::exp(Complex(0, x)); },
                             [](double x, double) { return kI * std::exp(Complex(0, x)); },
                             [](double, double) { return 0.0; });
    EXPECT_EQ(dd1(e, 0.0, 0.0, 0.0), kI);
    EXPECT_EQ(dd2(kY, 0.0, -1.0, 4.0), Complex(1.0));
    EXPECT_EQ(dd2(kXY, 2.0, 1.0, 7.0), Complex(2.0));
    const Function2 c = poly([](double, double y) { return std::cos(y); }, [](double, double) { return 0.0; },
                             [](double, double y) { return -std::sin(y); });
    EXPECT_EQ(dd2(c, 0.0, 0.0, 0.0), Complex(0.0));
    // within delta the midpoint derivative is used
    EXPECT_EQ(dd1(kXSquared, 1.0, 1.0 + 1e-12, 0.0, 1e-10), Complex(2.0 + 1e-12));
}

TEST(DividedDifference, SymmetricInSwappedPoints) {
    Stream rng(4);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5), y = rng.uniform(-5, 5);
        EXPECT_EQ(dd1(kExpProd, a, b, y), dd1(kExpProd, b, a, y));
        EXPECT_EQ(dd2(kExpProd, y, a, b), dd2(kExpProd, y, b, a));
    }
}

TEST(TripleIntegral, ConstantKernelIsProduct) {
    Stream rng(1);
    const auto e1 = eigh(herm(rng, 4));
    const auto e2 = eigh(herm(rng, 3));
    const auto e3 = eigh(herm(rng, 5));
    ComplexMatrix t(4, 3), r(3, 5);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.complex_normal();
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.complex_normal();
    const ComplexMatrix got = toi_eval([](double, double, double) { return 1.0; }, e1, t, e2, r, e3);
    EXPECT_LE(oracle::relative_error(got, t * r), 1e-13);
}

TEST(TripleIntegral, SeparableKernelFactorizes) {
    Stream rng(2);
    const auto n = 5;
    const HermitianMatrix a = herm(rng, n), b = herm(rng, n), c = herm(rng, n);
    const ComplexMatrix t = herm(rng, n).matrix(), r = herm(rng, n).matrix();
    const auto g1 = [](double x) { return std::exp(Complex(0, x)); };
    const auto g2 = [](double x) { return Complex(std::cos(x), x); };
    const auto g3 = [](double x) { return 1.0 / (1.0 + x * x); };
    const ComplexMatrix got = toi_eval([&](double x, double y, double z) { return g1(x) * g2(y) * g3(z); }, eigh(a), t,
                                       eigh(b), r, eigh(c));
    const ComplexMatrix want = oracle::matrix_function(a.matrix(), g1) * t * oracle::matrix_function(b.matrix(), g2) *
                               r * oracle::matrix_function(c.matrix(), g3);
    EXPECT_LE(oracle::relative_error(got, want), 1e-12);
}

TEST(TripleIntegral, AgreesWithBruteForceProjectorSum) {
    Stream rng(3);
    {
        const auto e1 = eigh(herm(rng, 3)), e2 = eigh(herm(rng, 3)), e3 = eigh(herm(rng, 3));
        const ComplexMatrix t = herm(rng, 3).matrix(), r = herm(rng, 3).matrix();
        const auto k = divided_difference_kernel(kXY, 1);
        EXPECT_LE(oracle::relative_error(toi_eval(k, e1, t, e2, r, e3), oracle::triple_projector_sum(k, e1, t, e2, r, e3)),
                  1e-12);
    }
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 1 + trial % 4;
        const auto e1 = eigh(herm(rng, n)), e2 = eigh(herm(rng, n)), e3 = eigh(herm(rng, n));
        ComplexMatrix t(n, n), r(n, n);
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.complex_normal();
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.complex_normal();
        const auto k = divided_difference_kernel(kExpProd, 1 + trial % 2);
        EXPECT_LE(oracle::relative_error(toi_eval(k, e1, t, e2, r, e3), oracle::triple_projector_sum(k, e1, t, e2, r, e3)),
                  1e-12)
            << trial;
    }
}

TEST(TripleIntegral, NonFiniteKernelIsReported) {
    const auto e = eigh(HermitianMatrix::diagonal({1.0, 2.0}));
    EXPECT_THROW(toi_eval([](double x, double, double) { return 1.0 / (x - 1.0); }, e, identity(2), e, identity(2), e),
                 NumericalError);
}

TEST(TripleIntegral, DualityRecoversDirectEvaluation) {
    Stream rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const auto e1 = eigh(herm(rng, n)), e2 = eigh(herm(rng, n)), e3 = eigh(herm(rng, n));
        ComplexMatrix t(n, n), r(n, n);
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = rng.complex_normal();
        for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = rng.complex_normal();
        const auto psi = [](double x, double y, double z) { return std::exp(Complex(0, x - 2 * y + 0.5 * z)) + x * z; };
        const ComplexMatrix direct = toi_eval(psi, e1, t, e2, r, e3);
        for (IntegralKind kind : {IntegralKind::first, IntegralKind::second})
            EXPECT_LE(oracle::relative_error(toi_eval_by_duality(psi, e1, t, e2, r, e3, kind), direct), 1e-10);
    }
}

TEST(OperatorDifference, FirstVariableExamples) {
    Stream rng(10);
    const HermitianMatrix a1 = herm(rng, 4), a2 = herm(rng, 4), b = herm(rng, 4);
    // f = x: difference is A1 - A2 whatever B is
    EXPECT_LE((diff_first_variable(kX, a1, a2, b) - (a1.matrix() - a2.matrix())).norm(), 1e-12);
    // f = xy: (A1 - A2) B
    EXPECT_LE((diff_first_variable(kXY, a1, a2, b) - (a1.matrix() - a2.matrix()) * b.matrix()).norm(), 1e-12);
    EXPECT_LE(diff_first_variable(kExpProd, a1, a1, b).norm(), 1e-14);
}

TEST(OperatorDifference, SecondVariableExamples) {
    Stream rng(11);
    const HermitianMatrix a = herm(rng, 4), b1 = herm(rng, 4), b2 = herm(rng, 4);
    EXPECT_LE((diff_second_variable(kY, a, b1, b2) - (b1.matrix() - b2.matrix())).norm(), 1e-12);
    EXPECT_LE((diff_second_variable(kXY, a, b1, b2) - a.matrix() * (b1.matrix() - b2.matrix())).norm(), 1e-12);
}

TEST(OperatorDifference, ExponentialExamples) {
    {
        Stream rng(11);
        const HermitianMatrix a1 = herm(rng, 4), a2 = herm(rng, 4), b = herm(rng, 4);
        const ComplexMatrix want = oracle::projector_sum(kExpSum, eigh(a1), eigh(b)) -
                                   oracle::projector_sum(kExpSum, eigh(a2), eigh(b));
        EXPECT_LE((diff_first_variable(kExpSum, a1, a2, b) - want).norm(), 1e-10);
    }
    {
        Stream rng(12);
        const HermitianMatrix a = herm(rng, 4), b1 = herm(rng, 4), b2 = herm(rng, 4);
        const ComplexMatrix want = oracle::projector_sum(kExpProd, eigh(a), eigh(b1)) -
                                   oracle::projector_sum(kExpProd, eigh(a), eigh(b2));
        EXPECT_LE((diff_second_variable(kExpProd, a, b1, b2) - want).norm(), 1e-10);
    }
}

TEST(OperatorDifference, BothFullRoutesReproduceDifference) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Stream rng(seed, {13});
        const TrigPolynomial2 f = random_bandlimited(4.0, 8, seed);
        const Quadruple q(herm(rng, 5, 2.0), herm(rng, 5, 2.0), herm(rng, 5, 2.0), herm(rng, 5, 2.0));
        const ComplexMatrix want = oracle::projector_sum(f, q.e_a1, q.e_b1) - oracle::projector_sum(f, q.e_a2, q.e_b2);
        for (auto route : {FullDifferenceRoute::via_a2_b1, FullDifferenceRoute::via_a1_b2})
            EXPECT_LE((diff_full(f, q, route) - want).norm(), 1e-9) << route_name(route);
    }
}

TEST(OperatorDifference, NearCoincidentSpectra) {
    // A2 = A1 + 1e-12 rank one: eigenvalues nearly coincide and the kernel
    // switches to derivatives; the identity must survive.
    Stream rng(14);
    const HermitianMatrix a1 = herm(rng, 5);
    ComplexVector v(5);
    for (Eigen::Index i = 0; i < 5; ++i) v(i) = rng.complex_normal();
    v /= v.norm();
    const HermitianMatrix a2(ComplexMatrix(a1.matrix() + 1e-12 * v * v.adjoint()));
    const HermitianMatrix b = herm(rng, 5);
    const ComplexMatrix got = diff_first_variable(kExpProd, a1, a2, b);
    const ComplexMatrix want = oracle::projector_sum(kExpProd, eigh(a1), eigh(b)) -
                               oracle::projector_sum(kExpProd, eigh(a2), eigh(b));
    EXPECT_TRUE(all_finite(got));
    EXPECT_LE((got - want).norm(), 1e-6 * 1e-12 + 1e-12);
    EXPECT_LE(got.norm(), 10 * 1e-12 * 5);
}

TEST(OperatorDifference, IdenticalOperatorsGiveZero) {
    Stream rng(15);
    const HermitianMatrix a = herm(rng, 4), b = herm(rng, 4);
    const Quadruple q(a, b, a, b);
    for (auto route : {FullDifferenceRoute::via_a2_b1, FullDifferenceRoute::via_a1_b2})
        EXPECT_LE(diff_full(kExpProd, q, route).norm(), 1e-13);
}

TEST(OperatorDifference, MixedPairingIsNotAnIdentity) {
    Stream rng(16);
    const Quadruple q(herm(rng, 4), herm(rng, 4), herm(rng, 4), herm(rng, 4));
    const ComplexMatrix want = oracle::projector_sum(kExpProd, q.e_a1, q.e_b1) - oracle::projector_sum(kExpProd, q.e_a2, q.e_b2);
    EXPECT_GT((diff_full_mixed(kExpProd, q) - want).norm(), 1e-6);
}
