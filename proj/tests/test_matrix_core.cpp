#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "meanforge/matrix_core.hpp"
#include "test_util.hpp"

using namespace meanforge;
using testutil::random_hermitian;
using testutil::random_matrix;
using testutil::random_pd;
using testutil::random_unitary;

namespace {

Matrix sym2(double a00, double a01, double a11) {
    Matrix m(2, 2);
    m << a00, a01, a01, a11;
    return m;
}

// Ascending-coefficient polynomials for the calculus property checks.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x) {
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

Poly poly_add(Poly p, const Poly& q) {
    if (q.size() > p.size()) p.resize(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) p[i] += q[i];
    return p;
}

Poly random_poly(std::mt19937_64& rng, int max_degree, double coeff_box) {
    const int deg = std::uniform_int_distribution<int>(0, max_degree)(rng);
    std::uniform_real_distribution<double> c(-coeff_box, coeff_box);
    Poly p(static_cast<std::size_t>(deg) + 1);
    for (double& v : p) v = c(rng);
    return p;
}

} // namespace

TEST(Construction, RejectsNonSquare) {
    EXPECT_THROW(HermitianMatrix{Matrix(Matrix::Zero(2, 3))}, std::invalid_argument);
}

TEST(Construction, RejectsLargeSkew) {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(1, 0), Complex(-1, 0), Complex(0, 0);
    EXPECT_THROW(HermitianMatrix{m}, std::domain_error);
}

TEST(Construction, SymmetrizesSmallSkew) {
    Matrix m = sym2(2.0, 1.0, 3.0);
    m(0, 1) += Complex(1e-12, 1e-12);
    const HermitianMatrix h(m);
    const Matrix& e = h.entries();
    EXPECT_EQ(e(0, 1), std::conj(e(1, 0)));
    EXPECT_EQ(e(0, 0).imag(), 0.0);
    EXPECT_NEAR(e(0, 1).real(), 1.0, 1e-12);
}

TEST(Construction, DiagonalFactory) {
    const auto h = HermitianMatrix::diagonal({4.0, 9.0});
    EXPECT_EQ(h.dim(), 2);
    EXPECT_EQ(h.entries()(0, 0), Complex(4.0, 0.0));
    EXPECT_EQ(h.entries()(1, 1), Complex(9.0, 0.0));
    EXPECT_EQ(h.entries()(0, 1), Complex(0.0, 0.0));
}

TEST(Eigh, TwoByTwoFrozen) {
    const HermitianMatrix h(sym2(2.0, 1.0, 2.0));
    const auto ed = eigh(h);
    EXPECT_NEAR(ed.eigenvalues(0), 1.0, 1e-12);
    EXPECT_NEAR(ed.eigenvalues(1), 3.0, 1e-12);
}

TEST(Eigh, DiagonalIsExact) {
    const auto ed = eigh(HermitianMatrix::diagonal({4.0, 9.0}));
    EXPECT_DOUBLE_EQ(ed.eigenvalues(0), 4.0);
    EXPECT_DOUBLE_EQ(ed.eigenvalues(1), 9.0);
    // Eigenvectors are the coordinate axes up to permutation and phase.
    for (int j = 0; j < 2; ++j) {
        double top = 0.0;
        for (int i = 0; i < 2; ++i) top = std::max(top, std::abs(ed.vectors(i, j)));
        EXPECT_NEAR(top, 1.0, 1e-12);
    }
}

TEST(Eigh, ScaledIdentity) {
    const HermitianMatrix h(Matrix(2.5 * Matrix::Identity(3, 3)));
    const auto ed = eigh(h);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(ed.eigenvalues(i), 2.5);
}

TEST(Eigh, ReconstructionAndOrthonormality) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        const HermitianMatrix h(random_hermitian(rng, n, trial % 2 == 0));
        const auto ed = eigh(h);
        for (int i = 1; i < n; ++i) EXPECT_LE(ed.eigenvalues(i - 1), ed.eigenvalues(i));
        const Matrix rebuilt =
            ed.vectors * ed.eigenvalues.cast<Complex>().asDiagonal() * ed.vectors.adjoint();
        EXPECT_LE(hs_norm(rebuilt - h.entries()), 1e-12 * (1.0 + hs_norm(h.entries())));
        EXPECT_LE(hs_norm(ed.vectors.adjoint() * ed.vectors - Matrix::Identity(n, n)), 1e-12);
    }
}

TEST(Classification, FrozenCases) {
    EXPECT_EQ(HermitianMatrix::diagonal({2.0, 1.0}).classification(), Definiteness::pd);
    EXPECT_EQ(HermitianMatrix(sym2(1.0, 1.0, 1.0)).classification(), Definiteness::psd);
    EXPECT_EQ(HermitianMatrix::diagonal({1.0, -1.0}).classification(), Definiteness::indefinite);
    EXPECT_EQ(HermitianMatrix::diagonal({1.0, -1e-15}).classification(), Definiteness::psd);
    EXPECT_EQ(HermitianMatrix(Matrix(Matrix::Zero(2, 2))).classification(), Definiteness::psd);
    EXPECT_TRUE(HermitianMatrix::diagonal({2.0, 1.0}).is_pd());
    EXPECT_FALSE(HermitianMatrix(sym2(1.0, 1.0, 1.0)).is_pd());
    EXPECT_TRUE(HermitianMatrix(sym2(1.0, 1.0, 1.0)).is_psd());
}

TEST(MatrixFunction, SqrtOfDiagonal) {
    const auto r = matrix_function(HermitianMatrix::diagonal({4.0, 9.0}),
                                   [](double t) { return std::sqrt(t); });
    EXPECT_DOUBLE_EQ(r.entries()(0, 0).real(), 2.0);
    EXPECT_DOUBLE_EQ(r.entries()(1, 1).real(), 3.0);
    EXPECT_NEAR(std::abs(r.entries()(0, 1)), 0.0, 1e-15);
}

TEST(MatrixFunction, SqrtOfCoupledPair) {
    const auto r = matrix_function(HermitianMatrix(sym2(2.0, 1.0, 2.0)),
                                   [](double t) { return std::sqrt(t); });
    const double d = 0.5 * (std::sqrt(3.0) + 1.0);
    const double o = 0.5 * (std::sqrt(3.0) - 1.0);
    EXPECT_NEAR(r.entries()(0, 0).real(), d, 1e-12);
    EXPECT_NEAR(r.entries()(1, 1).real(), d, 1e-12);
    EXPECT_NEAR(r.entries()(0, 1).real(), o, 1e-12);
}

TEST(MatrixFunction, IdentityMapReturnsInput) {
    const HermitianMatrix h(sym2(2.0, 1.0, 2.0));
    const auto r = matrix_function(h, [](double t) { return t; });
    const double slack = 4 * std::numeric_limits<double>::epsilon() * hs_norm(h.entries());
    EXPECT_LE(hs_norm(r.entries() - h.entries()), slack);
}

TEST(MatrixFunction, SpectralMapping) {
    std::mt19937_64 rng(102);
    const auto f = [](double t) { return t * t * t - 2.0 * t + 1.0; };
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        const HermitianMatrix h(random_hermitian(rng, n, trial % 2 == 0));
        const auto ed = eigh(h);
        std::vector<double> mapped;
        for (int i = 0; i < n; ++i) mapped.push_back(f(ed.eigenvalues(i)));
        std::sort(mapped.begin(), mapped.end());
        const auto fd = eigh(matrix_function(h, f));
        for (int i = 0; i < n; ++i) EXPECT_NEAR(fd.eigenvalues(i), mapped[static_cast<std::size_t>(i)], 1e-10);
    }
}

TEST(MatrixFunction, RejectsUndefinedPoint) {
    try {
        matrix_function(HermitianMatrix::diagonal({1.0, -1.0}),
                        [](double t) { return std::sqrt(t); });
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos);
    }
}

TEST(OrderPreservation, PointwiseDominatedPolynomials) {
    // For f >= g on the spectrum, f(X) - g(X) stays positive semidefinite up
    // to rounding. f is built as g plus a squared polynomial.
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        const HermitianMatrix x(random_hermitian(rng, n, trial % 2 == 1));
        const Poly g = random_poly(rng, 5, 2.0);
        const Poly h = random_poly(rng, 3, 1.0);
        const Poly f = poly_add(g, poly_mul(h, h));
        const auto fx = matrix_function(x, [&](double t) { return poly_eval(f, t); });
        const auto gx = matrix_function(x, [&](double t) { return poly_eval(g, t); });
        const HermitianMatrix diff(Matrix(fx.entries() - gx.entries()));
        const double floor = -1e-10 * (1.0 + hs_norm(fx.entries()));
        EXPECT_GE(diff.min_eigenvalue(), floor);
    }
}

TEST(FractionalPower, DiagonalSqrt) {
    const auto r = fractional_power(HermitianMatrix::diagonal({4.0, 9.0}), 0.5);
    EXPECT_DOUBLE_EQ(r.entries()(0, 0).real(), 2.0);
    EXPECT_DOUBLE_EQ(r.entries()(1, 1).real(), 3.0);
    const auto rq = fractional_power(HermitianMatrix::diagonal({4.0, 9.0}), 1, 2);
    EXPECT_EQ(r.entries()(0, 0), rq.entries()(0, 0));
    EXPECT_EQ(r.entries()(1, 1), rq.entries()(1, 1));
}

TEST(FractionalPower, ZeroAndOne) {
    std::mt19937_64 rng(104);
    const HermitianMatrix a(random_pd(rng, 4, true));
    const auto a1 = fractional_power(a, 1.0);
    EXPECT_LE(hs_norm(a1.entries() - a.entries()),
              4 * std::numeric_limits<double>::epsilon() * hs_norm(a.entries()));
    const auto a0 = fractional_power(a, 0.0);
    EXPECT_LE(hs_norm(a0.entries() - Matrix::Identity(4, 4)), 1e-13);
}

TEST(FractionalPower, RoundTripReconstructs) {
    std::mt19937_64 rng(105);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        const HermitianMatrix a(random_pd(rng, n, trial % 2 == 0));
        const double t = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        const auto back = fractional_power(fractional_power(a, t), 1.0 / t);
        EXPECT_LE(hs_norm(back.entries() - a.entries()), 1e-10 * hs_norm(a.entries()));
    }
}

TEST(FractionalPower, SingularPsdSqrt) {
    const auto r = fractional_power(HermitianMatrix(sym2(1.0, 1.0, 1.0)), 1, 2);
    const double s = std::sqrt(2.0) / 2.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(r.entries()(i, j).real(), s, 1e-12);
    const auto p0 = fractional_power(HermitianMatrix(sym2(1.0, 1.0, 1.0)), 0.0);
    EXPECT_LE(hs_norm(p0.entries() - Matrix::Identity(2, 2)), 1e-13);
}

TEST(FractionalPower, RejectsNegativeSpectrum) {
    EXPECT_THROW(fractional_power(HermitianMatrix::diagonal({1.0, -1.0}), 0.5),
                 std::domain_error);
    try {
        fractional_power(HermitianMatrix::diagonal({1.0, 0.0}), -0.5);
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("positive definite"), std::string::npos);
    }
}

TEST(FractionalPower, NegativeExponentInverts) {
    std::mt19937_64 rng(106);
    const HermitianMatrix a(random_pd(rng, 5, true));
    const auto inv = fractional_power(a, -1, 1);
    EXPECT_LE(hs_norm(Matrix(inv.entries() * a.entries()) - Matrix::Identity(5, 5)), 1e-10);
}

TEST(FractionalPower, HalfPowerSquaresBack) {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        const HermitianMatrix a(random_pd(rng, n, trial % 2 == 0));
        const auto half = fractional_power(a, 1, 2);
        EXPECT_LE(hs_norm(Matrix(half.entries() * half.entries()) - a.entries()),
                  1e-10 * hs_norm(a.entries()));
    }
}

TEST(LoewnerCompare, FrozenCases) {
    const auto ok = loewner_compare(HermitianMatrix::diagonal({1.0, 1.0}),
                                    HermitianMatrix::diagonal({2.0, 1.0}));
    EXPECT_TRUE(ok.holds);
    EXPECT_DOUBLE_EQ(ok.margin, 0.0);
    EXPECT_DOUBLE_EQ(ok.scale, 2.0);

    const auto bad = loewner_compare(HermitianMatrix::diagonal({2.0, 1.0}),
                                     HermitianMatrix::diagonal({1.0, 2.0}));
    EXPECT_FALSE(bad.holds);
    EXPECT_DOUBLE_EQ(bad.margin, -1.0);
}

TEST(LoewnerCompare, RejectsDimensionMismatch) {
    EXPECT_THROW(loewner_compare(HermitianMatrix::diagonal({1.0}),
                                 HermitianMatrix::diagonal({1.0, 1.0})),
                 std::invalid_argument);
}

TEST(LoewnerCompare, PsdShiftHolds) {
    std::mt19937_64 rng(108);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        const HermitianMatrix l(random_hermitian(rng, n, trial % 2 == 0));
        const Matrix m = random_matrix(rng, n, n, trial % 2 == 0);
        const HermitianMatrix r(Matrix(l.entries() + m * m.adjoint()));
        EXPECT_TRUE(loewner_compare(l, r).holds);
    }
}

TEST(HsNorm, FrozenCases) {
    Matrix m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    EXPECT_NEAR(hs_norm(m), std::sqrt(30.0), 1e-12 * 6.0);
    EXPECT_DOUBLE_EQ(hs_norm(Matrix(Matrix::Zero(3, 3))), 0.0);
    for (int n : {1, 2, 5, 8})
        EXPECT_NEAR(hs_norm(Matrix(Matrix::Identity(n, n))), std::sqrt(double(n)), 1e-12 * 3.0);
}

TEST(HsNorm, MatchesTraceAndSingularValues) {
    std::mt19937_64 rng(109);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        const Matrix m = random_matrix(rng, n, n, trial % 2 == 0);
        const double nrm = hs_norm(m);
        const double tr = (m.adjoint() * m).trace().real();
        EXPECT_NEAR(nrm * nrm, tr, 1e-12 * tr);
        Eigen::JacobiSVD<Matrix> svd(m);
        EXPECT_NEAR(nrm, svd.singularValues().norm(), 1e-12 * nrm);
        EXPECT_NEAR(hs_norm_sq(m), tr, 1e-12 * tr);
    }
}

TEST(HsNorm, UnitaryInvariance) {
    std::mt19937_64 rng(110);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = std::uniform_int_distribution<int>(2, 8)(rng);
        const Matrix m = random_matrix(rng, n, n, true);
        const Matrix u = random_unitary(rng, n, true);
        const Matrix v = random_unitary(rng, n, true);
        EXPECT_NEAR(hs_norm(Matrix(u * m * v.adjoint())), hs_norm(m), 1e-12 * hs_norm(m));
    }
}
