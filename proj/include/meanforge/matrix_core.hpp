#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanforge/rational.hpp"
#include "meanforge/scalar_means.hpp"
#include "meanforge/verdict.hpp"

namespace meanforge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Frobenius norm and its square, for matrices of any shape.
inline double hs_norm(const Matrix& m) { return m.norm(); }
inline double hs_norm_sq(const Matrix& m) { return m.squaredNorm(); }

// Eigenvalue sign classification threshold, relative to the spectral norm.
inline constexpr double definiteness_tol = 1e-12;
// Largest tolerated skew part before an input is rejected as non-Hermitian.
inline constexpr double symmetry_reject_tol = 1e-8;

enum class Definiteness { indefinite, psd, pd };

inline const char* to_string(Definiteness d) {
    switch (d) {
        case Definiteness::indefinite: return "indefinite";
        case Definiteness::psd: return "psd";
        case Definiteness::pd: return "pd";
    }
    return "unknown";
}

namespace detail {

inline std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace detail

// A square complex matrix forced onto the Hermitian part (A + A*)/2 at
// construction. Inputs whose skew part exceeds symmetry_reject_tol relative
// to the input size are rejected rather than silently symmetrized.
class HermitianMatrix {
public:
    explicit HermitianMatrix(Matrix entries) {
        if (entries.rows() != entries.cols()) {
            std::ostringstream os;
            os << "hermitian matrix: input must be square, got " << entries.rows() << "x"
               << entries.cols();
            throw std::invalid_argument(os.str());
        }
        const double skew = hs_norm(entries - entries.adjoint());
        if (skew > symmetry_reject_tol * (1.0 + hs_norm(entries))) {
            throw std::domain_error("hermitian matrix: skew part too large, ||A - A*|| = " +
                                    detail::fmt_double(skew));
        }
        entries_ = 0.5 * (entries + Matrix(entries.adjoint()));
    }

    explicit HermitianMatrix(const Eigen::MatrixXd& real_entries)
        : HermitianMatrix(Matrix(real_entries.cast<Complex>())) {}

    static HermitianMatrix identity(Eigen::Index n) {
        return HermitianMatrix(Matrix(Matrix::Identity(n, n)));
    }

    static HermitianMatrix diagonal(const std::vector<double>& d) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()),
                                static_cast<Eigen::Index>(d.size()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return HermitianMatrix(m);
    }

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }

    Definiteness classification(double delta = definiteness_tol) const;
    bool is_pd(double delta = definiteness_tol) const {
        return classification(delta) == Definiteness::pd;
    }
    bool is_psd(double delta = definiteness_tol) const {
        return classification(delta) != Definiteness::indefinite;
    }
    double min_eigenvalue() const;
    double spectral_norm() const;

private:
    Matrix entries_;
};

// Ascending eigenvalues with matching unitary eigenvector columns.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Matrix vectors;
};

inline EigenDecomposition eigh(const HermitianMatrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries());
    if (solver.info() != Eigen::Success) {
        const double residual =
            hs_norm(a.entries() - solver.eigenvectors() *
                                      solver.eigenvalues().cast<Complex>().asDiagonal() *
                                      solver.eigenvectors().adjoint());
        throw std::runtime_error("eigendecomposition did not converge, residual = " +
                                 detail::fmt_double(residual));
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

inline Definiteness HermitianMatrix::classification(double delta) const {
    const Eigen::VectorXd ev = eigh(*this).eigenvalues;
    const double lo = ev(0);
    const double hi = ev(ev.size() - 1);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (lo > delta * scale) return Definiteness::pd;
    if (lo >= -delta * scale) return Definiteness::psd;
    return Definiteness::indefinite;
}

inline double HermitianMatrix::min_eigenvalue() const { return eigh(*this).eigenvalues(0); }

inline double HermitianMatrix::spectral_norm() const {
    const Eigen::VectorXd ev = eigh(*this).eigenvalues;
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

namespace detail {

// Reassemble V diag(mapped) V* as a Hermitian value; the constructor absorbs
// the rounding-level skew of the triple product.
inline HermitianMatrix assemble(const EigenDecomposition& ed, const Eigen::VectorXd& mapped) {
    return HermitianMatrix(
        Matrix(ed.vectors * mapped.cast<Complex>().asDiagonal() * ed.vectors.adjoint()));
}

} // namespace detail

// Spectral functional calculus: f applied to the eigenvalues, assembled with
// the input's eigenvectors. f must be finite on the whole spectrum.
template <class F>
HermitianMatrix matrix_function(const HermitianMatrix& a, F&& f) {
    const EigenDecomposition ed = eigh(a);
    Eigen::VectorXd mapped(ed.eigenvalues.size());
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
        const double v = f(ed.eigenvalues(i));
        if (!std::isfinite(v)) {
            throw std::domain_error("matrix function undefined at eigenvalue " +
                                    detail::fmt_double(ed.eigenvalues(i)));
        }
        mapped(i) = v;
    }
    return detail::assemble(ed, mapped);
}

namespace detail {

// Shared eigenvalue screening for powers: negative powers need a strictly
// positive spectrum; nonnegative powers tolerate eigenvalues within the
// definiteness band below zero and clamp them to exactly zero.
inline Eigen::VectorXd screened_spectrum(const EigenDecomposition& ed, bool negative_power) {
    Eigen::VectorXd ev = ed.eigenvalues;
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    const double delta = definiteness_tol * scale;
    if (negative_power) {
        if (!(ev(0) > delta)) {
            throw std::domain_error("fractional power: negative exponent needs a positive "
                                    "definite matrix, min eigenvalue = " +
                                    fmt_double(ev(0)));
        }
        return ev;
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -delta) {
            throw std::domain_error("fractional power: negative eigenvalue " +
                                    fmt_double(ev(i)));
        }
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    return ev;
}

} // namespace detail

// A^t through the eigendecomposition, with 0^t := 0 for t > 0. Exponents 0
// and 1 return I and A exactly, mirroring the scalar power conventions.
inline HermitianMatrix fractional_power(const HermitianMatrix& a, double t) {
    if (t == 0.0) return HermitianMatrix::identity(a.dim());
    if (t == 1.0) return a;
    const EigenDecomposition ed = eigh(a);
    Eigen::VectorXd ev = detail::screened_spectrum(ed, t < 0.0);
    Eigen::VectorXd mapped(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) mapped(i) = std::pow(ev(i), t);
    return detail::assemble(ed, mapped);
}

// A^(num/den) with the exponent kept as an exact fraction so that shallow
// dyadic exponents (0, 1/2, 1) hit the same primitives as the scalar layer.
inline HermitianMatrix fractional_power(const HermitianMatrix& a, std::int64_t num,
                                        std::int64_t den) {
    if (den <= 0) throw std::invalid_argument("fractional power: denominator must be positive");
    if (num == 0) return HermitianMatrix::identity(a.dim());
    if (num == den) return a;
    const EigenDecomposition ed = eigh(a);
    Eigen::VectorXd ev = detail::screened_spectrum(ed, num < 0);
    Eigen::VectorXd mapped(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) mapped(i) = frac_pow(ev(i), num, den);
    return detail::assemble(ed, mapped);
}

inline HermitianMatrix fractional_power(const HermitianMatrix& a, const RationalWeight& t) {
    return fractional_power(a, t.num(), t.den());
}

// Ordering verdict for L <= R in the positive semidefinite sense. margin is
// the smallest eigenvalue of R - L; scale is the larger spectral norm, and
// the decision allows slack tol * (1 + scale).
struct LoewnerVerdict {
    bool holds{false};
    double margin{0.0};
    double scale{0.0};
};

inline LoewnerVerdict loewner_compare(const HermitianMatrix& l, const HermitianMatrix& r,
                                      double tol = default_tol) {
    if (l.dim() != r.dim()) {
        std::ostringstream os;
        os << "loewner compare: dimension mismatch " << l.dim() << " vs " << r.dim();
        throw std::invalid_argument(os.str());
    }
    const HermitianMatrix diff(Matrix(r.entries() - l.entries()));
    LoewnerVerdict v;
    v.margin = diff.min_eigenvalue();
    v.scale = std::max(l.spectral_norm(), r.spectral_norm());
    v.holds = v.margin >= -tol * (1.0 + v.scale);
    return v;
}

} // namespace meanforge
