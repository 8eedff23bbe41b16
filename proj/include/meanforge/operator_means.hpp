#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "meanforge/dyadic_schedule.hpp"
#include "meanforge/matrix_core.hpp"
#include "meanforge/scalar_means.hpp"
#include "meanforge/verdict.hpp"

namespace meanforge {

// The four nu-weighted operator means of a positive definite pair.
struct OperatorMeanBundle {
    HermitianMatrix nabla;
    HermitianMatrix sharp;
    HermitianMatrix heinz;
    HermitianMatrix harmonic;
};

namespace detail {

inline void require_pd_spectrum(const Eigen::VectorXd& ev, const char* name) {
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (!(ev(0) > definiteness_tol * scale)) {
        throw std::domain_error(std::string("operator means: ") + name +
                                " is not positive definite, min eigenvalue = " +
                                fmt_double(ev(0)));
    }
}

// Everything the congruence route needs: A^(1/2), and the spectrum of
// X = A^(-1/2) B A^(-1/2). Any spectral function of X conjugated back by
// A^(1/2) is evaluated with exactly these two decompositions.
struct CongruenceFrame {
    HermitianMatrix a_half;
    Eigen::VectorXd xi;
    Matrix w;
};

inline CongruenceFrame make_frame(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) {
        std::ostringstream os;
        os << "operator means: dimension mismatch " << a.dim() << " vs " << b.dim();
        throw std::invalid_argument(os.str());
    }
    const EigenDecomposition ea = eigh(a);
    require_pd_spectrum(ea.eigenvalues, "A");
    require_pd_spectrum(eigh(b).eigenvalues, "B");

    Eigen::VectorXd half(ea.eigenvalues.size());
    Eigen::VectorXd half_inv(ea.eigenvalues.size());
    for (Eigen::Index i = 0; i < ea.eigenvalues.size(); ++i) {
        half(i) = frac_pow(ea.eigenvalues(i), 1, 2);
        half_inv(i) = frac_pow(ea.eigenvalues(i), -1, 2);
    }
    const HermitianMatrix a_half = assemble(ea, half);
    const HermitianMatrix a_half_inv = assemble(ea, half_inv);
    const HermitianMatrix x(
        Matrix(a_half_inv.entries() * b.entries() * a_half_inv.entries()));
    const EigenDecomposition ex = eigh(x);
    if (!(ex.eigenvalues(0) > 0.0)) {
        throw std::domain_error(
            "operator means: congruence transform lost positivity, min eigenvalue = " +
            fmt_double(ex.eigenvalues(0)));
    }
    return {a_half, ex.eigenvalues, ex.vectors};
}

inline HermitianMatrix lift(const CongruenceFrame& f, const Eigen::VectorXd& vals) {
    const Matrix inner = f.w * vals.cast<Complex>().asDiagonal() * f.w.adjoint();
    return HermitianMatrix(Matrix(f.a_half.entries() * inner * f.a_half.entries()));
}

// Squared dyadic bracket (xi^(x/2) - xi^(y/2))^2 with x = m/2^k, y = (m+1)/2^k.
inline double sharp_bracket_sq(double xi, const ScheduleEntry& e) {
    return square(dyadic_pow(xi, e.m, e.k + 1) - dyadic_pow(xi, e.m + 1, e.k + 1));
}

// The same bracket at the complementary exponents 1-x, 1-y.
inline double sharp_bracket_sq_complement(double xi, const ScheduleEntry& e) {
    const std::uint64_t pow2 = std::uint64_t{1} << e.k;
    return square(dyadic_pow(xi, pow2 - e.m, e.k + 1) -
                  dyadic_pow(xi, pow2 - e.m - 1, e.k + 1));
}

// Heinz bracket H_x - 2H_z + H_y evaluated as the average of the two squared
// brackets above, which it equals identically and which keeps it nonnegative.
inline double heinz_bracket(double xi, const ScheduleEntry& e) {
    return 0.5 * (sharp_bracket_sq(xi, e) + sharp_bracket_sq_complement(xi, e));
}

// Per-level series values r_k * bracket(xi) for one eigenvalue of X.
template <class Bracket>
Eigen::VectorXd series_values(const Eigen::VectorXd& xi, const ScheduleEntry& e, Bracket br) {
    Eigen::VectorXd vals(xi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i)
        vals(i) = e.r.is_zero() ? 0.0 : e.r.value() * br(xi(i), e);
    return vals;
}

} // namespace detail

inline OperatorMeanBundle operator_means(const HermitianMatrix& a, const HermitianMatrix& b,
                                         const RationalWeight& nu) {
    const detail::CongruenceFrame f = detail::make_frame(a, b);
    const auto p = nu.num();
    const auto q = nu.den();
    const double w1 = static_cast<double>(q - p) / static_cast<double>(q);
    const double w2 = static_cast<double>(p) / static_cast<double>(q);

    const Eigen::Index n = f.xi.size();
    Eigen::VectorXd sharp_vals(n), sharp_c_vals(n), harmonic_vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sharp_vals(i) = frac_pow(f.xi(i), p, q);
        sharp_c_vals(i) = frac_pow(f.xi(i), q - p, q);
        harmonic_vals(i) = 1.0 / (w1 + w2 / f.xi(i));
    }

    const HermitianMatrix sharp = detail::lift(f, sharp_vals);
    const HermitianMatrix sharp_c = detail::lift(f, sharp_c_vals);
    return {
        HermitianMatrix(Matrix(w1 * a.entries() + w2 * b.entries())),
        sharp,
        HermitianMatrix(Matrix(0.5 * (sharp.entries() + sharp_c.entries()))),
        detail::lift(f, harmonic_vals),
    };
}

// The refinement series between the geometric and arithmetic operator means:
// term k is r_k [A sharp_x B - 2 A sharp_z B + A sharp_y B], assembled from
// the squared scalar bracket on the spectrum of X = A^(-1/2) B A^(-1/2).
struct OperatorSeries {
    std::vector<HermitianMatrix> terms;
    std::vector<HermitianMatrix> partial_sums;
    bool exact{false};

    const HermitianMatrix& sum() const { return partial_sums.back(); }
};

inline OperatorSeries operator_refinement_sum(const HermitianMatrix& a, const HermitianMatrix& b,
                                              const RationalWeight& nu,
                                              int depth = max_schedule_depth) {
    const detail::CongruenceFrame f = detail::make_frame(a, b);
    const DyadicSchedule s = make_schedule(nu, depth);

    OperatorSeries out;
    out.exact = s.complete();
    out.terms.reserve(s.entries.size());
    out.partial_sums.reserve(s.entries.size());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.xi.size());
    for (const auto& e : s.entries) {
        const Eigen::VectorXd vals = detail::series_values(f.xi, e, detail::sharp_bracket_sq);
        acc += vals;
        out.terms.push_back(detail::lift(f, vals));
        out.partial_sums.push_back(detail::lift(f, acc));
    }
    return out;
}

// Two-sided refinement of the operator Young inequality. The lower side
// checks nabla >= sharp + series; the reverse side checks
// nabla <= sharp + (A - 2 A sharp B + B) - complemented series.
struct RefinedOperatorYoung {
    LoewnerVerdict lower;
    LoewnerVerdict reverse;
};

inline RefinedOperatorYoung refined_operator_young(const HermitianMatrix& a,
                                                   const HermitianMatrix& b,
                                                   const RationalWeight& nu,
                                                   int depth = max_schedule_depth,
                                                   double tol = default_tol) {
    const detail::CongruenceFrame f = detail::make_frame(a, b);
    const DyadicSchedule s = make_schedule(nu, depth);
    const auto p = nu.num();
    const auto q = nu.den();
    const double w1 = static_cast<double>(q - p) / static_cast<double>(q);
    const double w2 = static_cast<double>(p) / static_cast<double>(q);
    const HermitianMatrix nabla(Matrix(w1 * a.entries() + w2 * b.entries()));

    const Eigen::Index n = f.xi.size();
    Eigen::VectorXd lower_vals(n), reverse_vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = f.xi(i);
        const double sharp = frac_pow(xi, p, q);
        lower_vals(i) = sharp;
        reverse_vals(i) = sharp + square(1.0 - std::sqrt(xi));
    }
    for (const auto& e : s.entries) {
        if (e.r.is_zero()) continue;
        for (Eigen::Index i = 0; i < n; ++i) {
            lower_vals(i) += e.r.value() * detail::sharp_bracket_sq(f.xi(i), e);
            reverse_vals(i) -= e.r.value() * detail::sharp_bracket_sq_complement(f.xi(i), e);
        }
    }

    RefinedOperatorYoung out;
    out.lower = loewner_compare(detail::lift(f, lower_vals), nabla, tol);
    out.reverse = loewner_compare(nabla, detail::lift(f, reverse_vals), tol);
    return out;
}

// Chain from the harmonic to the geometric mean obtained by running the
// refinement on the inverted pair and taking inverses: the middle term
// {A^(-1) sharp B^(-1) + series(A^(-1), B^(-1))}^(-1) sits between them.
// a1 checks the refinement on (A, B); a2 the refinement on the inverses;
// a3 the two-sided inverted sandwich.
struct GeometricHarmonicChain {
    LoewnerVerdict a1;
    LoewnerVerdict a2;
    LoewnerVerdict a3_lower;
    LoewnerVerdict a3_upper;
};

inline GeometricHarmonicChain geometric_harmonic_chain(const HermitianMatrix& a,
                                                       const HermitianMatrix& b,
                                                       const RationalWeight& nu,
                                                       int depth = max_schedule_depth,
                                                       double tol = default_tol) {
    const DyadicSchedule s = make_schedule(nu, depth);
    const auto p = nu.num();
    const auto q = nu.den();
    const double w1 = static_cast<double>(q - p) / static_cast<double>(q);
    const double w2 = static_cast<double>(p) / static_cast<double>(q);

    const auto refined_vals = [&](const detail::CongruenceFrame& f) {
        Eigen::VectorXd vals(f.xi.size());
        for (Eigen::Index i = 0; i < f.xi.size(); ++i) vals(i) = frac_pow(f.xi(i), p, q);
        for (const auto& e : s.entries) {
            if (e.r.is_zero()) continue;
            for (Eigen::Index i = 0; i < f.xi.size(); ++i)
                vals(i) += e.r.value() * detail::sharp_bracket_sq(f.xi(i), e);
        }
        return vals;
    };

    GeometricHarmonicChain out;

    const detail::CongruenceFrame f = detail::make_frame(a, b);
    const HermitianMatrix nabla(Matrix(w1 * a.entries() + w2 * b.entries()));
    out.a1 = loewner_compare(detail::lift(f, refined_vals(f)), nabla, tol);

    const HermitianMatrix ai = fractional_power(a, -1, 1);
    const HermitianMatrix bi = fractional_power(b, -1, 1);
    const detail::CongruenceFrame fi = detail::make_frame(ai, bi);
    const HermitianMatrix middle_inner = detail::lift(fi, refined_vals(fi));
    const HermitianMatrix nabla_inv(Matrix(w1 * ai.entries() + w2 * bi.entries()));
    out.a2 = loewner_compare(middle_inner, nabla_inv, tol);

    const HermitianMatrix middle = fractional_power(middle_inner, -1, 1);
    const HermitianMatrix harmonic = fractional_power(nabla_inv, -1, 1);
    out.a3_lower = loewner_compare(harmonic, middle, tol);

    Eigen::VectorXd sharp_vals(f.xi.size());
    for (Eigen::Index i = 0; i < f.xi.size(); ++i) sharp_vals(i) = frac_pow(f.xi(i), p, q);
    out.a3_upper = loewner_compare(middle, detail::lift(f, sharp_vals), tol);
    return out;
}

// Heinz-mean refinement against the unweighted arithmetic mean (A + B)/2,
// from below via the Heinz bracket series and from above via the mirrored
// bound with head A - 2 A sharp B + B.
struct OperatorHeinzBounds {
    LoewnerVerdict lower;
    LoewnerVerdict upper;
};

inline OperatorHeinzBounds operator_heinz_bounds(const HermitianMatrix& a,
                                                 const HermitianMatrix& b,
                                                 const RationalWeight& nu,
                                                 int depth = max_schedule_depth,
                                                 double tol = default_tol) {
    const detail::CongruenceFrame f = detail::make_frame(a, b);
    const DyadicSchedule s = make_schedule(nu, depth);
    const auto p = nu.num();
    const auto q = nu.den();
    const HermitianMatrix half_sum(Matrix(0.5 * (a.entries() + b.entries())));

    const Eigen::Index n = f.xi.size();
    Eigen::VectorXd lower_vals(n), upper_vals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = f.xi(i);
        const double heinz = 0.5 * (frac_pow(xi, p, q) + frac_pow(xi, q - p, q));
        lower_vals(i) = heinz;
        upper_vals(i) = heinz + square(1.0 - std::sqrt(xi));
    }
    for (const auto& e : s.entries) {
        if (e.r.is_zero()) continue;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double term = e.r.value() * detail::heinz_bracket(f.xi(i), e);
            lower_vals(i) += term;
            upper_vals(i) -= term;
        }
    }

    OperatorHeinzBounds out;
    out.lower = loewner_compare(detail::lift(f, lower_vals), half_sum, tol);
    out.upper = loewner_compare(half_sum, detail::lift(f, upper_vals), tol);
    return out;
}

} // namespace meanforge
