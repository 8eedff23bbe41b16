#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "meanforge/dyadic_schedule.hpp"
#include "meanforge/matrix_core.hpp"
#include "meanforge/scalar_means.hpp"
#include "meanforge/verdict.hpp"

namespace meanforge {

// One Frobenius-norm trial: a positive semidefinite pair, an arbitrary
// coupling matrix of the same dimension, and a weight.
struct HSInstance {
    HermitianMatrix a;
    HermitianMatrix b;
    Matrix x;
    RationalWeight nu;

    HSInstance(HermitianMatrix a_, HermitianMatrix b_, Matrix x_, RationalWeight nu_)
        : a(std::move(a_)), b(std::move(b_)), x(std::move(x_)), nu(std::move(nu_)) {
        const auto check_psd = [](const HermitianMatrix& m, const char* name) {
            const double lo = m.min_eigenvalue();
            if (m.classification() == Definiteness::indefinite) {
                throw std::domain_error(std::string("hs instance: ") + name +
                                        " is not positive semidefinite, min eigenvalue = " +
                                        detail::fmt_double(lo));
            }
        };
        check_psd(a, "A");
        check_psd(b, "B");
        if (x.rows() != x.cols() || x.rows() != a.dim() || a.dim() != b.dim()) {
            std::ostringstream os;
            os << "hs instance: dimension mismatch A " << a.dim() << ", B " << b.dim()
               << ", X " << x.rows() << "x" << x.cols();
            throw std::invalid_argument(os.str());
        }
    }
};

// Every squared norm the refinements consume. tail_terms carry the direct
// exponent brackets for levels k >= 1 and feed the lower bound;
// mirrored_tail_terms carry the complementary exponent brackets and feed the
// upper bound. convex_minus_norm_sq evaluates the alternate sign of the
// convex combination; it is reported for diagnosis and never asserted.
struct HSBreakdown {
    double mixed_norm_sq{0.0};
    double commutator_norm_sq{0.0};
    double convex_norm_sq{0.0};
    double convex_minus_norm_sq{0.0};
    std::vector<double> tail_terms;
    std::vector<double> mirrored_tail_terms;
};

namespace detail {

// Eigendecompositions of both sides with the spectra clamped onto [0, inf),
// plus the coupling matrix; every power of A or B is assembled from here.
struct HSPowerCache {
    Eigen::VectorXd lam;
    Eigen::VectorXd mu;
    Matrix u;
    Matrix v;

    explicit HSPowerCache(const HSInstance& inst) {
        EigenDecomposition ea = eigh(inst.a);
        EigenDecomposition eb = eigh(inst.b);
        lam = std::move(ea.eigenvalues);
        mu = std::move(eb.eigenvalues);
        u = std::move(ea.vectors);
        v = std::move(eb.vectors);
        for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::max(lam(i), 0.0);
        for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = std::max(mu(i), 0.0);
    }

    static Matrix power(const Eigen::VectorXd& ev, const Matrix& vecs, std::uint64_t num,
                        int log2den) {
        Eigen::VectorXd mapped(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i) mapped(i) = dyadic_pow(ev(i), num, log2den);
        return vecs * mapped.cast<Complex>().asDiagonal() * vecs.adjoint();
    }

    static Matrix power(const Eigen::VectorXd& ev, const Matrix& vecs, std::int64_t num,
                        std::int64_t den) {
        Eigen::VectorXd mapped(ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i) mapped(i) = frac_pow(ev(i), num, den);
        return vecs * mapped.cast<Complex>().asDiagonal() * vecs.adjoint();
    }

    Matrix a_pow(std::uint64_t num, int log2den) const { return power(lam, u, num, log2den); }
    Matrix b_pow(std::uint64_t num, int log2den) const { return power(mu, v, num, log2den); }
    Matrix a_frac(std::int64_t num, std::int64_t den) const { return power(lam, u, num, den); }
    Matrix b_frac(std::int64_t num, std::int64_t den) const { return power(mu, v, num, den); }
};

} // namespace detail

// Direct route: materialize each matrix expression and take its norm.
inline HSBreakdown hs_breakdown(const HSInstance& inst, int depth = max_schedule_depth) {
    const detail::HSPowerCache cache(inst);
    const DyadicSchedule s = make_schedule(inst.nu, depth);
    const auto p = inst.nu.num();
    const auto q = inst.nu.den();
    const double w1 = static_cast<double>(q - p) / static_cast<double>(q);
    const double w2 = static_cast<double>(p) / static_cast<double>(q);

    HSBreakdown out;
    out.mixed_norm_sq = hs_norm_sq(cache.a_frac(q - p, q) * inst.x * cache.b_frac(p, q));

    const Matrix ax = inst.a.entries() * inst.x;
    const Matrix xb = inst.x * inst.b.entries();
    out.commutator_norm_sq = hs_norm_sq(ax - xb);
    out.convex_norm_sq = hs_norm_sq(w1 * ax + w2 * xb);
    out.convex_minus_norm_sq = hs_norm_sq(w1 * ax - w2 * xb);

    out.tail_terms.reserve(s.entries.size() - 1);
    out.mirrored_tail_terms.reserve(s.entries.size() - 1);
    for (std::size_t idx = 1; idx < s.entries.size(); ++idx) {
        const ScheduleEntry& e = s.entries[idx];
        if (e.r.is_zero()) {
            out.tail_terms.push_back(0.0);
            out.mirrored_tail_terms.push_back(0.0);
            continue;
        }
        const std::uint64_t pow2 = std::uint64_t{1} << e.k;
        const Matrix direct = cache.a_pow(pow2 - e.m, e.k) * inst.x * cache.b_pow(e.m, e.k) -
                              cache.a_pow(pow2 - e.m - 1, e.k) * inst.x *
                                  cache.b_pow(e.m + 1, e.k);
        const Matrix mirrored = cache.a_pow(e.m, e.k) * inst.x * cache.b_pow(pow2 - e.m, e.k) -
                                cache.a_pow(e.m + 1, e.k) * inst.x *
                                    cache.b_pow(pow2 - e.m - 1, e.k);
        out.tail_terms.push_back(e.r.value() * hs_norm_sq(direct));
        out.mirrored_tail_terms.push_back(e.r.value() * hs_norm_sq(mirrored));
    }
    return out;
}

// Diagonalization route: with A = U diag(lam) U*, B = V diag(mu) V* and
// Y = U* X V, every squared norm is the sum of scalar weights at eigenvalue
// pairs against |y_ij|^2.
inline HSBreakdown entrywise_oracle(const HSInstance& inst, int depth = max_schedule_depth) {
    const detail::HSPowerCache cache(inst);
    const DyadicSchedule s = make_schedule(inst.nu, depth);
    const auto p = inst.nu.num();
    const auto q = inst.nu.den();
    const double w1 = static_cast<double>(q - p) / static_cast<double>(q);
    const double w2 = static_cast<double>(p) / static_cast<double>(q);

    const Matrix y = cache.u.adjoint() * inst.x * cache.v;
    const Eigen::Index n = y.rows();

    HSBreakdown out;
    out.tail_terms.assign(s.entries.size() - 1, 0.0);
    out.mirrored_tail_terms.assign(s.entries.size() - 1, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double wgt = std::norm(y(i, j));
            if (wgt == 0.0) continue;
            const double lam = cache.lam(i);
            const double mu = cache.mu(j);
            out.mixed_norm_sq += square(frac_pow(lam, q - p, q) * frac_pow(mu, p, q)) * wgt;
            out.commutator_norm_sq += square(lam - mu) * wgt;
            out.convex_norm_sq += square(w1 * lam + w2 * mu) * wgt;
            out.convex_minus_norm_sq += square(w1 * lam - w2 * mu) * wgt;
            for (std::size_t idx = 1; idx < s.entries.size(); ++idx) {
                const ScheduleEntry& e = s.entries[idx];
                if (e.r.is_zero()) continue;
                out.tail_terms[idx - 1] +=
                    e.r.value() * square(detail::full_bracket(lam, mu, e)) * wgt;
                out.mirrored_tail_terms[idx - 1] +=
                    e.r.value() * square(detail::full_bracket_mirrored(lam, mu, e)) * wgt;
            }
        }
    }
    return out;
}

// Bound assembly, shared by both routes. The head constants come from the
// level-0 weight of the schedule, complemented through its exact integers.
inline double hs_lower_bound_value(const HSBreakdown& b, const DyadicSchedule& s) {
    const double r0 = s.at(0).r.value();
    double acc = b.mixed_norm_sq + (r0 * r0) * b.commutator_norm_sq;
    for (double t : b.tail_terms) acc += t;
    return acc;
}

inline double hs_upper_bound_value(const HSBreakdown& b, const DyadicSchedule& s) {
    const Rational r0 = s.at(0).r;
    const double r0c = static_cast<double>(r0.den - r0.num) / static_cast<double>(r0.den);
    double acc = b.mixed_norm_sq + (r0c * r0c) * b.commutator_norm_sq;
    for (double t : b.mirrored_tail_terms) acc -= t;
    return acc;
}

// Variant that subtracts the lower bound's own tail instead of the mirrored
// one. It can cross below the convex combination (1x1 with a=4, b=1,
// nu=3/8 already does it), so it is reported as a diagnostic, never asserted.
inline double hs_upper_shared_tail_value(const HSBreakdown& b, const DyadicSchedule& s) {
    const Rational r0 = s.at(0).r;
    const double r0c = static_cast<double>(r0.den - r0.num) / static_cast<double>(r0.den);
    double acc = b.mixed_norm_sq + (r0c * r0c) * b.commutator_norm_sq;
    for (double t : b.tail_terms) acc -= t;
    return acc;
}

inline InequalityVerdict hs_refined_lower(const HSInstance& inst,
                                          int depth = max_schedule_depth,
                                          double tol = default_tol) {
    const DyadicSchedule s = make_schedule(inst.nu, depth);
    const HSBreakdown b = hs_breakdown(inst, depth);
    return check_le(hs_lower_bound_value(b, s), b.convex_norm_sq, b.convex_norm_sq, tol);
}

inline InequalityVerdict hs_refined_upper(const HSInstance& inst,
                                          int depth = max_schedule_depth,
                                          double tol = default_tol) {
    const DyadicSchedule s = make_schedule(inst.nu, depth);
    const HSBreakdown b = hs_breakdown(inst, depth);
    return check_le(b.convex_norm_sq, hs_upper_bound_value(b, s), b.convex_norm_sq, tol);
}

inline InequalityVerdict hs_refined_upper_shared_tail(const HSInstance& inst,
                                                      int depth = max_schedule_depth,
                                                      double tol = default_tol) {
    const DyadicSchedule s = make_schedule(inst.nu, depth);
    const HSBreakdown b = hs_breakdown(inst, depth);
    return check_le(b.convex_norm_sq, hs_upper_shared_tail_value(b, s), b.convex_norm_sq, tol);
}

// Classical one-level norm bounds, computed from their own closed forms as a
// cross-check target for the depth-2 truncations of the refinements above.
struct BaselineHS {
    InequalityVerdict b1;
    InequalityVerdict b2;
    bool nu_le_half{true};
};

inline BaselineHS baseline_hs(const HSInstance& inst, double tol = default_tol) {
    const detail::HSPowerCache cache(inst);
    const auto p = inst.nu.num();
    const auto q = inst.nu.den();
    const double nu_d = static_cast<double>(p) / static_cast<double>(q);
    const double nu_c = static_cast<double>(q - p) / static_cast<double>(q);

    const Matrix ax = inst.a.entries() * inst.x;
    const Matrix xb = inst.x * inst.b.entries();
    const Matrix half_mixed = cache.a_pow(1, 1) * inst.x * cache.b_pow(1, 1);
    const double mixed = hs_norm_sq(cache.a_frac(q - p, q) * inst.x * cache.b_frac(p, q));
    const double comm = hs_norm_sq(ax - xb);
    const double convex = hs_norm_sq(nu_c * ax + nu_d * xb);

    BaselineHS out;
    out.nu_le_half = 2 * p <= q;
    if (out.nu_le_half) {
        const double rz = static_cast<double>(std::min(2 * p, q - 2 * p)) / static_cast<double>(q);
        out.b1 = check_le(mixed + (nu_d * nu_d) * comm + rz * hs_norm_sq(ax - half_mixed),
                          convex, convex, tol);
        out.b2 = check_le(convex,
                          mixed + (nu_c * nu_c) * comm - rz * hs_norm_sq(xb - half_mixed),
                          convex, tol);
    } else {
        const double rz =
            static_cast<double>(std::min(2 * (q - p), 2 * p - q)) / static_cast<double>(q);
        out.b1 = check_le(mixed + (nu_c * nu_c) * comm + rz * hs_norm_sq(half_mixed - xb),
                          convex, convex, tol);
        out.b2 = check_le(convex,
                          mixed + (nu_d * nu_d) * comm - rz * hs_norm_sq(half_mixed - ax),
                          convex, tol);
    }
    return out;
}

} // namespace meanforge
