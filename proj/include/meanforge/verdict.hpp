#pragma once

#include <cmath>

namespace meanforge {

inline constexpr double default_tol = 1e-10;
inline constexpr double default_equality_tol = 1e-12;

// Outcome of a scalar comparison lhs <= rhs. margin is signed (rhs - lhs);
// holds allows a relative slack of tol * scale to absorb rounding, and
// equality flags margins indistinguishable from zero at the same scale.
struct InequalityVerdict {
    double lhs{0.0};
    double rhs{0.0};
    double margin{0.0};
    double scale{1.0};
    bool holds{false};
    bool equality{false};
};

inline InequalityVerdict check_le(double lhs, double rhs, double scale,
                                  double tol = default_tol,
                                  double eq_tol = default_equality_tol) {
    InequalityVerdict v;
    v.lhs = lhs;
    v.rhs = rhs;
    v.margin = rhs - lhs;
    v.scale = scale;
    v.holds = v.margin >= -tol * scale;
    v.equality = std::abs(v.margin) <= eq_tol * scale;
    return v;
}

// A sandwich lower_bound <= quantity <= upper_bound reported as two one-sided
// comparisons.
struct TwoSidedVerdict {
    InequalityVerdict lower;
    InequalityVerdict upper;
    bool holds() const { return lower.holds && upper.holds; }
};

} // namespace meanforge
