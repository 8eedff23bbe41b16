#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "meanforge/rational.hpp"

namespace meanforge {

// Level k of the interpolation ladder for a weight nu: m = floor(2^k nu) and
// r = distance from 2^k nu to the nearest integer. Both are exact; the
// exponent accessors convert to double with a single rounding via ldexp.
struct ScheduleEntry {
    int k{0};
    std::uint64_t m{0};
    Rational r{};

    // m / 2^k
    double x() const { return std::ldexp(static_cast<double>(m), -k); }
    // (m + 1) / 2^k
    double y() const { return std::ldexp(static_cast<double>(m + 1), -k); }
    // (2m + 1) / 2^(k+1), the midpoint of x and y
    double z() const { return std::ldexp(static_cast<double>(2 * m + 1), -(k + 1)); }
    // 1 - x and 1 - y with exact integer numerators over 2^k
    double xc() const { return std::ldexp(static_cast<double>((std::uint64_t{1} << k) - m), -k); }
    double yc() const { return std::ldexp(static_cast<double>((std::uint64_t{1} << k) - m - 1), -k); }
};

// Ladder of (m_k, r_k) pairs for k = 0 .. depth-1, driven entirely by exact
// integer arithmetic: r_k = min(s_k, q - s_k)/q with s_k = 2^k p mod q, and
// m_k built digit by digit from the binary expansion of nu = p/q.
// termination_index is the first level whose r is exactly zero; it exists
// precisely when q is a power of two, and then r_k = 0 for every k >= n.
struct DyadicSchedule {
    RationalWeight nu;
    int depth{0};
    std::vector<ScheduleEntry> entries;
    std::optional<int> termination_index;

    const ScheduleEntry& at(int k) const { return entries.at(static_cast<std::size_t>(k)); }

    // True when the series this ladder drives is complete at the given
    // truncation: every omitted level k >= depth has r_k = 0.
    bool complete() const {
        return termination_index.has_value() && *termination_index <= depth;
    }
};

inline constexpr int max_schedule_depth = 64;

inline DyadicSchedule make_schedule(const RationalWeight& nu, int depth = max_schedule_depth) {
    if (depth < 1 || depth > max_schedule_depth)
        throw std::invalid_argument("schedule: depth must be in [1, " +
                                    std::to_string(max_schedule_depth) + "], got " +
                                    std::to_string(depth));
    const std::int64_t p = nu.num();
    const std::int64_t q = nu.den();

    DyadicSchedule out{nu, depth, {}, std::nullopt};
    out.entries.reserve(static_cast<std::size_t>(depth));

    std::int64_t s = p;       // 2^k p mod q
    std::uint64_t m = 0;      // floor(2^k nu)
    for (int k = 0; k < depth; ++k) {
        out.entries.push_back({k, m, Rational::reduced(std::min(s, q - s), q)});
        const std::int64_t doubled = 2 * s;
        if (doubled >= q) {
            s = doubled - q;
            m = 2 * m + 1;
        } else {
            s = doubled;
            m = 2 * m;
        }
    }
    if (nu.is_dyadic()) out.termination_index = nu.log2_den();
    return out;
}

// Schedule of the mirrored weight 1 - nu. The r ladder is identical; the m
// values satisfy m'_k = 2^k - m_k - 1 at every level where 2^k nu is not an
// integer (and 2^k - m_k where it is).
inline DyadicSchedule reflect_schedule(const DyadicSchedule& s) {
    return make_schedule(s.nu.reflected(), s.depth);
}

} // namespace meanforge
