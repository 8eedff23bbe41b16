#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace meanforge {

// Exact nonnegative fraction kept in lowest terms. Small enough for 64-bit
// arithmetic everywhere: construction rejects denominators at or above 2^62
// so that doubling a remainder mod den can never overflow.
struct Rational {
    std::int64_t num{0};
    std::int64_t den{1};

    static constexpr std::int64_t max_den = std::int64_t{1} << 62;

    static Rational reduced(std::int64_t n, std::int64_t d) {
        if (d <= 0) throw std::domain_error("rational: denominator must be positive");
        if (n < 0) throw std::domain_error("rational: negative value not supported");
        if (d >= max_den) throw std::domain_error("rational: denominator too large (>= 2^62)");
        const std::int64_t g = std::gcd(n, d);
        return Rational{g ? n / g : 0, g ? d / g : 1};
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    bool is_zero() const { return num == 0; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const auto lhs = static_cast<__int128>(a.num) * b.den;
        const auto rhs = static_cast<__int128>(b.num) * a.den;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
};

// Interpolation weight nu as an exact fraction, restricted to 0 < nu < 1.
// Accepts "p/q" or a decimal such as "0.25" (converted exactly to p/10^d
// before reduction); arithmetic on the weight itself never rounds.
class RationalWeight {
public:
    RationalWeight(std::int64_t num, std::int64_t den)
        : frac_(Rational::reduced(num, den)) {
        if (frac_.num == 0 || frac_.num >= frac_.den)
            throw std::domain_error("weight: require 0 < nu < 1, got " + frac_.str());
    }

    static RationalWeight parse(std::string_view text) {
        if (text.empty()) throw std::invalid_argument("weight: empty string");
        const auto slash = text.find('/');
        if (slash != std::string_view::npos) {
            return RationalWeight(parse_int(text.substr(0, slash)),
                                  parse_int(text.substr(slash + 1)));
        }
        const auto dot = text.find('.');
        if (dot == std::string_view::npos)
            return RationalWeight(parse_int(text), 1);
        const std::string_view whole = text.substr(0, dot);
        const std::string_view fract = text.substr(dot + 1);
        if (fract.empty() || fract.size() > 18)
            throw std::invalid_argument("weight: unsupported decimal '" + std::string(text) + "'");
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < fract.size(); ++i) scale *= 10;
        const std::int64_t head = whole.empty() ? 0 : parse_int(whole);
        const std::int64_t tail = parse_int(fract);
        return RationalWeight(head * scale + tail, scale);
    }

    std::int64_t num() const { return frac_.num; }
    std::int64_t den() const { return frac_.den; }
    const Rational& fraction() const { return frac_; }
    double value() const { return frac_.value(); }
    RationalWeight reflected() const { return RationalWeight(frac_.den - frac_.num, frac_.den); }

    // True when the denominator is a power of two, i.e. nu = t/2^n.
    bool is_dyadic() const { return (frac_.den & (frac_.den - 1)) == 0; }
    // For dyadic weights, the n with nu = t/2^n and t odd.
    int log2_den() const {
        if (!is_dyadic()) throw std::logic_error("weight: denominator is not a power of two");
        int n = 0;
        for (std::int64_t d = frac_.den; d > 1; d >>= 1) ++n;
        return n;
    }

    std::string str() const { return frac_.str(); }

    friend bool operator==(const RationalWeight& a, const RationalWeight& b) {
        return a.frac_ == b.frac_;
    }

private:
    static std::int64_t parse_int(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("weight: missing digits");
        std::int64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9')
                throw std::invalid_argument("weight: bad character '" + std::string(1, c) + "'");
            if (v > (std::numeric_limits<std::int64_t>::max() - (c - '0')) / 10)
                throw std::invalid_argument("weight: value out of range");
            v = v * 10 + (c - '0');
        }
        return v;
    }

    Rational frac_;
};

} // namespace meanforge
