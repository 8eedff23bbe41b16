#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "meanforge/dyadic_schedule.hpp"
#include "meanforge/hs_inequalities.hpp"
#include "meanforge/matrix_core.hpp"
#include "meanforge/operator_means.hpp"
#include "meanforge/scalar_means.hpp"
#include "meanforge/verdict.hpp"

namespace meanforge {

enum class Field { real, complex };

inline const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field parse_field(const std::string& text) {
    if (text == "real") return Field::real;
    if (text == "complex") return Field::complex;
    throw std::invalid_argument("field: expected 'real' or 'complex', got '" + text + "'");
}

enum class SuiteLevel { scalar, operators, hsnorm, all };

inline const char* to_string(SuiteLevel level) {
    switch (level) {
        case SuiteLevel::scalar: return "scalar";
        case SuiteLevel::operators: return "operator";
        case SuiteLevel::hsnorm: return "hsnorm";
        case SuiteLevel::all: return "all";
    }
    return "all";
}

inline SuiteLevel parse_level(const std::string& text) {
    if (text == "scalar") return SuiteLevel::scalar;
    if (text == "operator") return SuiteLevel::operators;
    if (text == "hsnorm") return SuiteLevel::hsnorm;
    if (text == "all") return SuiteLevel::all;
    throw std::invalid_argument("level: expected scalar|operator|hsnorm|all, got '" + text + "'");
}

struct TrialConfig {
    std::uint64_t master_seed{1};
    int trials{1000};
    int dim{4};
    std::vector<RationalWeight> nu_list{RationalWeight(1, 4), RationalWeight(1, 3),
                                        RationalWeight(1, 2), RationalWeight(2, 5),
                                        RationalWeight(5, 8), RationalWeight(7, 8)};
    int depth{64};
    double tol{default_tol};
    Field field{Field::real};
    double condition_cap{1e4};
};

// Stateless mixing function; feeding it master_seed + (trial + 1) * golden
// gives each trial an independent, individually reproducible stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline constexpr const char* seed_derivation_note =
    "trial_seed = splitmix64(master_seed + (trial_index + 1) * 0x9e3779b97f4a7c15)";

inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
    return splitmix64(master_seed +
                      static_cast<std::uint64_t>(trial_index) * 0x9E3779B97F4A7C15ull);
}

namespace detail {

inline std::uint64_t fnv1a64(std::uint64_t h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64_double(std::uint64_t h, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof(bits));
    return fnv1a64(h, &bits, sizeof(bits));
}

inline std::uint64_t fnv1a64_matrix(std::uint64_t h, const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            h = fnv1a64_double(h, m(i, j).real());
            h = fnv1a64_double(h, m(i, j).imag());
        }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

inline Matrix gaussian_matrix(std::mt19937_64& rng, int rows, int cols, Field field) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = Complex(g(rng), field == Field::complex ? g(rng) : 0.0);
    return m;
}

} // namespace detail

// Reproducible positive definite matrix with spectrum condition bounded by
// condition_cap: G = M M* has lambda_max = L, and G + L/(cap - 1) I has
// condition exactly cap at the top eigenvalue, at most cap overall.
inline HermitianMatrix generate_pd(std::uint64_t seed, int dim, double condition_cap,
                                   Field field) {
    if (dim < 1) throw std::invalid_argument("generate_pd: dim must be >= 1");
    if (condition_cap < 1.0)
        throw std::domain_error("generate_pd: condition_cap must be >= 1");
    if (condition_cap == 1.0) return HermitianMatrix::identity(dim);

    std::mt19937_64 rng(seed);
    const Matrix m = detail::gaussian_matrix(rng, dim, dim, field);
    const HermitianMatrix gram{Matrix(m * m.adjoint())};
    double top = eigh(gram).eigenvalues(dim - 1);
    if (!(top > 0.0)) top = 1.0;
    const double shift = top / (condition_cap - 1.0);
    return HermitianMatrix(
        Matrix(gram.entries() + shift * Matrix::Identity(dim, dim)));
}

// One verdict row of a report: the margin and scale of a checked comparison.
struct NamedVerdict {
    std::string id;
    double margin{0.0};
    double scale{1.0};
    bool holds{false};
    bool equality{false};

    NamedVerdict() = default;
    NamedVerdict(std::string id_, const InequalityVerdict& v)
        : id(std::move(id_)), margin(v.margin), scale(v.scale), holds(v.holds),
          equality(v.equality) {}
    NamedVerdict(std::string id_, const LoewnerVerdict& v)
        : id(std::move(id_)), margin(v.margin), scale(v.scale), holds(v.holds),
          equality(std::abs(v.margin) <= default_equality_tol * (1.0 + v.scale)) {}
};

struct Diagnostic {
    std::string id;
    double value{0.0};
};

struct TrialRecord {
    int trial{0};
    std::uint64_t seed{0};
    std::string nu;
    std::string digest;
    std::vector<NamedVerdict> verdicts;
    std::vector<Diagnostic> diagnostics;
};

struct InequalityStats {
    int count{0};
    int failures{0};
    int equalities{0};
    double min_margin{std::numeric_limits<double>::infinity()};
};

struct TrialReport {
    TrialConfig config;
    std::string level;
    std::vector<TrialRecord> trials;
    std::map<std::string, InequalityStats> summary;

    int failure_count() const {
        int n = 0;
        for (const auto& [id, st] : summary) n += st.failures;
        return n;
    }
    int equality_count() const {
        int n = 0;
        for (const auto& [id, st] : summary) n += st.equalities;
        return n;
    }
    int verdict_count() const {
        int n = 0;
        for (const auto& [id, st] : summary) n += st.count;
        return n;
    }
};

namespace detail {

inline void run_scalar_trial(const TrialConfig& cfg, const RationalWeight& nu,
                             std::mt19937_64& rng, TrialRecord& rec, std::uint64_t& digest) {
    const double spread = std::sqrt(cfg.condition_cap);
    std::uniform_real_distribution<double> u(-std::log(spread), std::log(spread));
    const double a = std::exp(u(rng));
    const double b = std::exp(u(rng));
    digest = fnv1a64_double(digest, a);
    digest = fnv1a64_double(digest, b);

    const ScalarPair pair(a, b);
    const DyadicSchedule s = make_schedule(nu, cfg.depth);
    const MeanBundle m = weighted_means(pair, nu);
    const auto lo = refined_young_lower(pair, s);
    const auto rev = refined_young_reverse(pair, s);
    const auto sq = squared_refinements(pair, s);
    const auto hz = heinz_refinements(pair, s);
    const auto base = baseline_bounds(pair, nu, cfg.tol);

    const double w2 = nu.value();
    const double scale1 = std::max(a, b);
    const double scale2 = scale1 * scale1;
    const double nabla_sq = square(m.nabla);
    const double squares_nabla = (1.0 - w2) * a * a + w2 * b * b;
    const double half_arith = 0.5 * (a + b);

    auto& out = rec.verdicts;
    out.emplace_back("y1", check_le(lo.value, m.nabla, scale1, cfg.tol));
    out.emplace_back("y2", check_le(m.nabla, rev.value, scale1, cfg.tol));
    out.emplace_back("y3", check_le(sq.y3.value, squares_nabla, scale2, cfg.tol));
    out.emplace_back("y4", check_le(squares_nabla, sq.y4.value, scale2, cfg.tol));
    out.emplace_back("y5", check_le(sq.y5.value, nabla_sq, scale2, cfg.tol));
    out.emplace_back("y6", check_le(nabla_sq, sq.y6.value, scale2, cfg.tol));
    out.emplace_back("re1-lower", base.re1.lower);
    out.emplace_back("re1-upper", base.re1.upper);
    out.emplace_back("re2-lower", base.re2.lower);
    out.emplace_back("re2-upper", base.re2.upper);
    out.emplace_back("zw-lower", base.zw.lower);
    out.emplace_back("zw-upper", base.zw.upper);
    const char* e_lower = base.nu_le_half ? "e10-lower" : "e11-lower";
    const char* e_upper = base.nu_le_half ? "e10-upper" : "e11-upper";
    out.emplace_back(e_lower, base.e.lower);
    out.emplace_back(e_upper, base.e.upper);
    out.emplace_back("heinz-lower", check_le(hz.lower.value, half_arith, scale1, cfg.tol));
    out.emplace_back("heinz-upper", check_le(half_arith, hz.upper.value, scale1, cfg.tol));

    rec.diagnostics.push_back({"y6-shared-tail-margin", sq.y6_shared_tail.value - nabla_sq});
}

inline void operator_rows(const TrialConfig& cfg, const RationalWeight& nu,
                          const HermitianMatrix& a, const HermitianMatrix& b,
                          TrialRecord& rec) {
    const auto young = refined_operator_young(a, b, nu, cfg.depth, cfg.tol);
    const auto chain = geometric_harmonic_chain(a, b, nu, cfg.depth, cfg.tol);
    const auto heinz = operator_heinz_bounds(a, b, nu, cfg.depth, cfg.tol);

    auto& out = rec.verdicts;
    out.emplace_back("op-young-lower", young.lower);
    out.emplace_back("op-young-reverse", young.reverse);
    out.emplace_back("op-chain-a1", chain.a1);
    out.emplace_back("op-chain-a2", chain.a2);
    out.emplace_back("op-chain-a3-lower", chain.a3_lower);
    out.emplace_back("op-chain-a3-upper", chain.a3_upper);
    out.emplace_back("op-heinz-lower", heinz.lower);
    out.emplace_back("op-heinz-upper", heinz.upper);
}

inline void run_operator_trial(const TrialConfig& cfg, const RationalWeight& nu,
                               std::mt19937_64& rng, TrialRecord& rec,
                               std::uint64_t& digest) {
    const HermitianMatrix a = generate_pd(rng(), cfg.dim, cfg.condition_cap, cfg.field);
    const HermitianMatrix b = generate_pd(rng(), cfg.dim, cfg.condition_cap, cfg.field);
    digest = fnv1a64_matrix(digest, a.entries());
    digest = fnv1a64_matrix(digest, b.entries());
    operator_rows(cfg, nu, a, b, rec);
}

inline void hs_rows(const TrialConfig& cfg, const RationalWeight& nu, const HSInstance& inst,
                    TrialRecord& rec) {
    const DyadicSchedule s = make_schedule(nu, cfg.depth);
    const HSBreakdown bd = hs_breakdown(inst, cfg.depth);
    const HSBreakdown oracle = entrywise_oracle(inst, cfg.depth);
    const auto base = baseline_hs(inst, cfg.tol);

    const double convex = bd.convex_norm_sq;
    auto& out = rec.verdicts;
    out.emplace_back("hs-lower",
                     check_le(hs_lower_bound_value(bd, s), convex, convex, cfg.tol));
    out.emplace_back("hs-upper",
                     check_le(convex, hs_upper_bound_value(bd, s), convex, cfg.tol));
    out.emplace_back("hs-b1", base.b1);
    out.emplace_back("hs-b2", base.b2);

    // Worst relative gap between the two evaluation routes over the headline
    // norms and the assembled bound values.
    const auto rel_gap = [](double p, double q) {
        const double scale = std::max(std::abs(p), std::abs(q));
        return scale == 0.0 ? 0.0 : std::abs(p - q) / scale;
    };
    double gap = rel_gap(bd.mixed_norm_sq, oracle.mixed_norm_sq);
    gap = std::max(gap, rel_gap(bd.commutator_norm_sq, oracle.commutator_norm_sq));
    gap = std::max(gap, rel_gap(bd.convex_norm_sq, oracle.convex_norm_sq));
    gap = std::max(gap, rel_gap(bd.convex_minus_norm_sq, oracle.convex_minus_norm_sq));
    gap = std::max(gap, rel_gap(hs_lower_bound_value(bd, s), hs_lower_bound_value(oracle, s)));
    gap = std::max(gap, rel_gap(hs_upper_bound_value(bd, s), hs_upper_bound_value(oracle, s)));

    rec.diagnostics.push_back({"hs-route-gap", gap});
    rec.diagnostics.push_back(
        {"hs-upper-shared-tail-margin", hs_upper_shared_tail_value(bd, s) - convex});
    rec.diagnostics.push_back({"hs-convex-minus-norm-sq", bd.convex_minus_norm_sq});
}

inline void run_hs_trial(const TrialConfig& cfg, const RationalWeight& nu,
                         std::mt19937_64& rng, TrialRecord& rec, std::uint64_t& digest) {
    const HermitianMatrix a = generate_pd(rng(), cfg.dim, cfg.condition_cap, cfg.field);
    const HermitianMatrix b = generate_pd(rng(), cfg.dim, cfg.condition_cap, cfg.field);
    const Matrix x = gaussian_matrix(rng, cfg.dim, cfg.dim, cfg.field);
    digest = fnv1a64_matrix(digest, a.entries());
    digest = fnv1a64_matrix(digest, b.entries());
    digest = fnv1a64_matrix(digest, x);
    hs_rows(cfg, nu, HSInstance(a, b, x, nu), rec);
}

} // namespace detail

inline void validate(const TrialConfig& cfg) {
    if (cfg.trials < 0) throw std::invalid_argument("config: trials must be >= 0");
    if (cfg.dim < 1) throw std::invalid_argument("config: dim must be >= 1");
    if (cfg.depth < 1 || cfg.depth > max_schedule_depth)
        throw std::invalid_argument("config: depth out of range");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
    if (!(cfg.condition_cap >= 1.0))
        throw std::invalid_argument("config: condition_cap must be >= 1");
    if (cfg.nu_list.empty()) throw std::invalid_argument("config: nu_list must not be empty");
}

inline TrialReport run_suite(const TrialConfig& cfg, SuiteLevel level) {
    validate(cfg);
    TrialReport report;
    report.config = cfg;
    report.level = to_string(level);
    report.trials.reserve(static_cast<std::size_t>(cfg.trials));

    for (int i = 0; i < cfg.trials; ++i) {
        const RationalWeight& nu =
            cfg.nu_list[static_cast<std::size_t>(i) % cfg.nu_list.size()];
        TrialRecord rec;
        rec.trial = i;
        rec.seed = trial_seed(cfg.master_seed, i);
        rec.nu = nu.str();
        std::mt19937_64 rng(rec.seed);
        std::uint64_t digest = 0xcbf29ce484222325ull;
        digest = detail::fnv1a64(digest, rec.nu.data(), rec.nu.size());

        if (level == SuiteLevel::scalar || level == SuiteLevel::all)
            detail::run_scalar_trial(cfg, nu, rng, rec, digest);
        if (level == SuiteLevel::operators || level == SuiteLevel::all)
            detail::run_operator_trial(cfg, nu, rng, rec, digest);
        if (level == SuiteLevel::hsnorm || level == SuiteLevel::all)
            detail::run_hs_trial(cfg, nu, rng, rec, digest);

        rec.digest = detail::hex64(digest);
        for (const auto& v : rec.verdicts) {
            auto& st = report.summary[v.id];
            st.count += 1;
            if (!v.holds) st.failures += 1;
            if (v.equality) st.equalities += 1;
            st.min_margin = std::min(st.min_margin, v.margin);
        }
        report.trials.push_back(std::move(rec));
    }
    return report;
}

// Runs the matrix levels on one explicit instance instead of generated ones;
// each weight in nu_list becomes one trial record.
inline TrialReport run_file_suite(const TrialConfig& cfg, SuiteLevel level,
                                  const HermitianMatrix& a, const HermitianMatrix& b,
                                  const Matrix& x) {
    validate(cfg);
    if (level == SuiteLevel::scalar)
        throw std::invalid_argument("explicit matrices apply to the matrix levels only");
    TrialReport report;
    report.config = cfg;
    report.config.trials = static_cast<int>(cfg.nu_list.size());
    report.level = to_string(level);

    for (std::size_t i = 0; i < cfg.nu_list.size(); ++i) {
        const RationalWeight& nu = cfg.nu_list[i];
        TrialRecord rec;
        rec.trial = static_cast<int>(i);
        rec.seed = 0;
        rec.nu = nu.str();
        std::uint64_t digest = 0xcbf29ce484222325ull;
        digest = detail::fnv1a64(digest, rec.nu.data(), rec.nu.size());
        digest = detail::fnv1a64_matrix(digest, a.entries());
        digest = detail::fnv1a64_matrix(digest, b.entries());
        digest = detail::fnv1a64_matrix(digest, x);
        rec.digest = detail::hex64(digest);

        if (level == SuiteLevel::operators || level == SuiteLevel::all)
            detail::operator_rows(cfg, nu, a, b, rec);
        if (level == SuiteLevel::hsnorm || level == SuiteLevel::all)
            detail::hs_rows(cfg, nu, HSInstance(a, b, x, nu), rec);

        for (const auto& v : rec.verdicts) {
            auto& st = report.summary[v.id];
            st.count += 1;
            if (!v.holds) st.failures += 1;
            if (v.equality) st.equalities += 1;
            st.min_margin = std::min(st.min_margin, v.margin);
        }
        report.trials.push_back(std::move(rec));
    }
    return report;
}

} // namespace meanforge
