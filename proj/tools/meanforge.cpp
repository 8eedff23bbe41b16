#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "meanforge/report_io.hpp"
#include "meanforge/suite.hpp"

namespace {

using namespace meanforge;

struct RunOptions {
    std::vector<std::string> nu;
    int trials = TrialConfig{}.trials;
    int dim = TrialConfig{}.dim;
    int depth = TrialConfig{}.depth;
    double tol = TrialConfig{}.tol;
    std::uint64_t seed = TrialConfig{}.master_seed;
    std::string field = "real";
    double cond = TrialConfig{}.condition_cap;
    std::string out;
    std::string format = "json";
    std::string matrix_file;
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
    cmd->add_option("--nu", opt.nu, "weight as p/q or a decimal; repeat for several");
    cmd->add_option("--trials", opt.trials, "number of random trials");
    cmd->add_option("--dim", opt.dim, "matrix dimension for generated instances");
    cmd->add_option("--depth", opt.depth, "refinement depth (1-64)");
    cmd->add_option("--tol", opt.tol, "relative tolerance for verdicts");
    cmd->add_option("--seed", opt.seed, "master seed (MEANFORGE_SEED overrides)");
    cmd->add_option("--field", opt.field, "entry field: real or complex")
        ->check(CLI::IsMember({"real", "complex"}));
    cmd->add_option("--cond", opt.cond, "condition number cap for generated matrices");
    cmd->add_option("--out", opt.out, "report file path (stdout when omitted)");
    cmd->add_option("--format", opt.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--matrix-file", opt.matrix_file,
                    "JSON file with explicit A, B and optional X instead of generation");
}

TrialConfig to_config(const RunOptions& opt) {
    TrialConfig cfg;
    cfg.master_seed = opt.seed;
    if (const char* env = std::getenv("MEANFORGE_SEED")) {
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (errno != 0 || end == env || *end != '\0')
            throw std::invalid_argument(std::string("MEANFORGE_SEED is not an integer: '") +
                                        env + "'");
        cfg.master_seed = v;
    }
    cfg.trials = opt.trials;
    cfg.dim = opt.dim;
    cfg.depth = opt.depth;
    cfg.tol = opt.tol;
    cfg.field = parse_field(opt.field);
    cfg.condition_cap = opt.cond;
    if (!opt.nu.empty()) {
        cfg.nu_list.clear();
        for (const auto& text : opt.nu) cfg.nu_list.push_back(RationalWeight::parse(text));
    }
    return cfg;
}

// Accepts 3, "3", "1.5+2i", "1.5-2i", "2i", "-i", "i".
Complex parse_complex_entry(const nlohmann::json& v, const std::string& where) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (!v.is_string())
        throw std::invalid_argument(where + ": entries must be numbers or strings");
    std::string s = v.get<std::string>();
    std::erase(s, ' ');
    if (s.empty()) throw std::invalid_argument(where + ": empty entry");

    const bool imaginary = s.back() == 'i' || s.back() == 'I';
    if (!imaginary) return Complex(std::stod(s), 0.0);
    s.pop_back();

    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const auto to_part = [&where](const std::string& part) {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        try {
            return std::stod(part);
        } catch (const std::exception&) {
            throw std::invalid_argument(where + ": bad entry part '" + part + "'");
        }
    };
    if (split == std::string::npos) return Complex(0.0, to_part(s));
    return Complex(std::stod(s.substr(0, split)), to_part(s.substr(split)));
}

Matrix parse_matrix(const nlohmann::json& rows, const std::string& name) {
    if (!rows.is_array() || rows.empty())
        throw std::invalid_argument("matrix " + name + ": expected a list of rows");
    const std::size_t n = rows.size();
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols()))
            throw std::invalid_argument("matrix " + name + ": ragged rows");
        for (std::size_t j = 0; j < row.size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_complex_entry(row[j], name);
    }
    return m;
}

TrialReport run_from_file(const TrialConfig& cfg, SuiteLevel level, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
    nlohmann::json doc;
    in >> doc;
    if (!doc.contains("A") || !doc.contains("B"))
        throw std::invalid_argument("matrix file needs fields \"A\" and \"B\"");
    const HermitianMatrix a{parse_matrix(doc["A"], "A")};
    const HermitianMatrix b{parse_matrix(doc["B"], "B")};
    const Matrix x = doc.contains("X") ? parse_matrix(doc["X"], "X")
                                       : Matrix(Matrix::Identity(a.dim(), a.dim()));
    return run_file_suite(cfg, level, a, b, x);
}

void print_schedule(const std::string& nu_text, int depth) {
    const RationalWeight nu = RationalWeight::parse(nu_text);
    const DyadicSchedule s = make_schedule(nu, depth);
    std::cout << "nu = " << nu.str() << "\n";
    if (s.termination_index)
        std::cout << "denominator is 2^" << *s.termination_index << "; series terminates at level "
                  << *s.termination_index << "\n";
    else
        std::cout << "denominator is not a power of two; series does not terminate\n";
    std::cout << "complete within depth " << s.depth << ": " << (s.complete() ? "yes" : "no")
              << "\n\n";
    std::cout << std::left << std::setw(4) << "k" << std::setw(12) << "m_k" << std::setw(32)
              << "r_k" << std::setw(16) << "x_k = m/2^k" << "y_k = (m+1)/2^k\n";
    for (const auto& e : s.entries) {
        std::cout << std::left << std::setw(4) << e.k << std::setw(12) << e.m << std::setw(32)
                  << (e.r.str() + " (" + detail::fmt_shortest(e.r.value()) + ")") << std::setw(16)
                  << detail::fmt_shortest(e.x()) << detail::fmt_shortest(e.y()) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized verifier for dyadic series refinements of weighted mean "
                 "inequalities at scalar, operator and Frobenius-norm level"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* scalar_cmd = app.add_subcommand("scalar", "scalar mean inequalities");
    CLI::App* operator_cmd =
        app.add_subcommand("operator", "positive definite operator inequalities");
    CLI::App* hsnorm_cmd = app.add_subcommand("hsnorm", "Frobenius-norm inequalities");
    CLI::App* all_cmd = app.add_subcommand("all", "every level per trial");
    for (CLI::App* cmd : {scalar_cmd, operator_cmd, hsnorm_cmd, all_cmd})
        add_run_options(cmd, opt);

    std::string schedule_nu;
    int schedule_depth = 8;
    CLI::App* schedule_cmd =
        app.add_subcommand("schedule", "print the dyadic exponent schedule for a weight");
    schedule_cmd->add_option("--nu", schedule_nu, "weight as p/q or a decimal")->required();
    schedule_cmd->add_option("--depth", schedule_depth, "levels to print (1-64)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (schedule_cmd->parsed()) {
            print_schedule(schedule_nu, schedule_depth);
            return 0;
        }

        SuiteLevel level = SuiteLevel::all;
        if (scalar_cmd->parsed()) level = SuiteLevel::scalar;
        if (operator_cmd->parsed()) level = SuiteLevel::operators;
        if (hsnorm_cmd->parsed()) level = SuiteLevel::hsnorm;

        const TrialConfig cfg = to_config(opt);
        const TrialReport report = opt.matrix_file.empty()
                                       ? run_suite(cfg, level)
                                       : run_from_file(cfg, level, opt.matrix_file);

        const ReportFormat format = parse_format(opt.format);
        if (opt.out.empty())
            std::cout << render_report(report, format);
        else
            emit_report(report, opt.out, format);

        const int failures = report.failure_count();
        if (failures > 0) {
            std::cerr << failures
                      << " verdict(s) failed; reproduce any trial from its logged seed\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
