// Convergence-study front end: solve, sweep, verify.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracfem/cli_runner.hpp"
#include "fracfem/verify.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::string problem;
    std::string kind;
    std::vector<double> s;
    std::optional<int> k_min;
    std::optional<int> k_max;
    std::optional<int> k;
    std::optional<double> theta;
    std::optional<int> quad_order;
    std::optional<int> grading_levels;
    std::optional<double> newton_tol;
    std::string format;
    std::string out;
};

void add_run_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON run configuration");
    cmd->add_option("--problem", f.problem, "example1..example5 or custom");
    cmd->add_option("--kind", f.kind, "rl or caputo");
    cmd->add_option("--s", f.s, "fractional order(s) in (1,2)");
    cmd->add_option("--theta", f.theta, "exponent of f = x^theta for example5");
    cmd->add_option("--quad-order", f.quad_order, "Gauss points per piece");
    cmd->add_option("--grading-levels", f.grading_levels, "geometric grading levels at singular points");
    cmd->add_option("--newton-tol", f.newton_tol, "relative residual tolerance");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", f.out, "output file (default: stdout)");
}

fracfem::RunConfig load(const Flags& f) {
    fracfem::ConfigOverrides ov;
    if (!f.problem.empty()) {
        ov.problem = f.problem;
    }
    if (!f.kind.empty()) {
        ov.kind = f.kind;
    }
    if (!f.s.empty()) {
        ov.s_values = f.s;
    }
    ov.k_min = f.k ? f.k : f.k_min;
    ov.k_max = f.k ? f.k : f.k_max;
    ov.theta = f.theta;
    ov.quad_order = f.quad_order;
    ov.grading_levels = f.grading_levels;
    ov.newton_tol = f.newton_tol;
    if (!f.format.empty()) {
        ov.format = f.format;
    }
    if (!f.out.empty()) {
        ov.out = f.out;
    }
    if (f.config_path.empty()) {
        return fracfem::parse_config(fracfem::json::object(), ov);
    }
    return fracfem::parse_config_file(f.config_path, ov);
}

int run(const Flags& f) {
    const fracfem::RunConfig cfg = load(f);
    const auto reports = fracfem::run_sweep(cfg);
    fracfem::emit_table(reports, cfg, std::cout);
    if (!fracfem::all_converged(reports)) {
        std::cerr << "fracfem: at least one level failed to converge\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Galerkin finite elements for -D^s u + g(x,u) = f on [0,1]"};
    app.require_subcommand(1);

    Flags solve_flags;
    auto* solve = app.add_subcommand("solve", "solve on a single refinement level");
    add_run_options(solve, solve_flags);
    solve->add_option("--k", solve_flags.k, "refinement level (N = 10 * 2^k, N = 5 for k = -1)")->required();

    Flags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "refinement study over a k range");
    add_run_options(sweep, sweep_flags);
    sweep->add_option("--k-min", sweep_flags.k_min, "first refinement level");
    sweep->add_option("--k-max", sweep_flags.k_max, "last refinement level");

    auto* verify = app.add_subcommand("verify", "run the built-in oracle and property checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return run(solve_flags);
        }
        if (sweep->parsed()) {
            return run(sweep_flags);
        }
        if (verify->parsed()) {
            return fracfem::print_verify(fracfem::run_verify(), std::cout) ? 0 : 1;
        }
    } catch (const fracfem::ConfigError& e) {
        std::cerr << "fracfem: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fracfem: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
