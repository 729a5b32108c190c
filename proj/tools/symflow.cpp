// symflow command-line runner.
//
//   symflow run <config>            run an experiment, write CSV/JSON/checkpoints
//   symflow check <checkpoint>      re-validate a stored field
//   symflow inequalities --seed S   run the inequality campaigns
//
// Exit status: 0 all assertions hold, 1 violation, 2 configuration or input error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "symflow/symflow.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_config = 2;

void print_report(const symflow::ExperimentReport& r) {
    for (const auto& a : r.assertions) {
        std::cout << (a.passed ? "ok    " : "FAIL  ") << a.name;
        if (!a.detail.empty()) std::cout << "  (" << a.detail << ')';
        std::cout << '\n';
    }
    std::cout << r.experiment << ": " << (r.passed() ? "all assertions hold" : "violation") << '\n';
}

int cmd_run(const std::string& path, const std::string& output_dir, unsigned threads) {
    symflow::ExperimentConfig cfg = symflow::load_config(path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (threads > 0) cfg.threads = threads;
    const auto report = symflow::run_experiment(cfg);
    print_report(report);
    if (!cfg.output_dir.empty()) std::cout << "outputs in " << cfg.output_dir << '\n';
    return report.passed() ? exit_ok : exit_violation;
}

int cmd_check(const std::string& path) {
    const auto u = symflow::read_checkpoint(path);
    const auto c = symflow::check_invariants(u);
    std::cout << "n                   " << u.grid().n() << '\n'
              << "finite              " << (c.finite ? "yes" : "no") << '\n'
              << "l2                  " << symflow::format_double(c.l2) << '\n'
              << "hermitian_residue   " << symflow::format_double(c.hermitian_residue) << '\n'
              << "divergence_residual " << symflow::format_double(c.divergence_residual) << '\n'
              << "mean_mode           " << symflow::format_double(c.mean_mode) << '\n'
              << "dev_eix3            " << symflow::format_double(symflow::ei_x3_deviation(u)) << '\n';
    if (u.grid().n() % 4 == 0)
        std::cout << "dev_helical         " << symflow::format_double(symflow::helical_deviation(u)) << '\n';
    std::cout << (c.ok() ? "invariants hold" : "invariants violated") << '\n';
    return c.ok() ? exit_ok : exit_violation;
}

int cmd_inequalities(std::uint64_t seed, std::size_t young, std::size_t sharp, std::size_t fields, std::size_t n,
                     const std::string& output_dir) {
    symflow::ExperimentConfig cfg;
    cfg.experiment = symflow::Experiment::InequalitySuite;
    cfg.seed = seed;
    cfg.young_draws = young;
    cfg.sharpness_draws = sharp;
    cfg.ladyzhenskaya_fields = fields;
    cfg.ladyzhenskaya_n = n;
    cfg.output_dir = output_dir;
    const auto out = symflow::run_inequality_suite(cfg);
    std::cout << "young split: " << out.young.violations << " violations in " << out.young.draws
              << " draws, worst gap/(1+rhs) " << symflow::format_double(out.young.worst_normalized_gap) << '\n'
              << "sharpness:   max |gap(b*)| " << symflow::format_double(out.sharpness.max_abs_gap) << " over "
              << out.sharpness.draws << " draws\n"
              << "ladyzhenskaya: max ratio " << symflow::format_double(out.ladyzhenskaya.max_ratio) << ", mean "
              << symflow::format_double(out.ladyzhenskaya.mean_ratio) << " over " << out.ladyzhenskaya.fields
              << " fields at n=" << out.ladyzhenskaya.n << '\n';
    print_report(out.report);
    return out.report.passed() ? exit_ok : exit_violation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetry and stability experiments for a periodic Navier-Stokes solver"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("-o,--output-dir", output_dir, "override output_dir");
    run->add_option("-j,--threads", threads, "override threads");

    std::string checkpoint_path;
    auto* check = app.add_subcommand("check", "validate the invariants of a checkpoint");
    check->add_option("checkpoint", checkpoint_path, "checkpoint file")->required();

    std::uint64_t seed = 0;
    std::size_t young = 100000, sharp = 1000, fields = 1000, lady_n = 64;
    std::string ineq_dir;
    auto* ineq = app.add_subcommand("inequalities", "run the Young and Ladyzhenskaya campaigns");
    ineq->add_option("--seed", seed, "campaign seed")->required();
    ineq->add_option("--young-draws", young, "random draws for the Young split")->capture_default_str();
    ineq->add_option("--sharpness-draws", sharp, "draws at the equality point")->capture_default_str();
    ineq->add_option("--fields", fields, "random 2D fields")->capture_default_str();
    ineq->add_option("--n", lady_n, "2D grid size")->capture_default_str();
    ineq->add_option("-o,--output-dir", ineq_dir, "write summary.json and inequalities.csv here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run) return cmd_run(config_path, output_dir, threads);
        if (*check) return cmd_check(checkpoint_path);
        if (*ineq) return cmd_inequalities(seed, young, sharp, fields, lady_n, ineq_dir);
    } catch (const symflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const symflow::FormatError& e) {
        std::cerr << "bad checkpoint: " << e.what() << '\n';
        return exit_config;
    } catch (const symflow::InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_violation;
    }
    return exit_config;
}
