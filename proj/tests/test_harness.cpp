#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "symflow/symflow.hpp"

using namespace symflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("symflow_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ExperimentConfig small(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.n = 16;
    c.nu = 0.1;
    c.dt = 2e-3;
    c.t_end = 0.1;
    c.sample_every = 0.01;
    c.output_dir = "";
    return c;
}

} // namespace

TEST(Config, ParsesAllKeys) {
    const auto c = parse_config(R"(# a comment
experiment = vanishing_viscosity
n = 16
nu_list = 1, 0.7 ,0.5   # trailing comment
dt = 5e-4
t_end = 0.5
sample_every = 0.05
delta = 0
seed = 18446744073709551615
band = 2.5
base_flow = taylor_green
base_energy = 0.3
forcing = off
forcing_amplitude = 0.02
epsilon = 0.2
output_dir = somewhere
threads = 3
young_draws = 10
sharpness_draws = 5
ladyzhenskaya_fields = 4
ladyzhenskaya_n = 32
)");
    EXPECT_EQ(c.experiment, Experiment::VanishingViscosity);
    EXPECT_EQ(c.n, 16u);
    EXPECT_EQ(c.nu_list, (std::vector<double>{1, 0.7, 0.5}));
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_EQ(c.perturbation_band(), 2.5);
    EXPECT_EQ(c.epsilon, 0.2);
    EXPECT_EQ(c.output_dir, "somewhere");
    EXPECT_EQ(c.threads, 3u);
    EXPECT_EQ(c.ladyzhenskaya_n, 32u);
}

TEST(Config, DefaultBandIsSixthOfN) {
    const auto c = parse_config("experiment = stability\nn = 64\n");
    EXPECT_EQ(c.perturbation_band(), 64.0 / 6.0);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config("n = 16\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nviscosity = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nn = 16\nn = 32\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nn = 24\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nnu = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nnu = 0\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\ndelta = -1\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\ndt = 0\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nband = 20\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = euler_conserve\nnu = 0.1\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = euler_conserve\nnu = 0\nforcing = cellular\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = vanishing_viscosity\nnu_list = 0.5, 0.7\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = vanishing_viscosity\nnu_list = 1, 0\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = bogus\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nforcing = vortex\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\nbase_flow = abc\n"), ConfigError);
    EXPECT_THROW(parse_config("experiment = stability\njust words\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST(Perturbation, ZeroDeltaIsZeroField) {
    GridSpec g(16);
    EXPECT_EQ(energy(generate_perturbation(g, 0.0, 1, 2.0)), 0.0);
}

TEST(Perturbation, NormDivergenceAndThreeDimensionality) {
    GridSpec g(16);
    const auto p = generate_perturbation(g, 0.01, 99, 16.0 / 6);
    EXPECT_NEAR(std::sqrt(energy(p)), 0.01, 1e-14);
    EXPECT_LE(divergence_residual(p), 1e-12);
    EXPECT_LE(hermitian_residue(p), 1e-18);
    EXPECT_EQ(p.at(0, std::size_t{0}), Complex(0.0));
    EXPECT_GT(ei_x3_deviation(p), 0.1 * energy(p));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (norm_sq(g.wavevector(i)) > 7) {
            for (int c = 0; c < 3; ++c) EXPECT_EQ(p.at(c, i), Complex(0.0));
        }
}

TEST(Perturbation, DeterministicInSeed) {
    GridSpec g(16);
    EXPECT_EQ(generate_perturbation(g, 0.01, 5, 2.0), generate_perturbation(g, 0.01, 5, 2.0));
    EXPECT_NE(generate_perturbation(g, 0.01, 5, 2.0), generate_perturbation(g, 0.01, 6, 2.0));
}

TEST(Perturbation, RejectsBadBand) {
    GridSpec g(16);
    EXPECT_THROW(generate_perturbation(g, 0.01, 1, 0.5), InvalidArgument);
    EXPECT_THROW(generate_perturbation(g, 0.0, 1, 0.5), InvalidArgument);
    EXPECT_THROW(generate_perturbation(g, 0.01, 1, 6.0), InvalidArgument);
    EXPECT_THROW(generate_perturbation(g, -1.0, 1, 2.0), InvalidArgument);
}

TEST(Flows, BaseFlowsHaveTheirSymmetries) {
    GridSpec g(16);
    EXPECT_EQ(ei_x3_deviation(random_2p5d(g, 0.5, 1, 2.6)), 0.0);
    EXPECT_NEAR(energy(random_2p5d(g, 0.5, 1, 2.6)), 0.5, 1e-14);
    EXPECT_LE(helical_deviation(random_helical(g, 0.5, 1, 2.6)), 1e-30);
    EXPECT_TRUE(check_invariants(random_helical(g, 0.5, 1, 2.6)).ok());
    EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
}

TEST(Flows, ForcingSymmetries) {
    GridSpec g(16);
    const auto shear2 = forcing_field(g, ForcingKind::ShearX2, 0.1);
    const auto cell = forcing_field(g, ForcingKind::Cellular, 0.1);
    const auto shear3 = forcing_field(g, ForcingKind::ShearX3, 0.1);
    EXPECT_EQ(ei_x3_deviation(shear2), 0.0);
    EXPECT_EQ(ei_x3_deviation(cell), 0.0);
    EXPECT_GT(ei_x3_deviation(shear3), 0.0);
    EXPECT_EQ(helical_deviation(cell), 0.0);
    EXPECT_GT(helical_deviation(shear2), 0.0);
    for (const auto* f : {&shear2, &cell, &shear3}) EXPECT_TRUE(check_invariants(*f).ok());
    // sin(2 pi x2) e1 with amplitude 0.1 has energy 0.1^2 / 2.
    EXPECT_NEAR(energy(shear2), 0.005, 1e-16);
}

TEST(Stability, ZeroDeltaGivesIdenticalTrajectories) {
    auto c = small(Experiment::Stability);
    c.delta = 0.0;
    const auto r = run_stability(c);
    for (const auto& row : r.rows) EXPECT_EQ(row.log_wsq, log_zero);
    EXPECT_TRUE(r.report.passed());
    // Matches the symmetry-preservation run on the same base flow.
    auto s = small(Experiment::SymPreserveZ);
    const auto sym = run_sym_preserve(s);
    ASSERT_EQ(sym.samples.size(), r.base.size());
    for (std::size_t i = 0; i < r.base.size(); ++i) {
        EXPECT_EQ(sym.samples[i].energy, r.base[i].energy);
        EXPECT_EQ(sym.samples[i].energy, r.perturbed[i].energy);
    }
}

TEST(Stability, TaylorGreenOrderingHolds) {
    auto c = small(Experiment::Stability);
    c.delta = 1e-3;
    c.seed = 4;
    const auto r = run_stability(c);
    EXPECT_TRUE(r.report.passed());
    for (const auto& row : r.rows) {
        EXPECT_LE(row.log_wsq, row.log_bound_running);
        EXPECT_LE(row.log_bound_running, row.log_bound_apriori);
    }
    EXPECT_LE(r.max_excess, 0.0);
    EXPECT_FALSE(r.first_violation_t.has_value());
    EXPECT_NEAR(r.w0_l2sq, 1e-6, 1e-18);
}

TEST(Stability, ZeroBaseFlowDecaysBelowInitialDifference) {
    auto c = small(Experiment::Stability);
    c.base_flow = "zero";
    c.delta = 1e-2;
    const auto r = run_stability(c);
    EXPECT_TRUE(r.report.passed());
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        EXPECT_LE(r.perturbed[i].energy, prev);
        prev = r.perturbed[i].energy;
        EXPECT_LE(r.rows[i].log_wsq, std::log(1e-4) + 1e-12);
        EXPECT_NEAR(r.rows[i].log_bound_apriori, std::log(1e-4), 1e-12);
    }
}

TEST(Stability, HalvingDeltaShiftsByTwoLogTwo) {
    auto c = small(Experiment::Stability);
    c.seed = 9;
    c.t_end = 0.05;
    c.delta = 1e-3;
    const auto a = run_stability(c);
    c.delta = 5e-4;
    const auto b = run_stability(c);
    for (std::size_t i = 1; i < a.rows.size(); ++i) {
        const double shift = a.rows[i].log_wsq - b.rows[i].log_wsq;
        EXPECT_NEAR(shift / (2 * std::log(2.0)), 1.0, 0.1) << a.rows[i].t;
    }
}

TEST(Stability, RejectsAsymmetricBaseOrForcing) {
    auto c = small(Experiment::Stability);
    c.base_flow = "shear_x3";
    EXPECT_THROW(run_stability(c), ConfigError);
    c.base_flow = "taylor_green";
    c.forcing = ForcingKind::ShearX3;
    EXPECT_THROW(run_stability(c), ConfigError);
}

TEST(Stability, OutputsAreBitIdenticalAcrossThreadCounts) {
    auto c = small(Experiment::Stability);
    c.delta = 1e-2;
    c.seed = 12;
    c.t_end = 0.04;
    const auto d1 = scratch_dir("threads1"), d2 = scratch_dir("threads2"), d3 = scratch_dir("threads1b");
    c.output_dir = d1.string();
    c.threads = 1;
    run_stability(c);
    c.output_dir = d2.string();
    c.threads = 2;
    run_stability(c);
    c.output_dir = d3.string();
    c.threads = 1;
    run_stability(c);
    for (const char* f : {"stability.csv", "base.csv", "perturbed.csv", "u_final.chk", "v_final.chk"}) {
        ASSERT_TRUE(fs::exists(d1 / f)) << f;
        EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
        EXPECT_EQ(slurp(d1 / f), slurp(d3 / f)) << f;
    }
    const auto header = slurp(d1 / "stability.csv").substr(0, slurp(d1 / "stability.csv").find('\n'));
    EXPECT_EQ(header, "t,log_wsq,log_bound_running,log_bound_apriori,dev_eix3,energy_slack_u,energy_slack_v");
    const auto j = nlohmann::json::parse(slurp(d1 / "summary.json"));
    EXPECT_EQ(j["experiment"], "stability");
    EXPECT_EQ(j["config"]["seed"], 12);
    EXPECT_TRUE(j["assertions"]["measured_below_running_bound"].get<bool>());
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(read_checkpoint((d1 / "v_final.chk").string()).grid().n(), 16u);
}

TEST(SymPreserve, VerticalAndHelical) {
    auto c = small(Experiment::SymPreserveZ);
    c.base_flow = "random_2p5d";
    c.seed = 3;
    const auto z = run_sym_preserve(c);
    EXPECT_TRUE(z.report.passed());
    EXPECT_LE(z.max_deviation, 1e-20);
    c.experiment = Experiment::SymPreserveHelical;
    c.base_flow = "random_helical";
    c.forcing = ForcingKind::Cellular;
    c.forcing_amplitude = 0.1;
    const auto h = run_sym_preserve(c);
    EXPECT_TRUE(h.report.passed());
    EXPECT_LE(h.max_deviation, 1e-18);
}

TEST(SymPreserve, RejectsAsymmetricForcingAndData) {
    auto c = small(Experiment::SymPreserveZ);
    c.forcing = ForcingKind::ShearX3;
    EXPECT_THROW(run_sym_preserve(c), ConfigError);
    c.forcing = ForcingKind::Off;
    c.base_flow = "shear_x3";
    EXPECT_THROW(run_sym_preserve(c), ConfigError);
    c = small(Experiment::SymPreserveHelical);
    c.forcing = ForcingKind::ShearX2;
    EXPECT_THROW(run_sym_preserve(c), ConfigError);
    c.forcing = ForcingKind::Off;
    c.base_flow = "random_2p5d";
    EXPECT_THROW(run_sym_preserve(c), ConfigError);
}

TEST(Euler, ShearIsSteadyAndZeroStaysZero) {
    auto c = small(Experiment::EulerConserve);
    c.nu = 0.0;
    c.base_flow = "shear_x3";
    const auto s = run_euler_conserve(c);
    EXPECT_LE(s.max_relative_drift, 1e-14);
    EXPECT_TRUE(s.report.passed());
    c.base_flow = "zero";
    const auto z = run_euler_conserve(c);
    for (const auto& smp : z.samples) EXPECT_EQ(smp.energy, 0.0);
    EXPECT_TRUE(z.report.passed());
}

TEST(Euler, TaylorGreenConserves) {
    auto c = small(Experiment::EulerConserve);
    c.nu = 0.0;
    const auto r = run_euler_conserve(c);
    EXPECT_TRUE(r.report.passed());
    EXPECT_LE(r.max_relative_drift, 1e-6);
    EXPECT_LE(r.max_dev_eix3, 1e-20);
    EXPECT_FALSE(r.aborted_at.has_value());
}

TEST(Euler, CflAbortIsReportedAsViolation) {
    auto c = small(Experiment::EulerConserve);
    c.nu = 0.0;
    c.base_flow = "random_2p5d";
    c.base_energy = 2.0;
    c.seed = 4;
    c.dt = 0.02;
    c.t_end = 0.4;
    c.sample_every = 0.1;
    const auto r = run_euler_conserve(c);
    EXPECT_FALSE(r.report.passed());
    EXPECT_FALSE(r.report.assertions.front().passed);
    EXPECT_NE(r.report.assertions.front().detail.find("CFL"), std::string::npos);
}

TEST(Vanishing, ZeroEpsilonKeepsSymmetry) {
    auto c = small(Experiment::VanishingViscosity);
    c.nu_list = {1.0, 0.7, 0.5};
    c.epsilon = 0.0;
    c.dt = 1e-3;
    c.t_end = 0.05;
    const auto r = run_vanishing_viscosity(c);
    for (const auto& k : r.cases) EXPECT_LE(k.max_dev_eix3, 1e-20);
    EXPECT_TRUE(r.report.passed());
}

TEST(Vanishing, DeviationWithinChainBoundAndBoundMonotone) {
    auto c = small(Experiment::VanishingViscosity);
    c.nu_list = {1.0, 0.7, 0.5};
    c.epsilon = 0.1;
    c.dt = 1e-3;
    c.t_end = 0.05;
    c.threads = 3;
    const auto r = run_vanishing_viscosity(c);
    EXPECT_TRUE(r.report.passed());
    ASSERT_EQ(r.cases.size(), 3u);
    EXPECT_NEAR(r.cases[0].budget.delta_max(), std::exp(-27.0 / 256), 1e-15);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& k = r.cases[i];
        EXPECT_LE(k.log_max_dev_eix3, k.log_bound);
        // The bound reduces to eps^2 exp(-C / nu^4) at the floor constant.
        EXPECT_NEAR(k.log_bound, 2 * std::log(0.1) + k.budget.log_delta_max, 1e-12);
        if (i) {
            EXPECT_LE(k.log_bound, r.cases[i - 1].log_bound);
        }
    }
    c.threads = 1;
    const auto serial = run_vanishing_viscosity(c);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(serial.cases[i].max_dev_eix3, r.cases[i].max_dev_eix3);
}

TEST(Inequalities, SmallCampaign) {
    auto c = small(Experiment::InequalitySuite);
    c.young_draws = 5000;
    c.sharpness_draws = 200;
    c.ladyzhenskaya_fields = 50;
    c.ladyzhenskaya_n = 32;
    const auto r = run_inequality_suite(c);
    EXPECT_TRUE(r.report.passed());
    EXPECT_EQ(r.young.violations, 0u);
    EXPECT_LE(r.sharpness.max_abs_gap, 1e-12);
    EXPECT_LE(r.ladyzhenskaya.max_ratio, 1.0);
    const auto again = run_inequality_suite(c);
    EXPECT_EQ(again.ladyzhenskaya.max_ratio, r.ladyzhenskaya.max_ratio);
    EXPECT_EQ(again.young.worst_normalized_gap, r.young.worst_normalized_gap);
}

TEST(Dispatch, RunExperimentWritesSummary) {
    auto c = small(Experiment::SymPreserveZ);
    const auto d = scratch_dir("dispatch");
    c.output_dir = d.string();
    const auto rep = run_experiment(c);
    EXPECT_EQ(rep.experiment, "sym_preserve_z");
    EXPECT_TRUE(rep.passed());
    const auto j = nlohmann::json::parse(slurp(d / "summary.json"));
    EXPECT_EQ(j["config"]["experiment"], "sym_preserve_z");
    EXPECT_TRUE(j["summary"].contains("max_deviation"));
    EXPECT_TRUE(j["assertions"]["symmetry_preserved"].get<bool>());
    const auto csv = slurp(d / "diagnostics.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), std::string(diagnostics_header) + ",dev_eix3,dev_helical");
}

TEST(Dispatch, FileBaseFlowRoundTrip) {
    GridSpec g(16);
    const auto d = scratch_dir("filebase");
    fs::create_directories(d);
    const auto u = random_2p5d(g, 0.4, 8, 2.0);
    write_checkpoint((d / "u.chk").string(), u);
    auto c = small(Experiment::SymPreserveZ);
    c.base_flow = "file:" + (d / "u.chk").string();
    EXPECT_EQ(make_base_flow(c), u);
    c.n = 32;
    EXPECT_THROW(make_base_flow(c), ConfigError);
}
