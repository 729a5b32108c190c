#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symflow/bounds.hpp"
#include "symflow/checkpoint.hpp"
#include "symflow/config.hpp"
#include "symflow/flows.hpp"
#include "symflow/random.hpp"
#include "symflow/solver.hpp"
#include "symflow/symmetry.hpp"

namespace symflow {

/// Tolerances asserted by the experiments.
namespace tolerance {
inline constexpr double slack_floor = 1e-8;      ///< energy_slack >= -slack_floor * E(0)
inline constexpr double slack_ceiling = 1e-6;    ///< smooth unforced: energy_slack <= slack_ceiling * E(0)
inline constexpr double eix3_deviation = 1e-20;  ///< vertical-translation symmetry retained
inline constexpr double helical_deviation = 1e-18;
inline constexpr double euler_drift = 1e-6;      ///< |E(t) - E(0)| / E(0) for resolved inviscid runs
inline constexpr double young_relative = 1e-12;  ///< gap >= -young_relative * (1 + RHS)
inline constexpr double young_sharpness = 1e-12; ///< |gap(b*)|
inline constexpr double ladyzhenskaya = 1.0;
} // namespace tolerance

struct Assertion {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Outcome common to every experiment: scalar summary plus named assertions.
struct ExperimentReport {
    std::string experiment;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Assertion> assertions;

    bool passed() const {
        for (const auto& a : assertions)
            if (!a.passed) return false;
        return true;
    }

    void check(std::string name, bool ok, std::string detail = {}) {
        assertions.push_back({std::move(name), ok, std::move(detail)});
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = to_string(c.experiment);
    j["n"] = c.n;
    j["nu"] = c.nu;
    j["nu_list"] = c.nu_list;
    j["dt"] = c.dt;
    j["t_end"] = c.t_end;
    j["sample_every"] = c.sample_every;
    j["delta"] = c.delta;
    j["seed"] = c.seed;
    j["band"] = c.perturbation_band();
    j["base_flow"] = c.base_flow;
    j["base_energy"] = c.base_energy;
    j["forcing"] = to_string(c.forcing);
    j["forcing_amplitude"] = c.forcing_amplitude;
    j["epsilon"] = c.epsilon;
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    j["young_draws"] = c.young_draws;
    j["sharpness_draws"] = c.sharpness_draws;
    j["ladyzhenskaya_fields"] = c.ladyzhenskaya_fields;
    j["ladyzhenskaya_n"] = c.ladyzhenskaya_n;
    return j;
}

inline nlohmann::json to_json(const ExperimentReport& r, const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["config"] = to_json(c);
    j["summary"] = r.summary;
    nlohmann::json checks = nlohmann::json::object();
    nlohmann::json details = nlohmann::json::object();
    for (const auto& a : r.assertions) {
        checks[a.name] = a.passed;
        if (!a.detail.empty()) details[a.name] = a.detail;
    }
    j["assertions"] = checks;
    j["assertion_details"] = details;
    j["passed"] = r.passed();
    return j;
}

/// Finite doubles as numbers, everything else as null (JSON has no inf).
inline nlohmann::json json_number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

namespace detail {

/// Files under the experiment's output directory; inert when the path is empty.
class OutputDir {
public:
    explicit OutputDir(std::string path) : path_(std::move(path)) {
        if (!path_.empty()) std::filesystem::create_directories(path_);
    }
    bool enabled() const { return !path_.empty(); }
    std::string file(const std::string& name) const { return (std::filesystem::path(path_) / name).string(); }

    std::ofstream open(const std::string& name) const {
        std::ofstream os;
        if (enabled()) {
            os.open(file(name));
            if (!os) throw Error("cannot open " + file(name));
        }
        return os;
    }
    void checkpoint(const std::string& name, const SpectralVelocityField& u) const {
        if (enabled()) write_checkpoint(file(name), u);
    }
    void summary(const ExperimentReport& r, const ExperimentConfig& c) const {
        if (!enabled()) return;
        std::ofstream os(file("summary.json"));
        os << to_json(r, c).dump(2) << '\n';
    }

private:
    std::string path_;
};

inline void check_energy_slack(ExperimentReport& r, const std::string& prefix, const std::vector<DiagnosticsSample>& s,
                               bool forced) {
    if (s.empty()) return;
    const double e0 = s.front().energy;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& x : s) {
        lo = std::min(lo, x.energy_slack);
        hi = std::max(hi, x.energy_slack);
    }
    r.summary[prefix + "worst_energy_slack"] = lo;
    r.summary[prefix + "max_energy_slack"] = hi;
    r.check(prefix + "energy_inequality", lo >= -tolerance::slack_floor * e0,
            "min slack " + format_double(lo) + " vs floor " + format_double(-tolerance::slack_floor * e0));
    if (!forced)
        r.check(prefix + "energy_near_equality", hi <= tolerance::slack_ceiling * e0,
                "max slack " + format_double(hi) + " vs ceiling " + format_double(tolerance::slack_ceiling * e0));
}

inline SimulationConfig simulation_config(const ExperimentConfig& c, double nu) {
    return {nu, c.dt, c.t_end, c.sample_every, make_forcing(c)};
}

template <class F>
void run_pair(bool parallel, F&& a, F&& b) {
    if (parallel) {
        auto fut = std::async(std::launch::async, b);
        a();
        fut.get();
    } else {
        a();
        b();
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Stability of a 2.5D flow under a 3D perturbation

struct StabilityRow {
    double t = 0.0;
    double log_wsq = 0.0;
    double log_bound_running = 0.0;
    double log_bound_apriori = 0.0;
    double dev_eix3 = 0.0; ///< of the perturbed trajectory v
    double energy_slack_u = 0.0;
    double energy_slack_v = 0.0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::vector<DiagnosticsSample> base;      ///< u
    std::vector<DiagnosticsSample> perturbed; ///< v
    double w0_l2sq = 0.0;
    double max_excess = -std::numeric_limits<double>::infinity(); ///< max(log_wsq - log_bound_running)
    std::optional<double> first_violation_t;
    double wall_seconds = 0.0;
    ExperimentReport report;
};

inline StabilityReport run_stability(const ExperimentConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    StabilityReport out;
    out.report.experiment = "stability";
    detail::OutputDir dir(cfg.output_dir);
    const GridSpec g(cfg.n);

    SpectralVelocityField u0 = dealias(make_base_flow(cfg));
    if (ei_x3_deviation(u0) > tolerance::eix3_deviation)
        throw ConfigError("stability base flow must be independent of x3");
    const bool forced = cfg.forcing != ForcingKind::Off;
    if (forced && ei_x3_deviation(forcing_field(g, cfg.forcing, cfg.forcing_amplitude)) > 0.0)
        throw ConfigError("forcing must respect the x3-translation symmetry of the base flow");
    SpectralVelocityField v0 = u0 + generate_perturbation(g, cfg.delta, derive_seed(cfg.seed, 1), cfg.perturbation_band());

    const SimulationConfig sim = detail::simulation_config(cfg, cfg.nu);
    Trajectory tu(sim, u0);
    Trajectory tv(sim, v0);
    out.w0_l2sq = difference_energy(tu.state().u, tv.state().u);
    const double u0_l2sq = tu.initial_energy();
    const double log_apriori = apriori_bound(out.w0_l2sq, u0_l2sq, cfg.nu);
    RunningBound running(out.w0_l2sq, cfg.nu);

    std::ofstream csv = dir.open("stability.csv");
    std::ofstream csv_u = dir.open("base.csv");
    std::ofstream csv_v = dir.open("perturbed.csv");
    if (dir.enabled()) {
        csv << "t,log_wsq,log_bound_running,log_bound_apriori,dev_eix3,energy_slack_u,energy_slack_v\n";
        csv_u << diagnostics_header << '\n';
        csv_v << diagnostics_header << '\n';
    }

    bool ordered = true;
    bool bounds_ordered = true;
    auto record = [&] {
        const DiagnosticsSample& su = tu.latest();
        const DiagnosticsSample& sv = tv.latest();
        StabilityRow row;
        row.t = su.t;
        row.log_wsq = safe_log(difference_energy(tu.state().u, tv.state().u));
        row.log_bound_running = running.add(su.t, su.l4_fourth);
        row.log_bound_apriori = log_apriori;
        row.dev_eix3 = ei_x3_deviation(tv.state().u);
        row.energy_slack_u = su.energy_slack;
        row.energy_slack_v = sv.energy_slack;
        const bool measured_ok = row.log_wsq <= row.log_bound_running;
        const bool chain_ok = forced || row.log_bound_running <= row.log_bound_apriori;
        if (!measured_ok || !chain_ok) {
            if (!out.first_violation_t) out.first_violation_t = row.t;
        }
        ordered = ordered && measured_ok;
        bounds_ordered = bounds_ordered && chain_ok;
        if (std::isfinite(row.log_bound_running) && std::isfinite(row.log_wsq))
            out.max_excess = std::max(out.max_excess, row.log_wsq - row.log_bound_running);
        out.rows.push_back(row);
        if (dir.enabled()) {
            csv << format_double(row.t) << ',' << format_double(row.log_wsq) << ',' << format_double(row.log_bound_running)
                << ',' << format_double(row.log_bound_apriori) << ',' << format_double(row.dev_eix3) << ','
                << format_double(row.energy_slack_u) << ',' << format_double(row.energy_slack_v) << '\n';
            write_diagnostics_row(csv_u, su);
            write_diagnostics_row(csv_v, sv);
            csv.flush();
            csv_u.flush();
            csv_v.flush();
        }
    };

    std::optional<std::string> failure;
    try {
        record();
        while (!tu.done()) {
            detail::run_pair<std::function<void()>>(cfg.threads > 1, [&] { tu.advance(); }, [&] { tv.advance(); });
            record();
        }
    } catch (const CflViolation& e) {
        failure = e.what();
    } catch (const BlowUp& e) {
        failure = e.what();
    }
    out.base = tu.samples();
    out.perturbed = tv.samples();
    dir.checkpoint("u_final.chk", tu.state().u);
    dir.checkpoint("v_final.chk", tv.state().u);

    ExperimentReport& r = out.report;
    r.check("run_completed", !failure, failure.value_or(""));
    r.check("measured_below_running_bound", ordered,
            out.first_violation_t ? "first violation at t=" + format_double(*out.first_violation_t) : "");
    if (!forced) r.check("running_below_apriori_bound", bounds_ordered);
    detail::check_energy_slack(r, "u_", out.base, forced);
    detail::check_energy_slack(r, "v_", out.perturbed, forced);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.summary["w0_l2sq"] = out.w0_l2sq;
    r.summary["u0_l2sq"] = u0_l2sq;
    r.summary["log_bound_apriori"] = json_number(log_apriori);
    r.summary["final_log_bound_running"] = json_number(out.rows.back().log_bound_running);
    r.summary["final_log_wsq"] = json_number(out.rows.back().log_wsq);
    r.summary["max_log_wsq_minus_running"] = json_number(out.max_excess);
    r.summary["first_violation_t"] = out.first_violation_t ? nlohmann::json(*out.first_violation_t) : nlohmann::json(nullptr);
    r.summary["max_dev_eix3_v"] = [&] {
        double m = 0.0;
        for (const auto& row : out.rows) m = std::max(m, row.dev_eix3);
        return m;
    }();
    r.summary["wall_seconds"] = out.wall_seconds;
    dir.summary(r, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Symmetry preservation

struct SymmetryRow {
    double t = 0.0;
    double dev_eix3 = 0.0;
    double dev_helical = 0.0; ///< NaN when n is not divisible by 4
};

struct SymPreserveReport {
    SymmetryKind kind = SymmetryKind::VerticalTranslation;
    std::vector<DiagnosticsSample> samples;
    std::vector<SymmetryRow> rows;
    double max_deviation = 0.0; ///< of the tracked kind
    ExperimentReport report;
};

inline SymPreserveReport run_sym_preserve(const ExperimentConfig& cfg) {
    validate(cfg);
    SymPreserveReport out;
    out.kind = cfg.experiment == Experiment::SymPreserveHelical ? SymmetryKind::DiscreteHelical
                                                                 : SymmetryKind::VerticalTranslation;
    out.report.experiment = to_string(cfg.experiment);
    const double tol = out.kind == SymmetryKind::DiscreteHelical ? tolerance::helical_deviation
                                                                 : tolerance::eix3_deviation;
    const GridSpec g(cfg.n);
    if (out.kind == SymmetryKind::DiscreteHelical && cfg.n % 4 != 0)
        throw ConfigError("helical experiments need n divisible by 4");

    SpectralVelocityField u0 = dealias(make_base_flow(cfg));
    const double dev0 = deviation(u0, out.kind);
    if (dev0 > tol)
        throw ConfigError(std::string("base flow is not ") + to_string(out.kind) + " symmetric (deviation " +
                          format_double(dev0) + ")");
    const bool forced = cfg.forcing != ForcingKind::Off;
    if (forced) {
        const double fdev = deviation(forcing_field(g, cfg.forcing, cfg.forcing_amplitude), out.kind);
        if (fdev > 0.0)
            throw ConfigError(std::string("forcing '") + to_string(cfg.forcing) + "' does not commute with the " +
                              to_string(out.kind) + " symmetry");
    }

    detail::OutputDir dir(cfg.output_dir);
    std::ofstream csv = dir.open("diagnostics.csv");
    if (dir.enabled()) csv << diagnostics_header << ",dev_eix3,dev_helical\n";

    Trajectory traj(detail::simulation_config(cfg, cfg.nu), u0);
    const bool quarter = g.n() % 4 == 0;
    auto record = [&] {
        const auto& u = traj.state().u;
        SymmetryRow row{traj.latest().t, ei_x3_deviation(u),
                        quarter ? helical_deviation(u) : std::numeric_limits<double>::quiet_NaN()};
        out.max_deviation = std::max(out.max_deviation,
                                     out.kind == SymmetryKind::DiscreteHelical ? row.dev_helical : row.dev_eix3);
        out.rows.push_back(row);
        if (dir.enabled()) {
            std::ostringstream line;
            write_diagnostics_row(line, traj.latest());
            std::string s = line.str();
            s.pop_back();
            csv << s << ',' << format_double(row.dev_eix3) << ',' << format_double(row.dev_helical) << '\n';
            csv.flush();
        }
    };

    std::optional<std::string> failure;
    try {
        record();
        while (!traj.done()) {
            traj.advance();
            record();
        }
    } catch (const Error& e) {
        failure = e.what();
    }
    out.samples = traj.samples();
    dir.checkpoint("final.chk", traj.state().u);

    ExperimentReport& r = out.report;
    r.check("run_completed", !failure, failure.value_or(""));
    r.check("symmetry_preserved", out.max_deviation <= tol,
            "max deviation " + format_double(out.max_deviation) + " vs " + format_double(tol));
    if (cfg.nu > 0) detail::check_energy_slack(r, "", out.samples, forced);
    r.summary["symmetry"] = to_string(out.kind);
    r.summary["max_deviation"] = out.max_deviation;
    r.summary["initial_deviation"] = dev0;
    r.summary["final_energy"] = out.samples.back().energy;
    dir.summary(r, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Inviscid conservation

struct EulerRow {
    double t = 0.0;
    double energy = 0.0;
    double relative_drift = 0.0;
    double dev_eix3 = 0.0;
};

struct EulerReport {
    std::vector<DiagnosticsSample> samples;
    std::vector<EulerRow> rows;
    double max_relative_drift = 0.0;
    double max_dev_eix3 = 0.0;
    std::optional<double> aborted_at; ///< resolution guard tripped
    ExperimentReport report;
};

inline EulerReport run_euler_conserve(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.nu != 0.0) throw ConfigError("euler_conserve needs nu = 0");
    EulerReport out;
    out.report.experiment = "euler_conserve";
    detail::OutputDir dir(cfg.output_dir);
    std::ofstream csv = dir.open("diagnostics.csv");
    if (dir.enabled()) csv << diagnostics_header << ",dev_eix3,relative_energy_drift\n";

    SpectralVelocityField u0 = dealias(make_base_flow(cfg));
    const double dev0 = ei_x3_deviation(u0);
    Trajectory traj(detail::simulation_config(cfg, 0.0), u0);
    const double e0 = traj.initial_energy();
    auto record = [&] {
        const auto& s = traj.latest();
        EulerRow row{s.t, s.energy, e0 > 0 ? std::abs(s.energy - e0) / e0 : 0.0, ei_x3_deviation(traj.state().u)};
        out.max_relative_drift = std::max(out.max_relative_drift, row.relative_drift);
        out.max_dev_eix3 = std::max(out.max_dev_eix3, row.dev_eix3);
        out.rows.push_back(row);
        if (dir.enabled()) {
            std::ostringstream line;
            write_diagnostics_row(line, s);
            std::string str = line.str();
            str.pop_back();
            csv << str << ',' << format_double(row.dev_eix3) << ',' << format_double(row.relative_drift) << '\n';
            csv.flush();
        }
    };

    std::optional<std::string> failure;
    try {
        record();
        while (!traj.done()) {
            traj.advance();
            record();
        }
    } catch (const ResolutionLoss& e) {
        out.aborted_at = e.t;
        failure = e.what();
    } catch (const Error& e) {
        failure = e.what();
    }
    out.samples = traj.samples();
    dir.checkpoint("final.chk", traj.state().u);

    ExperimentReport& r = out.report;
    r.check("run_completed", !failure, failure.value_or(""));
    r.check("energy_conserved", out.max_relative_drift <= tolerance::euler_drift,
            "max |dE|/E " + format_double(out.max_relative_drift));
    if (dev0 == 0.0)
        r.check("eix3_preserved", out.max_dev_eix3 <= tolerance::eix3_deviation,
                "max dev_eix3 " + format_double(out.max_dev_eix3));
    r.summary["initial_energy"] = e0;
    r.summary["max_relative_energy_drift"] = out.max_relative_drift;
    r.summary["max_dev_eix3"] = out.max_dev_eix3;
    r.summary["initial_dev_eix3"] = dev0;
    r.summary["aborted_at"] = out.aborted_at ? nlohmann::json(*out.aborted_at) : nlohmann::json(nullptr);
    dir.summary(r, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Vanishing viscosity

struct VanishingCase {
    double nu = 0.0;
    PerturbationBudget budget;
    double perturbation_l2 = 0.0;     ///< epsilon * delta_max
    double max_dev_eix3 = 0.0;
    double log_max_dev_eix3 = 0.0;
    double log_bound = 0.0;           ///< 2 log(eps delta_max) + 27/(64 nu^4) ||u0||^4
    double worst_energy_slack = 0.0;
    std::vector<DiagnosticsSample> samples;
    std::optional<std::string> failure;
};

struct VanishingReport {
    double u0_l2sq = 0.0;
    std::vector<VanishingCase> cases;
    ExperimentReport report;
};

inline VanishingReport run_vanishing_viscosity(const ExperimentConfig& cfg) {
    validate(cfg);
    VanishingReport out;
    out.report.experiment = "vanishing_viscosity";
    detail::OutputDir dir(cfg.output_dir);
    const GridSpec g(cfg.n);
    const SpectralVelocityField u0 = dealias(make_base_flow(cfg));
    if (ei_x3_deviation(u0) > tolerance::eix3_deviation)
        throw ConfigError("vanishing_viscosity base flow must be independent of x3");
    if (cfg.forcing != ForcingKind::Off) throw ConfigError("vanishing_viscosity runs unforced");
    out.u0_l2sq = energy(u0);
    const SpectralVelocityField shape = generate_perturbation(g, 1.0, derive_seed(cfg.seed, 1), cfg.perturbation_band());

    out.cases.resize(cfg.nu_list.size());
    auto run_case = [&](std::size_t i) {
        VanishingCase& c = out.cases[i];
        c.nu = cfg.nu_list[i];
        c.budget = perturbation_budget(out.u0_l2sq, c.nu);
        c.perturbation_l2 = cfg.epsilon * c.budget.delta_max();
        c.log_bound = cfg.epsilon > 0.0 ? 2.0 * (std::log(cfg.epsilon) + c.budget.log_delta_max) +
                                              gronwall_constant / std::pow(c.nu, 4) * out.u0_l2sq * out.u0_l2sq
                                        : log_zero;
        std::ofstream csv = dir.open("diagnostics_nu" + std::to_string(i) + ".csv");
        if (dir.enabled()) csv << diagnostics_header << ",dev_eix3\n";
        Trajectory traj(detail::simulation_config(cfg, c.nu), u0 + c.perturbation_l2 * shape);
        auto record = [&] {
            const double dev = ei_x3_deviation(traj.state().u);
            c.max_dev_eix3 = std::max(c.max_dev_eix3, dev);
            if (dir.enabled()) {
                std::ostringstream line;
                write_diagnostics_row(line, traj.latest());
                std::string s = line.str();
                s.pop_back();
                csv << s << ',' << format_double(dev) << '\n';
                csv.flush();
            }
        };
        try {
            record();
            while (!traj.done()) {
                traj.advance();
                record();
            }
        } catch (const Error& e) {
            c.failure = e.what();
        }
        c.samples = traj.samples();
        c.log_max_dev_eix3 = safe_log(c.max_dev_eix3);
        c.worst_energy_slack = energy_budget_check(c.samples);
        dir.checkpoint("final_nu" + std::to_string(i) + ".chk", traj.state().u);
    };

    // Cases are independent; run up to `threads` at a time.
    for (std::size_t first = 0; first < out.cases.size(); first += cfg.threads) {
        std::vector<std::future<void>> batch;
        const std::size_t last = std::min(out.cases.size(), first + cfg.threads);
        for (std::size_t i = first + 1; i < last; ++i) batch.push_back(std::async(std::launch::async, run_case, i));
        run_case(first);
        for (auto& f : batch) f.get();
    }

    ExperimentReport& r = out.report;
    std::ofstream csv = dir.open("vanishing.csv");
    if (dir.enabled()) csv << "nu,C,log_delta_max,perturbation_l2,max_dev_eix3,log_max_dev_eix3,log_bound,worst_energy_slack\n";
    nlohmann::json rows = nlohmann::json::array();
    bool monotone = true;
    for (std::size_t i = 0; i < out.cases.size(); ++i) {
        const VanishingCase& c = out.cases[i];
        const std::string tag = "nu" + std::to_string(i) + "_";
        r.check(tag + "run_completed", !c.failure, c.failure.value_or(""));
        const bool within = cfg.epsilon > 0.0 ? c.log_max_dev_eix3 <= c.log_bound
                                              : c.max_dev_eix3 <= tolerance::eix3_deviation;
        r.check(tag + "deviation_within_bound", within,
                "log max dev " + format_double(c.log_max_dev_eix3) + " vs log bound " + format_double(c.log_bound));
        detail::check_energy_slack(r, tag, c.samples, false);
        if (i > 0 && !(c.log_bound <= out.cases[i - 1].log_bound)) monotone = false;
        if (dir.enabled())
            csv << format_double(c.nu) << ',' << format_double(c.budget.C) << ',' << format_double(c.budget.log_delta_max)
                << ',' << format_double(c.perturbation_l2) << ',' << format_double(c.max_dev_eix3) << ','
                << format_double(c.log_max_dev_eix3) << ',' << format_double(c.log_bound) << ','
                << format_double(c.worst_energy_slack) << '\n';
        rows.push_back({{"nu", c.nu},
                        {"C", c.budget.C},
                        {"log_delta_max", c.budget.log_delta_max},
                        {"perturbation_l2", c.perturbation_l2},
                        {"max_dev_eix3", c.max_dev_eix3},
                        {"log_max_dev_eix3", json_number(c.log_max_dev_eix3)},
                        {"log_bound", json_number(c.log_bound)}});
    }
    r.check("bound_nonincreasing_in_nu_sequence", monotone);
    r.summary["u0_l2sq"] = out.u0_l2sq;
    r.summary["epsilon"] = cfg.epsilon;
    r.summary["cases"] = rows;
    dir.summary(r, cfg);
    return out;
}

// ---------------------------------------------------------------------------
// Inequality campaigns

struct YoungCampaign {
    std::size_t draws = 0;
    std::size_t violations = 0;
    double worst_normalized_gap = std::numeric_limits<double>::infinity(); ///< min gap / (1 + RHS)
};

/// Random (a, b, c, nu), log-uniform over several decades, with a few exact zeros.
inline YoungCampaign young_campaign(std::uint64_t seed, std::size_t draws) {
    Rng rng(seed);
    YoungCampaign out;
    out.draws = draws;
    for (std::size_t i = 0; i < draws; ++i) {
        auto draw = [&] { return rng.uniform() < 0.02 ? 0.0 : rng.log_uniform(1e-3, 1e3); };
        const double a = draw();
        const double b = draw();
        const double c = draw();
        const double nu = rng.log_uniform(1e-2, 1e2);
        const double gap = young_split_gap(a, b, c, nu);
        const double scale = 1.0 + young_split_rhs(a, b, c, nu);
        if (gap < -tolerance::young_relative * scale) ++out.violations;
        out.worst_normalized_gap = std::min(out.worst_normalized_gap, gap / scale);
    }
    return out;
}

struct SharpnessCampaign {
    std::size_t draws = 0;
    double max_abs_gap = 0.0;
};

/// |gap| at the equality point b*, with a, c in [0, 1] and nu in [0.1, 2].
inline SharpnessCampaign sharpness_campaign(std::uint64_t seed, std::size_t draws) {
    Rng rng(seed);
    SharpnessCampaign out;
    out.draws = draws;
    for (std::size_t i = 0; i < draws; ++i) {
        const double a = rng.uniform();
        const double c = rng.uniform();
        const double nu = rng.uniform(0.1, 2.0);
        out.max_abs_gap = std::max(out.max_abs_gap, std::abs(young_split_gap(a, young_equality_point(a, c, nu), c, nu)));
    }
    return out;
}

struct LadyzhenskayaCampaign {
    std::size_t fields = 0;
    std::size_t n = 0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    std::size_t violations = 0;
};

/// Random mean-zero band-limited fields on the n x n torus: 1 to 3
/// components, random cutoff in [1, n/3] and spectral slope in [0, 3].
inline PlaneField random_plane_field(GridSpec g, Rng& rng) {
    const int comps = 1 + static_cast<int>(rng.next() % 3);
    const double cutoff = rng.uniform(1.0, static_cast<double>(g.n()) / 3.0);
    const double slope = rng.uniform(0.0, 3.0);
    PlaneField raw(g, comps);
    const int half = static_cast<int>(g.n() / 2);
    for (int k1 = -half + 1; k1 < half; ++k1)
        for (int k2 = -half + 1; k2 < half; ++k2) {
            const double kk = std::sqrt(double(k1 * k1 + k2 * k2));
            if (kk == 0.0 || kk > cutoff) continue;
            for (int c = 0; c < comps; ++c) raw.at(c, k1, k2) = std::pow(kk, -slope) * rng.complex_normal();
        }
    PlaneField f(g, comps);
    for (int k1 = -half + 1; k1 < half; ++k1)
        for (int k2 = -half + 1; k2 < half; ++k2)
            for (int c = 0; c < comps; ++c) f.at(c, k1, k2) = 0.5 * (raw.at(c, k1, k2) + std::conj(raw.at(c, -k1, -k2)));
    return f;
}

inline LadyzhenskayaCampaign ladyzhenskaya_campaign(std::uint64_t seed, std::size_t fields, std::size_t n) {
    Rng rng(seed);
    const GridSpec g(n);
    LadyzhenskayaCampaign out;
    out.fields = fields;
    out.n = n;
    double sum = 0.0;
    for (std::size_t i = 0; i < fields; ++i) {
        const double r = ladyzhenskaya_ratio_2d(random_plane_field(g, rng));
        out.max_ratio = std::max(out.max_ratio, r);
        sum += r;
        if (r > tolerance::ladyzhenskaya) ++out.violations;
    }
    out.mean_ratio = fields ? sum / static_cast<double>(fields) : 0.0;
    return out;
}

struct InequalityReport {
    YoungCampaign young;
    SharpnessCampaign sharpness;
    LadyzhenskayaCampaign ladyzhenskaya;
    ExperimentReport report;
};

inline InequalityReport run_inequality_suite(const ExperimentConfig& cfg) {
    validate(cfg);
    InequalityReport out;
    out.report.experiment = "inequality_suite";
    out.young = young_campaign(derive_seed(cfg.seed, 10), cfg.young_draws);
    out.sharpness = sharpness_campaign(derive_seed(cfg.seed, 11), cfg.sharpness_draws);
    out.ladyzhenskaya = ladyzhenskaya_campaign(derive_seed(cfg.seed, 12), cfg.ladyzhenskaya_fields, cfg.ladyzhenskaya_n);

    ExperimentReport& r = out.report;
    r.check("young_split_nonnegative", out.young.violations == 0,
            std::to_string(out.young.violations) + " violations in " + std::to_string(out.young.draws) + " draws");
    r.check("young_split_sharp", out.sharpness.max_abs_gap <= tolerance::young_sharpness,
            "max |gap(b*)| " + format_double(out.sharpness.max_abs_gap));
    r.check("ladyzhenskaya_ratio_at_most_one", out.ladyzhenskaya.max_ratio <= tolerance::ladyzhenskaya,
            "max ratio " + format_double(out.ladyzhenskaya.max_ratio));
    r.summary["young_draws"] = out.young.draws;
    r.summary["young_violations"] = out.young.violations;
    r.summary["young_worst_normalized_gap"] = out.young.worst_normalized_gap;
    r.summary["sharpness_draws"] = out.sharpness.draws;
    r.summary["sharpness_max_abs_gap"] = out.sharpness.max_abs_gap;
    r.summary["ladyzhenskaya_fields"] = out.ladyzhenskaya.fields;
    r.summary["ladyzhenskaya_n"] = out.ladyzhenskaya.n;
    r.summary["ladyzhenskaya_max_ratio"] = out.ladyzhenskaya.max_ratio;
    r.summary["ladyzhenskaya_mean_ratio"] = out.ladyzhenskaya.mean_ratio;

    detail::OutputDir dir(cfg.output_dir);
    if (dir.enabled()) {
        std::ofstream csv = dir.open("inequalities.csv");
        csv << "campaign,count,violations,extreme\n";
        csv << "young_split," << out.young.draws << ',' << out.young.violations << ','
            << format_double(out.young.worst_normalized_gap) << '\n';
        csv << "young_sharpness," << out.sharpness.draws << ",0," << format_double(out.sharpness.max_abs_gap) << '\n';
        csv << "ladyzhenskaya," << out.ladyzhenskaya.fields << ',' << out.ladyzhenskaya.violations << ','
            << format_double(out.ladyzhenskaya.max_ratio) << '\n';
    }
    dir.summary(r, cfg);
    return out;
}

/// Dispatches on cfg.experiment and returns the common report.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
    case Experiment::Stability: return run_stability(cfg).report;
    case Experiment::SymPreserveZ:
    case Experiment::SymPreserveHelical: return run_sym_preserve(cfg).report;
    case Experiment::EulerConserve: return run_euler_conserve(cfg).report;
    case Experiment::VanishingViscosity: return run_vanishing_viscosity(cfg).report;
    case Experiment::InequalitySuite: return run_inequality_suite(cfg).report;
    }
    throw ConfigError("unknown experiment");
}

} // namespace symflow
