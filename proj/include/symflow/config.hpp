#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symflow/error.hpp"
#include "symflow/grid.hpp"

namespace symflow {

enum class Experiment { Stability, SymPreserveZ, SymPreserveHelical, EulerConserve, VanishingViscosity, InequalitySuite };

inline const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::Stability: return "stability";
    case Experiment::SymPreserveZ: return "sym_preserve_z";
    case Experiment::SymPreserveHelical: return "sym_preserve_helical";
    case Experiment::EulerConserve: return "euler_conserve";
    case Experiment::VanishingViscosity: return "vanishing_viscosity";
    case Experiment::InequalitySuite: return "inequality_suite";
    }
    return "?";
}

/// Time-independent body forces the harness can apply.
///   shear_x2:  a (sin 2 pi x2, 0, 0)                  x3-independent
///   cellular:  a (sin 2 pi x2, -sin 2 pi x1, 0)       x3-independent and helically invariant
///   shear_x3:  a (sin 2 pi x3, 0, 0)                  depends on x3
enum class ForcingKind { Off, ShearX2, Cellular, ShearX3 };

inline const char* to_string(ForcingKind f) {
    switch (f) {
    case ForcingKind::Off: return "off";
    case ForcingKind::ShearX2: return "shear_x2";
    case ForcingKind::Cellular: return "cellular";
    case ForcingKind::ShearX3: return "shear_x3";
    }
    return "?";
}

struct ExperimentConfig {
    Experiment experiment = Experiment::Stability;
    std::size_t n = 32;
    double nu = 0.01;
    std::vector<double> nu_list{1.0, 0.7, 0.5};
    double dt = 1e-3;
    double t_end = 1.0;
    double sample_every = 0.01;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> band; ///< perturbation cutoff |k| <= band; default n/6
    /// taylor_green | random_2p5d | random_helical | shear_x3 | zero | file:<path>
    std::string base_flow = "taylor_green";
    double base_energy = 0.5; ///< L2 energy of the random base flows
    ForcingKind forcing = ForcingKind::Off;
    double forcing_amplitude = 0.01;
    double epsilon = 0.1; ///< prefactor of the little-o perturbation size
    std::string output_dir = "symflow_out";
    unsigned threads = 1;
    std::size_t young_draws = 100000;
    std::size_t sharpness_draws = 1000;
    std::size_t ladyzhenskaya_fields = 1000;
    std::size_t ladyzhenskaya_n = 64;

    double perturbation_band() const { return band.value_or(static_cast<double>(n) / 6.0); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
}

} // namespace detail

/// Checks the invariants tying the fields together; throws ConfigError.
inline void validate(const ExperimentConfig& c) {
    if (c.n < 8 || (c.n & (c.n - 1)) != 0) throw ConfigError("n must be a power of two >= 8");
    if (c.experiment == Experiment::SymPreserveHelical && c.n % 4 != 0)
        throw ConfigError("helical experiments need n divisible by 4");
    if (!(c.dt > 0) || !(c.t_end > 0) || !(c.sample_every > 0))
        throw ConfigError("dt, t_end and sample_every must be > 0");
    if (!(c.delta >= 0)) throw ConfigError("delta must be >= 0");
    if (!(c.nu >= 0)) throw ConfigError("nu must be >= 0");
    if (!(c.base_energy > 0)) throw ConfigError("base_energy must be > 0");
    if (!(c.forcing_amplitude >= 0)) throw ConfigError("forcing_amplitude must be >= 0");
    if (!(c.epsilon >= 0)) throw ConfigError("epsilon must be >= 0");
    if (c.threads < 1) throw ConfigError("threads must be >= 1");
    if (c.band && !(*c.band >= 1.0 && 3.0 * *c.band <= static_cast<double>(c.n)))
        throw ConfigError("band must lie in [1, n/3]");
    switch (c.experiment) {
    case Experiment::Stability:
        if (!(c.nu > 0)) throw ConfigError("stability needs nu > 0");
        break;
    case Experiment::EulerConserve:
        if (c.nu != 0.0) throw ConfigError("euler_conserve needs nu = 0");
        if (c.forcing != ForcingKind::Off) throw ConfigError("euler_conserve runs unforced");
        break;
    case Experiment::VanishingViscosity:
        if (c.nu_list.empty()) throw ConfigError("nu_list must not be empty");
        for (std::size_t i = 0; i < c.nu_list.size(); ++i) {
            if (!(c.nu_list[i] > 0))
                throw ConfigError("nu_list entries must be > 0 (the inviscid case is euler_conserve)");
            if (i > 0 && !(c.nu_list[i] < c.nu_list[i - 1])) throw ConfigError("nu_list must be strictly decreasing");
        }
        break;
    case Experiment::InequalitySuite:
        if (c.ladyzhenskaya_n < 8 || (c.ladyzhenskaya_n & (c.ladyzhenskaya_n - 1)) != 0)
            throw ConfigError("ladyzhenskaya_n must be a power of two >= 8");
        break;
    default: break;
    }
}

/// Parses the flat `key = value` format: one pair per line, `#` starts a
/// comment, unknown or repeated keys are errors.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    bool have_experiment = false;
    std::map<std::string, int> seen;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (seen[key]++) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");

        if (key == "experiment") {
            have_experiment = true;
            if (val == "stability") c.experiment = Experiment::Stability;
            else if (val == "sym_preserve_z") c.experiment = Experiment::SymPreserveZ;
            else if (val == "sym_preserve_helical") c.experiment = Experiment::SymPreserveHelical;
            else if (val == "euler_conserve") c.experiment = Experiment::EulerConserve;
            else if (val == "vanishing_viscosity") c.experiment = Experiment::VanishingViscosity;
            else if (val == "inequality_suite") c.experiment = Experiment::InequalitySuite;
            else throw ConfigError("unknown experiment '" + val + "'");
        } else if (key == "n") {
            c.n = detail::parse_uint(key, val);
        } else if (key == "nu") {
            c.nu = detail::parse_double(key, val);
        } else if (key == "nu_list") {
            c.nu_list.clear();
            std::istringstream ls(val);
            std::string item;
            while (std::getline(ls, item, ',')) c.nu_list.push_back(detail::parse_double(key, detail::trim(item)));
        } else if (key == "dt") {
            c.dt = detail::parse_double(key, val);
        } else if (key == "t_end") {
            c.t_end = detail::parse_double(key, val);
        } else if (key == "sample_every") {
            c.sample_every = detail::parse_double(key, val);
        } else if (key == "delta") {
            c.delta = detail::parse_double(key, val);
        } else if (key == "seed") {
            c.seed = detail::parse_uint(key, val);
        } else if (key == "band") {
            c.band = detail::parse_double(key, val);
        } else if (key == "base_flow") {
            if (val != "taylor_green" && val != "random_2p5d" && val != "random_helical" && val != "shear_x3" &&
                val != "zero" && val.rfind("file:", 0) != 0)
                throw ConfigError("unknown base_flow '" + val + "'");
            c.base_flow = val;
        } else if (key == "base_energy") {
            c.base_energy = detail::parse_double(key, val);
        } else if (key == "forcing") {
            if (val == "off") c.forcing = ForcingKind::Off;
            else if (val == "shear_x2") c.forcing = ForcingKind::ShearX2;
            else if (val == "cellular") c.forcing = ForcingKind::Cellular;
            else if (val == "shear_x3") c.forcing = ForcingKind::ShearX3;
            else throw ConfigError("unknown forcing '" + val + "'");
        } else if (key == "forcing_amplitude") {
            c.forcing_amplitude = detail::parse_double(key, val);
        } else if (key == "epsilon") {
            c.epsilon = detail::parse_double(key, val);
        } else if (key == "output_dir") {
            c.output_dir = val;
        } else if (key == "threads") {
            c.threads = static_cast<unsigned>(detail::parse_uint(key, val));
        } else if (key == "young_draws") {
            c.young_draws = detail::parse_uint(key, val);
        } else if (key == "sharpness_draws") {
            c.sharpness_draws = detail::parse_uint(key, val);
        } else if (key == "ladyzhenskaya_fields") {
            c.ladyzhenskaya_fields = detail::parse_uint(key, val);
        } else if (key == "ladyzhenskaya_n") {
            c.ladyzhenskaya_n = detail::parse_uint(key, val);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_experiment) throw ConfigError("missing required key 'experiment'");
    validate(c);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

} // namespace symflow
