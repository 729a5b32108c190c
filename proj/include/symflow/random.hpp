#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "symflow/field.hpp"

namespace symflow {

/// Seeded generator with portable variate conversions: std::mt19937_64 is
/// fully specified by the standard, the distributions below are too, so a
/// seed names the same numbers on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    // Box-Muller; one variate per call.
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace symflow
