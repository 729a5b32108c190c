#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symflow/error.hpp"
#include "symflow/symmetry.hpp"

namespace symflow {

/// Exponent constant of the difference estimate: 27 / 64.
inline constexpr double gronwall_constant = 27.0 / 64.0;
/// Constant of the sharp Young split: 27 / 128.
inline constexpr double young_constant = 27.0 / 128.0;

inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : log_zero; }

// ---------------------------------------------------------------------------
// Young split

/// nu b^2 + 27/(128 nu^3) a^2 c^4 - 2^{1/4} a^{1/2} b^{3/2} c  (always >= 0).
inline double young_split_gap(double a, double b, double c, double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("young_split_gap needs nu > 0");
    if (a < 0.0 || b < 0.0 || c < 0.0) throw InvalidArgument("young_split_gap needs a, b, c >= 0");
    const double rhs = nu * b * b + young_constant / (nu * nu * nu) * a * a * c * c * c * c;
    const double lhs = std::pow(2.0, 0.25) * std::sqrt(a) * b * std::sqrt(b) * c;
    return rhs - lhs;
}

/// Right-hand side of the split, used to scale the roundoff tolerance.
inline double young_split_rhs(double a, double b, double c, double nu) {
    return nu * b * b + young_constant / (nu * nu * nu) * a * a * c * c * c * c;
}

/// The b at which the split is an equality: 9 sqrt(2) a c^2 / (16 nu^2).
inline double young_equality_point(double a, double c, double nu) {
    return 9.0 * std::sqrt(2.0) * a * c * c / (16.0 * nu * nu);
}

// ---------------------------------------------------------------------------
// Ladyzhenskaya

struct PlaneNorms {
    double l2_sq = 0.0;
    double h1_sq = 0.0;
    double l4_fourth = 0.0;
};

inline PlaneNorms plane_norms(const PlaneField& f) {
    const GridSpec& g = f.grid();
    const std::size_t n = g.n();
    const std::size_t m = f.size();
    PlaneNorms out;
    std::vector<double> mag_sq(m, 0.0);
    FftPlan& plan = thread_plan(n, 2);
    for (int c = 0; c < f.components(); ++c) {
        auto a = f.component(c);
        out.l2_sq += pairwise_sum(m, [&](std::size_t i) { return std::norm(a[i]); });
        out.h1_sq += two_pi * two_pi * pairwise_sum(m, [&](std::size_t i) {
            const int k1 = g.wavenumber(i / n);
            const int k2 = g.wavenumber(i % n);
            return double(k1 * k1 + k2 * k2) * std::norm(a[i]);
        });
        auto buf = plan.buffer();
        std::copy(a.begin(), a.end(), buf.begin());
        plan.backward();
        for (std::size_t i = 0; i < m; ++i) mag_sq[i] += buf[i].real() * buf[i].real();
    }
    out.l4_fourth = pairwise_sum(m, [&](std::size_t i) { return mag_sq[i] * mag_sq[i]; }) / static_cast<double>(m);
    return out;
}

/// ||f||^4_{L4} / (2 ||f||^2_{L2} ||grad f||^2_{L2}) for a mean-zero field on
/// the two-dimensional torus. Values <= 1 mean the inequality holds with
/// the constant 2 (the 2^{1/4} factor on the L4 norm) for this field.
inline double ladyzhenskaya_ratio_2d(const PlaneField& f) {
    const PlaneNorms nm = plane_norms(f);
    if (nm.l2_sq == 0.0) throw InvalidArgument("ladyzhenskaya_ratio_2d: zero field");
    double mean = 0.0;
    for (int c = 0; c < f.components(); ++c) mean = std::max(mean, std::abs(f.component(c)[0]));
    if (mean > 1e-12 * std::sqrt(nm.l2_sq)) throw InvalidArgument("ladyzhenskaya_ratio_2d: field must be mean-zero");
    return nm.l4_fourth / (2.0 * nm.l2_sq * nm.h1_sq);
}

// ---------------------------------------------------------------------------
// Gronwall bounds, all in natural-log space

enum class BoundKind { Apriori, Running };

struct BoundCurve {
    std::vector<double> times;
    std::vector<double> log_bound;
    BoundKind kind = BoundKind::Running;
};

/// log of ||w0||^2 exp(27/(64 nu^4) ||u0||^4); -inf when w0 = 0.
inline double apriori_bound(double w0_l2sq, double u0_l2sq, double nu) {
    if (!(nu > 0.0)) throw InvalidArgument("apriori_bound needs nu > 0");
    if (w0_l2sq < 0.0 || u0_l2sq < 0.0) throw InvalidArgument("apriori_bound needs nonnegative energies");
    const double lw = safe_log(w0_l2sq);
    if (lw == log_zero) return log_zero;
    return lw + gronwall_constant / (nu * nu * nu * nu) * u0_l2sq * u0_l2sq;
}

/// Streaming form of the running bound: trapezoidal accumulation of
/// int ||u||^4_{L4} as samples arrive.
class RunningBound {
public:
    RunningBound(double w0_l2sq, double nu) : log_w0_(safe_log(w0_l2sq)), nu_(nu) {
        if (!(nu > 0.0)) throw InvalidArgument("running_bound needs nu > 0");
        if (w0_l2sq < 0.0) throw InvalidArgument("running_bound needs w0_l2sq >= 0");
    }

    /// Adds a sample of ||u(t)||^4_{L4}; returns the log bound at t.
    double add(double t, double l4_fourth) {
        if (l4_fourth < 0.0 || !std::isfinite(l4_fourth)) throw InvalidArgument("L4 history must be finite and >= 0");
        if (last_t_) {
            if (!(t > *last_t_)) throw InvalidArgument("running_bound needs strictly increasing times");
            integral_ += 0.5 * (t - *last_t_) * (l4_fourth + last_q_);
        }
        last_t_ = t;
        last_q_ = l4_fourth;
        return current();
    }

    double integral() const { return integral_; }

    double current() const {
        if (log_w0_ == log_zero) return log_zero;
        return log_w0_ + gronwall_constant / (nu_ * nu_ * nu_) * integral_;
    }

private:
    double log_w0_;
    double nu_;
    double integral_ = 0.0;
    std::optional<double> last_t_;
    double last_q_ = 0.0;
};

/// log of ||w0||^2 exp(27/(64 nu^3) int_0^t ||u||^4_{L4} ds) at each sample.
inline BoundCurve running_bound(std::span<const double> times, std::span<const double> l4_history, double w0_l2sq,
                                double nu) {
    if (times.size() != l4_history.size()) throw InvalidArgument("running_bound: times and history differ in length");
    RunningBound acc(w0_l2sq, nu);
    BoundCurve out;
    out.kind = BoundKind::Running;
    for (std::size_t i = 0; i < times.size(); ++i) {
        out.times.push_back(times[i]);
        out.log_bound.push_back(acc.add(times[i], l4_history[i]));
    }
    return out;
}

/// The a-priori bound as a (constant) curve on the given times.
inline BoundCurve apriori_curve(std::span<const double> times, double w0_l2sq, double u0_l2sq, double nu) {
    BoundCurve out;
    out.kind = BoundKind::Apriori;
    const double b = apriori_bound(w0_l2sq, u0_l2sq, nu);
    out.times.assign(times.begin(), times.end());
    out.log_bound.assign(times.size(), b);
    return out;
}

// ---------------------------------------------------------------------------
// Vanishing-viscosity perturbation size

struct PerturbationBudget {
    double nu = 0.0;
    double C = 0.0;             ///< exponent constant, >= 27/64 ||u0||^4
    double log_delta_max = 0.0; ///< -C / nu^4
    double delta_max() const { return std::exp(log_delta_max); }
};

inline PerturbationBudget perturbation_budget(double u0_l2sq, double nu, std::optional<double> C = std::nullopt) {
    if (!(nu > 0.0)) throw InvalidArgument("perturbation_budget needs nu > 0");
    const double floor = gronwall_constant * u0_l2sq * u0_l2sq;
    const double c = C.value_or(floor);
    if (c < floor)
        throw InvalidArgument("exponent constant " + std::to_string(c) + " is below the floor 27/64 ||u0||^4 = " +
                              std::to_string(floor));
    return {nu, c, -c / (nu * nu * nu * nu)};
}

} // namespace symflow
