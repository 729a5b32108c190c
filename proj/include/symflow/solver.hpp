#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "symflow/error.hpp"
#include "symflow/field.hpp"

namespace symflow {

/// Advective stability number: dt <= cfl_number * dx / max|u|.
inline constexpr double cfl_number = 0.5;
/// Inviscid runs abort once enstrophy exceeds this multiple of its initial value.
inline constexpr double resolution_guard = 1e6;

/// Body force f(t); must return a solenoidal field on the solver grid.
using ForcingFn = std::function<SpectralVelocityField(double)>;

inline ForcingFn steady_forcing(SpectralVelocityField f) {
    return [f = std::move(f)](double) { return f; };
}

struct SolverState {
    double t = 0.0;
    SpectralVelocityField u;
    double nu = 0.0;
    double dt = 1e-3;
    ForcingFn forcing;
};

namespace detail {

struct NonlinearScratch {
    explicit NonlinearScratch(const GridSpec& g)
        : vel{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())},
          acc(g.size()), k(g.n()), kint(g.n()) {
        for (std::size_t i = 0; i < g.n(); ++i) {
            kint[i] = g.wavenumber(i);
            k[i] = two_pi * kint[i];
        }
    }
    std::array<std::vector<double>, 3> vel;
    std::vector<double> acc;
    std::vector<double> k; // 2 pi k per axis index
    std::vector<int> kint;
};

// Writes -P[(u.grad)u] into out and returns max|u| over the grid.
inline double nonlinear_into(const SpectralVelocityField& u, SpectralVelocityField& out, NonlinearScratch& s) {
    const GridSpec& g = u.grid();
    const std::size_t n = g.n();
    const std::size_t nh = n / 2 + 1;
    const std::size_t m = g.size();
    RealFftPlan& plan = thread_real_plan(n);
    auto half = plan.half();
    auto real = plan.real();

    for (int c = 0; c < 3; ++c) {
        auto src = u.component(c);
        for (std::size_t r = 0; r < n * n; ++r)
            std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(r * n), nh,
                        half.begin() + static_cast<std::ptrdiff_t>(r * nh));
        plan.backward();
        std::copy(real.begin(), real.end(), s.vel[c].begin());
    }
    double max_speed_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double q = s.vel[0][i] * s.vel[0][i] + s.vel[1][i] * s.vel[1][i] + s.vel[2][i] * s.vel[2][i];
        max_speed_sq = std::max(max_speed_sq, q);
    }

    const double scale = 1.0 / static_cast<double>(m);
    for (int j = 0; j < 3; ++j) {
        std::fill(s.acc.begin(), s.acc.end(), 0.0);
        auto uj = u.component(j);
        for (int axis = 0; axis < 3; ++axis) {
            for (std::size_t i1 = 0; i1 < n; ++i1)
                for (std::size_t i2 = 0; i2 < n; ++i2)
                    for (std::size_t i3 = 0; i3 < nh; ++i3) {
                        const double kk = axis == 0 ? s.k[i1] : axis == 1 ? s.k[i2] : s.k[i3];
                        const Complex z = uj[(i1 * n + i2) * n + i3];
                        half[(i1 * n + i2) * nh + i3] = Complex(-kk * z.imag(), kk * z.real());
                    }
            plan.backward();
            const auto& va = s.vel[axis];
            for (std::size_t i = 0; i < m; ++i) s.acc[i] += va[i] * real[i];
        }
        std::copy(s.acc.begin(), s.acc.end(), real.begin());
        plan.forward();
        auto dst = out.component(j);
        for (std::size_t i1 = 0; i1 < n; ++i1)
            for (std::size_t i2 = 0; i2 < n; ++i2) {
                const std::size_t row = (i1 * n + i2) * n;
                const std::size_t mrow = (((n - i1) % n) * n + (n - i2) % n) * nh;
                for (std::size_t i3 = 0; i3 < nh; ++i3) dst[row + i3] = half[(i1 * n + i2) * nh + i3] * scale;
                for (std::size_t i3 = nh; i3 < n; ++i3) dst[row + i3] = std::conj(half[mrow + (n - i3)]) * scale;
            }
    }

    const int cutoff = static_cast<int>(n);
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (std::size_t i3 = 0; i3 < n; ++i3) {
                const std::size_t i = (i1 * n + i2) * n + i3;
                const Wavevector k{s.kint[i1], s.kint[i2], s.kint[i3]};
                const int k2 = norm_sq(k);
                // 2/3 mask also removes the Nyquist planes.
                if (k2 == 0 || 3 * std::abs(k[0]) > cutoff || 3 * std::abs(k[1]) > cutoff || 3 * std::abs(k[2]) > cutoff) {
                    for (int c = 0; c < 3; ++c) out.at(c, i) = 0.0;
                    continue;
                }
                const Complex d =
                    (double(k[0]) * out.at(0, i) + double(k[1]) * out.at(1, i) + double(k[2]) * out.at(2, i)) / double(k2);
                for (int c = 0; c < 3; ++c) out.at(c, i) = -(out.at(c, i) - double(k[c]) * d);
            }
    return std::sqrt(max_speed_sq);
}

} // namespace detail

/// -P[(u.grad)u]: gradients formed spectrally, products pointwise on the
/// collocation grid, result dealiased and projected.
inline SpectralVelocityField nonlinear_term(const SpectralVelocityField& u) {
    detail::NonlinearScratch scratch(u.grid());
    SpectralVelocityField out(u.grid());
    detail::nonlinear_into(u, out, scratch);
    return out;
}

/// Weights (left, mid, right) on [0, 1] with nodes 0, 1/2, 1 that integrate
/// 1, s and exp(-z s) exactly. z -> 0 recovers Simpson's rule; the weights stay
/// positive for all z >= 0.
inline std::array<double, 3> fitted_simpson_weights(double z) {
    if (z < 1e-3) return {1.0 / 6, 2.0 / 3, 1.0 / 6};
    const long double zz = z;
    const long double m = std::expm1(-zz);     // e^{-z} - 1
    const long double mh = std::expm1(-zz / 2); // e^{-z/2} - 1
    const long double num = 1.0L + m / 2 + m / zz;
    const long double den = mh * mh / 2;
    const long double mid = num / den;
    const double side = static_cast<double>((1.0L - mid) / 2);
    return {side, static_cast<double>(mid), side};
}

/// Time integrals accumulated over one step.
struct StepIntegrals {
    double dissipation = 0.0; ///< 2 nu int ||grad u||^2
    double work = 0.0;        ///< 2 int <u, f>
    double max_speed = 0.0;   ///< max|u| at the start of the step
};

/// Integrating-factor RK4 (Lawson) for u_t = -P[(u.grad)u] + nu lap u + P f.
///
/// The substitution u(k,t) = exp(-nu |2 pi k|^2 t) w(k,t) removes the viscous
/// term, and classical RK4 is applied to w. Per step, the dissipation integral
/// is a per-mode quadrature of 2 nu |2 pi k|^2 |u(k)|^2 over the step start, a
/// cubic Hermite midpoint and the step end, with weights fitted to the mode's
/// own viscous decay (exact for freely decaying modes). The slope at the step
/// end is kept for the next step, so a step still costs four evaluations.
/// The forcing work uses the RK4 stage weights.
class Stepper {
public:
    Stepper(GridSpec grid, double nu, double dt)
        : grid_(grid), nu_(nu), dt_(dt), half_(grid.size()), full_(grid.size()), inv_half_(grid.size()),
          quad_(grid.size()), scratch_(grid), base_(grid), acc_(grid), stage_(grid), slope_(grid), k1_(grid),
          k1_next_(grid) {
        if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidArgument("viscosity must be finite and >= 0");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be finite and > 0");
        std::map<int, std::array<double, 3>> weights;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const int k2 = norm_sq(grid.wavevector(i));
            const double lambda = nu * two_pi * two_pi * k2;
            half_[i] = std::exp(-lambda * dt / 2);
            full_[i] = std::exp(-lambda * dt);
            inv_half_[i] = std::exp(std::min(lambda * dt / 2, 600.0));
            auto it = weights.find(k2);
            if (it == weights.end()) it = weights.emplace(k2, fitted_simpson_weights(2 * lambda * dt)).first;
            const double scale = 2 * lambda * dt;
            quad_[i] = {scale * it->second[0], scale * it->second[1], scale * it->second[2]};
            if (!grid.dealiased(grid.wavevector(i)) || grid.nyquist(grid.wavevector(i))) quad_[i] = {0.0, 0.0, 0.0};
        }
    }

    double dt() const { return dt_; }
    double nu() const { return nu_; }

    void set_forcing(ForcingFn f) {
        forcing_ = std::move(f);
        force_.reset();
        cached_ = false;
    }

    /// Advances s by one step; throws CflViolation without touching s.
    StepIntegrals advance(SolverState& s) {
        const double h = dt_;
        const double t0 = s.t;
        StepIntegrals out;

        base_ = s.u;
        // The slope at the end of the previous step is reused when s is
        // exactly the state that step produced.
        if (cached_ && std::abs(s.t - cached_t_) <= 1e-9 * h && s.u == acc_) {
            std::swap(k1_, k1_next_);
            out.max_speed = cached_speed_;
        } else {
            out.max_speed = evaluate(base_, t0, k1_);
        }
        cached_ = false;
        const double dt_limit = out.max_speed > 0 ? cfl_number * grid_.spacing() / out.max_speed
                                                  : std::numeric_limits<double>::infinity();
        if (h > dt_limit) throw CflViolation(t0, out.max_speed, dt_limit);
        double work = work_rate(base_);

        combine(acc_, full_, base_, h / 6, &full_, k1_, false);
        combine(stage_, half_, base_, h / 2, nullptr, k1_, true);
        evaluate(stage_, t0 + h / 2, slope_);
        work += 2 * work_rate(stage_);
        accumulate(acc_, h / 3, &half_, slope_);

        combine(stage_, half_, base_, h / 2, nullptr, slope_, false);
        evaluate(stage_, t0 + h / 2, slope_);
        work += 2 * work_rate(stage_);
        accumulate(acc_, h / 3, &half_, slope_);

        combine(stage_, full_, base_, h, &half_, slope_, false);
        evaluate(stage_, t0 + h, slope_);
        work += work_rate(stage_);
        accumulate(acc_, h / 6, nullptr, slope_);

        const double speed_end = evaluate(acc_, t0 + h, k1_next_);
        cached_ = true;
        cached_t_ = t0 + h;
        cached_speed_ = speed_end;

        if (nu_ > 0.0) {
            // Cubic Hermite midpoint in the integrating-factor variables.
            out.dissipation = pairwise_sum(grid_.size(), [&](std::size_t i) {
                if (quad_[i][1] == 0.0) return 0.0;
                double e_start = 0.0, e_mid = 0.0, e_end = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const Complex u0 = base_.at(c, i);
                    const Complex u1 = acc_.at(c, i);
                    const Complex mid = 0.5 * (half_[i] * u0 + inv_half_[i] * u1) +
                                        (h / 8) * (half_[i] * k1_.at(c, i) - inv_half_[i] * k1_next_.at(c, i));
                    e_start += std::norm(u0);
                    e_mid += std::norm(mid);
                    e_end += std::norm(u1);
                }
                return quad_[i][0] * e_start + quad_[i][1] * e_mid + quad_[i][2] * e_end;
            });
        }
        out.work = h / 6 * work;
        s.u = acc_;
        s.t = t0 + h;
        return out;
    }

private:
    using Factors = std::vector<double>;

    // N(u) + P f(t) into out; caches P f(t) for work_rate.
    double evaluate(const SpectralVelocityField& u, double t, SpectralVelocityField& out) {
        const double speed = detail::nonlinear_into(u, out, scratch_);
        if (forcing_) {
            force_ = dealias(leray_project(forcing_(t)));
            out += *force_;
        }
        return speed;
    }

    double work_rate(const SpectralVelocityField& u) const { return force_ ? 2 * inner_product(u, *force_) : 0.0; }

    // dst = a .* x + c * (b .* y), b == nullptr meaning ones;
    // with `inner`, dst = a .* (x + c * y).
    static void combine(SpectralVelocityField& dst, const Factors& a, const SpectralVelocityField& x, double c,
                        const Factors* b, const SpectralVelocityField& y, bool inner) {
        for (int comp = 0; comp < 3; ++comp) {
            auto d = dst.component(comp);
            auto xs = x.component(comp);
            auto ys = y.component(comp);
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (inner)
                    d[i] = a[i] * (xs[i] + c * ys[i]);
                else
                    d[i] = a[i] * xs[i] + c * (b ? (*b)[i] : 1.0) * ys[i];
            }
        }
    }

    static void accumulate(SpectralVelocityField& dst, double c, const Factors* b, const SpectralVelocityField& y) {
        for (int comp = 0; comp < 3; ++comp) {
            auto d = dst.component(comp);
            auto ys = y.component(comp);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += c * (b ? (*b)[i] : 1.0) * ys[i];
        }
    }

    GridSpec grid_;
    double nu_;
    double dt_;
    Factors half_;
    Factors full_;
    Factors inv_half_;
    std::vector<std::array<double, 3>> quad_;
    detail::NonlinearScratch scratch_;
    SpectralVelocityField base_;
    SpectralVelocityField acc_;
    SpectralVelocityField stage_;
    SpectralVelocityField slope_;
    SpectralVelocityField k1_;
    SpectralVelocityField k1_next_;
    ForcingFn forcing_;
    std::optional<SpectralVelocityField> force_;
    bool cached_ = false;
    double cached_t_ = 0.0;
    double cached_speed_ = 0.0;
};

/// One integrating-factor RK4 step of `state`.
inline SolverState step(SolverState state) {
    Stepper stepper(state.u.grid(), state.nu, state.dt);
    stepper.set_forcing(state.forcing);
    stepper.advance(state);
    return state;
}

/// One row of the diagnostics CSV.
struct DiagnosticsSample {
    double t = 0.0;
    double energy = 0.0;
    double enstrophy = 0.0;
    double l4_fourth = 0.0;
    double dissipation_integral = 0.0;
    double work_integral = 0.0;
    double energy_slack = 0.0;
};

struct SimulationConfig {
    double nu = 0.0;
    double dt = 1e-3;
    double t_end = 1.0;
    double sample_every = 0.01;
    ForcingFn forcing;
};

namespace detail {
inline std::size_t whole_steps(double span, double dt, const char* what) {
    const double r = span / dt;
    const double k = std::round(r);
    if (!(k >= 1.0) || std::abs(r - k) > 1e-9 * std::max(1.0, r))
        throw InvalidArgument(std::string(what) + " must be a positive whole multiple of dt");
    return static_cast<std::size_t>(k);
}
} // namespace detail

/// A solver trajectory advanced sample by sample.
///
/// Diagnostics are recorded at t = 0, at every multiple of sample_every, and
/// at t_end. The initial field is truncated to the dealiased band.
class Trajectory {
public:
    Trajectory(SimulationConfig cfg, SpectralVelocityField u0)
        : cfg_(std::move(cfg)), stepper_(u0.grid(), cfg_.nu, cfg_.dt),
          state_{0.0, dealias(std::move(u0)), cfg_.nu, cfg_.dt, cfg_.forcing} {
        const FieldCheck check = check_invariants(state_.u);
        if (!check.ok())
            throw InvalidArgument("initial field violates invariants (hermitian " +
                                  std::to_string(check.hermitian_residue) + ", divergence " +
                                  std::to_string(check.divergence_residual) + ", mean " +
                                  std::to_string(check.mean_mode) + ")");
        if (!(cfg_.t_end > 0.0) || !(cfg_.sample_every > 0.0))
            throw InvalidArgument("horizon and sampling cadence must be positive");
        steps_per_sample_ = detail::whole_steps(cfg_.sample_every, cfg_.dt, "sample_every");
        total_steps_ = detail::whole_steps(cfg_.t_end, cfg_.dt, "t_end");
        stepper_.set_forcing(cfg_.forcing);
        initial_energy_ = energy(state_.u);
        initial_enstrophy_ = enstrophy(state_.u);
        record();
    }

    const SolverState& state() const { return state_; }
    const SimulationConfig& config() const { return cfg_; }
    const std::vector<DiagnosticsSample>& samples() const { return samples_; }
    const DiagnosticsSample& latest() const { return samples_.back(); }
    double initial_energy() const { return initial_energy_; }
    bool done() const { return steps_ >= total_steps_; }

    /// Steps to the next sample time and records it.
    const DiagnosticsSample& advance() {
        const std::size_t target = std::min(total_steps_, (steps_ / steps_per_sample_ + 1) * steps_per_sample_);
        while (steps_ < target) {
            const StepIntegrals inc = stepper_.advance(state_);
            ++steps_;
            state_.t = static_cast<double>(steps_) * cfg_.dt;
            dissipation_ += inc.dissipation;
            work_ += inc.work;
            const double e = energy(state_.u);
            if (!std::isfinite(e)) throw BlowUp(state_.t);
            if (cfg_.nu == 0.0 && initial_enstrophy_ > 0.0) {
                const double growth = enstrophy(state_.u) / initial_enstrophy_;
                if (growth > resolution_guard) throw ResolutionLoss(state_.t, growth);
            }
        }
        record();
        return latest();
    }

private:
    void record() {
        const Norms nm = norms(state_.u);
        DiagnosticsSample s;
        s.t = state_.t;
        s.energy = nm.l2_sq;
        s.enstrophy = nm.h1_sq;
        s.l4_fourth = nm.l4_fourth;
        s.dissipation_integral = dissipation_;
        s.work_integral = work_;
        s.energy_slack = initial_energy_ + work_ - nm.l2_sq - dissipation_;
        samples_.push_back(s);
    }

    SimulationConfig cfg_;
    Stepper stepper_;
    SolverState state_;
    std::size_t steps_per_sample_ = 1;
    std::size_t total_steps_ = 0;
    std::size_t steps_ = 0;
    double dissipation_ = 0.0;
    double work_ = 0.0;
    double initial_energy_ = 0.0;
    double initial_enstrophy_ = 0.0;
    std::vector<DiagnosticsSample> samples_;
};

struct SimulationResult {
    std::vector<DiagnosticsSample> samples;
    SolverState final_state;
};

/// Runs u0 to cfg.t_end. `on_sample` sees every sample as soon as it exists,
/// so a caller streaming to disk keeps everything recorded before an error.
inline SimulationResult simulate(const SimulationConfig& cfg, SpectralVelocityField u0,
                                 const std::function<void(const DiagnosticsSample&)>& on_sample = {}) {
    Trajectory traj(cfg, std::move(u0));
    if (on_sample) on_sample(traj.latest());
    while (!traj.done()) {
        traj.advance();
        if (on_sample) on_sample(traj.latest());
    }
    return {traj.samples(), traj.state()};
}

/// min over samples of E(0) + work - E(t) - dissipation; negative values
/// mean the energy inequality failed.
inline double energy_budget_check(const std::vector<DiagnosticsSample>& samples) {
    if (samples.empty()) throw InvalidArgument("energy_budget_check needs at least one sample");
    const double e0 = samples.front().energy;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        worst = std::min(worst, e0 + s.work_integral - s.energy - s.dissipation_integral);
    return worst;
}

// CSV

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* diagnostics_header = "t,energy,enstrophy,l4_fourth,dissipation_integral,work_integral,energy_slack";

inline void write_diagnostics_row(std::ostream& os, const DiagnosticsSample& s) {
    os << format_double(s.t) << ',' << format_double(s.energy) << ',' << format_double(s.enstrophy) << ','
       << format_double(s.l4_fourth) << ',' << format_double(s.dissipation_integral) << ','
       << format_double(s.work_integral) << ',' << format_double(s.energy_slack) << '\n';
}

} // namespace symflow
