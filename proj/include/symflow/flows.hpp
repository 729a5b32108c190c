#pragma once

#include <cstdint>
#include <string>

#include "symflow/checkpoint.hpp"
#include "symflow/config.hpp"
#include "symflow/random.hpp"
#include "symflow/solver.hpp"
#include "symflow/symmetry.hpp"

namespace symflow {

/// Independent stream of a seed (splitmix64 finalizer), so base flow and
/// perturbation drawn from one config seed do not share variates.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// u = (-cos 2 pi x1 sin 2 pi x2, sin 2 pi x1 cos 2 pi x2, 0), built from its
/// exact Fourier coefficients.
inline SpectralVelocityField taylor_green(GridSpec g, double amplitude = 1.0) {
    SpectralVelocityField u(g);
    for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) {
            u.at(0, Wavevector{s1, s2, 0}) = Complex(0.0, amplitude * s2 / 4.0);
            u.at(1, Wavevector{s1, s2, 0}) = Complex(0.0, -amplitude * s1 / 4.0);
        }
    return u;
}

/// u = (a sin 2 pi x3, 0, 0): a steady shear with vanishing advection.
inline SpectralVelocityField shear_x3_flow(GridSpec g, double amplitude = 1.0) {
    SpectralVelocityField u(g);
    u.at(0, Wavevector{0, 0, 1}) = Complex(0.0, -amplitude / 2);
    u.at(0, Wavevector{0, 0, -1}) = Complex(0.0, amplitude / 2);
    return u;
}

namespace detail {

// Hermitian, solenoidal random field on 0 < |k| <= band (and k3 == 0 when
// planar), normalized to the given energy.
inline SpectralVelocityField random_solenoidal(GridSpec g, double energy_target, std::uint64_t seed, double band,
                                               bool planar) {
    if (!(band >= 1.0)) throw InvalidArgument("perturbation band is empty (need band >= 1)");
    if (3.0 * band > static_cast<double>(g.n())) throw InvalidArgument("perturbation band exceeds the dealiased range n/3");
    SpectralVelocityField raw(g);
    Rng rng(seed);
    const double band_sq = band * band;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector k = g.wavevector(i);
        const int k2 = norm_sq(k);
        if (k2 == 0 || k2 > band_sq || (planar && k[2] != 0)) continue;
        for (int c = 0; c < 3; ++c) raw.at(c, i) = rng.complex_normal();
    }
    SpectralVelocityField u(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t j = g.mirror(i);
        for (int c = 0; c < 3; ++c) u.at(c, i) = 0.5 * (raw.at(c, i) + std::conj(raw.at(c, j)));
    }
    if (planar) {
        // In-plane part solenoidal in (x1, x2); the third component is free.
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Wavevector k = g.wavevector(i);
            const int k2 = k[0] * k[0] + k[1] * k[1];
            if (k2 == 0) continue;
            const Complex d = (double(k[0]) * u.at(0, i) + double(k[1]) * u.at(1, i)) / double(k2);
            u.at(0, i) -= double(k[0]) * d;
            u.at(1, i) -= double(k[1]) * d;
        }
    }
    u = leray_project(std::move(u));
    const double e = energy(u);
    if (e == 0.0) throw InvalidArgument("random field has no energy in the requested band");
    u *= std::sqrt(energy_target / e);
    return u;
}

} // namespace detail

/// Random perturbation with ||.||_{L2} = delta on the band 0 < |k| <= band.
/// Deterministic in seed; genuinely three-dimensional (k3 != 0 modes included).
inline SpectralVelocityField generate_perturbation(GridSpec g, double delta, std::uint64_t seed, double band) {
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be >= 0");
    SpectralVelocityField u = detail::random_solenoidal(g, 1.0, seed, band, false);
    if (delta == 0.0) return SpectralVelocityField(g);
    u *= delta;
    return u;
}

/// Random 2.5D flow (three components, no x3 dependence) of the given energy.
inline SpectralVelocityField random_2p5d(GridSpec g, double energy_target, std::uint64_t seed, double band) {
    return detail::random_solenoidal(g, energy_target, seed, band, true);
}

/// Random field projected onto the helically invariant subspace.
inline SpectralVelocityField random_helical(GridSpec g, double energy_target, std::uint64_t seed, double band) {
    SpectralVelocityField u = helical_symmetrize(detail::random_solenoidal(g, 1.0, seed, band, false));
    const double e = energy(u);
    if (e == 0.0) throw InvalidArgument("helical projection of the random field vanished");
    u *= std::sqrt(energy_target / e);
    return u;
}

inline SpectralVelocityField forcing_field(GridSpec g, ForcingKind kind, double amplitude) {
    SpectralVelocityField f(g);
    const Complex plus(0.0, -amplitude / 2); // coefficient of sin at k = +1
    const Complex minus(0.0, amplitude / 2);
    switch (kind) {
    case ForcingKind::Off: break;
    case ForcingKind::ShearX2:
        f.at(0, Wavevector{0, 1, 0}) = plus;
        f.at(0, Wavevector{0, -1, 0}) = minus;
        break;
    case ForcingKind::Cellular:
        f.at(0, Wavevector{0, 1, 0}) = plus;
        f.at(0, Wavevector{0, -1, 0}) = minus;
        f.at(1, Wavevector{1, 0, 0}) = -plus;
        f.at(1, Wavevector{-1, 0, 0}) = -minus;
        break;
    case ForcingKind::ShearX3:
        f.at(0, Wavevector{0, 0, 1}) = plus;
        f.at(0, Wavevector{0, 0, -1}) = minus;
        break;
    }
    return f;
}

inline ForcingFn make_forcing(const ExperimentConfig& cfg) {
    if (cfg.forcing == ForcingKind::Off) return {};
    return steady_forcing(forcing_field(GridSpec(cfg.n), cfg.forcing, cfg.forcing_amplitude));
}

inline SpectralVelocityField make_base_flow(const ExperimentConfig& cfg) {
    const GridSpec g(cfg.n);
    const std::string& b = cfg.base_flow;
    const std::uint64_t seed = derive_seed(cfg.seed, 0);
    if (b == "taylor_green") return taylor_green(g);
    if (b == "zero") return SpectralVelocityField(g);
    if (b == "shear_x3") return shear_x3_flow(g);
    if (b == "random_2p5d") return random_2p5d(g, cfg.base_energy, seed, cfg.perturbation_band());
    if (b == "random_helical") {
        if (cfg.n % 4 != 0) throw ConfigError("random_helical needs n divisible by 4");
        return random_helical(g, cfg.base_energy, seed, cfg.perturbation_band());
    }
    if (b.rfind("file:", 0) == 0) {
        SpectralVelocityField u = read_checkpoint(b.substr(5));
        if (u.grid().n() != cfg.n)
            throw ConfigError("checkpoint grid n=" + std::to_string(u.grid().n()) + " differs from config n=" +
                              std::to_string(cfg.n));
        return u;
    }
    throw ConfigError("unknown base_flow '" + b + "'");
}

} // namespace symflow
