#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "symflow/error.hpp"
#include "symflow/field.hpp"

namespace symflow {

/// The two symmetry classes the toolkit tracks.
///
/// VerticalTranslation: invariance under x3 -> x3 + a for all a; at the
/// discrete level, every k3 != 0 coefficient vanishes.
///
/// DiscreteHelical: the cyclic group of order 4 generated by
///   (g u)(x) = R^T u(R x + e3 / 4),   R = [[0, 1, 0], [-1, 0, 0], [0, 0, 1]],
/// i.e. a quarter turn about the x3-axis through the origin combined with a
/// vertical shift of a quarter period (helical step 1).
enum class SymmetryKind { VerticalTranslation, DiscreteHelical };

inline const char* to_string(SymmetryKind k) {
    return k == SymmetryKind::VerticalTranslation ? "vertical_translation" : "discrete_helical";
}

/// u(x) -> u(x1, x2, x3 - a): coefficient k picks up exp(-2 pi i k3 a).
inline SpectralVelocityField translate_z(SpectralVelocityField u, double a) {
    const GridSpec& g = u.grid();
    const std::size_t n = g.n();
    std::vector<Complex> phase(n);
    for (std::size_t i3 = 0; i3 < n; ++i3) phase[i3] = std::polar(1.0, -two_pi * g.wavenumber(i3) * a);
    for (int c = 0; c < 3; ++c) {
        auto d = u.component(c);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] *= phase[i % n];
    }
    return u;
}

/// Orthogonal projection onto x3-independent fields (keeps k3 = 0 only).
inline SpectralVelocityField symmetrize_z(SpectralVelocityField u) {
    const std::size_t n = u.grid().n();
    for (int c = 0; c < 3; ++c) {
        auto d = u.component(c);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (i % n != 0) d[i] = 0.0;
    }
    return u;
}

/// Energy in the k3 != 0 modes, i.e. ||u - symmetrize_z(u)||^2.
inline double ei_x3_deviation(const SpectralVelocityField& u) {
    const std::size_t m = u.size();
    const std::size_t n = u.grid().n();
    return pairwise_sum(3 * m, [&](std::size_t i) {
        const std::size_t idx = i % m;
        return idx % n == 0 ? 0.0 : std::norm(u.at(static_cast<int>(i / m), idx));
    });
}

namespace detail {
inline void require_quarter_lattice(const GridSpec& g) {
    if (g.n() % 4 != 0)
        throw InvalidArgument("helical action needs n divisible by 4, got n=" + std::to_string(g.n()));
}
} // namespace detail

/// One application of the helical generator.
///
/// In Fourier space, (g u)^(k) = R^T u^(R k) i^{k3} with R k = (k2, -k1, k3):
/// an index permutation, a sign, and a quarter-turn phase, all exact.
inline SpectralVelocityField helical_apply(const SpectralVelocityField& u) {
    const GridSpec& g = u.grid();
    detail::require_quarter_lattice(g);
    static const Complex quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    SpectralVelocityField out(g);
    const std::size_t n = g.n();
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (std::size_t i3 = 0; i3 < n; ++i3) {
                const int k1 = g.wavenumber(i1);
                const int k2 = g.wavenumber(i2);
                const int k3 = g.wavenumber(i3);
                const std::size_t src = g.flat(g.index_of(k2), g.index_of(-k1), i3);
                const std::size_t dst = g.flat(i1, i2, i3);
                const Complex ph = quarter[((k3 % 4) + 4) % 4];
                out.at(0, dst) = -u.at(1, src) * ph;
                out.at(1, dst) = u.at(0, src) * ph;
                out.at(2, dst) = u.at(2, src) * ph;
            }
    return out;
}

/// Average of the four group iterates: the orthogonal projection onto
/// helically invariant fields.
inline SpectralVelocityField helical_symmetrize(const SpectralVelocityField& u) {
    SpectralVelocityField sum = u;
    SpectralVelocityField it = u;
    for (int r = 1; r < 4; ++r) {
        it = helical_apply(it);
        sum += it;
    }
    sum *= 0.25;
    return sum;
}

inline double helical_deviation(const SpectralVelocityField& u) { return difference_energy(u, helical_symmetrize(u)); }

inline double deviation(const SpectralVelocityField& u, SymmetryKind kind) {
    return kind == SymmetryKind::VerticalTranslation ? ei_x3_deviation(u) : helical_deviation(u);
}

inline SpectralVelocityField symmetrize(const SpectralVelocityField& u, SymmetryKind kind) {
    return kind == SymmetryKind::VerticalTranslation ? symmetrize_z(u) : helical_symmetrize(u);
}

/// A field on the two-dimensional torus: `components` complex coefficient
/// arrays over the n x n lattice in FFT order (flat index i1 * n + i2).
class PlaneField {
public:
    PlaneField(GridSpec grid, int components)
        : grid_(grid), comp_(static_cast<std::size_t>(components), std::vector<Complex>(grid.n() * grid.n())) {
        if (components < 1 || components > 3) throw InvalidArgument("plane field needs 1 to 3 components");
    }

    const GridSpec& grid() const { return grid_; }
    int components() const { return static_cast<int>(comp_.size()); }
    std::size_t size() const { return grid_.n() * grid_.n(); }
    std::size_t flat(int k1, int k2) const { return grid_.index_of(k1) * grid_.n() + grid_.index_of(k2); }
    std::span<Complex> component(int c) { return comp_[static_cast<std::size_t>(c)]; }
    std::span<const Complex> component(int c) const { return comp_[static_cast<std::size_t>(c)]; }
    Complex& at(int c, int k1, int k2) { return comp_[static_cast<std::size_t>(c)][flat(k1, k2)]; }
    const Complex& at(int c, int k1, int k2) const { return comp_[static_cast<std::size_t>(c)][flat(k1, k2)]; }

private:
    GridSpec grid_;
    std::vector<std::vector<Complex>> comp_;
};

/// Samples f(x1, x2) -> array of `components` values and transforms with 1/n^2.
template <class F>
PlaneField plane_from_samples(GridSpec grid, int components, F&& f) {
    PlaneField out(grid, components);
    const std::size_t n = grid.n();
    FftPlan& plan = thread_plan(n, 2);
    for (int c = 0; c < components; ++c) {
        auto buf = plan.buffer();
        for (std::size_t i1 = 0; i1 < n; ++i1)
            for (std::size_t i2 = 0; i2 < n; ++i2) {
                const auto v = f(grid.spacing() * i1, grid.spacing() * i2);
                buf[i1 * n + i2] = Complex(v[static_cast<std::size_t>(c)], 0.0);
            }
        plan.forward();
        auto d = out.component(c);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = buf[i] / static_cast<double>(n * n);
    }
    return out;
}

/// Embeds a two-dimensional, three-component field as the k3 = 0 plane of a
/// field on the box (a 2.5D flow).
inline SpectralVelocityField make_2p5d(const PlaneField& plane) {
    if (plane.components() != 3) throw InvalidArgument("2.5D embedding needs three components");
    const GridSpec& g = plane.grid();
    const std::size_t n = g.n();
    double resid = 0.0;
    double norm = 0.0;
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2) {
            const std::size_t p = i1 * n + i2;
            const Complex d = double(g.wavenumber(i1)) * plane.component(0)[p] + double(g.wavenumber(i2)) * plane.component(1)[p];
            resid = std::max(resid, std::abs(d));
            for (int c = 0; c < 3; ++c) norm += std::norm(plane.component(c)[p]);
        }
    if (resid > tol_div * std::sqrt(norm))
        throw InvalidArgument("2D field is not solenoidal in (x1, x2): max |k1 u1 + k2 u2| = " + std::to_string(resid));
    SpectralVelocityField u(g);
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (int c = 0; c < 3; ++c) u.at(c, g.flat(i1, i2, 0)) = plane.component(c)[i1 * n + i2];
    return u;
}

/// Energy-density offset t / (t^2 + 1) * (1 + sin^2(2 pi x3)) used to
/// prescribe the energy profile of non-unique inviscid solutions.
inline double wild_energy_profile(double t, double x3) {
    if (!(t >= 0.0)) throw InvalidArgument("wild_energy_profile needs t >= 0");
    const double s = std::sin(two_pi * x3);
    return t / (t * t + 1.0) * (1.0 + s * s);
}

} // namespace symflow
