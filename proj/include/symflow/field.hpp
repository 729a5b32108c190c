#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "symflow/fft.hpp"
#include "symflow/grid.hpp"
#include "symflow/reduce.hpp"

namespace symflow {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Divergence tolerance relative to the field's L2 norm.
inline constexpr double tol_div = 1e-12;

/// Spectral coefficients of one scalar on the full n^3 lattice.
class ScalarField {
public:
    explicit ScalarField(GridSpec grid) : grid_(grid), coeffs_(grid.size()) {}

    const GridSpec& grid() const { return grid_; }
    std::span<Complex> coeffs() { return coeffs_; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    Complex& operator[](std::size_t i) { return coeffs_[i]; }
    const Complex& operator[](std::size_t i) const { return coeffs_[i]; }

private:
    GridSpec grid_;
    std::vector<Complex> coeffs_;
};

/// Fourier coefficients u_j(k), j = 0,1,2, of a real velocity field on the box.
///
/// Normalization: u(x) = sum_k u(k) exp(2 pi i k.x), so the coefficient sums
/// equal L2(Q^3) integrals directly. Storage is FFT order (see GridSpec).
class SpectralVelocityField {
public:
    explicit SpectralVelocityField(GridSpec grid)
        : grid_(grid), comp_{std::vector<Complex>(grid.size()), std::vector<Complex>(grid.size()),
                             std::vector<Complex>(grid.size())} {}

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }

    std::span<Complex> component(int c) { return comp_[static_cast<std::size_t>(c)]; }
    std::span<const Complex> component(int c) const { return comp_[static_cast<std::size_t>(c)]; }

    Complex& at(int c, std::size_t idx) { return comp_[static_cast<std::size_t>(c)][idx]; }
    const Complex& at(int c, std::size_t idx) const { return comp_[static_cast<std::size_t>(c)][idx]; }
    Complex& at(int c, const Wavevector& k) { return at(c, grid_.flat(k)); }
    const Complex& at(int c, const Wavevector& k) const { return at(c, grid_.flat(k)); }

    SpectralVelocityField& operator+=(const SpectralVelocityField& o) {
        for (int c = 0; c < 3; ++c) {
            auto& d = comp_[c];
            const auto& s = o.comp_[c];
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
        }
        return *this;
    }
    SpectralVelocityField& operator-=(const SpectralVelocityField& o) {
        for (int c = 0; c < 3; ++c) {
            auto& d = comp_[c];
            const auto& s = o.comp_[c];
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s[i];
        }
        return *this;
    }
    SpectralVelocityField& operator*=(double s) {
        for (auto& d : comp_)
            for (auto& z : d) z *= s;
        return *this;
    }
    friend SpectralVelocityField operator+(SpectralVelocityField a, const SpectralVelocityField& b) { return a += b; }
    friend SpectralVelocityField operator-(SpectralVelocityField a, const SpectralVelocityField& b) { return a -= b; }
    friend SpectralVelocityField operator*(double s, SpectralVelocityField a) { return a *= s; }

    friend bool operator==(const SpectralVelocityField&, const SpectralVelocityField&) = default;

private:
    GridSpec grid_;
    std::array<std::vector<Complex>, 3> comp_;
};

/// Real velocity samples at the collocation points x = (i1, i2, i3) / n.
struct PhysicalVectorField {
    explicit PhysicalVectorField(GridSpec g)
        : grid(g), values{std::vector<double>(g.size()), std::vector<double>(g.size()), std::vector<double>(g.size())} {}

    GridSpec grid;
    std::array<std::vector<double>, 3> values;
};

/// Sample f(x1, x2, x3) -> {u1, u2, u3} on the collocation grid.
template <class F>
PhysicalVectorField sample_physical(GridSpec grid, F&& f) {
    PhysicalVectorField out(grid);
    const std::size_t n = grid.n();
    const double h = grid.spacing();
    for (std::size_t i1 = 0; i1 < n; ++i1)
        for (std::size_t i2 = 0; i2 < n; ++i2)
            for (std::size_t i3 = 0; i3 < n; ++i3) {
                const std::array<double, 3> v = f(h * i1, h * i2, h * i3);
                const std::size_t idx = grid.flat(i1, i2, i3);
                for (int c = 0; c < 3; ++c) out.values[c][idx] = v[c];
            }
    return out;
}

namespace detail {

inline std::string index_name(const GridSpec& g, std::size_t idx) {
    const std::size_t n = g.n();
    return "(" + std::to_string(idx / (n * n)) + "," + std::to_string((idx / n) % n) + "," + std::to_string(idx % n) + ")";
}

inline void forward_scalar(const GridSpec& g, std::span<const double> in, std::span<Complex> out, int comp) {
    if (in.size() != g.size())
        throw InvalidArgument("physical array has " + std::to_string(in.size()) + " samples, grid expects " +
                              std::to_string(g.size()));
    for (std::size_t i = 0; i < in.size(); ++i)
        if (!std::isfinite(in[i]))
            throw InvalidArgument("non-finite sample in component " + std::to_string(comp) + " at grid index " +
                                  index_name(g, i));
    FftPlan& plan = thread_plan(g.n(), 3);
    auto buf = plan.buffer();
    for (std::size_t i = 0; i < in.size(); ++i) buf[i] = Complex(in[i], 0.0);
    plan.forward();
    const double scale = 1.0 / static_cast<double>(g.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = buf[i] * scale;
}

// Returns the largest |imaginary part| encountered.
inline double backward_scalar(const GridSpec& g, std::span<const Complex> in, std::span<double> out) {
    FftPlan& plan = thread_plan(g.n(), 3);
    auto buf = plan.buffer();
    std::copy(in.begin(), in.end(), buf.begin());
    plan.backward();
    double max_imag = 0.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = buf[i].real();
        max_imag = std::max(max_imag, std::abs(buf[i].imag()));
    }
    return max_imag;
}

} // namespace detail

inline SpectralVelocityField forward_transform(const PhysicalVectorField& physical) {
    SpectralVelocityField out(physical.grid);
    for (int c = 0; c < 3; ++c) detail::forward_scalar(physical.grid, physical.values[c], out.component(c), c);
    return out;
}

inline ScalarField forward_transform(const GridSpec& grid, std::span<const double> samples) {
    ScalarField out(grid);
    detail::forward_scalar(grid, samples, out.coeffs(), 0);
    return out;
}

inline PhysicalVectorField inverse_transform(const SpectralVelocityField& u) {
    PhysicalVectorField out(u.grid());
    for (int c = 0; c < 3; ++c) detail::backward_scalar(u.grid(), u.component(c), out.values[c]);
    return out;
}

inline std::vector<double> inverse_transform(const ScalarField& f) {
    std::vector<double> out(f.grid().size());
    detail::backward_scalar(f.grid(), f.coeffs(), out);
    return out;
}

/// Largest |Im u(x)| after inverse transform; zero for exactly Hermitian data.
inline double imaginary_residue(const SpectralVelocityField& u) {
    std::vector<double> scratch(u.size());
    double r = 0.0;
    for (int c = 0; c < 3; ++c) r = std::max(r, detail::backward_scalar(u.grid(), u.component(c), scratch));
    return r;
}

/// Largest |u(-k) - conj(u(k))| over the lattice.
inline double hermitian_residue(const SpectralVelocityField& u) {
    const GridSpec& g = u.grid();
    double r = 0.0;
    for (int c = 0; c < 3; ++c) {
        auto a = u.component(c);
        for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[g.mirror(i)] - std::conj(a[i])));
    }
    return r;
}

/// Largest |k.u(k)| with integer k.
inline double divergence_residual(const SpectralVelocityField& u) {
    const GridSpec& g = u.grid();
    double r = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector k = g.wavevector(i);
        const Complex d = double(k[0]) * u.at(0, i) + double(k[1]) * u.at(1, i) + double(k[2]) * u.at(2, i);
        r = std::max(r, std::abs(d));
    }
    return r;
}

/// ||u||^2_{L2} = sum_k |u(k)|^2.
inline double energy(const SpectralVelocityField& u) {
    const std::size_t m = u.size();
    return pairwise_sum(3 * m, [&](std::size_t i) { return std::norm(u.at(static_cast<int>(i / m), i % m)); });
}

/// ||grad u||^2_{L2} = sum_k |2 pi k|^2 |u(k)|^2.
inline double enstrophy(const SpectralVelocityField& u) {
    const GridSpec& g = u.grid();
    const std::size_t m = u.size();
    const double s = pairwise_sum(3 * m, [&](std::size_t i) {
        const std::size_t idx = i % m;
        return norm_sq(g.wavevector(idx)) * std::norm(u.at(static_cast<int>(i / m), idx));
    });
    return two_pi * two_pi * s;
}

/// L2 inner product <u, v> = sum_k Re(conj(u(k)) v(k)).
inline double inner_product(const SpectralVelocityField& u, const SpectralVelocityField& v) {
    const std::size_t m = u.size();
    return pairwise_sum(3 * m, [&](std::size_t i) {
        const int c = static_cast<int>(i / m);
        return (std::conj(u.at(c, i % m)) * v.at(c, i % m)).real();
    });
}

inline double difference_energy(const SpectralVelocityField& u, const SpectralVelocityField& v) {
    const std::size_t m = u.size();
    return pairwise_sum(3 * m, [&](std::size_t i) {
        const int c = static_cast<int>(i / m);
        return std::norm(u.at(c, i % m) - v.at(c, i % m));
    });
}

/// (1/n^3) sum_x |u(x)|^4 on the collocation grid.
inline double l4_fourth(const PhysicalVectorField& p) {
    const auto& v = p.values;
    const double s = pairwise_sum(p.grid.size(), [&](std::size_t i) {
        const double q = v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i];
        return q * q;
    });
    return s / static_cast<double>(p.grid.size());
}

struct Norms {
    double l2_sq = 0.0;
    double h1_sq = 0.0;
    double l4_fourth = 0.0;
};

inline Norms norms(const SpectralVelocityField& u) {
    return {energy(u), enstrophy(u), l4_fourth(inverse_transform(u))};
}

/// Leray projection u(k) <- u(k) - k (k.u(k)) / |k|^2.
///
/// The mean mode and the Nyquist planes (where -k aliases to k and the
/// projector is not well defined) are set to zero.
inline SpectralVelocityField leray_project(SpectralVelocityField u) {
    const GridSpec& g = u.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector k = g.wavevector(i);
        const int k2 = norm_sq(k);
        if (k2 == 0 || g.nyquist(k)) {
            for (int c = 0; c < 3; ++c) u.at(c, i) = 0.0;
            continue;
        }
        const Complex d = (double(k[0]) * u.at(0, i) + double(k[1]) * u.at(1, i) + double(k[2]) * u.at(2, i)) / double(k2);
        for (int c = 0; c < 3; ++c) u.at(c, i) -= double(k[c]) * d;
    }
    return u;
}

/// Zero every coefficient outside the 2/3-rule mask.
inline SpectralVelocityField dealias(SpectralVelocityField u) {
    const GridSpec& g = u.grid();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.dealiased(g.wavevector(i)))
            for (int c = 0; c < 3; ++c) u.at(c, i) = 0.0;
    return u;
}

/// Result of re-validating the SpectralVelocityField invariants.
struct FieldCheck {
    bool finite = true;
    double hermitian_residue = 0.0;
    double divergence_residual = 0.0;
    double mean_mode = 0.0;
    double l2 = 0.0;

    bool hermitian_ok(double tol = 1e-12) const { return hermitian_residue <= tol * std::max(l2, 1e-300); }
    bool solenoidal_ok(double tol = tol_div) const { return divergence_residual <= tol * std::max(l2, 1e-300); }
    bool mean_ok(double tol = 1e-12) const { return mean_mode <= tol * std::max(l2, 1e-300); }
    bool ok() const {
        if (l2 == 0.0) return finite;
        return finite && hermitian_ok() && solenoidal_ok() && mean_ok();
    }
};

inline FieldCheck check_invariants(const SpectralVelocityField& u) {
    FieldCheck r;
    for (int c = 0; c < 3; ++c)
        for (const Complex& z : u.component(c))
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) r.finite = false;
    if (!r.finite) return r;
    r.l2 = std::sqrt(energy(u));
    r.hermitian_residue = hermitian_residue(u);
    r.divergence_residual = divergence_residual(u);
    for (int c = 0; c < 3; ++c) r.mean_mode = std::max(r.mean_mode, std::abs(u.at(c, std::size_t{0})));
    return r;
}

} // namespace symflow
