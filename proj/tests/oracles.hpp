// Independent reference computations used by the tests. Nothing here calls
// the library's transforms: coefficients are direct sums over the grid.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double tau = 2.0 * std::numbers::pi;

using VecFn = std::function<std::array<double, 3>(double, double, double)>;

/// (1/n^3) sum_x f_c(x) exp(-2 pi i k.x), summed naively.
inline cd dft_coefficient(const VecFn& f, int n, int c, int k1, int k2, int k3) {
    cd s = 0.0;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) {
                const double x1 = double(i1) / n, x2 = double(i2) / n, x3 = double(i3) / n;
                const double ph = -tau * (k1 * x1 + k2 * x2 + k3 * x3);
                s += f(x1, x2, x3)[c] * cd(std::cos(ph), std::sin(ph));
            }
    return s / double(n * n * n);
}

/// Mean of g over the n^3 collocation points (exact for trigonometric
/// polynomials of degree < n).
inline double grid_mean(int n, const std::function<double(double, double, double)>& g) {
    long double s = 0.0L;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
            for (int i3 = 0; i3 < n; ++i3) s += g(double(i1) / n, double(i2) / n, double(i3) / n);
    return static_cast<double>(s / (n * n * n));
}

inline double grid_mean_2d(int n, const std::function<double(double, double)>& g) {
    long double s = 0.0L;
    for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) s += g(double(i1) / n, double(i2) / n);
    return static_cast<double>(s / (n * n));
}

/// A trigonometric polynomial with |k_i| <= h, evaluated (with its gradient)
/// by direct summation over modes. coef is indexed by
/// ((k1+h)*m + (k2+h))*m + (k3+h) with m = 2h+1.
struct Trig {
    int h = 0;
    std::vector<std::array<cd, 3>> coef;
    int m() const { return 2 * h + 1; }
    std::size_t idx(int k1, int k2, int k3) const {
        return (std::size_t(k1 + h) * m() + std::size_t(k2 + h)) * m() + std::size_t(k3 + h);
    }
    /// Value and gradient of component c at x: returns {u_c, d1 u_c, d2 u_c, d3 u_c}.
    std::array<double, 4> eval(int c, double x1, double x2, double x3) const {
        std::array<cd, 4> r{};
        for (int k1 = -h; k1 <= h; ++k1)
            for (int k2 = -h; k2 <= h; ++k2)
                for (int k3 = -h; k3 <= h; ++k3) {
                    const cd a = coef[idx(k1, k2, k3)][c];
                    if (a == 0.0) continue;
                    const double ph = tau * (k1 * x1 + k2 * x2 + k3 * x3);
                    const cd e = a * cd(std::cos(ph), std::sin(ph));
                    r[0] += e;
                    r[1] += cd(0, tau * k1) * e;
                    r[2] += cd(0, tau * k2) * e;
                    r[3] += cd(0, tau * k3) * e;
                }
        return {r[0].real(), r[1].real(), r[2].real(), r[3].real()};
    }
};

/// All coefficients of real samples f[(i1*n + i2)*n + i3], by naive
/// separable sums (one axis at a time). Output uses the same index layout,
/// index i standing for wavenumber i (i <= n/2) or i - n.
inline std::vector<cd> dft_all(const std::vector<double>& f, int n) {
    std::vector<cd> a(f.begin(), f.end()), b(a.size());
    std::vector<cd> w(n);
    for (int j = 0; j < n; ++j) w[j] = std::polar(1.0, -tau * j / n);
    const std::size_t N = n;
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t stride = axis == 0 ? N * N : axis == 1 ? N : 1;
        for (std::size_t idx = 0; idx < a.size(); ++idx) {
            const std::size_t k = (idx / stride) % N;
            const std::size_t base = idx - k * stride;
            cd s = 0.0;
            for (std::size_t j = 0; j < N; ++j) s += a[base + j * stride] * w[(j * k) % N];
            b[idx] = s;
        }
        std::swap(a, b);
    }
    for (auto& z : a) z /= double(N * N * N);
    return a;
}

/// Young-split gap by direct formula, independent of the library.
inline double young_gap(double a, double b, double c, double nu) {
    return nu * b * b + 27.0 / (128.0 * nu * nu * nu) * a * a * std::pow(c, 4) -
           std::pow(2.0, 0.25) * std::sqrt(a) * std::pow(b, 1.5) * c;
}

/// Golden-section minimum of f on [lo, hi].
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = f(x2);
        }
    }
    const double x = (a + b) / 2;
    return {x, f(x)};
}

} // namespace oracle
