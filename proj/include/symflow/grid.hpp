#pragma once

#include <array>
#include <cstddef>
#include <cstdlib>
#include <string>

#include "symflow/error.hpp"

namespace symflow {

using Wavevector = std::array<int, 3>;

/// Collocation grid on the unit periodic box and its dual wavenumber lattice.
///
/// Arrays are stored in FFT order: index i along an axis holds the integer
/// wavenumber i for i <= n/2 and i - n otherwise, so the lattice is
/// {-n/2+1, ..., n/2} per axis. Flat index is (i1 * n + i2) * n + i3.
class GridSpec {
public:
    explicit GridSpec(std::size_t n) : n_(n) {
        if (n < 8 || (n & (n - 1)) != 0)
            throw InvalidArgument("grid size must be a power of two >= 8, got " + std::to_string(n));
    }

    std::size_t n() const { return n_; }
    std::size_t size() const { return n_ * n_ * n_; }
    double spacing() const { return 1.0 / static_cast<double>(n_); }

    int wavenumber(std::size_t i) const {
        return i <= n_ / 2 ? static_cast<int>(i) : static_cast<int>(i) - static_cast<int>(n_);
    }

    /// Axis index holding wavenumber k (taken modulo n).
    std::size_t index_of(int k) const {
        const int m = static_cast<int>(n_);
        return static_cast<std::size_t>(((k % m) + m) % m);
    }

    std::size_t flat(std::size_t i1, std::size_t i2, std::size_t i3) const { return (i1 * n_ + i2) * n_ + i3; }

    std::size_t flat(const Wavevector& k) const { return flat(index_of(k[0]), index_of(k[1]), index_of(k[2])); }

    Wavevector wavevector(std::size_t idx) const {
        const std::size_t i3 = idx % n_;
        const std::size_t i2 = (idx / n_) % n_;
        const std::size_t i1 = idx / (n_ * n_);
        return {wavenumber(i1), wavenumber(i2), wavenumber(i3)};
    }

    /// Flat index of -k.
    std::size_t mirror(std::size_t idx) const {
        const Wavevector k = wavevector(idx);
        return flat(Wavevector{-k[0], -k[1], -k[2]});
    }

    /// 2/3 rule: true iff |k_i| <= n/3 on every axis.
    bool dealiased(const Wavevector& k) const {
        for (int c : k)
            if (3 * std::abs(c) > static_cast<int>(n_)) return false;
        return true;
    }

    /// True if any component sits on the Nyquist wavenumber n/2.
    bool nyquist(const Wavevector& k) const {
        for (int c : k)
            if (std::abs(c) == static_cast<int>(n_ / 2)) return true;
        return false;
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    std::size_t n_;
};

inline int norm_sq(const Wavevector& k) { return k[0] * k[0] + k[1] * k[1] + k[2] * k[2]; }

} // namespace symflow
