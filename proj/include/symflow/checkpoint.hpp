#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "symflow/error.hpp"
#include "symflow/field.hpp"

namespace symflow {

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   "SYMFLOW1"            8 bytes magic
///   n                     uint64
///   component count (3)   uint64
///   3 x n^3 (re, im)      float64 pairs, component-major, each component in
///                         lexicographic k-order with k_i running from -n/2+1
///                         to n/2 and k3 varying fastest.
inline constexpr std::string_view checkpoint_magic = "SYMFLOW1";

namespace detail {

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

inline void put_f64(std::vector<unsigned char>& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return v;
}

// Visit lattice indices in lexicographic k-order.
template <class F>
void for_each_lexicographic(const GridSpec& g, F&& f) {
    const int half = static_cast<int>(g.n() / 2);
    for (int k1 = -half + 1; k1 <= half; ++k1)
        for (int k2 = -half + 1; k2 <= half; ++k2)
            for (int k3 = -half + 1; k3 <= half; ++k3) f(g.flat(Wavevector{k1, k2, k3}));
}

} // namespace detail

inline std::vector<unsigned char> encode_checkpoint(const SpectralVelocityField& u) {
    const GridSpec& g = u.grid();
    std::vector<unsigned char> out;
    out.reserve(24 + 3 * g.size() * 16);
    out.insert(out.end(), checkpoint_magic.begin(), checkpoint_magic.end());
    detail::put_u64(out, g.n());
    detail::put_u64(out, 3);
    for (int c = 0; c < 3; ++c)
        detail::for_each_lexicographic(g, [&](std::size_t idx) {
            detail::put_f64(out, u.at(c, idx).real());
            detail::put_f64(out, u.at(c, idx).imag());
        });
    return out;
}

inline SpectralVelocityField decode_checkpoint(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 24 || std::memcmp(bytes.data(), checkpoint_magic.data(), 8) != 0)
        throw FormatError("missing SYMFLOW1 header");
    const std::uint64_t n = detail::get_u64(bytes.data() + 8);
    const std::uint64_t comps = detail::get_u64(bytes.data() + 16);
    if (comps != 3) throw FormatError("expected 3 components, header says " + std::to_string(comps));
    if (n > 4096) throw FormatError("implausible grid size " + std::to_string(n));
    GridSpec g = [&] {
        try {
            return GridSpec(static_cast<std::size_t>(n));
        } catch (const InvalidArgument& e) {
            throw FormatError(e.what());
        }
    }();
    const std::size_t expected = 24 + 3 * g.size() * 16;
    if (bytes.size() != expected)
        throw FormatError("checkpoint has " + std::to_string(bytes.size()) + " bytes, expected " + std::to_string(expected));
    SpectralVelocityField u(g);
    const unsigned char* p = bytes.data() + 24;
    for (int c = 0; c < 3; ++c)
        detail::for_each_lexicographic(g, [&](std::size_t idx) {
            const double re = std::bit_cast<double>(detail::get_u64(p));
            const double im = std::bit_cast<double>(detail::get_u64(p + 8));
            u.at(c, idx) = Complex(re, im);
            p += 16;
        });
    return u;
}

inline void write_checkpoint(const std::string& path, const SpectralVelocityField& u) {
    const auto bytes = encode_checkpoint(u);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("write to " + path + " failed");
}

inline SpectralVelocityField read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

} // namespace symflow
