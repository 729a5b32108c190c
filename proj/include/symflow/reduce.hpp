#pragma once

#include <cstddef>

namespace symflow {

/// Pairwise (tree) summation of term(i) for i in [first, last).
///
/// The split points depend only on the index range, so the result is the
/// same bit pattern no matter who calls it or from which thread.
template <class Term>
double pairwise_sum(std::size_t first, std::size_t last, Term&& term) {
    constexpr std::size_t leaf = 32;
    const std::size_t count = last - first;
    if (count <= leaf) {
        double s = 0.0;
        for (std::size_t i = first; i < last; ++i) s += term(i);
        return s;
    }
    const std::size_t mid = first + count / 2;
    return pairwise_sum(first, mid, term) + pairwise_sum(mid, last, term);
}

template <class Term>
double pairwise_sum(std::size_t count, Term&& term) {
    return pairwise_sum(std::size_t{0}, count, term);
}

} // namespace symflow
