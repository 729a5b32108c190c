#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

#include "symflow/error.hpp"

namespace symflow {

using Complex = std::complex<double>;

namespace detail {
// The FFTW planner is not reentrant; execution of an existing plan is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// In-place complex FFT of fixed shape with its own aligned buffer.
///
/// Transforms are unnormalized: forward uses exp(-2 pi i k.x), backward
/// exp(+2 pi i k.x). Plans use FFTW_ESTIMATE so the algorithm choice, and
/// therefore every rounding, is reproducible from run to run.
class FftPlan {
public:
    explicit FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
        size_ = 1;
        for (int d : dims_) size_ *= static_cast<std::size_t>(d);
        data_ = fftw_alloc_complex(size_);
        if (data_ == nullptr) throw Error("fftw_alloc_complex failed");
        std::lock_guard lock(detail::planner_mutex());
        const int rank = static_cast<int>(dims_.size());
        forward_ = fftw_plan_dft(rank, dims_.data(), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft(rank, dims_.data(), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (forward_ == nullptr || backward_ == nullptr) {
            fftw_free(data_);
            throw Error("FFTW planning failed");
        }
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan() {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(data_);
    }

    std::span<Complex> buffer() { return {reinterpret_cast<Complex*>(data_), size_}; }
    std::size_t size() const { return size_; }

    void forward() { fftw_execute(forward_); }
    void backward() { fftw_execute(backward_); }

private:
    std::vector<int> dims_;
    std::size_t size_ = 0;
    fftw_complex* data_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Real-to-complex / complex-to-real pair for an n^3 cube.
///
/// The complex side holds the k3 >= 0 half, n x n x (n/2 + 1). Both
/// transforms are out of place and unnormalized; c2r clobbers its input.
class RealFftPlan {
public:
    explicit RealFftPlan(std::size_t n) : n_(n), real_size_(n * n * n), half_size_(n * n * (n / 2 + 1)) {
        real_ = fftw_alloc_real(real_size_);
        spec_ = fftw_alloc_complex(half_size_);
        if (real_ == nullptr || spec_ == nullptr) throw Error("fftw allocation failed");
        std::lock_guard lock(detail::planner_mutex());
        const int m = static_cast<int>(n);
        r2c_ = fftw_plan_dft_r2c_3d(m, m, m, real_, spec_, FFTW_ESTIMATE);
        c2r_ = fftw_plan_dft_c2r_3d(m, m, m, spec_, real_, FFTW_ESTIMATE);
        if (r2c_ == nullptr || c2r_ == nullptr) throw Error("FFTW planning failed");
    }

    RealFftPlan(const RealFftPlan&) = delete;
    RealFftPlan& operator=(const RealFftPlan&) = delete;

    ~RealFftPlan() {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(r2c_);
        fftw_destroy_plan(c2r_);
        fftw_free(real_);
        fftw_free(spec_);
    }

    std::size_t n() const { return n_; }
    std::span<double> real() { return {real_, real_size_}; }
    std::span<Complex> half() { return {reinterpret_cast<Complex*>(spec_), half_size_}; }

    void forward() { fftw_execute(r2c_); }
    void backward() { fftw_execute(c2r_); }

private:
    std::size_t n_;
    std::size_t real_size_;
    std::size_t half_size_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan r2c_ = nullptr;
    fftw_plan c2r_ = nullptr;
};

inline RealFftPlan& thread_real_plan(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<RealFftPlan>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFftPlan>(n);
    return *slot;
}

/// Per-thread cached plan for an n^rank cube.
inline FftPlan& thread_plan(std::size_t n, int rank) {
    thread_local std::map<std::pair<std::size_t, int>, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[{n, rank}];
    if (!slot) slot = std::make_unique<FftPlan>(std::vector<int>(static_cast<std::size_t>(rank), static_cast<int>(n)));
    return *slot;
}

} // namespace symflow
