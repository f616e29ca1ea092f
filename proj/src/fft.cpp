#include "spinfft/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>

namespace spinfft::fft {
namespace {

// The FFTW planner is not re-entrant.
std::mutex& plannerMutex() {
    static std::mutex m;
    return m;
}

template <typename T>
T* alignedAlloc(std::size_t count) {
    void* p = fftw_malloc(sizeof(T) * std::max<std::size_t>(count, 1));
    if (p == nullptr) {
        throw std::bad_alloc();
    }
    return static_cast<T*>(p);
}

}  // namespace

RealPlan::RealPlan(std::size_t n) : n_(n), plan_(nullptr) {
    double* in = alignedAlloc<double>(n);
    fftw_complex* out = alignedAlloc<fftw_complex>(n / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(plannerMutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    fftw_free(in);
    fftw_free(out);
    if (plan_ == nullptr) {
        throw std::runtime_error("FFTW failed to plan a length-" + std::to_string(n) + " transform");
    }
}

RealPlan::~RealPlan() {
    std::lock_guard<std::mutex> lock(plannerMutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

RealTransformer::RealTransformer(const RealPlan& plan)
    : plan_(plan), in_(alignedAlloc<double>(plan.size())), out_(alignedAlloc<fftw_complex>(plan.bins())) {}

RealTransformer::~RealTransformer() {
    fftw_free(in_);
    fftw_free(out_);
}

void RealTransformer::magnitudes(std::span<const double> input, std::span<double> out) {
    const std::size_t n = plan_.size();
    const std::size_t used = std::min(n, input.size());
    std::copy_n(input.begin(), used, in_);
    std::fill(in_ + used, in_ + n, 0.0);
    auto* spectrum = static_cast<fftw_complex*>(out_);
    fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_.plan_), in_, spectrum);
    const std::size_t bins = std::min(out.size(), plan_.bins());
    for (std::size_t k = 0; k < bins; ++k) {
        out[k] = std::hypot(spectrum[k][0], spectrum[k][1]);
    }
}

std::vector<Complex> forward(std::span<const Complex> input) {
    const std::size_t n = input.size();
    auto* buf = alignedAlloc<fftw_complex>(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plannerMutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    std::memcpy(buf, input.data(), n * sizeof(fftw_complex));
    fftw_execute(plan);
    std::vector<Complex> out(n);
    std::memcpy(static_cast<void*>(out.data()), buf, n * sizeof(fftw_complex));
    {
        std::lock_guard<std::mutex> lock(plannerMutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

std::vector<Complex> forward2d(std::span<const double> input, std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    auto* buf = alignedAlloc<fftw_complex>(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plannerMutex());
        plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    // Planners may scribble on the buffer, so fill it afterwards.
    for (std::size_t i = 0; i < n; ++i) {
        buf[i][0] = input[i];
        buf[i][1] = 0.0;
    }
    fftw_execute(plan);
    std::vector<Complex> out(n);
    std::memcpy(static_cast<void*>(out.data()), buf, n * sizeof(fftw_complex));
    {
        std::lock_guard<std::mutex> lock(plannerMutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

}  // namespace spinfft::fft
