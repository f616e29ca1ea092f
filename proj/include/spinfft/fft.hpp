#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace spinfft::fft {

using Complex = std::complex<double>;

// Forward real-to-complex transform of fixed length n, producing n/2+1 bins
// (unnormalized, e^{-i...} sign). One plan may be shared across threads; each
// thread needs its own RealTransformer for scratch space.
class RealPlan {
public:
    explicit RealPlan(std::size_t n);
    ~RealPlan();
    RealPlan(const RealPlan&) = delete;
    RealPlan& operator=(const RealPlan&) = delete;

    std::size_t size() const noexcept { return n_; }
    std::size_t bins() const noexcept { return n_ / 2 + 1; }

private:
    friend class RealTransformer;
    std::size_t n_;
    void* plan_;
};

class RealTransformer {
public:
    explicit RealTransformer(const RealPlan& plan);
    ~RealTransformer();
    RealTransformer(const RealTransformer&) = delete;
    RealTransformer& operator=(const RealTransformer&) = delete;

    // Input shorter than the plan length is zero-padded.
    void magnitudes(std::span<const double> input, std::span<double> out);

private:
    const RealPlan& plan_;
    double* in_;
    void* out_;
};

// Full complex forward DFT of a length-n sequence.
std::vector<Complex> forward(std::span<const Complex> input);

// Full complex forward 2D DFT of a rows x cols row-major array.
std::vector<Complex> forward2d(std::span<const double> input, std::size_t rows, std::size_t cols);

}  // namespace spinfft::fft
