#include "spinfft/window.hpp"

#include "spinfft/error.hpp"
#include "spinfft/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spinfft::window {
namespace {

// T_order(x) for any real x.
double chebyshevPolynomial(std::size_t order, double x) {
    const double n = static_cast<double>(order);
    if (x > 1.0) {
        return std::cosh(n * std::acosh(x));
    }
    if (x < -1.0) {
        const double sign = (order % 2 == 0) ? 1.0 : -1.0;
        return sign * std::cosh(n * std::acosh(-x));
    }
    return std::cos(n * std::acos(x));
}

}  // namespace

Window1D chebyshev(std::size_t length, double attenuationDb) {
    if (length < 2) {
        throw Error(ErrorCode::BadLength, "window length must be at least 2 (got " + std::to_string(length) + ")");
    }
    if (!(attenuationDb > 0.0) || !std::isfinite(attenuationDb)) {
        throw Error(ErrorCode::BadAttenuation, "attenuation must be a positive number of dB");
    }

    const std::size_t m = length;
    const std::size_t order = m - 1;
    const double ripple = std::pow(10.0, attenuationDb / 20.0);
    const double beta = std::cosh(std::acosh(ripple) / static_cast<double>(order));
    const double pi = std::numbers::pi;

    std::vector<fft::Complex> samples(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double x = beta * std::cos(pi * static_cast<double>(k) / static_cast<double>(m));
        double p = chebyshevPolynomial(order, x);
        if (m % 2 == 0) {
            samples[k] = std::polar(p, pi * static_cast<double>(k) / static_cast<double>(m));
        } else {
            samples[k] = {p, 0.0};
        }
    }
    const std::vector<fft::Complex> spectrum = fft::forward(samples);

    std::vector<double> w(m);
    if (m % 2 == 1) {
        const std::size_t half = (m + 1) / 2;
        // w = [s[half-1], ..., s[1], s[0], s[1], ..., s[half-1]]
        for (std::size_t i = 0; i < half; ++i) {
            w[half - 1 - i] = spectrum[i].real();
            w[half - 1 + i] = spectrum[i].real();
        }
    } else {
        const std::size_t half = m / 2 + 1;
        // w = [s[half-1], ..., s[1], s[1], ..., s[half-1]]
        for (std::size_t i = 1; i < half; ++i) {
            w[half - 1 - i] = spectrum[i].real();
            w[half - 2 + i] = spectrum[i].real();
        }
    }
    const double peak = *std::max_element(w.begin(), w.end());
    for (double& v : w) {
        v /= peak;
    }
    return Window1D{length, attenuationDb, std::move(w)};
}

Matrix window2d(const Window1D& wt, const Window1D& wx) {
    Matrix out(wx.weights.size(), wt.weights.size());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < out.cols(); ++j) {
            out(i, j) = wx.weights[i] * wt.weights[j];
        }
    }
    return out;
}

}  // namespace spinfft::window
