#include "spinfft/analysis.hpp"

#include "spinfft/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace spinfft::analysis {
namespace {

constexpr std::size_t kRowBlock = 64;

void requireTime(const ingest::SpaceTimeMatrix& m) {
    if (m.cols() < 2) {
        throw Error(ErrorCode::DegenerateTime,
                    "need at least 2 snapshots for a time transform (got " + std::to_string(m.cols()) + ")");
    }
    if (!(m.dt > 0.0)) {
        throw Error(ErrorCode::DegenerateTime, "sampling interval must be positive");
    }
}

std::size_t transformLength(std::size_t cols, const Options& options) {
    if (!options.padTo) {
        return cols;
    }
    if (*options.padTo < cols) {
        throw Error(ErrorCode::InvalidArgument, "--pad-to " + std::to_string(*options.padTo) +
                                                    " is shorter than the " + std::to_string(cols) +
                                                    " selected snapshots");
    }
    return *options.padTo;
}

std::vector<double> frequencyAxis(std::size_t nt, double dt) {
    std::vector<double> f(nt / 2 + 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        f[i] = static_cast<double>(i) / (static_cast<double>(nt) * dt);
    }
    return f;
}

void detrendInPlace(std::span<double> series, Detrend detrend) {
    if (detrend != Detrend::Mean || series.empty()) {
        return;
    }
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    for (double& v : series) {
        v -= mean;
    }
}

int threadCount(std::size_t workers) { return static_cast<int>(std::max<std::size_t>(1, workers)); }

}  // namespace

namespace detail {

std::vector<double> meanRowMagnitudes(const Matrix& rows, std::size_t nt, Detrend detrend, std::size_t workers) {
    const fft::RealPlan plan(nt);
    const std::size_t bins = plan.bins();
    const std::size_t nblocks = (rows.rows() + kRowBlock - 1) / kRowBlock;
    Matrix partial(nblocks, bins);

#pragma omp parallel num_threads(threadCount(workers))
    {
        fft::RealTransformer transformer(plan);
        std::vector<double> series(rows.cols());
        std::vector<double> mags(bins);
#pragma omp for schedule(static)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
            const std::size_t block = static_cast<std::size_t>(b);
            auto acc = partial.row(block);
            const std::size_t end = std::min(rows.rows(), (block + 1) * kRowBlock);
            for (std::size_t r = block * kRowBlock; r < end; ++r) {
                const auto src = rows.row(r);
                std::copy(src.begin(), src.end(), series.begin());
                detrendInPlace(series, detrend);
                transformer.magnitudes(series, mags);
                for (std::size_t k = 0; k < bins; ++k) {
                    acc[k] += mags[k];
                }
            }
        }
    }

    std::vector<double> mean(bins, 0.0);
    for (std::size_t b = 0; b < nblocks; ++b) {
        const auto acc = partial.row(b);
        for (std::size_t k = 0; k < bins; ++k) {
            mean[k] += acc[k];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(rows.rows());
    }
    return mean;
}

std::vector<double> meanRowMagnitudesSerial(const Matrix& rows, std::size_t nt, Detrend detrend) {
    const fft::RealPlan plan(nt);
    fft::RealTransformer transformer(plan);
    std::vector<double> mean(plan.bins(), 0.0);
    std::vector<double> series(rows.cols());
    std::vector<double> mags(plan.bins());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        const auto src = rows.row(r);
        std::copy(src.begin(), src.end(), series.begin());
        detrendInPlace(series, detrend);
        transformer.magnitudes(series, mags);
        for (std::size_t k = 0; k < mags.size(); ++k) {
            mean[k] += mags[k];
        }
    }
    for (double& v : mean) {
        v /= static_cast<double>(rows.rows());
    }
    return mean;
}

}  // namespace detail

SpectrumResult fftSpectrum(const ingest::SpaceTimeMatrix& m, const Options& options) {
    requireTime(m);
    const std::size_t nt = transformLength(m.cols(), options);

    SpectrumResult result;
    result.freqs = frequencyAxis(nt, m.dt);
    result.amplitude = detail::meanRowMagnitudes(m.data, nt, options.detrend, options.workers);
    const double peak = *std::max_element(result.amplitude.begin(), result.amplitude.end());
    if (peak > 0.0) {
        for (double& v : result.amplitude) {
            v /= peak;
        }
    }
    return result;
}

Matrix crossSectionAverage(const ingest::SpaceTimeMatrix& m) {
    const std::size_t sx = m.shape.sx;
    const std::size_t planes = m.shape.sy * m.shape.sz;
    const std::size_t cols = m.cols();
    Matrix avg(sx, cols);
    for (std::size_t x = 0; x < sx; ++x) {
        auto dst = avg.row(x);
        for (std::size_t p = 0; p < planes; ++p) {
            const auto src = m.data.row(p * sx + x);
            for (std::size_t c = 0; c < cols; ++c) {
                dst[c] += src[c];
            }
        }
        for (double& v : dst) {
            v /= static_cast<double>(planes);
        }
    }
    return avg;
}

SpatialSpectrum spatialSpectrum(const ingest::SpaceTimeMatrix& m, const Options& options) {
    if (m.shape.sx < 1) {
        throw Error(ErrorCode::DegenerateSpace, "empty x selection");
    }
    requireTime(m);
    const std::size_t nt = transformLength(m.cols(), options);
    const Matrix avg = crossSectionAverage(m);

    SpatialSpectrum result;
    result.freqs = frequencyAxis(nt, m.dt);
    result.xPositions.resize(m.shape.sx);
    for (std::size_t i = 0; i < m.shape.sx; ++i) {
        result.xPositions[i] = m.xOrigin + static_cast<double>(i) * m.dx;
    }
    result.power = Matrix(m.shape.sx, result.freqs.size());

    const fft::RealPlan plan(nt);
#pragma omp parallel num_threads(threadCount(options.workers))
    {
        fft::RealTransformer transformer(plan);
        std::vector<double> series(avg.cols());
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(avg.rows()); ++i) {
            const auto x = static_cast<std::size_t>(i);
            const auto src = avg.row(x);
            std::copy(src.begin(), src.end(), series.begin());
            detrendInPlace(series, options.detrend);
            transformer.magnitudes(series, result.power.row(x));
        }
    }
    return result;
}

ComplexGrid spectrum2d(const Matrix& a) {
    return ComplexGrid{a.rows(), a.cols(), fft::forward2d(a.data(), a.rows(), a.cols())};
}

DispersionMap dispersion(const ingest::SpaceTimeMatrix& m, const std::optional<Matrix>& window,
                         const Options& options) {
    if (m.shape.sx < 2) {
        throw Error(ErrorCode::DegenerateSpace,
                    "dispersion needs at least 2 cells along x (got " + std::to_string(m.shape.sx) + ")");
    }
    requireTime(m);
    if (window && (window->rows() != m.shape.sx || window->cols() != m.cols())) {
        throw Error(ErrorCode::ShapeMismatch, "window is " + std::to_string(window->rows()) + "x" +
                                                  std::to_string(window->cols()) + " but the (x, t) array is " +
                                                  std::to_string(m.shape.sx) + "x" + std::to_string(m.cols()));
    }
    const std::size_t nx = m.shape.sx;
    const std::size_t nt = transformLength(m.cols(), options);

    Matrix a = crossSectionAverage(m);
    for (std::size_t x = 0; x < nx; ++x) {
        detrendInPlace(a.row(x), options.detrend);
    }
    if (window) {
        for (std::size_t i = 0; i < a.data().size(); ++i) {
            a.data()[i] *= window->data()[i];
        }
    }
    if (nt != a.cols()) {
        Matrix padded(nx, nt);
        for (std::size_t x = 0; x < nx; ++x) {
            std::copy(a.row(x).begin(), a.row(x).end(), padded.row(x).begin());
        }
        a = std::move(padded);
    }

    const ComplexGrid grid = spectrum2d(a);

    DispersionMap map;
    map.fAxis = frequencyAxis(nt, m.dt);
    map.kAxis.resize(nx);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(nx) * m.dx);
    const auto centre = static_cast<std::int64_t>(nx / 2);
    for (std::size_t j = 0; j < nx; ++j) {
        map.kAxis[j] = static_cast<double>(static_cast<std::int64_t>(j) - centre) * dk;
    }
    map.magnitude = Matrix(map.fAxis.size(), nx);
    const auto snx = static_cast<std::int64_t>(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        // The e^{-ikx} term pairs with f > 0 for a +x travelling wave, so
        // column +k reads DFT row -k.
        const std::int64_t kIndex = static_cast<std::int64_t>(j) - centre;
        const auto p = static_cast<std::size_t>(((-kIndex) % snx + snx) % snx);
        for (std::size_t q = 0; q < map.fAxis.size(); ++q) {
            map.magnitude(q, j) = std::abs(grid.values[p * nt + q]);
        }
    }
    return map;
}

void applyScale(std::span<double> values, Scale scale) {
    switch (scale) {
        case Scale::Amplitude:
            return;
        case Scale::Power:
            for (double& v : values) {
                v *= v;
            }
            return;
        case Scale::Db: {
            const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
            for (double& v : values) {
                v = (peak > 0.0 && v > 0.0) ? std::max(kDbFloor, 20.0 * std::log10(v / peak)) : kDbFloor;
            }
            return;
        }
    }
}

}  // namespace spinfft::analysis
