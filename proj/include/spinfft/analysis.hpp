#pragma once

#include "spinfft/fft.hpp"
#include "spinfft/ingest.hpp"
#include "spinfft/matrix.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace spinfft::analysis {

enum class Detrend { None, Mean };

struct Options {
    Detrend detrend = Detrend::None;
    // Zero-pad the time axis to this many samples (must be >= cols).
    std::optional<std::size_t> padTo;
    std::size_t workers = 1;
};

// Averaged one-sided frequency content, peak-normalized.
struct SpectrumResult {
    std::vector<double> freqs;      // Hz
    std::vector<double> amplitude;  // max 1, or all zero for a zero input
};

// One-sided DFT magnitude per x position; rows follow x, columns follow f.
struct SpatialSpectrum {
    std::vector<double> xPositions;  // m, cell centers
    std::vector<double> freqs;       // Hz
    Matrix power;
};

// |2D DFT| of the (x, t) array; rows follow f (>= 0), columns follow k
// (centered, index floor(Nx/2) is k = 0).
struct DispersionMap {
    std::vector<double> kAxis;  // rad/m
    std::vector<double> fAxis;  // Hz
    Matrix magnitude;
};

SpectrumResult fftSpectrum(const ingest::SpaceTimeMatrix& m, const Options& options = {});

SpatialSpectrum spatialSpectrum(const ingest::SpaceTimeMatrix& m, const Options& options = {});

/// Cross-section average, optional elementwise window (shape sx x cols),
/// 2D DFT, k-centering and the f >= 0 half. A wave cos(2 pi f0 t - k0 x)
/// peaks at (+k0, +f0).
DispersionMap dispersion(const ingest::SpaceTimeMatrix& m, const std::optional<Matrix>& window = std::nullopt,
                         const Options& options = {});

/// Mean over the selected (y, z) cells at each x: an sx x cols array.
Matrix crossSectionAverage(const ingest::SpaceTimeMatrix& m);

struct ComplexGrid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<fft::Complex> values;  // row-major, standard forward DFT
};

/// Unshifted full 2D DFT of a real array.
ComplexGrid spectrum2d(const Matrix& a);

/// Output value scaling applied before serialization.
enum class Scale { Amplitude, Power, Db };

inline constexpr double kDbFloor = -300.0;

/// Amplitude: identity. Power: square. Db: 20 log10(v / max), floored at
/// kDbFloor (all-zero input maps to the floor).
void applyScale(std::span<double> values, Scale scale);

namespace detail {

// Mean over rows of the one-sided DFT magnitude of each row, using fixed-size
// row blocks so the summation order does not depend on `workers`.
std::vector<double> meanRowMagnitudes(const Matrix& rows, std::size_t nt, Detrend detrend, std::size_t workers);

// Straight row-by-row reference for meanRowMagnitudes().
std::vector<double> meanRowMagnitudesSerial(const Matrix& rows, std::size_t nt, Detrend detrend);

}  // namespace detail

}  // namespace spinfft::analysis
