#pragma once

#include "spinfft/matrix.hpp"

#include <cstddef>
#include <vector>

namespace spinfft::window {

inline constexpr double kDefaultAttenuationDb = 100.0;

struct Window1D {
    std::size_t length = 0;
    double attenuationDb = 0.0;
    std::vector<double> weights;  // symmetric, peak normalized to 1
};

/// Dolph-Chebyshev window of `length` points whose sidelobes sit
/// `attenuationDb` below the mainlobe.
///
/// Built by sampling the Chebyshev polynomial of order length-1 on the
/// frequency grid, inverse transforming, and mirroring the half-window so the
/// result is exactly symmetric. Even lengths use the half-sample phase shift.
Window1D chebyshev(std::size_t length, double attenuationDb = kDefaultAttenuationDb);

/// Outer product W(i, j) = wx[i] * wt[j]: rows follow x, columns follow t.
Matrix window2d(const Window1D& wt, const Window1D& wx);

}  // namespace spinfft::window
