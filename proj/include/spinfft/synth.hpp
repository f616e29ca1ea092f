#pragma once

#include "spinfft/ovf.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spinfft::synth {

struct PlaneWave {
    double amplitude = 1.0;
    double f0 = 0.0;     // Hz
    double k0 = 0.0;     // rad/m along x
    double phase = 0.0;  // rad
    ovf::Component component = ovf::Component::Z;
};

struct PlaneWaveSpec {
    std::array<std::size_t, 3> grid{1, 1, 1};
    std::array<double, 3> cell{1e-9, 1e-9, 1e-9};
    std::size_t frames = 1;
    double dt = 1e-12;
    std::vector<PlaneWave> waves;
    double noiseSigma = 0.0;
    std::uint64_t seed = 0;
};

// "A,F0,K0,PHASE,COMP", e.g. "1,5e9,2e7,0,z".
PlaneWave parseWave(std::string_view text);

// Throws InvalidArgument for frames < 1, dt <= 0, empty grid, f0 at or above
// Nyquist or |k0| at or above pi/cx.
void validate(const PlaneWaveSpec& spec);

// Closed-form noiseless value of `component` at cell x-index i, frame n.
double signalAt(const PlaneWaveSpec& spec, ovf::Component component, std::size_t i, std::size_t frame);

// OVF 2.0 text of frame n. Values use the shortest round-trip decimal form,
// so parsing recovers the written doubles exactly.
std::string renderFrame(const PlaneWaveSpec& spec, std::size_t frame);

std::string frameFileName(std::size_t frame);

// Writes m000000.ovf ... into outDir (created if needed).
std::vector<std::filesystem::path> writeDataset(const PlaneWaveSpec& spec, const std::filesystem::path& outDir);

}  // namespace spinfft::synth
