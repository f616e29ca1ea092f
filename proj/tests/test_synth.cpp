#include "spinfft/analysis.hpp"
#include "spinfft/error.hpp"
#include "spinfft/ingest.hpp"
#include "spinfft/ovf.hpp"
#include "spinfft/synth.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace spinfft;
using spinfft::testing::slurp;
using spinfft::testing::TempDir;

namespace {

constexpr double kPi = std::numbers::pi;

synth::PlaneWaveSpec smallSpec() {
    synth::PlaneWaveSpec s;
    s.grid = {2, 1, 1};
    s.frames = 4;
    s.dt = 1e-12;
    s.waves = {{1.0, 1.0 / (4 * 1e-12), 2 * kPi / (2 * 1e-9) * 0.5, 0.25, ovf::Component::Z}};
    return s;
}

}  // namespace

TEST(Synth, FilesParseBackToClosedForm) {
    TempDir dir;
    const auto spec = smallSpec();
    const auto files = synth::writeDataset(spec, dir.path());
    ASSERT_EQ(files.size(), 4u);
    for (std::size_t n = 0; n < files.size(); ++n) {
        EXPECT_EQ(files[n].filename().string(), synth::frameFileName(n));
        const auto slab = ovf::readComponent(files[n], ovf::Component::Z);
        for (std::size_t i = 0; i < 2; ++i) {
            const double x = 0.5e-9 + static_cast<double>(i) * 1e-9;
            const double want =
                std::cos(2 * kPi * spec.waves[0].f0 * static_cast<double>(n) * spec.dt - spec.waves[0].k0 * x + 0.25);
            EXPECT_LE(std::abs(slab.values[i] - want), 1e-12 * std::max(1.0, std::abs(want)));
        }
        for (auto c : {ovf::Component::X, ovf::Component::Y}) {
            for (double v : ovf::readComponent(files[n], c).values) EXPECT_EQ(v, 0.0);
        }
        const auto h = ovf::readHeader(files[n]);
        ASSERT_TRUE(h.totalSimTime.has_value());
        EXPECT_DOUBLE_EQ(*h.totalSimTime, static_cast<double>(n) * spec.dt);
        EXPECT_DOUBLE_EQ(h.xbase, 0.5e-9);
    }
}

TEST(Synth, FileNames) {
    EXPECT_EQ(synth::frameFileName(0), "m000000.ovf");
    EXPECT_EQ(synth::frameFileName(1234), "m001234.ovf");
}

TEST(Synth, SeededNoiseIsReproducible) {
    TempDir a, b;
    auto spec = smallSpec();
    spec.noiseSigma = 0.1;
    spec.seed = 99;
    const auto fa = synth::writeDataset(spec, a.path());
    const auto fb = synth::writeDataset(spec, b.path());
    for (std::size_t n = 0; n < fa.size(); ++n) EXPECT_EQ(slurp(fa[n]), slurp(fb[n]));
    spec.seed = 100;
    EXPECT_NE(synth::renderFrame(spec, 0), slurp(fa[0]));
}

TEST(Synth, NoiseHasRequestedSpread) {
    synth::PlaneWaveSpec spec;
    spec.grid = {4000, 1, 1};
    spec.noiseSigma = 0.2;
    spec.seed = 3;
    const auto slab = ovf::parseComponent(synth::renderFrame(spec, 0), ovf::Component::Z);
    double mean = 0.0, sq = 0.0;
    for (double v : slab.values) mean += v;
    mean /= static_cast<double>(slab.values.size());
    for (double v : slab.values) sq += (v - mean) * (v - mean);
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(std::sqrt(sq / static_cast<double>(slab.values.size())), 0.2, 0.01);
}

TEST(Synth, ZeroWavesZeroNoiseIsZero) {
    TempDir dir;
    synth::PlaneWaveSpec spec;
    spec.grid = {3, 2, 1};
    spec.frames = 6;
    const auto files = synth::writeDataset(spec, dir.path());
    ingest::IngestOptions opt;
    opt.component = ovf::Component::Z;
    const auto m = ingest::ingest(files, opt);
    for (double v : m.data.data()) EXPECT_EQ(v, 0.0);
    for (double v : analysis::fftSpectrum(m).amplitude) EXPECT_EQ(v, 0.0);
}

TEST(Synth, SuperposesWavesPerComponent) {
    synth::PlaneWaveSpec spec;
    spec.grid = {3, 1, 1};
    spec.dt = 1e-12;
    spec.waves = {{1.0, 1e10, 1e8, 0.0, ovf::Component::X},
                  {0.5, 2e10, -2e8, 1.0, ovf::Component::X},
                  {2.0, 3e10, 0.0, 0.0, ovf::Component::Y}};
    for (std::size_t i = 0; i < 3; ++i) {
        const double x = 0.5e-9 + static_cast<double>(i) * 1e-9;
        const double t = 2e-12;
        EXPECT_NEAR(synth::signalAt(spec, ovf::Component::X, i, 2),
                    std::cos(2 * kPi * 1e10 * t - 1e8 * x) + 0.5 * std::cos(2 * kPi * 2e10 * t + 2e8 * x + 1.0),
                    1e-14);
        EXPECT_NEAR(synth::signalAt(spec, ovf::Component::Y, i, 2), 2.0 * std::cos(2 * kPi * 3e10 * t), 1e-14);
        EXPECT_EQ(synth::signalAt(spec, ovf::Component::Z, i, 2), 0.0);
    }
}

TEST(Synth, ParseWave) {
    const auto w = synth::parseWave("1.5,5e9,2e7,0.3,y");
    EXPECT_EQ(w.amplitude, 1.5);
    EXPECT_EQ(w.f0, 5e9);
    EXPECT_EQ(w.k0, 2e7);
    EXPECT_EQ(w.phase, 0.3);
    EXPECT_EQ(w.component, ovf::Component::Y);
    EXPECT_THROW(synth::parseWave("1,2,3"), Error);
    EXPECT_THROW(synth::parseWave("1,2,3,4,q"), Error);
    EXPECT_THROW(synth::parseWave("1,x,3,4,z"), Error);
}

TEST(Synth, ValidateRejectsAliasedWaves) {
    auto expectInvalid = [](const synth::PlaneWaveSpec& s) {
        try {
            synth::validate(s);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        }
    };
    auto s = smallSpec();
    EXPECT_NO_THROW(synth::validate(s));
    s.waves[0].f0 = 0.5 / s.dt;
    expectInvalid(s);
    s = smallSpec();
    s.waves[0].k0 = -kPi / s.cell[0];
    expectInvalid(s);
    s = smallSpec();
    s.frames = 0;
    expectInvalid(s);
    s = smallSpec();
    s.dt = 0.0;
    expectInvalid(s);
    s = smallSpec();
    s.grid = {0, 1, 1};
    expectInvalid(s);
}

// Property: ingesting a generated dataset reproduces the closed form on any ROI.
TEST(SynthProperty, IngestClosure) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        TempDir dir;
        synth::PlaneWaveSpec spec;
        spec.grid = {2 + rng() % 6, 1 + rng() % 3, 1 + rng() % 2};
        spec.cell = {1e-9 * (0.5 + u(rng)), 1e-9, 1e-9};
        spec.frames = 2 + rng() % 6;
        spec.dt = 1e-12 * (0.5 + u(rng));
        const auto comp = static_cast<ovf::Component>(rng() % 3);
        spec.waves = {{0.5 + u(rng), 0.45 * u(rng) / spec.dt, (u(rng) - 0.5) * 6.0 / spec.cell[0], 6 * u(rng), comp}};
        const auto files = synth::writeDataset(spec, dir.path());

        ingest::IngestOptions opt;
        opt.component = comp;
        opt.roi.x = {rng() % spec.grid[0], std::nullopt};
        opt.roi.t = {std::nullopt, 1 + rng() % spec.frames};
        const auto m = ingest::ingest(files, opt);
        EXPECT_NEAR(m.dt, spec.dt, 1e-12 * spec.dt);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const std::size_t i = m.roi.x0 + r % m.shape.sx;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double want = synth::signalAt(spec, comp, i, m.roi.t0 + c);
                EXPECT_LE(std::abs(m.data(r, c) - want), 1e-12 * std::max(1.0, std::abs(want)));
            }
        }
    }
}
