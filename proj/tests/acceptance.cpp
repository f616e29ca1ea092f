// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any applicable criterion fails.

#include "spinfft/analysis.hpp"
#include "spinfft/ingest.hpp"
#include "spinfft/log.hpp"
#include "spinfft/scriptgen.hpp"
#include "spinfft/synth.hpp"
#include "spinfft/window.hpp"
#include "support/fixtures.hpp"
#include "support/naive_dft.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace spinfft;
using spinfft::testing::TempDir;

namespace {

constexpr double kPi = std::numbers::pi;

enum class Verdict { Pass, PassScalingNotApplicable, Fail, NotRun };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::pair<std::size_t, std::size_t> argmax2d(const Matrix& m) {
    const auto& d = m.data();
    const auto i = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
    return {i / m.cols(), i % m.cols()};
}

ingest::SpaceTimeMatrix ingestDir(const fs::path& dir, ovf::Component c, std::size_t workers) {
    ingest::IngestOptions opt;
    opt.component = c;
    opt.workers = workers;
    return ingest::ingest(ingest::discoverFiles(dir), opt);
}

// 1. On-bin plane wave and its mirror land exactly on (+k0, f0) and (-k0, f0).
Outcome planeWaveOracle() {
    const auto t0 = Clock::now();
    const std::size_t nx = 512, frames = 256, b = 40, c = 24;
    synth::PlaneWaveSpec spec;
    spec.grid = {nx, 1, 1};
    spec.frames = frames;
    spec.dt = 1e-12;
    const double f0 = static_cast<double>(b) / (static_cast<double>(frames) * spec.dt);
    const double k0 = 2 * kPi * static_cast<double>(c) / (static_cast<double>(nx) * spec.cell[0]);

    std::ostringstream detail;
    bool ok = true;
    for (const double sign : {+1.0, -1.0}) {
        TempDir dir("spinfft-acc1");
        spec.waves = {{1.0, f0, sign * k0, 0.0, ovf::Component::Y}};
        synth::writeDataset(spec, dir.path());
        const auto d = analysis::dispersion(ingestDir(dir.path(), ovf::Component::Y, 1));
        const auto [q, j] = argmax2d(d.magnitude);
        const std::size_t wantJ = sign > 0 ? nx / 2 + c : nx / 2 - c;
        ok = ok && q == b && j == wantJ;
        detail << (sign > 0 ? "+k0" : "-k0") << " peak at (f bin " << q << ", k col " << j << "; want " << b << ", "
               << wantJ << ") ";
    }
    const double secs = since(t0);
    ok = ok && secs < 10.0;
    detail << fmt("in %.2f s (limit 10 s)", secs);
    return {ok ? Verdict::Pass : Verdict::Fail, detail.str()};
}

double maxRelError(const std::vector<double>& got, const std::vector<double>& want) {
    if (got.size() != want.size()) return INFINITY;
    const double scale = std::max(1e-300, *std::max_element(want.begin(), want.end()));
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    return worst;
}

// 2. Every analysis agrees with the brute-force DFT on random inputs up to 16x16.
Outcome bruteForceEquivalence() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t sx = 1; sx <= 16; ++sx) {
        for (std::size_t nt = 2; nt <= 16; ++nt) {
            const std::size_t sy = 1 + rng() % 2;
            Matrix a(sx * sy, nt);
            for (double& v : a.data()) v = g(rng);
            const auto m = spinfft::testing::makeMatrix(a, sx, sy, 1, 1e-12, 1e-9);
            worst = std::max(worst, maxRelError(analysis::fftSpectrum(m).amplitude,
                                                spinfft::testing::naiveFftSpectrum(a)));
            worst = std::max(worst, maxRelError(analysis::spatialSpectrum(m).power.data(),
                                                spinfft::testing::naiveSpatialSpectrum(a, sx).data()));
            if (sx >= 2) {
                const Matrix avg = spinfft::testing::naiveCrossSection(a, sx);
                worst = std::max(worst, maxRelError(analysis::dispersion(m).magnitude.data(),
                                                    spinfft::testing::naiveDispersion(avg).data()));
            }
            ++cases;
        }
    }
    const double secs = since(t0);
    const bool ok = worst < 1e-9 && secs < 30.0;
    return {ok ? Verdict::Pass : Verdict::Fail,
            std::to_string(cases) + " shapes, max relative error " + fmt("%.2e", worst) + " (limit 1e-9)" +
                fmt(", %.2f s (limit 30 s)", secs)};
}

// 3. Chebyshev(64, 100 dB): sidelobes at -100 +- 0.5 dB, equiripple std < 0.1 dB.
Outcome windowSpec() {
    const auto w = window::chebyshev(64, 100.0);
    const auto mag = spinfft::testing::paddedSpectrumMagnitude(w.weights, 8192);
    std::size_t k = 1;
    while (k + 1 < mag.size() && mag[k + 1] < mag[k]) ++k;
    std::vector<double> peaks;
    for (std::size_t i = k + 1; i + 1 < mag.size(); ++i) {
        if (mag[i] >= mag[i - 1] && mag[i] >= mag[i + 1]) peaks.push_back(20 * std::log10(mag[i] / mag[0]));
    }
    if (peaks.empty()) return {Verdict::Fail, "no sidelobes found"};
    const double hi = *std::max_element(peaks.begin(), peaks.end());
    const double lo = *std::min_element(peaks.begin(), peaks.end());
    double mean = 0.0;
    for (double p : peaks) mean += p;
    mean /= static_cast<double>(peaks.size());
    double var = 0.0;
    for (double p : peaks) var += (p - mean) * (p - mean);
    const double sd = std::sqrt(var / static_cast<double>(peaks.size()));
    const bool ok = std::abs(hi + 100.0) <= 0.5 && std::abs(lo + 100.0) <= 0.5 && sd < 0.1;
    return {ok ? Verdict::Pass : Verdict::Fail,
            std::to_string(peaks.size()) + " sidelobes in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) +
                "] dB (limit -100 +- 0.5), std " + fmt("%.4f", sd) + " dB (limit 0.1)"};
}

double concentration(const Matrix& mag, std::size_t qc, std::size_t jc) {
    double total = 0.0, near = 0.0;
    for (std::size_t q = 0; q < mag.rows(); ++q) {
        for (std::size_t j = 0; j < mag.cols(); ++j) {
            const double e = mag(q, j) * mag(q, j);
            total += e;
            const auto dq = static_cast<long>(q) - static_cast<long>(qc);
            const auto dj = static_cast<long>(j) - static_cast<long>(jc);
            if (std::labs(dq) <= 2 && std::labs(dj) <= 2) near += e;
        }
    }
    return near / total;
}

// 4. On an off-bin wave the windowed map is more concentrated near (k0, f0).
Outcome windowConcentration() {
    const std::size_t nx = 128, frames = 256;
    const double b = 40.4, c = 24.4;
    synth::PlaneWaveSpec spec;
    spec.grid = {nx, 1, 1};
    spec.frames = frames;
    spec.dt = 1e-12;
    const double f0 = b / (static_cast<double>(frames) * spec.dt);
    const double k0 = 2 * kPi * c / (static_cast<double>(nx) * spec.cell[0]);
    spec.waves = {{1.0, f0, k0, 0.3, ovf::Component::Z}};
    TempDir dir("spinfft-acc4");
    synth::writeDataset(spec, dir.path());
    const auto m = ingestDir(dir.path(), ovf::Component::Z, 1);

    const std::size_t qc = static_cast<std::size_t>(std::lround(b));
    const std::size_t jc = nx / 2 + static_cast<std::size_t>(std::lround(c));
    const double plain = concentration(analysis::dispersion(m).magnitude, qc, jc);
    const Matrix w = window::window2d(window::chebyshev(frames), window::chebyshev(nx));
    const double windowed = concentration(analysis::dispersion(m, w).magnitude, qc, jc);
    return {windowed > plain ? Verdict::Pass : Verdict::Fail,
            "energy within +-2 bins: windowed " + fmt("%.4f", windowed) + " vs unwindowed " + fmt("%.4f", plain) +
                fmt(" (f bin %.1f, ", b) + fmt("k bin %.1f, Chebyshev 100 dB)", c)};
}

// 5. Byte-identical ingest for 1, 2 and 4 workers on >= 1000 files / >= 1 GiB;
//    4-worker wall time <= 0.6x the 1-worker time when >= 4 cores are present.
Outcome parallelIngest() {
    const auto t0 = Clock::now();
    synth::PlaneWaveSpec spec;
    spec.grid = {256, 200, 1};
    spec.frames = 1000;
    spec.dt = 1e-12;
    spec.waves = {{1.0, 3.3e10, 1.7e8, 0.0, ovf::Component::Z}};
    spec.noiseSigma = 0.01;
    spec.seed = 5;
    TempDir dir("spinfft-acc5");
    const auto files = synth::writeDataset(spec, dir.path());
    std::uintmax_t bytes = 0;
    for (const auto& f : files) bytes += fs::file_size(f);
    const double genSecs = since(t0);

    ingest::IngestOptions opt;
    opt.component = ovf::Component::Z;
    std::vector<double> times;
    Matrix reference;
    bool identical = true;
    for (const std::size_t workers : {1u, 2u, 4u}) {
        opt.workers = workers;
        const auto start = Clock::now();
        auto m = ingest::ingest(files, opt);
        times.push_back(since(start));
        if (workers == 1) {
            reference = std::move(m.data);
        } else {
            identical = identical && m.data.rows() == reference.rows() && m.data.cols() == reference.cols() &&
                        std::equal(m.data.data().begin(), m.data.data().end(), reference.data().begin(),
                                   [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; });
        }
    }

    const bool bigEnough = files.size() >= 1000 && bytes >= (1ull << 30);
    const auto cores = std::max(1u, std::thread::hardware_concurrency());
    const double ratio = times[2] / times[0];
    std::ostringstream detail;
    detail << files.size() << " files, " << fmt("%.2f GiB", static_cast<double>(bytes) / (1ull << 30))
           << fmt(" (written in %.0f s); ", genSecs) << "outputs " << (identical ? "byte-identical" : "DIFFER")
           << " for workers 1/2/4; wall " << fmt("%.2f", times[0]) << "/" << fmt("%.2f", times[1]) << "/"
           << fmt("%.2f s", times[2]) << ", t4/t1 = " << fmt("%.2f", ratio) << " (limit 0.6); ";
    bool ok = identical && bigEnough;
    if (cores >= 4) {
        ok = ok && ratio <= 0.6;
        detail << "scaling checked on " << cores << " cores";
    } else {
        detail << "scaling check not applicable: " << cores << " core(s) available, needs >= 4";
        return {ok ? Verdict::PassScalingNotApplicable : Verdict::Fail, detail.str()};
    }
    return {ok ? Verdict::Pass : Verdict::Fail, detail.str()};
}

// 6. The shipped example emits 90 scripts including the committed golden one.
Outcome scriptGeneration() {
    const fs::path root(SPINFFT_SOURCE_DIR);
    TempDir out("spinfft-acc6");
    const auto names = scriptgen::generate(root / "sweeps" / "waveguide.spec", out.path());
    std::size_t onDisk = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out.path())) ++onDisk;
    const std::string golden = "e_1000_20_1_1.0e+00_1.0e+11.txt";
    const bool present = fs::exists(out / golden);
    const bool same = present && spinfft::testing::slurp(out / golden) ==
                                     spinfft::testing::slurp(root / "sweeps" / "golden" / golden);
    const bool ok = names.size() == 90 && onDisk == 90 && same;
    return {ok ? Verdict::Pass : Verdict::Fail, std::to_string(onDisk) + " files written; " + golden +
                                                    (same ? " byte-identical to golden" : " DIFFERS from golden")};
}

// 7. Band gaps of the full waveguide need a MuMax3 run.
Outcome bandGaps() {
    return {Verdict::NotRun,
            "requires a GPU MuMax3 run of sweeps/waveguide.spec; see README \"Full waveguide run\" recipe"};
}

// 8. ingest(synth) equals the closed form on random specs and ROIs.
Outcome roundTrip() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        synth::PlaneWaveSpec spec;
        spec.grid = {1 + rng() % 12, 1 + rng() % 4, 1 + rng() % 3};
        spec.cell = {1e-9 * (0.5 + 2 * u(rng)), 1e-9 * (0.5 + u(rng)), 1e-9 * (1 + 9 * u(rng))};
        spec.frames = 2 + rng() % 10;
        spec.dt = 1e-12 * (0.1 + 5 * u(rng));
        const std::size_t waves = rng() % 3;
        for (std::size_t w = 0; w < waves; ++w) {
            spec.waves.push_back({0.1 + 2 * u(rng), 0.49 * u(rng) / spec.dt, (u(rng) - 0.5) * 1.98 * kPi / spec.cell[0],
                                  2 * kPi * u(rng), static_cast<ovf::Component>(rng() % 3)});
        }
        const auto comp = static_cast<ovf::Component>(rng() % 3);
        TempDir dir("spinfft-acc8");
        const auto files = synth::writeDataset(spec, dir.path());

        auto range = [&](std::size_t extent) {
            std::size_t a = rng() % extent, b = rng() % extent;
            if (a > b) std::swap(a, b);
            return ingest::IndexRange{a, b + 1};
        };
        ingest::IngestOptions opt;
        opt.component = comp;
        opt.workers = 1 + rng() % 4;
        opt.roi = {range(spec.frames), range(spec.grid[0]), range(spec.grid[1]), range(spec.grid[2])};
        const auto m = ingest::ingest(files, opt);
        worst = std::max(worst, std::abs(m.dt - spec.dt) / spec.dt);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            const std::size_t i = m.roi.x0 + r % m.shape.sx;
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double want = synth::signalAt(spec, comp, i, m.roi.t0 + c);
                worst = std::max(worst, std::abs(m.data(r, c) - want) / std::max(1.0, std::abs(want)));
            }
        }
    }
    const double secs = since(t0);
    const bool ok = worst < 1e-12 && secs < 20.0;
    return {ok ? Verdict::Pass : Verdict::Fail,
            "100 random specs/ROIs, max relative error " + fmt("%.2e", worst) + " (limit 1e-12)" +
                fmt(", %.2f s (limit 20 s)", secs)};
}

}  // namespace

int main() {
    log::setSink([](log::Level, const std::string&) {});
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 plane-wave dispersion oracle", planeWaveOracle},
        {"2 brute-force DFT equivalence", bruteForceEquivalence},
        {"3 Chebyshev window sidelobes", windowSpec},
        {"4 window concentration", windowConcentration},
        {"5 parallel ingest determinism/scaling", parallelIngest},
        {"6 script generation", scriptGeneration},
        {"7 waveguide band gaps", bandGaps},
        {"8 OVF round trip", roundTrip},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("threw: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::Pass                       ? "PASS"
                          : o.verdict == Verdict::PassScalingNotApplicable ? "PASS, scaling N/A"
                          : o.verdict == Verdict::Fail                     ? "FAIL"
                                                                           : "NOT RUN";
        std::printf("[%s] %s: %s\n", tag, name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += o.verdict == Verdict::Fail;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
