// Serial reference vs OpenMP kernels: ingest and per-row spectrum averaging.

#include "spinfft/analysis.hpp"
#include "spinfft/ingest.hpp"
#include "spinfft/log.hpp"
#include "spinfft/synth.hpp"

#include <benchmark/benchmark.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

namespace fs = std::filesystem;
using namespace spinfft;

namespace {

// 200 frames of a 128x64x1 grid, written once per process.
const std::vector<fs::path>& dataset() {
    static const std::vector<fs::path> files = [] {
        const fs::path dir = fs::temp_directory_path() / ("spinfft-bench-" + std::to_string(::getpid()));
        synth::PlaneWaveSpec spec;
        spec.grid = {128, 64, 1};
        spec.frames = 200;
        spec.waves = {{1.0, 5e10, 2e8, 0.0, ovf::Component::Z}};
        spec.noiseSigma = 0.05;
        spec.seed = 1;
        auto written = synth::writeDataset(spec, dir);
        std::atexit([] {
            std::error_code ec;
            fs::remove_all(fs::temp_directory_path() / ("spinfft-bench-" + std::to_string(::getpid())), ec);
        });
        return written;
    }();
    return files;
}

ingest::IngestOptions options(std::size_t workers) {
    ingest::IngestOptions opt;
    opt.component = ovf::Component::Z;
    opt.workers = workers;
    return opt;
}

void BM_IngestSerial(benchmark::State& state) {
    const auto& files = dataset();
    for (auto _ : state) benchmark::DoNotOptimize(ingest::ingestSerial(files, options(1)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(files.size()));
}

void BM_IngestParallel(benchmark::State& state) {
    const auto& files = dataset();
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ingest::ingest(files, options(workers)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(files.size()));
}

Matrix randomRows(std::size_t rows, std::size_t nt) {
    Matrix m(rows, nt);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (double& v : m.data()) v = g(rng);
    return m;
}

void BM_RowSpectraSerial(benchmark::State& state) {
    const Matrix m = randomRows(8192, 1024);
    for (auto _ : state)
        benchmark::DoNotOptimize(analysis::detail::meanRowMagnitudesSerial(m, m.cols(), analysis::Detrend::Mean));
}

void BM_RowSpectraParallel(benchmark::State& state) {
    const Matrix m = randomRows(8192, 1024);
    const auto workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(analysis::detail::meanRowMagnitudes(m, m.cols(), analysis::Detrend::Mean, workers));
}

}  // namespace

BENCHMARK(BM_IngestSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_IngestParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RowSpectraSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RowSpectraParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
    log::setSink([](log::Level, const std::string&) {});
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
}
