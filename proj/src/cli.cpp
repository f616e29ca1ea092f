#include "spinfft/cli.hpp"

#include "spinfft/analysis.hpp"
#include "spinfft/error.hpp"
#include "spinfft/ingest.hpp"
#include "spinfft/log.hpp"
#include "spinfft/output.hpp"
#include "spinfft/scriptgen.hpp"
#include "spinfft/synth.hpp"
#include "spinfft/window.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#ifndef SPINFFT_VERSION
#define SPINFFT_VERSION "dev"
#endif

namespace spinfft::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class AnalysisKind { Fft, Spectrum, Dispersion };

const char* analysisName(AnalysisKind kind) {
    switch (kind) {
        case AnalysisKind::Fft: return "fft";
        case AnalysisKind::Spectrum: return "spectrum";
        case AnalysisKind::Dispersion: return "dispersion";
    }
    return "?";
}

struct AnalysisFlags {
    std::string dir;
    std::string pattern = "*.ovf";
    std::string component;
    std::size_t workers = 1;
    double dt = 0.0;
    std::string roi;
    std::string roiNm;
    std::string detrend = "none";
    std::size_t padTo = 0;
    std::string powerScale = "amplitude";
    std::string imageScale = "log";
    std::string window = "none";
    double attenuation = window::kDefaultAttenuationDb;
    std::string out = ".";
    CLI::Option* dtOption = nullptr;
    CLI::Option* padOption = nullptr;
};

struct SynthFlags {
    std::string grid;
    std::string cell = "1e-9,1e-9,1e-9";
    std::size_t frames = 1;
    double dt = 0.0;
    std::vector<std::string> waves;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct GenerateFlags {
    std::string spec;
    std::string out;
    bool force = false;
    bool dryRun = false;
    int precision = 0;
    CLI::Option* precisionOption = nullptr;
};

struct RerunFlags {
    std::string manifest;
    std::string dir;
    std::string out;
};

template <typename T>
std::vector<T> parseTriple(const std::string& text, const char* flag) {
    std::vector<T> values;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string field = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        T v{};
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
            throw Error(ErrorCode::InvalidArgument, std::string(flag) + " expects three comma-separated numbers");
        }
        values.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, std::string(flag) + " expects three comma-separated numbers");
    }
    return values;
}

analysis::Scale parseScale(const std::string& s) {
    if (s == "amplitude") return analysis::Scale::Amplitude;
    if (s == "power") return analysis::Scale::Power;
    return analysis::Scale::Db;
}

std::string valueColumn(analysis::Scale scale) {
    switch (scale) {
        case analysis::Scale::Amplitude: return "amplitude";
        case analysis::Scale::Power: return "power";
        case analysis::Scale::Db: return "level_db";
    }
    return "value";
}

json roiJson(const ingest::ResolvedRoi& r) {
    return json{{"t", {r.t0, r.t1}}, {"x", {r.x0, r.x1}}, {"y", {r.y0, r.y1}}, {"z", {r.z0, r.z1}}};
}

// Arguments worth replaying: everything except the output directory.
std::vector<std::string> replayableArgs(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) {
            continue;
        }
        kept.push_back(args[i]);
    }
    return kept;
}

double seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

void runAnalysis(AnalysisKind kind, const AnalysisFlags& flags, const std::vector<std::string>& args,
                 std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    // Flag syntax first, so malformed flags are usage errors even without data.
    ingest::IngestOptions options;
    options.component = ovf::parseComponent(flags.component);
    options.roi = ingest::parseRoi(flags.roi);

    const auto files = ingest::discoverFiles(flags.dir, flags.pattern);
    log::info("found " + std::to_string(files.size()) + " files in " + flags.dir);
    if (!flags.roiNm.empty()) {
        const ingest::Roi spatial = ingest::parseRoiNanometers(flags.roiNm, ovf::readHeader(files.front()));
        options.roi.x = spatial.x;
        options.roi.y = spatial.y;
        options.roi.z = spatial.z;
    }
    options.workers = std::max<std::size_t>(1, flags.workers);
    if (flags.dtOption != nullptr && flags.dtOption->count() > 0) {
        options.dtOverride = flags.dt;
    }
    const ingest::SpaceTimeMatrix m = ingest::ingest(files, options);
    log::info("ingested " + std::to_string(m.rows()) + " cells x " + std::to_string(m.cols()) +
              " snapshots with " + std::to_string(options.workers) + " workers in " +
              std::to_string(seconds(started)) + " s");

    analysis::Options aopts;
    aopts.detrend = flags.detrend == "mean" ? analysis::Detrend::Mean : analysis::Detrend::None;
    if (flags.padOption != nullptr && flags.padOption->count() > 0) {
        aopts.padTo = flags.padTo;
    }
    aopts.workers = options.workers;
    const analysis::Scale scale = parseScale(flags.powerScale);
    const output::ColorScale imageScale =
        (flags.imageScale == "log" && scale != analysis::Scale::Db) ? output::ColorScale::Log
                                                                     : output::ColorScale::Linear;

    const std::string name = analysisName(kind);
    const fs::path outDir = flags.out;
    const fs::path csvPath = outDir / (name + ".csv");
    const fs::path imagePath = outDir / (name + ".pgm");
    const fs::path metaPath = outDir / (name + ".manifest.json");
    bool wroteImage = false;

    switch (kind) {
        case AnalysisKind::Fft: {
            analysis::SpectrumResult r = analysis::fftSpectrum(m, aopts);
            analysis::applyScale(r.amplitude, scale);
            output::writeText(csvPath, output::seriesCsv("freq_hz", r.freqs, valueColumn(scale), r.amplitude));
            break;
        }
        case AnalysisKind::Spectrum: {
            analysis::SpatialSpectrum s = analysis::spatialSpectrum(m, aopts);
            analysis::applyScale(s.power.data(), scale);
            output::writeText(csvPath, output::gridCsv("x_m", s.xPositions, "freq_hz", s.freqs,
                                                       valueColumn(scale), s.power));
            // f runs up the image, x across.
            const auto raster = output::renderColormap(output::transpose(s.power), imageScale);
            output::writeText(imagePath, output::encodePgm(raster));
            wroteImage = true;
            break;
        }
        case AnalysisKind::Dispersion: {
            std::optional<Matrix> weights;
            if (flags.window == "chebyshev" && m.shape.sx >= 2 && m.cols() >= 2) {
                weights = window::window2d(window::chebyshev(m.cols(), flags.attenuation),
                                           window::chebyshev(m.shape.sx, flags.attenuation));
            }
            analysis::DispersionMap d = analysis::dispersion(m, weights, aopts);
            analysis::applyScale(d.magnitude.data(), scale);
            output::writeText(csvPath, output::gridCsv("freq_hz", d.fAxis, "k_rad_per_m", d.kAxis,
                                                       valueColumn(scale), d.magnitude));
            const auto raster = output::renderColormap(d.magnitude, imageScale);
            output::writeText(imagePath, output::encodePgm(raster));
            wroteImage = true;
            break;
        }
    }

    json manifest;
    manifest["tool"] = "spinfft";
    manifest["version"] = version();
    manifest["analysis"] = name;
    manifest["command"] = replayableArgs(args);
    manifest["input"] = {{"dir", flags.dir},
                         {"pattern", flags.pattern},
                         {"files", files.size()},
                         {"first", files.front().filename().string()},
                         {"last", files.back().filename().string()}};
    manifest["component"] = std::string(1, ovf::componentName(options.component));
    manifest["roi"] = roiJson(m.roi);
    manifest["grid"] = {m.header.nx, m.header.ny, m.header.nz};
    manifest["dt_s"] = m.dt;
    manifest["dt_source"] = options.dtOverride ? "flag" : "desc";
    manifest["dx_m"] = m.dx;
    manifest["workers"] = options.workers;
    manifest["detrend"] = flags.detrend;
    manifest["pad_to"] = aopts.padTo ? json(*aopts.padTo) : json(nullptr);
    manifest["power_scale"] = flags.powerScale;
    if (kind == AnalysisKind::Dispersion) {
        manifest["window"] = flags.window == "chebyshev"
                                 ? json{{"type", "chebyshev"}, {"attenuation_db", flags.attenuation}}
                                 : json{{"type", "none"}};
    }
    manifest["outputs"] = {{"csv", csvPath.filename().string()},
                           {"image", wroteImage ? json(imagePath.filename().string()) : json(nullptr)}};
    if (wroteImage) {
        manifest["image_scale"] = imageScale == output::ColorScale::Log ? "log" : "linear";
    }
    output::writeText(metaPath, manifest.dump(2) + "\n");

    out << csvPath.string() << '\n';
    if (wroteImage) {
        out << imagePath.string() << '\n';
    }
    out << metaPath.string() << '\n';
    log::info(name + " finished in " + std::to_string(seconds(started)) + " s");
}

void runSynth(const SynthFlags& flags, std::ostream& out) {
    synth::PlaneWaveSpec spec;
    const auto grid = parseTriple<std::size_t>(flags.grid, "--grid");
    const auto cell = parseTriple<double>(flags.cell, "--cell");
    for (std::size_t i = 0; i < 3; ++i) {
        spec.grid[i] = grid[i];
        spec.cell[i] = cell[i];
    }
    spec.frames = flags.frames;
    spec.dt = flags.dt;
    for (const auto& w : flags.waves) {
        spec.waves.push_back(synth::parseWave(w));
    }
    spec.noiseSigma = flags.noise;
    spec.seed = flags.seed;
    synth::validate(spec);
    const auto files = synth::writeDataset(spec, flags.out);
    out << "wrote " << files.size() << " files to " << flags.out << '\n';
}

void runGenerate(const GenerateFlags& flags, std::ostream& out) {
    scriptgen::GenerateOptions options;
    options.force = flags.force;
    options.dryRun = flags.dryRun;
    if (flags.precisionOption != nullptr && flags.precisionOption->count() > 0) {
        options.precision = flags.precision;
    }
    const auto names = scriptgen::generate(flags.spec, flags.out, options);
    if (flags.dryRun) {
        for (const auto& n : names) {
            out << n << '\n';
        }
    } else {
        out << "wrote " << names.size() << " scripts to " << flags.out << '\n';
    }
}

std::vector<std::string> rerunArgs(const RerunFlags& flags) {
    std::ifstream in(flags.manifest);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open manifest " + flags.manifest);
    }
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, flags.manifest + ": " + e.what());
    }
    if (!manifest.contains("command") || !manifest["command"].is_array()) {
        throw Error(ErrorCode::InvalidArgument, flags.manifest + " has no command");
    }
    std::vector<std::string> args = manifest["command"].get<std::vector<std::string>>();
    if (!flags.dir.empty()) {
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] == "--dir") {
                args[i + 1] = flags.dir;
            }
        }
    }
    args.push_back("--out");
    args.push_back(flags.out);
    return args;
}

void addAnalysis(CLI::App& app, AnalysisKind kind, AnalysisFlags& f, const char* description) {
    CLI::App* sub = app.add_subcommand(analysisName(kind), description);
    sub->add_option("--dir", f.dir, "Directory of OVF 2.0 text snapshots")->required();
    sub->add_option("--pattern", f.pattern, "Glob for snapshot files")->capture_default_str();
    sub->add_option("--component", f.component, "Magnetization component")
        ->required()
        ->check(CLI::IsMember({"x", "y", "z", "X", "Y", "Z"}));
    sub->add_option("--workers", f.workers, "Parallel readers (env " + std::string(kWorkersEnv) + ")")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    f.dtOption = sub->add_option("--dt", f.dt, "Sampling interval in seconds (overrides Desc times)")
                     ->check(CLI::PositiveNumber);
    sub->add_option("--roi", f.roi, "tmin:tmax,xmin:xmax,ymin:ymax,zmin:zmax (half-open indices)");
    sub->add_option("--roi-nm", f.roiNm, "xmin:xmax,ymin:ymax,zmin:zmax in nanometers");
    sub->add_option("--detrend", f.detrend, "Per-row mean removal")
        ->check(CLI::IsMember({"none", "mean"}))
        ->capture_default_str();
    f.padOption = sub->add_option("--pad-to", f.padTo, "Zero-pad the time axis to N samples")
                      ->check(CLI::PositiveNumber);
    sub->add_option("--power-scale", f.powerScale, "Output value scale")
        ->check(CLI::IsMember({"amplitude", "power", "db"}))
        ->capture_default_str();
    if (kind != AnalysisKind::Fft) {
        sub->add_option("--image-scale", f.imageScale, "Raster gray scale")
            ->check(CLI::IsMember({"linear", "log"}))
            ->capture_default_str();
    }
    if (kind == AnalysisKind::Dispersion) {
        sub->add_option("--window", f.window, "2D window applied before the transform")
            ->check(CLI::IsMember({"none", "chebyshev"}))
            ->capture_default_str();
        sub->add_option("--attenuation", f.attenuation, "Chebyshev sidelobe attenuation in dB")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int dispatch(CLI::App& app, const std::vector<std::string>& args, AnalysisFlags (&analysisFlags)[3],
             const SynthFlags& synthFlags, const GenerateFlags& generateFlags, const RerunFlags& rerunFlags,
             std::ostream& out, std::ostream& err, int depth) {
    const AnalysisKind kinds[3] = {AnalysisKind::Fft, AnalysisKind::Spectrum, AnalysisKind::Dispersion};
    for (int i = 0; i < 3; ++i) {
        if (app.got_subcommand(analysisName(kinds[i]))) {
            runAnalysis(kinds[i], analysisFlags[i], args, out);
            return kExitOk;
        }
    }
    if (app.got_subcommand("synth")) {
        runSynth(synthFlags, out);
        return kExitOk;
    }
    if (app.got_subcommand("generate")) {
        runGenerate(generateFlags, out);
        return kExitOk;
    }
    if (app.got_subcommand("rerun")) {
        if (depth > 0) {
            throw Error(ErrorCode::InvalidArgument, "a manifest cannot replay another rerun");
        }
        return execute(rerunArgs(rerunFlags), out, err, depth + 1);
    }
    err << app.help();
    return kExitUsage;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
    CLI::App app{"Batch MuMax3 script generation and Fourier analysis of OVF 2.0 snapshots", "spinfft"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress progress lines");

    AnalysisFlags analysisFlags[3];
    for (auto& f : analysisFlags) {
        f.workers = defaultWorkers();
    }
    addAnalysis(app, AnalysisKind::Fft, analysisFlags[0], "Averaged frequency spectrum");
    addAnalysis(app, AnalysisKind::Spectrum, analysisFlags[1], "Spatially resolved spectrum along x");
    addAnalysis(app, AnalysisKind::Dispersion, analysisFlags[2], "Spin-wave dispersion map (2D FFT)");

    SynthFlags synthFlags;
    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic plane-wave OVF dataset");
    synth->add_option("--grid", synthFlags.grid, "NX,NY,NZ")->required();
    synth->add_option("--cell", synthFlags.cell, "CX,CY,CZ in meters")->capture_default_str();
    synth->add_option("--frames", synthFlags.frames, "Number of snapshots")->required()->check(CLI::PositiveNumber);
    synth->add_option("--dt", synthFlags.dt, "Sampling interval in seconds")->required()->check(CLI::PositiveNumber);
    synth->add_option("--wave", synthFlags.waves, "A,F0,K0,PHASE,COMP (repeatable)");
    synth->add_option("--noise", synthFlags.noise, "Gaussian noise sigma")->capture_default_str();
    synth->add_option("--seed", synthFlags.seed, "Noise seed")->capture_default_str();
    synth->add_option("--out", synthFlags.out, "Output directory")->required();

    GenerateFlags generateFlags;
    CLI::App* gen = app.add_subcommand("generate", "Expand a sweep spec into MuMax3 scripts");
    gen->add_option("--spec", generateFlags.spec, "Sweep spec file")->required()->check(CLI::ExistingFile);
    gen->add_option("--out", generateFlags.out, "Output directory")->required();
    gen->add_flag("--force", generateFlags.force, "Overwrite existing scripts");
    gen->add_flag("--dry-run", generateFlags.dryRun, "Print filenames only");
    generateFlags.precisionOption =
        gen->add_option("--precision", generateFlags.precision, "Digits after the point for amp and f");

    RerunFlags rerunFlags;
    CLI::App* rerun = app.add_subcommand("rerun", "Regenerate an analysis from its manifest");
    rerun->add_option("--manifest", rerunFlags.manifest, "Manifest JSON")->required();
    rerun->add_option("--dir", rerunFlags.dir, "Input directory (default: the recorded one)");
    rerun->add_option("--out", rerunFlags.out, "Output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    log::Sink previous;
    const bool swapped = quiet;
    if (quiet) {
        previous = log::setSink([](log::Level level, const std::string& message) {
            if (level == log::Level::Warning) {
                std::cerr << "[spinfft] warning: " << message << '\n';
            }
        });
    }
    struct Restore {
        bool active;
        log::Sink& sink;
        ~Restore() {
            if (active) log::setSink(std::move(sink));
        }
    } restore{swapped, previous};

    try {
        return dispatch(app, args, analysisFlags, synthFlags, generateFlags, rerunFlags, out, err, depth);
    } catch (const Error& e) {
        err << "spinfft: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        err << "spinfft: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace

std::string version() { return SPINFFT_VERSION; }

std::size_t defaultWorkers() {
    if (const char* env = std::getenv(kWorkersEnv)) {
        std::size_t n = 0;
        const std::string_view text(env);
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec == std::errc() && ptr == text.data() + text.size() && n > 0) {
            return n;
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    return execute(args, out, err, 0);
}

}  // namespace spinfft::cli
