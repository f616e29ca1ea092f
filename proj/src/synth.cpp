#include "spinfft/synth.hpp"

#include "spinfft/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace spinfft::synth {
namespace fs = std::filesystem;

namespace {

void appendNumber(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, ptr);
}

void headerLine(std::string& out, std::string_view key, double v) {
    out += "# ";
    out += key;
    out += ": ";
    appendNumber(out, v);
    out += '\n';
}

void headerLine(std::string& out, std::string_view key, std::size_t v) {
    out += "# ";
    out += key;
    out += ": ";
    out += std::to_string(v);
    out += '\n';
}

double parseNumber(std::string_view field, std::string_view whole) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "bad number '" + std::string(field) + "' in wave '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

PlaneWave parseWave(std::string_view text) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(',', start);
        fields.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (fields.size() != 5) {
        throw Error(ErrorCode::InvalidArgument, "wave must be A,F0,K0,PHASE,COMP (got '" + std::string(text) + "')");
    }
    PlaneWave w;
    w.amplitude = parseNumber(fields[0], text);
    w.f0 = parseNumber(fields[1], text);
    w.k0 = parseNumber(fields[2], text);
    w.phase = parseNumber(fields[3], text);
    w.component = ovf::parseComponent(fields[4]);
    return w;
}

void validate(const PlaneWaveSpec& spec) {
    for (std::size_t n : spec.grid) {
        if (n < 1) throw Error(ErrorCode::InvalidArgument, "grid counts must be >= 1");
    }
    for (double c : spec.cell) {
        if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "cell sizes must be positive");
    }
    if (spec.frames < 1) throw Error(ErrorCode::InvalidArgument, "frames must be >= 1");
    if (!(spec.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (spec.noiseSigma < 0.0) throw Error(ErrorCode::InvalidArgument, "noise sigma must be >= 0");
    const double nyquist = 1.0 / (2.0 * spec.dt);
    const double kmax = std::numbers::pi / spec.cell[0];
    for (const PlaneWave& w : spec.waves) {
        if (!(std::abs(w.f0) < nyquist)) {
            throw Error(ErrorCode::InvalidArgument, "wave frequency must be below Nyquist 1/(2 dt)");
        }
        if (!(std::abs(w.k0) < kmax)) {
            throw Error(ErrorCode::InvalidArgument, "|k0| must be below pi / cx");
        }
    }
}

double signalAt(const PlaneWaveSpec& spec, ovf::Component component, std::size_t i, std::size_t frame) {
    const double t = static_cast<double>(frame) * spec.dt;
    const double x = 0.5 * spec.cell[0] + static_cast<double>(i) * spec.cell[0];
    double v = 0.0;
    for (const PlaneWave& w : spec.waves) {
        if (w.component == component) {
            v += w.amplitude * std::cos(2.0 * std::numbers::pi * w.f0 * t - w.k0 * x + w.phase);
        }
    }
    return v;
}

std::string frameFileName(std::size_t frame) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "m%06zu.ovf", frame);
    return buf;
}

std::string renderFrame(const PlaneWaveSpec& spec, std::size_t frame) {
    const auto [nx, ny, nz] = spec.grid;
    const auto [cx, cy, cz] = spec.cell;

    // Noise lands on every component that carries a wave (z when none do).
    bool active[3] = {false, false, false};
    for (const PlaneWave& w : spec.waves) {
        active[static_cast<int>(w.component)] = true;
    }
    if (spec.waves.empty()) {
        active[2] = true;
    }

    std::string out;
    out.reserve(512 + nx * ny * nz * 32);
    out += "# OOMMF OVF 2.0\n# Segment count: 1\n# Begin: Segment\n# Begin: Header\n# Title: m\n";
    out += "# meshtype: rectangular\n# meshunit: m\n";
    headerLine(out, "xmin", 0.0);
    headerLine(out, "ymin", 0.0);
    headerLine(out, "zmin", 0.0);
    headerLine(out, "xmax", static_cast<double>(nx) * cx);
    headerLine(out, "ymax", static_cast<double>(ny) * cy);
    headerLine(out, "zmax", static_cast<double>(nz) * cz);
    out += "# valuedim: 3\n# valuelabels: m_x m_y m_z\n# valueunits: 1 1 1\n";
    out += "# Desc: Total simulation time:  ";
    appendNumber(out, static_cast<double>(frame) * spec.dt);
    out += "  s\n";
    headerLine(out, "xbase", 0.5 * cx);
    headerLine(out, "ybase", 0.5 * cy);
    headerLine(out, "zbase", 0.5 * cz);
    headerLine(out, "xnodes", nx);
    headerLine(out, "ynodes", ny);
    headerLine(out, "znodes", nz);
    headerLine(out, "xstepsize", cx);
    headerLine(out, "ystepsize", cy);
    headerLine(out, "zstepsize", cz);
    out += "# End: Header\n# Begin: Data Text\n";

    // The signal varies only along x, so precompute one profile per component.
    std::vector<double> profile[3];
    for (int c = 0; c < 3; ++c) {
        profile[c].resize(nx);
        for (std::size_t i = 0; i < nx; ++i) {
            profile[c][i] = signalAt(spec, static_cast<ovf::Component>(c), i, frame);
        }
    }

    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(frame)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, spec.noiseSigma > 0.0 ? spec.noiseSigma : 1.0);
    const bool noisy = spec.noiseSigma > 0.0;

    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                for (int c = 0; c < 3; ++c) {
                    double v = profile[c][i];
                    if (noisy && active[c]) {
                        v += noise(rng);
                    }
                    appendNumber(out, v);
                    out += c < 2 ? ' ' : '\n';
                }
            }
        }
    }
    out += "# End: Data Text\n# End: Segment\n";
    return out;
}

std::vector<fs::path> writeDataset(const PlaneWaveSpec& spec, const fs::path& outDir) {
    validate(spec);
    std::error_code ec;
    fs::create_directories(outDir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create " + outDir.string() + ": " + ec.message());
    }
    std::vector<fs::path> files;
    files.reserve(spec.frames);
    for (std::size_t n = 0; n < spec.frames; ++n) {
        const fs::path path = outDir / frameFileName(n);
        const std::string text = renderFrame(spec, n);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
            throw Error(ErrorCode::Io, "cannot write " + path.string());
        }
        files.push_back(path);
    }
    return files;
}

}  // namespace spinfft::synth
