#pragma once

#include "spinfft/ingest.hpp"
#include "spinfft/log.hpp"
#include "spinfft/matrix.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace spinfft::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "spinfft") {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void writeFile(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Minimal MuMax3-style OVF 2.0 text file. `records` are "a b c" lines.
inline std::string ovfText(std::size_t nx, std::size_t ny, std::size_t nz, const std::vector<std::string>& records,
                           const std::string& timeLine = "") {
    std::ostringstream s;
    s << "# OOMMF OVF 2.0\n# Segment count: 1\n# Begin: Segment\n# Begin: Header\n# Title: m\n"
      << "# meshtype: rectangular\n# meshunit: m\n# valuedim: 3\n";
    if (!timeLine.empty()) {
        s << timeLine << "\n";
    }
    s << "# xbase: 5e-10\n# ybase: 5e-10\n# zbase: 5e-09\n"
      << "# xnodes: " << nx << "\n# ynodes: " << ny << "\n# znodes: " << nz << "\n"
      << "# xstepsize: 1e-09\n# ystepsize: 1e-09\n# zstepsize: 1e-08\n"
      << "# End: Header\n# Begin: Data Text\n";
    for (const auto& r : records) {
        s << r << "\n";
    }
    s << "# End: Data Text\n# End: Segment\n";
    return s.str();
}

inline std::string timeDesc(double t) {
    std::ostringstream s;
    s.precision(17);
    s << "# Desc: Total simulation time:  " << t << "  s";
    return s.str();
}

// Captures log output for the lifetime of the object.
class LogCapture {
public:
    LogCapture() {
        previous_ = log::setSink([this](log::Level level, const std::string& msg) {
            (level == log::Level::Warning ? warnings : infos).push_back(msg);
        });
    }
    ~LogCapture() { log::setSink(std::move(previous_)); }

    std::vector<std::string> warnings;
    std::vector<std::string> infos;

private:
    log::Sink previous_;
};

// SpaceTimeMatrix around an in-memory array for analysis tests.
inline ingest::SpaceTimeMatrix makeMatrix(Matrix data, std::size_t sx, std::size_t sy, std::size_t sz, double dt,
                                          double dx) {
    ingest::SpaceTimeMatrix m;
    m.data = std::move(data);
    m.dt = dt;
    m.dx = dx;
    m.xOrigin = 0.5 * dx;
    m.shape = {sx, sy, sz};
    return m;
}

}  // namespace spinfft::testing
