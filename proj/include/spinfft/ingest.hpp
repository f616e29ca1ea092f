#pragma once

#include "spinfft/matrix.hpp"
#include "spinfft/ovf.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinfft::ingest {

// Half-open index range; an absent bound means the full extent on that side.
struct IndexRange {
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
};

// Region of interest in snapshot and cell indices.
struct Roi {
    IndexRange t;
    IndexRange x;
    IndexRange y;
    IndexRange z;
};

// Parses "tmin:tmax,xmin:xmax,ymin:ymax,zmin:zmax"; empty fields are
// unbounded and trailing groups may be omitted.
Roi parseRoi(std::string_view text);

// Parses "xmin:xmax,ymin:ymax,zmin:zmax" in nanometers and converts each
// bound to a cell index by flooring against the cell edges of `header`.
Roi parseRoiNanometers(std::string_view text, const ovf::OvfHeader& header);

struct ResolvedRoi {
    std::size_t t0 = 0, t1 = 0;
    std::size_t x0 = 0, x1 = 0;
    std::size_t y0 = 0, y1 = 0;
    std::size_t z0 = 0, z1 = 0;

    std::size_t sx() const noexcept { return x1 - x0; }
    std::size_t sy() const noexcept { return y1 - y0; }
    std::size_t sz() const noexcept { return z1 - z0; }
    std::size_t st() const noexcept { return t1 - t0; }
};

// Clamps to the dataset extent; throws EmptyRoi when any axis is empty.
ResolvedRoi resolveRoi(const Roi& roi, const ovf::OvfHeader& header, std::size_t frameCount);

struct SelectionShape {
    std::size_t sx = 0;
    std::size_t sy = 0;
    std::size_t sz = 0;
};

// Rows are cells of the ROI (x fastest, then y, then z); column c is
// snapshot roi.t0 + c.
struct SpaceTimeMatrix {
    Matrix data;
    double dt = 0.0;
    double dx = 0.0;
    double xOrigin = 0.0;  // center of the first selected x cell, meters
    SelectionShape shape;
    ovf::Component component = ovf::Component::X;
    ovf::OvfHeader header;  // grid of the first file
    ResolvedRoi roi;

    std::size_t rows() const noexcept { return data.rows(); }
    std::size_t cols() const noexcept { return data.cols(); }
};

// Files in `directory` whose name matches the glob `pattern`, ordered by the
// trailing integer of the stem (ties and unnumbered names lexicographic,
// unnumbered names last).
std::vector<std::filesystem::path> discoverFiles(const std::filesystem::path& directory,
                                                 const std::string& pattern = "*.ovf");

struct IngestOptions {
    ovf::Component component = ovf::Component::X;
    Roi roi;
    std::size_t workers = 1;
    std::optional<double> dtOverride;
    // Called once per file read, from the worker that read it.
    std::function<void(std::size_t worker, std::size_t fileIndex)> onFileRead;
};

// Contiguous [begin, end) chunks of `count` items over `workers` workers.
std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t count, std::size_t workers);

// OpenMP-parallel reader. Output is bit-identical for any worker count.
SpaceTimeMatrix ingest(const std::vector<std::filesystem::path>& files, const IngestOptions& options);

// Single-threaded reference implementation of ingest().
SpaceTimeMatrix ingestSerial(const std::vector<std::filesystem::path>& files, const IngestOptions& options);

}  // namespace spinfft::ingest
