#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinfft::ovf {

enum class Component { X = 0, Y = 1, Z = 2 };

// Accepts "x", "y", "z" (any case).
Component parseComponent(std::string_view name);
char componentName(Component c);

struct OvfHeader {
    std::string title;
    std::string meshType = "rectangular";
    int valueDim = 0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;
    // Meters. Absent step keys read as 1.0, absent base keys as 0.0.
    double xstep = 1.0;
    double ystep = 1.0;
    double zstep = 1.0;
    double xbase = 0.0;
    double ybase = 0.0;
    double zbase = 0.0;
    std::optional<double> totalSimTime;

    std::size_t cellCount() const noexcept { return nx * ny * nz; }
    bool sameGrid(const OvfHeader& other) const noexcept {
        return nx == other.nx && ny == other.ny && nz == other.nz;
    }
};

// One vector component of a snapshot, x-fastest then y then z.
struct ScalarSlab {
    OvfHeader header;
    std::vector<double> values;
};

// Parses the header block of an OVF 2.0 text file. When dataOffset is given
// it receives the byte offset of the first line after "# Begin: Data Text".
OvfHeader parseHeader(std::string_view content, std::size_t* dataOffset = nullptr);

// Parses the header and keeps only the selected column of the data block.
ScalarSlab parseComponent(std::string_view content, Component component);

std::string readFile(const std::filesystem::path& path);

// Convenience wrappers; errors carry the path as context.
OvfHeader readHeader(const std::filesystem::path& path);
ScalarSlab readComponent(const std::filesystem::path& path, Component component);

}  // namespace spinfft::ovf
