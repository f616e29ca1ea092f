#pragma once

#include "spinfft/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spinfft::output {

// Shortest decimal text that parses back to exactly `v`.
std::string formatDouble(double v);

// Two-column table: "<xName>,<yName>" then one row per sample.
std::string seriesCsv(std::string_view xName, std::span<const double> x, std::string_view yName,
                      std::span<const double> y);

// Long-format table of a matrix: one row per cell with its two axis values.
// rowAxis has values.rows() entries, colAxis values.cols().
std::string gridCsv(std::string_view rowName, std::span<const double> rowAxis, std::string_view colName,
                    std::span<const double> colAxis, std::string_view valueName, const Matrix& values);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

CsvTable parseCsv(std::string_view text);

enum class ColorScale { Linear, Log };

// 8-bit grayscale image; pixels are stored top line first.
struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    // Pixel for matrix cell (row, col); matrix row 0 is the bottom line.
    std::uint8_t atMatrix(std::size_t row, std::size_t col) const {
        return pixels[(height - 1 - row) * width + col];
    }
};

// Min-max scaling to 0..255 after an optional log10(1 + v). A constant
// matrix renders all black.
Raster renderColormap(const Matrix& values, ColorScale scale);

// Binary PGM (P5).
std::string encodePgm(const Raster& raster);

Matrix transpose(const Matrix& m);

// Writes through a temporary file and a rename.
void writeText(const std::filesystem::path& path, std::string_view content);

}  // namespace spinfft::output
