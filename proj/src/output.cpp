#include "spinfft/output.hpp"

#include "spinfft/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace spinfft::output {
namespace fs = std::filesystem;

std::string formatDouble(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string seriesCsv(std::string_view xName, std::span<const double> x, std::string_view yName,
                      std::span<const double> y) {
    std::string out;
    out.reserve(32 * x.size() + 64);
    out += xName;
    out += ',';
    out += yName;
    out += '\n';
    for (std::size_t i = 0; i < x.size(); ++i) {
        out += formatDouble(x[i]);
        out += ',';
        out += formatDouble(y[i]);
        out += '\n';
    }
    return out;
}

std::string gridCsv(std::string_view rowName, std::span<const double> rowAxis, std::string_view colName,
                    std::span<const double> colAxis, std::string_view valueName, const Matrix& values) {
    std::string out;
    out.reserve(48 * values.data().size() + 64);
    out += rowName;
    out += ',';
    out += colName;
    out += ',';
    out += valueName;
    out += '\n';
    for (std::size_t r = 0; r < values.rows(); ++r) {
        const std::string rowValue = formatDouble(rowAxis[r]);
        for (std::size_t c = 0; c < values.cols(); ++c) {
            out += rowValue;
            out += ',';
            out += formatDouble(colAxis[c]);
            out += ',';
            out += formatDouble(values(r, c));
            out += '\n';
        }
    }
    return out;
}

CsvTable parseCsv(std::string_view text) {
    CsvTable table;
    std::size_t pos = 0;
    std::size_t lineNo = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(f);
            table.columns.resize(fields.size());
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(lineNo) + " has " +
                                                        std::to_string(fields.size()) + " fields");
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
            if (ec != std::errc() || ptr != fields[i].data() + fields[i].size()) {
                throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(lineNo) + " is not numeric");
            }
            table.columns[i].push_back(v);
        }
    }
    return table;
}

Raster renderColormap(const Matrix& values, ColorScale scale) {
    Raster raster;
    raster.width = values.cols();
    raster.height = values.rows();
    raster.pixels.assign(raster.width * raster.height, 0);
    if (values.empty()) {
        return raster;
    }

    std::vector<double> v(values.data());
    if (scale == ColorScale::Log) {
        for (double& x : v) {
            x = std::log10(1.0 + std::max(0.0, x));
        }
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double min = *lo;
    const double span = *hi - *lo;
    if (!(span > 0.0)) {
        return raster;
    }
    for (std::size_t r = 0; r < values.rows(); ++r) {
        const std::size_t line = raster.height - 1 - r;
        for (std::size_t c = 0; c < values.cols(); ++c) {
            const double level = std::round(255.0 * (v[r * values.cols() + c] - min) / span);
            raster.pixels[line * raster.width + c] = static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
        }
    }
    return raster;
}

std::string encodePgm(const Raster& raster) {
    std::string out = "P5\n" + std::to_string(raster.width) + " " + std::to_string(raster.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(raster.pixels.data()), raster.pixels.size());
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            t(c, r) = m(r, c);
        }
    }
    return t;
}

void writeText(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size()))) {
            throw Error(ErrorCode::Io, "cannot write " + temp.string());
        }
    }
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot rename to " + path.string() + ": " + ec.message());
    }
}

}  // namespace spinfft::output
