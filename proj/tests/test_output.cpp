#include "spinfft/output.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

using namespace spinfft;

namespace {

Matrix fromRows(std::vector<std::vector<double>> rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

}  // namespace

TEST(Colormap, LinearMinMax) {
    const auto img = output::renderColormap(fromRows({{0, 1}, {1, 0}}), output::ColorScale::Linear);
    ASSERT_EQ(img.width, 2u);
    ASSERT_EQ(img.height, 2u);
    EXPECT_EQ(img.atMatrix(0, 0), 0);
    EXPECT_EQ(img.atMatrix(0, 1), 255);
    EXPECT_EQ(img.atMatrix(1, 0), 255);
    EXPECT_EQ(img.atMatrix(1, 1), 0);
}

TEST(Colormap, RowZeroIsBottomLine) {
    const auto img = output::renderColormap(fromRows({{0, 0, 0}, {10, 10, 10}}), output::ColorScale::Linear);
    EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{255, 255, 255, 0, 0, 0}));
}

TEST(Colormap, ConstantRendersBlack) {
    for (auto scale : {output::ColorScale::Linear, output::ColorScale::Log}) {
        const auto img = output::renderColormap(Matrix(3, 4, 7.5), scale);
        for (auto p : img.pixels) EXPECT_EQ(p, 0);
    }
}

TEST(Colormap, LogShowsMoreLevelsOverManyDecades) {
    Matrix m(1, 61);
    for (std::size_t i = 0; i < 61; ++i) m(0, i) = std::pow(10.0, static_cast<double>(i) / 10.0);
    const auto lin = output::renderColormap(m, output::ColorScale::Linear);
    const auto log = output::renderColormap(m, output::ColorScale::Log);
    const std::set<std::uint8_t> a(lin.pixels.begin(), lin.pixels.end());
    const std::set<std::uint8_t> b(log.pixels.begin(), log.pixels.end());
    EXPECT_GT(b.size(), a.size());
}

TEST(Colormap, LogTransformValues) {
    // log10(1+v): 0 -> 0, 9 -> 1, 99 -> 2.
    const auto img = output::renderColormap(fromRows({{0, 9, 99}}), output::ColorScale::Log);
    EXPECT_EQ(img.atMatrix(0, 0), 0);
    EXPECT_EQ(img.atMatrix(0, 1), 128);
    EXPECT_EQ(img.atMatrix(0, 2), 255);
}

TEST(Pgm, HeaderAndPayload) {
    const auto img = output::renderColormap(fromRows({{0, 1, 2}}), output::ColorScale::Linear);
    const std::string pgm = output::encodePgm(img);
    const std::string header = "P5\n3 1\n255\n";
    ASSERT_EQ(pgm.substr(0, header.size()), header);
    ASSERT_EQ(pgm.size(), header.size() + 3);
    EXPECT_EQ(static_cast<unsigned char>(pgm[header.size() + 2]), 255);
}

TEST(Csv, SeriesRoundTripIsExact) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e12, 1e12);
    std::vector<double> x, y;
    for (int i = 0; i < 200; ++i) {
        x.push_back(u(rng));
        y.push_back(u(rng) * 1e-30);
    }
    x.push_back(0.0);
    y.push_back(std::numeric_limits<double>::denorm_min());
    const auto table = output::parseCsv(output::seriesCsv("freq_hz", x, "amplitude", y));
    EXPECT_EQ(table.header, (std::vector<std::string>{"freq_hz", "amplitude"}));
    EXPECT_EQ(table.columns[0], x);
    EXPECT_EQ(table.columns[1], y);
}

TEST(Csv, GridLongFormat) {
    const Matrix m = fromRows({{1, 2, 3}, {4, 5, 6}});
    const std::vector<double> rows{10, 20};
    const std::vector<double> cols{0.1, 0.2, 0.3};
    const std::string text = output::gridCsv("f_hz", rows, "k_rad_per_m", cols, "amplitude", m);
    EXPECT_EQ(text.substr(0, text.find('\n')), "f_hz,k_rad_per_m,amplitude");
    const auto t = output::parseCsv(text);
    ASSERT_EQ(t.columns.size(), 3u);
    EXPECT_EQ(t.columns[0], (std::vector<double>{10, 10, 10, 20, 20, 20}));
    EXPECT_EQ(t.columns[1], (std::vector<double>{0.1, 0.2, 0.3, 0.1, 0.2, 0.3}));
    EXPECT_EQ(t.columns[2], (std::vector<double>{1, 2, 3, 4, 5, 6}));
}

TEST(Csv, FormatDoubleShortest) {
    EXPECT_EQ(output::formatDouble(0.1), "0.1");
    EXPECT_EQ(output::formatDouble(1e11), "1e+11");
    EXPECT_EQ(std::stod(output::formatDouble(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Transpose, SwapsAxes) {
    const Matrix t = output::transpose(fromRows({{1, 2, 3}, {4, 5, 6}}));
    EXPECT_EQ(t.rows(), 3u);
    EXPECT_EQ(t.data(), (std::vector<double>{1, 4, 2, 5, 3, 6}));
}

TEST(WriteText, CreatesParentsAndReplaces) {
    spinfft::testing::TempDir dir;
    const auto path = dir / "a/b/out.csv";
    output::writeText(path, "one");
    output::writeText(path, "two");
    EXPECT_EQ(spinfft::testing::slurp(path), "two");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(path.parent_path())) ++entries;
    EXPECT_EQ(entries, 1u);
}
