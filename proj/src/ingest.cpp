#include "spinfft/ingest.hpp"

#include "spinfft/error.hpp"
#include "spinfft/log.hpp"

#include <fnmatch.h>
#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>

namespace spinfft::ingest {
namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

template <typename T>
std::optional<T> parseBound(std::string_view field, std::string_view whole) {
    field = trim(field);
    if (field.empty()) {
        return std::nullopt;
    }
    T value{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "bad ROI bound '" + std::string(field) + "' in '" + std::string(whole) + "'");
    }
    return value;
}

// Splits "lo:hi" (either side may be empty; an empty group is fully unbounded).
std::pair<std::string_view, std::string_view> splitGroup(std::string_view group, std::string_view whole) {
    group = trim(group);
    if (group.empty()) {
        return {{}, {}};
    }
    const std::size_t colon = group.find(':');
    if (colon == std::string_view::npos || group.find(':', colon + 1) != std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument,
                    "ROI group '" + std::string(group) + "' must be lo:hi in '" + std::string(whole) + "'");
    }
    return {group.substr(0, colon), group.substr(colon + 1)};
}

std::string gridString(const ovf::OvfHeader& h) {
    return std::to_string(h.nx) + "x" + std::to_string(h.ny) + "x" + std::to_string(h.nz);
}

// Compares digit strings by numeric value without overflow.
int compareDigits(std::string_view a, std::string_view b) {
    while (a.size() > 1 && a.front() == '0') a.remove_prefix(1);
    while (b.size() > 1 && b.front() == '0') b.remove_prefix(1);
    if (a.size() != b.size()) {
        return a.size() < b.size() ? -1 : 1;
    }
    const int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string_view trailingDigits(std::string_view stem) {
    std::size_t i = stem.size();
    while (i > 0 && stem[i - 1] >= '0' && stem[i - 1] <= '9') {
        --i;
    }
    return stem.substr(i);
}

struct Plan {
    ovf::OvfHeader header;
    ResolvedRoi roi;
    double dt = 0.0;
};

std::optional<double> simTime(const fs::path& path, const ovf::OvfHeader* known) {
    if (known != nullptr) {
        return known->totalSimTime;
    }
    return ovf::readHeader(path).totalSimTime;
}

Plan makePlan(const std::vector<fs::path>& files, const IngestOptions& options) {
    if (files.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no input files");
    }
    Plan plan;
    plan.header = ovf::readHeader(files.front());
    plan.roi = resolveRoi(options.roi, plan.header, files.size());

    if (options.dtOverride) {
        if (!(*options.dtOverride > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "--dt must be positive");
        }
        plan.dt = *options.dtOverride;
        return plan;
    }
    if (files.size() < 2) {
        throw Error(ErrorCode::NoTimeBase, "a single snapshot has no sampling interval; pass --dt");
    }
    const auto t0 = simTime(files[0], &plan.header);
    const auto t1 = simTime(files[1], nullptr);
    if (!t0 || !t1) {
        throw Error(ErrorCode::NoTimeBase,
                    "no 'Total simulation time' in " + (t0 ? files[1] : files[0]).string() + "; pass --dt");
    }
    plan.dt = *t1 - *t0;
    if (!(plan.dt > 0.0)) {
        throw Error(ErrorCode::NoTimeBase, "snapshot times are not increasing; pass --dt");
    }
    return plan;
}

SpaceTimeMatrix allocate(const Plan& plan, const IngestOptions& options) {
    SpaceTimeMatrix m;
    const ResolvedRoi& r = plan.roi;
    m.data = Matrix(r.sx() * r.sy() * r.sz(), r.st());
    m.dt = plan.dt;
    m.dx = plan.header.xstep;
    m.xOrigin = plan.header.xbase + static_cast<double>(r.x0) * plan.header.xstep;
    m.shape = {r.sx(), r.sy(), r.sz()};
    m.component = options.component;
    m.header = plan.header;
    m.roi = r;
    return m;
}

// Reads one file into column `col`. Returns the file's simulation time.
std::optional<double> readColumn(const fs::path& path, std::size_t col, const Plan& plan,
                                 const IngestOptions& options, Matrix& out) {
    const ovf::ScalarSlab slab = ovf::readComponent(path, options.component);
    if (!slab.header.sameGrid(plan.header)) {
        throw Error(ErrorCode::GridMismatch, path.string() + ": expected grid " + gridString(plan.header) +
                                                 ", got " + gridString(slab.header));
    }
    const ResolvedRoi& r = plan.roi;
    const std::size_t nx = plan.header.nx;
    const std::size_t ny = plan.header.ny;
    std::size_t row = 0;
    for (std::size_t z = r.z0; z < r.z1; ++z) {
        for (std::size_t y = r.y0; y < r.y1; ++y) {
            const double* src = slab.values.data() + (z * ny + y) * nx;
            for (std::size_t x = r.x0; x < r.x1; ++x) {
                out(row++, col) = src[x];
            }
        }
    }
    return slab.header.totalSimTime;
}

void checkSampling(const std::vector<std::optional<double>>& times, double dt, bool overridden) {
    if (overridden) {
        return;
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!times[i] || !times[i - 1]) {
            continue;
        }
        const double gap = *times[i] - *times[i - 1];
        if (std::abs(gap - dt) > 0.01 * dt) {
            std::ostringstream msg;
            msg << "uneven sampling: gap " << gap << " s between columns " << i - 1 << " and " << i
                << " differs from dt = " << dt << " s by more than 1%";
            log::warn(msg.str());
            return;
        }
    }
}

}  // namespace

Roi parseRoi(std::string_view text) {
    Roi roi;
    if (trim(text).empty()) {
        return roi;
    }
    const auto groups = split(text, ',');
    if (groups.size() > 4) {
        throw Error(ErrorCode::InvalidArgument, "ROI has more than 4 groups: '" + std::string(text) + "'");
    }
    IndexRange* targets[4] = {&roi.t, &roi.x, &roi.y, &roi.z};
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto [lo, hi] = splitGroup(groups[i], text);
        targets[i]->lo = parseBound<std::size_t>(lo, text);
        targets[i]->hi = parseBound<std::size_t>(hi, text);
    }
    return roi;
}

Roi parseRoiNanometers(std::string_view text, const ovf::OvfHeader& header) {
    Roi roi;
    if (trim(text).empty()) {
        return roi;
    }
    const auto groups = split(text, ',');
    if (groups.size() > 3) {
        throw Error(ErrorCode::InvalidArgument, "nanometer ROI has more than 3 groups: '" + std::string(text) + "'");
    }
    const double steps[3] = {header.xstep, header.ystep, header.zstep};
    const double bases[3] = {header.xbase, header.ybase, header.zbase};
    IndexRange* targets[3] = {&roi.x, &roi.y, &roi.z};

    auto toIndex = [&](std::optional<double> nm, int axis) -> std::optional<std::size_t> {
        if (!nm) {
            return std::nullopt;
        }
        const double edge = bases[axis] - 0.5 * steps[axis];
        const double q = std::floor((*nm * 1e-9 - edge) / steps[axis] + 1e-9);
        return q <= 0.0 ? 0 : static_cast<std::size_t>(q);
    };
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto [lo, hi] = splitGroup(groups[i], text);
        targets[i]->lo = toIndex(parseBound<double>(lo, text), static_cast<int>(i));
        targets[i]->hi = toIndex(parseBound<double>(hi, text), static_cast<int>(i));
    }
    return roi;
}

ResolvedRoi resolveRoi(const Roi& roi, const ovf::OvfHeader& header, std::size_t frameCount) {
    auto clamp = [](const IndexRange& range, std::size_t extent, const char* axis, std::size_t& lo,
                    std::size_t& hi) {
        lo = range.lo.value_or(0);
        hi = std::min(range.hi.value_or(extent), extent);
        if (lo >= hi) {
            throw Error(ErrorCode::EmptyRoi, std::string("selection along ") + axis + " is empty (" +
                                                 std::to_string(lo) + ":" + std::to_string(hi) + " of " +
                                                 std::to_string(extent) + ")");
        }
    };
    ResolvedRoi r;
    clamp(roi.t, frameCount, "t", r.t0, r.t1);
    clamp(roi.x, header.nx, "x", r.x0, r.x1);
    clamp(roi.y, header.ny, "y", r.y0, r.y1);
    clamp(roi.z, header.nz, "z", r.z0, r.z1);
    return r;
}

std::vector<fs::path> discoverFiles(const fs::path& directory, const std::string& pattern) {
    std::error_code ec;
    if (!fs::is_directory(directory, ec)) {
        throw Error(ErrorCode::Io, "not a directory: " + directory.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const std::string name = entry.path().filename().string();
        if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw Error(ErrorCode::EmptyDataset,
                    "no files matching '" + pattern + "' in " + directory.string());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        const std::string sa = a.stem().string();
        const std::string sb = b.stem().string();
        const std::string_view da = trailingDigits(sa);
        const std::string_view db = trailingDigits(sb);
        if (da.empty() != db.empty()) {
            return !da.empty();
        }
        if (!da.empty()) {
            const int c = compareDigits(da, db);
            if (c != 0) {
                return c < 0;
            }
        }
        return a.filename().string() < b.filename().string();
    });
    return files;
}

std::vector<std::pair<std::size_t, std::size_t>> partition(std::size_t count, std::size_t workers) {
    workers = std::max<std::size_t>(1, workers);
    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    chunks.reserve(workers);
    const std::size_t base = count / workers;
    const std::size_t extra = count % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        chunks.emplace_back(begin, begin + len);
        begin += len;
    }
    return chunks;
}

SpaceTimeMatrix ingest(const std::vector<fs::path>& files, const IngestOptions& options) {
    const Plan plan = makePlan(files, options);
    SpaceTimeMatrix m = allocate(plan, options);
    const std::size_t cols = plan.roi.st();
    const auto chunks = partition(cols, options.workers);
    const auto nchunks = static_cast<std::int64_t>(chunks.size());

    std::vector<std::optional<double>> times(cols);
    std::vector<std::exception_ptr> failures(chunks.size());

    // One chunk per iteration so every chunk is read even if OpenMP hands out
    // fewer threads than requested.
#pragma omp parallel for num_threads(static_cast<int>(chunks.size())) schedule(static, 1)
    for (std::int64_t w = 0; w < nchunks; ++w) {
        const auto [begin, end] = chunks[static_cast<std::size_t>(w)];
        try {
            for (std::size_t col = begin; col < end; ++col) {
                const std::size_t fileIndex = plan.roi.t0 + col;
                times[col] = readColumn(files[fileIndex], col, plan, options, m.data);
                if (options.onFileRead) {
                    options.onFileRead(static_cast<std::size_t>(w), fileIndex);
                }
            }
        } catch (...) {
            failures[static_cast<std::size_t>(w)] = std::current_exception();
        }
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    checkSampling(times, m.dt, options.dtOverride.has_value());
    return m;
}

SpaceTimeMatrix ingestSerial(const std::vector<fs::path>& files, const IngestOptions& options) {
    const Plan plan = makePlan(files, options);
    SpaceTimeMatrix m = allocate(plan, options);
    std::vector<std::optional<double>> times(plan.roi.st());
    for (std::size_t col = 0; col < plan.roi.st(); ++col) {
        const std::size_t fileIndex = plan.roi.t0 + col;
        times[col] = readColumn(files[fileIndex], col, plan, options, m.data);
        if (options.onFileRead) {
            options.onFileRead(0, fileIndex);
        }
    }
    checkSampling(times, m.dt, options.dtOverride.has_value());
    return m;
}

}  // namespace spinfft::ingest
