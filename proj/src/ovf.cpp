#include "spinfft/ovf.hpp"

#include "spinfft/error.hpp"
#include "spinfft/log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace spinfft::ovf {
namespace {

bool isSpace(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && isSpace(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && isSpace(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Collapses internal whitespace runs so "Begin:  Data   Text" compares equal.
std::string normalized(std::string_view s) {
    std::string out;
    bool pendingSpace = false;
    for (char c : trim(s)) {
        if (isSpace(c)) {
            pendingSpace = true;
            continue;
        }
        if (pendingSpace && !out.empty()) {
            out.push_back(' ');
        }
        pendingSpace = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool parseDouble(std::string_view token, double& out) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parseCount(std::string_view token, std::size_t& out) {
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

const std::regex& simTimePattern() {
    static const std::regex re(R"(total simulation time:\s*([-+0-9.eE]+)\s*s\b)", std::regex::icase);
    return re;
}

struct LineCursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t lineNo = 0;

    bool next(std::string_view& line) {
        if (pos >= text.size()) {
            return false;
        }
        const std::size_t end = text.find('\n', pos);
        const std::size_t stop = end == std::string_view::npos ? text.size() : end;
        line = text.substr(pos, stop - pos);
        pos = end == std::string_view::npos ? text.size() : end + 1;
        ++lineNo;
        return true;
    }
};

double unitScale(const std::string& unit, std::size_t lineNo) {
    if (unit.empty() || unit == "m") {
        return 1.0;
    }
    if (unit == "nm") {
        return 1e-9;
    }
    if (unit == "um") {
        return 1e-6;
    }
    throw Error(ErrorCode::MalformedHeader,
                "unsupported meshunit '" + unit + "' at line " + std::to_string(lineNo));
}

}  // namespace

Component parseComponent(std::string_view name) {
    const std::string n = lower(trim(name));
    if (n == "x") return Component::X;
    if (n == "y") return Component::Y;
    if (n == "z") return Component::Z;
    throw Error(ErrorCode::InvalidArgument, "component must be x, y or z (got '" + std::string(name) + "')");
}

char componentName(Component c) {
    switch (c) {
        case Component::X: return 'x';
        case Component::Y: return 'y';
        case Component::Z: return 'z';
    }
    return '?';
}

OvfHeader parseHeader(std::string_view content, std::size_t* dataOffset) {
    OvfHeader header;
    LineCursor cursor{content};
    std::string_view raw;

    bool sawSignature = false;
    bool sawNodes[3] = {false, false, false};
    bool sawValueDim = false;
    std::string meshUnit;
    std::size_t meshUnitLine = 0;

    while (cursor.next(raw)) {
        const std::string_view line = trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() != '#') {
            throw Error(ErrorCode::MalformedHeader,
                        "non-comment line " + std::to_string(cursor.lineNo) + " before data section");
        }
        if (!sawSignature) {
            if (normalized(line) != "# oommf ovf 2.0") {
                throw Error(ErrorCode::MalformedHeader,
                            "first line is not '# OOMMF OVF 2.0': '" + std::string(line) + "'");
            }
            sawSignature = true;
            continue;
        }
        if (line.size() >= 2 && line[1] == '#') {
            continue;  // OVF comment
        }

        const std::string_view body = trim(line.substr(1));
        const std::size_t colon = body.find(':');
        if (colon == std::string_view::npos) {
            continue;
        }
        const std::string key = normalized(body.substr(0, colon));
        const std::string_view value = trim(body.substr(colon + 1));

        if (key == "desc" || key == "title") {
            std::match_results<std::string_view::const_iterator> match;
            if (std::regex_search(line.begin(), line.end(), match, simTimePattern())) {
                double t = 0.0;
                if (parseDouble(std::string_view(&*match[1].first, match[1].length()), t)) {
                    header.totalSimTime = t;
                }
            }
            if (key == "title") {
                header.title = std::string(value);
            }
            continue;
        }

        auto needCount = [&](std::size_t& dst) {
            if (!parseCount(value, dst) || dst == 0) {
                throw Error(ErrorCode::MalformedHeader, "'" + key + "' must be a positive integer at line " +
                                                            std::to_string(cursor.lineNo));
            }
        };
        auto needDouble = [&](double& dst) {
            if (!parseDouble(value, dst)) {
                throw Error(ErrorCode::MalformedHeader,
                            "'" + key + "' is not a number at line " + std::to_string(cursor.lineNo));
            }
        };

        if (key == "xnodes") {
            needCount(header.nx);
            sawNodes[0] = true;
        } else if (key == "ynodes") {
            needCount(header.ny);
            sawNodes[1] = true;
        } else if (key == "znodes") {
            needCount(header.nz);
            sawNodes[2] = true;
        } else if (key == "valuedim") {
            std::size_t dim = 0;
            needCount(dim);
            header.valueDim = static_cast<int>(dim);
            sawValueDim = true;
        } else if (key == "xstepsize") {
            needDouble(header.xstep);
        } else if (key == "ystepsize") {
            needDouble(header.ystep);
        } else if (key == "zstepsize") {
            needDouble(header.zstep);
        } else if (key == "xbase") {
            needDouble(header.xbase);
        } else if (key == "ybase") {
            needDouble(header.ybase);
        } else if (key == "zbase") {
            needDouble(header.zbase);
        } else if (key == "meshunit") {
            meshUnit = lower(value);
            meshUnitLine = cursor.lineNo;
        } else if (key == "meshtype") {
            header.meshType = lower(value);
            if (header.meshType != "rectangular") {
                throw Error(ErrorCode::MalformedHeader, "only rectangular meshes are supported (got '" +
                                                            header.meshType + "')");
            }
        } else if (key == "begin") {
            const std::string what = normalized(value);
            if (what.rfind("data", 0) != 0) {
                continue;  // Segment / Header
            }
            if (what != "data text") {
                throw Error(ErrorCode::UnsupportedEncoding,
                            "data encoding '" + std::string(value.substr(std::min<std::size_t>(5, value.size()))) +
                                "' is not supported; export with OVF2_TEXT");
            }
            if (!sawNodes[0]) throw Error(ErrorCode::MissingKey, "xnodes");
            if (!sawNodes[1]) throw Error(ErrorCode::MissingKey, "ynodes");
            if (!sawNodes[2]) throw Error(ErrorCode::MissingKey, "znodes");
            if (!sawValueDim) throw Error(ErrorCode::MissingKey, "valuedim");

            const double scale = unitScale(meshUnit, meshUnitLine);
            header.xstep *= scale;
            header.ystep *= scale;
            header.zstep *= scale;
            header.xbase *= scale;
            header.ybase *= scale;
            header.zbase *= scale;
            if (!(header.xstep > 0.0) || !(header.ystep > 0.0) || !(header.zstep > 0.0)) {
                throw Error(ErrorCode::MalformedHeader, "step sizes must be positive");
            }
            if (dataOffset != nullptr) {
                *dataOffset = cursor.pos;
            }
            return header;
        }
    }

    if (!sawSignature) {
        throw Error(ErrorCode::MalformedHeader, "empty input");
    }
    if (!sawNodes[0]) throw Error(ErrorCode::MissingKey, "xnodes");
    if (!sawNodes[1]) throw Error(ErrorCode::MissingKey, "ynodes");
    if (!sawNodes[2]) throw Error(ErrorCode::MissingKey, "znodes");
    if (!sawValueDim) throw Error(ErrorCode::MissingKey, "valuedim");
    throw Error(ErrorCode::MalformedHeader, "no '# Begin: Data' line found");
}

ScalarSlab parseComponent(std::string_view content, Component component) {
    std::size_t offset = 0;
    ScalarSlab slab;
    slab.header = parseHeader(content, &offset);
    if (slab.header.valueDim != 3) {
        throw Error(ErrorCode::BadValueDim,
                    "magnetization files need valuedim 3 (got " + std::to_string(slab.header.valueDim) + ")");
    }

    const std::size_t expected = slab.header.cellCount();
    const std::size_t dim = 3;
    const std::size_t selected = static_cast<std::size_t>(component);
    slab.values.resize(expected);

    // Line numbers are reported relative to the whole file.
    std::size_t lineNo = static_cast<std::size_t>(std::count(content.begin(), content.begin() + offset, '\n'));
    std::size_t tokens = 0;
    bool ended = false;

    const char* p = content.data() + offset;
    const char* const end = content.data() + content.size();
    while (p < end) {
        const char* lineEnd = static_cast<const char*>(std::memchr(p, '\n', static_cast<std::size_t>(end - p)));
        if (lineEnd == nullptr) {
            lineEnd = end;
        }
        ++lineNo;
        const char* q = p;
        while (q < lineEnd && isSpace(*q)) {
            ++q;
        }
        if (q < lineEnd && *q == '#') {
            if (normalized(std::string_view(q + 1, static_cast<std::size_t>(lineEnd - q - 1))) == "end: data text") {
                ended = true;
                p = lineEnd < end ? lineEnd + 1 : end;
                break;
            }
            p = lineEnd < end ? lineEnd + 1 : end;
            continue;
        }
        while (q < lineEnd) {
            const char* tokEnd = q;
            while (tokEnd < lineEnd && !isSpace(*tokEnd)) {
                ++tokEnd;
            }
            if (*q == '+') {
                ++q;
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(q, tokEnd, v);
            if (ec != std::errc() || ptr != tokEnd) {
                throw Error(ErrorCode::NonNumericToken, "line " + std::to_string(lineNo));
            }
            if (tokens % dim == selected) {
                const std::size_t record = tokens / dim;
                if (record < expected) {
                    slab.values[record] = v;
                }
            }
            ++tokens;
            q = tokEnd;
            while (q < lineEnd && isSpace(*q)) {
                ++q;
            }
        }
        p = lineEnd < end ? lineEnd + 1 : end;
    }

    if (tokens != expected * dim) {
        throw Error(ErrorCode::DataCountMismatch,
                    "expected " + std::to_string(expected) + " records, got " + std::to_string(tokens / dim));
    }
    if (!ended) {
        log::warn("data section is not terminated by '# End: Data Text'");
    } else {
        const std::string_view rest(p, static_cast<std::size_t>(end - p));
        LineCursor cursor{rest};
        std::string_view line;
        while (cursor.next(line)) {
            const std::string n = normalized(line);
            if (n.rfind("# begin:", 0) == 0 && n.find("data") != std::string::npos) {
                log::warn("file has more than one data segment; only the first is read");
                break;
            }
        }
    }
    return slab;
}

std::string readFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::string content(static_cast<std::size_t>(size), '\0');
    if (size > 0 && !in.read(content.data(), size)) {
        throw Error(ErrorCode::Io, "read failed: " + path.string());
    }
    return content;
}

OvfHeader readHeader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::string text;
    std::string line;
    while (std::getline(in, line)) {
        text += line;
        text += '\n';
        const std::string n = normalized(line);
        if (n.rfind("# begin: data", 0) == 0) {
            break;
        }
    }
    try {
        return parseHeader(text);
    } catch (const Error& e) {
        throw e.withContext(path.string());
    }
}

ScalarSlab readComponent(const std::filesystem::path& path, Component component) {
    const std::string content = readFile(path);
    try {
        return parseComponent(content, component);
    } catch (const Error& e) {
        throw e.withContext(path.string());
    }
}

}  // namespace spinfft::ovf
