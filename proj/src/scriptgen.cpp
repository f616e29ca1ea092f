#include "spinfft/scriptgen.hpp"

#include "spinfft/error.hpp"
#include "spinfft/log.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace spinfft::scriptgen {
namespace fs = std::filesystem;

namespace {

bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> splitList(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
    throw Error(ErrorCode::SpecParse, "line " + std::to_string(line) + ": " + message);
}

std::size_t parseCount(std::string_view text, std::size_t line, std::string_view what) {
    text = trim(text);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        fail(line, std::string(what) + " must be a non-negative integer (got '" + std::string(text) + "')");
    }
    return v;
}

double parseReal(std::string_view text, std::size_t line, std::string_view what) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        fail(line, std::string(what) + " must be a number (got '" + std::string(text) + "')");
    }
    return v;
}

AxisSweep parseAxis(std::string_view text, std::size_t line, std::string_view what) {
    const auto parts = splitList(text, ':');
    AxisSweep a;
    if (parts.size() == 1) {
        a = AxisSweep::fixed(parseCount(parts[0], line, what));
    } else if (parts.size() == 3) {
        a = {parseCount(parts[0], line, what), parseCount(parts[1], line, what), parseCount(parts[2], line, what)};
    } else {
        fail(line, std::string(what) + " must be N or start:end:step");
    }
    if (a.start < 1) fail(line, std::string(what) + " node counts must be >= 1");
    if (a.step < 1) fail(line, std::string(what) + " step must be > 0");
    if (a.start > a.end) fail(line, std::string(what) + " start must not exceed end");
    return a;
}

std::vector<double> parseValues(std::string_view text, std::size_t line, std::string_view what) {
    std::vector<double> out;
    if (trim(text).empty()) {
        return out;
    }
    for (std::string_view item : splitList(text, ',')) {
        out.push_back(parseReal(item, line, what));
    }
    return out;
}

bool parseYes(std::string_view text, std::size_t line, std::string_view what) {
    const std::string v = lower(trim(text));
    if (v == "yes" || v == "true" || v == "1") return true;
    if (v == "no" || v == "false" || v == "0") return false;
    fail(line, std::string(what) + " must be yes or no");
}

enum class SectionKind { KeyValue, Raw };

struct SectionInfo {
    SectionKind kind;
    bool repeatable;
};

const std::map<std::string, SectionInfo, std::less<>>& sections() {
    static const std::map<std::string, SectionInfo, std::less<>> table = {
        {"script", {SectionKind::KeyValue, false}},     {"mesh", {SectionKind::KeyValue, false}},
        {"geometry", {SectionKind::Raw, false}},        {"region", {SectionKind::Raw, true}},
        {"parameters", {SectionKind::Raw, false}},      {"initial_m", {SectionKind::Raw, false}},
        {"excitation", {SectionKind::KeyValue, false}}, {"misc", {SectionKind::Raw, true}},
        {"output", {SectionKind::KeyValue, false}},     {"run", {SectionKind::KeyValue, false}},
    };
    return table;
}

struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
};

struct Section {
    std::string name;
    std::size_t line = 0;
    std::vector<Entry> entries;      // key-value sections
    std::vector<std::string> lines;  // raw sections
};

std::string rawBody(const std::vector<std::string>& lines) {
    std::size_t first = 0;
    std::size_t last = lines.size();
    while (first < last && trim(lines[first]).empty()) ++first;
    while (last > first && trim(lines[last - 1]).empty()) --last;
    std::string body;
    for (std::size_t i = first; i < last; ++i) {
        body += lines[i];
        if (i + 1 < last) body += '\n';
    }
    return body;
}

std::vector<Section> splitSections(std::string_view text) {
    std::vector<Section> out;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineNo;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        const std::string_view line = trim(raw);
        if (!line.empty() && line.front() == '#') {
            continue;
        }
        if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
            const std::string name = lower(trim(line.substr(1, line.size() - 2)));
            const auto it = sections().find(name);
            if (it == sections().end()) {
                fail(lineNo, "unknown section [" + name + "]");
            }
            if (!it->second.repeatable) {
                for (const Section& s : out) {
                    if (s.name == name) {
                        fail(lineNo, "section [" + name + "] already defined at line " + std::to_string(s.line));
                    }
                }
            }
            out.push_back(Section{name, lineNo, {}, {}});
            continue;
        }
        if (out.empty()) {
            if (!line.empty()) fail(lineNo, "content before the first [section]");
            continue;
        }
        Section& current = out.back();
        if (sections().find(current.name)->second.kind == SectionKind::Raw) {
            std::string kept(raw);
            while (!kept.empty() && std::isspace(static_cast<unsigned char>(kept.back()))) kept.pop_back();
            current.lines.push_back(std::move(kept));
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(lineNo, "expected key = value in [" + current.name + "]");
        }
        current.entries.push_back(
            Entry{lower(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), lineNo});
    }
    return out;
}

std::string triple(const std::array<std::string, 3>& v) { return v[0] + ", " + v[1] + ", " + v[2]; }

std::string meshBody(const MeshSpec& mesh) {
    return "SetGridSize(x, y, z)\nSetCellSize(" + triple(mesh.cell) + ")\nSetPBC(" + std::to_string(mesh.pbc[0]) +
           ", " + std::to_string(mesh.pbc[1]) + ", " + std::to_string(mesh.pbc[2]) + ")";
}

std::string excitationBody(const ExcitationSpec& e) {
    const std::string target = e.kind == ExcitationKind::Field ? "B_ext" : "J";
    const std::string region = e.region ? std::to_string(*e.region) + ", " : "";
    if (!e.method.empty()) {
        return target + "." + e.method + "(" + region + e.function + ")";
    }
    if (e.region) {
        return target + ".SetRegion(" + region + e.function + ")";
    }
    return target + " = " + e.function;
}

// Injects the region number into the first "%d" slot.
std::string numberRegion(const std::string& body, int index, std::size_t line) {
    const std::size_t slot = body.find("%d");
    if (slot == std::string::npos) {
        fail(line, "[region] body needs a %d slot for its number");
    }
    std::string out = body;
    out.replace(slot, 2, std::to_string(index));
    return out;
}

bool substitutesGeometryTokens(BlockKind kind) {
    return kind == BlockKind::Mesh || kind == BlockKind::Geometry || kind == BlockKind::Regions ||
           kind == BlockKind::Parameters;
}

}  // namespace

std::vector<std::size_t> AxisSweep::values() const {
    std::vector<std::size_t> out;
    if (step == 0 || start > end) {
        return out;
    }
    for (std::size_t v = start; v <= end; v += step) {
        out.push_back(v);
    }
    return out;
}

SweepSpec parseSpec(std::string_view text) {
    SweepSpec spec;
    const std::vector<Section> parsed = splitSections(text);

    std::string geometry, parameters, initialM;
    std::vector<std::string> regions;
    std::vector<std::string> misc;
    std::string output, run;
    bool sawMesh = false;
    bool sawScript = false;

    for (const Section& s : parsed) {
        if (s.name == "script") {
            sawScript = true;
            for (const Entry& e : s.entries) {
                if (e.key == "name") {
                    spec.name = e.value;
                    if (spec.name.empty() || spec.name.find('/') != std::string::npos) {
                        fail(e.line, "name must be a non-empty file stem");
                    }
                } else if (e.key == "precision") {
                    const std::size_t p = parseCount(e.value, e.line, "precision");
                    if (p < 1 || p > 15) fail(e.line, "precision must be between 1 and 15");
                    spec.precision = static_cast<int>(p);
                } else {
                    fail(e.line, "unknown key '" + e.key + "' in [script]");
                }
            }
        } else if (s.name == "mesh") {
            sawMesh = true;
            bool sawMode = false, sawNodes = false, sawCell = false;
            bool sawAxis[3] = {false, false, false};
            for (const Entry& e : s.entries) {
                if (e.key == "mode") {
                    const std::string mode = lower(e.value);
                    if (mode == "fixed") spec.mesh.mode = MeshMode::Fixed;
                    else if (mode == "sweep") spec.mesh.mode = MeshMode::Sweep;
                    else fail(e.line, "mode must be fixed or sweep");
                    sawMode = true;
                } else if (e.key == "nodes") {
                    const auto parts = splitList(e.value, ',');
                    if (parts.size() != 3) fail(e.line, "nodes needs three counts");
                    for (int i = 0; i < 3; ++i) {
                        const std::size_t n = parseCount(parts[static_cast<std::size_t>(i)], e.line, "nodes");
                        if (n < 1) fail(e.line, "node counts must be >= 1");
                        spec.mesh.nodes[static_cast<std::size_t>(i)] = AxisSweep::fixed(n);
                    }
                    sawNodes = true;
                } else if (e.key == "nx" || e.key == "ny" || e.key == "nz") {
                    const std::size_t axis = static_cast<std::size_t>(e.key[1] - 'x');
                    spec.mesh.nodes[axis] = parseAxis(e.value, e.line, e.key);
                    sawAxis[axis] = true;
                } else if (e.key == "cell") {
                    const auto parts = splitList(e.value, ',');
                    if (parts.size() != 3) fail(e.line, "cell needs three sizes");
                    for (std::size_t i = 0; i < 3; ++i) {
                        if (!(parseReal(parts[i], e.line, "cell") > 0.0)) fail(e.line, "cell sizes must be positive");
                        spec.mesh.cell[i] = std::string(parts[i]);
                    }
                    sawCell = true;
                } else if (e.key == "pbc") {
                    const auto parts = splitList(e.value, ',');
                    if (parts.size() != 3) fail(e.line, "pbc needs three counts");
                    for (std::size_t i = 0; i < 3; ++i) {
                        spec.mesh.pbc[i] = parseCount(parts[i], e.line, "pbc");
                    }
                } else {
                    fail(e.line, "unknown key '" + e.key + "' in [mesh]");
                }
            }
            if (!sawMode) fail(s.line, "[mesh] needs mode = fixed or sweep");
            if (!sawCell) fail(s.line, "[mesh] needs cell = cx, cy, cz");
            if (spec.mesh.mode == MeshMode::Fixed && !sawNodes) fail(s.line, "fixed mesh needs nodes = nx, ny, nz");
            if (spec.mesh.mode == MeshMode::Sweep) {
                if (sawNodes) fail(s.line, "sweep mesh takes nx/ny/nz, not nodes");
                for (std::size_t i = 0; i < 3; ++i) {
                    if (!sawAxis[i]) fail(s.line, std::string("sweep mesh needs n") + static_cast<char>('x' + i));
                }
            } else if (sawAxis[0] || sawAxis[1] || sawAxis[2]) {
                fail(s.line, "fixed mesh takes nodes, not nx/ny/nz");
            }
        } else if (s.name == "geometry") {
            geometry = rawBody(s.lines);
        } else if (s.name == "region") {
            const int index = static_cast<int>(regions.size()) + 1;
            regions.push_back(numberRegion(rawBody(s.lines), index, s.line));
        } else if (s.name == "parameters") {
            parameters = rawBody(s.lines);
        } else if (s.name == "initial_m") {
            initialM = rawBody(s.lines);
        } else if (s.name == "misc") {
            misc.push_back(rawBody(s.lines));
        } else if (s.name == "excitation") {
            ExcitationSpec ex;
            for (const Entry& e : s.entries) {
                if (e.key == "kind") {
                    const std::string kind = lower(e.value);
                    if (kind == "field") ex.kind = ExcitationKind::Field;
                    else if (kind == "current") ex.kind = ExcitationKind::Current;
                    else fail(e.line, "kind must be field or current");
                } else if (e.key == "function") {
                    ex.function = e.value;
                } else if (e.key == "amp") {
                    ex.ampValues = parseValues(e.value, e.line, "amp");
                } else if (e.key == "f") {
                    ex.freqValues = parseValues(e.value, e.line, "f");
                } else if (e.key == "method") {
                    ex.method = e.value;
                } else if (e.key == "region") {
                    ex.region = static_cast<int>(parseCount(e.value, e.line, "region"));
                } else {
                    fail(e.line, "unknown key '" + e.key + "' in [excitation]");
                }
            }
            if (ex.function.empty()) fail(s.line, "[excitation] needs function = ...");
            if (ex.ampValues.size() > 1 && !containsWholeWord(ex.function, "amp")) {
                fail(s.line, "several amp values but the function never uses 'amp'");
            }
            if (ex.freqValues.size() > 1 && !containsWholeWord(ex.function, "f")) {
                fail(s.line, "several f values but the function never uses 'f'");
            }
            spec.excitation = std::move(ex);
        } else if (s.name == "output") {
            for (const Entry& e : s.entries) {
                if (e.key == "format") {
                    const std::string fmt = e.value;
                    static const std::set<std::string> known = {"OVF1_TEXT", "OVF1_BINARY", "OVF2_TEXT",
                                                                "OVF2_BINARY"};
                    if (known.count(fmt) == 0) fail(e.line, "format must be one of OVF1_TEXT, OVF1_BINARY, "
                                                            "OVF2_TEXT, OVF2_BINARY");
                    spec.ovf2Text = fmt == "OVF2_TEXT";
                    output += "OutputFormat = " + fmt + "\n";
                } else if (e.key == "autosave") {
                    output += "AutoSave(" + e.value + ")\n";
                } else if (e.key == "save") {
                    output += "Save(" + e.value + ")\n";
                } else if (e.key == "tableadd") {
                    output += "TableAdd(" + e.value + ")\n";
                } else if (e.key == "tableautosave") {
                    output += "TableAutoSave(" + e.value + ")\n";
                } else {
                    fail(e.line, "unknown key '" + e.key + "' in [output]");
                }
            }
        } else if (s.name == "run") {
            for (const Entry& e : s.entries) {
                if (e.key == "solver") {
                    run += "SetSolver(" + std::to_string(parseCount(e.value, e.line, "solver")) + ")\n";
                } else if (e.key == "fixdt") {
                    parseReal(e.value, e.line, "fixdt");
                    run += "FixDt = " + e.value + "\n";
                } else if (e.key == "relax") {
                    if (parseYes(e.value, e.line, "relax")) run += "Relax()\n";
                } else if (e.key == "minimize") {
                    if (parseYes(e.value, e.line, "minimize")) run += "Minimize()\n";
                } else if (e.key == "run") {
                    parseReal(e.value, e.line, "run");
                    run += "Run(" + e.value + ")\n";
                } else if (e.key == "steps") {
                    run += "Steps(" + std::to_string(parseCount(e.value, e.line, "steps")) + ")\n";
                } else {
                    fail(e.line, "unknown key '" + e.key + "' in [run]");
                }
            }
        }
    }

    if (!sawScript || spec.name.empty()) fail(1, "missing [script] name = ...");
    if (!sawMesh) fail(1, "missing [mesh] section");

    auto& blocks = spec.templ.blocks;
    auto add = [&](BlockKind kind, std::string body) {
        while (!body.empty() && body.back() == '\n') body.pop_back();
        if (!body.empty()) blocks.push_back(Block{kind, std::move(body)});
    };
    add(BlockKind::Mesh, meshBody(spec.mesh));
    add(BlockKind::Geometry, geometry);
    std::string regionText;
    for (const std::string& r : regions) {
        regionText += r + "\n";
    }
    add(BlockKind::Regions, regionText);
    add(BlockKind::Parameters, parameters);
    add(BlockKind::InitialM, initialM);
    if (spec.excitation) {
        add(BlockKind::Excitation, excitationBody(*spec.excitation));
    }
    for (const std::string& m : misc) {
        add(BlockKind::MiscRaw, m);
    }
    add(BlockKind::Output, output);
    add(BlockKind::Run, run);
    return spec;
}

SweepSpec loadSpec(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open spec " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parseSpec(buf.str());
    } catch (const Error& e) {
        throw e.withContext(path.string());
    }
}

std::vector<SweepPoint> expandSweep(const MeshSpec& mesh, const ExcitationSpec& excitation) {
    const auto xs = mesh.nodes[0].values();
    const auto ys = mesh.nodes[1].values();
    const auto zs = mesh.nodes[2].values();
    if (xs.empty() || ys.empty() || zs.empty()) {
        throw Error(ErrorCode::EmptySweep, "a mesh axis has no node counts");
    }
    if (excitation.ampValues.empty() || excitation.freqValues.empty()) {
        throw Error(ErrorCode::EmptySweep, "excitation needs at least one amp and one f value");
    }
    std::vector<SweepPoint> points;
    points.reserve(xs.size() * ys.size() * zs.size() * excitation.ampValues.size() * excitation.freqValues.size());
    for (std::size_t nx : xs)
        for (std::size_t ny : ys)
            for (std::size_t nz : zs)
                for (double amp : excitation.ampValues)
                    for (double f : excitation.freqValues)
                        points.push_back(SweepPoint{nx, ny, nz, amp, f});
    return points;
}

std::string formatScientific(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", precision, value);
    return buf;
}

std::string replaceWholeWord(std::string_view body, std::string_view token, std::string_view replacement) {
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        const bool startOk = i == 0 || !isIdentChar(body[i - 1]);
        if (startOk && body.compare(i, token.size(), token) == 0) {
            const std::size_t after = i + token.size();
            if (after >= body.size() || !isIdentChar(body[after])) {
                out += replacement;
                i = after;
                continue;
            }
        }
        out += body[i];
        ++i;
    }
    return out;
}

bool containsWholeWord(std::string_view body, std::string_view token) {
    return replaceWholeWord(body, token, "\x01") != body;
}

std::string substitute(const ScriptTemplate& templ, const SweepPoint& point, int precision) {
    std::string script;
    for (std::size_t b = 0; b < templ.blocks.size(); ++b) {
        const Block& block = templ.blocks[b];
        std::string body = block.body;
        if (substitutesGeometryTokens(block.kind)) {
            body = replaceWholeWord(body, "x", std::to_string(point.nx));
            body = replaceWholeWord(body, "y", std::to_string(point.ny));
            body = replaceWholeWord(body, "z", std::to_string(point.nz));
        } else if (block.kind == BlockKind::Excitation) {
            body = replaceWholeWord(body, "amp", formatScientific(point.amp, precision));
            body = replaceWholeWord(body, "f", formatScientific(point.f, precision));
        }
        if (b > 0) {
            script += '\n';
        }
        script += body;
        script += '\n';
    }
    return script;
}

std::string makeFilename(std::string_view base, const SweepPoint& point, int precision) {
    return std::string(base) + "_" + std::to_string(point.nx) + "_" + std::to_string(point.ny) + "_" +
           std::to_string(point.nz) + "_" + formatScientific(point.amp, precision) + "_" +
           formatScientific(point.f, precision) + ".txt";
}

std::vector<std::string> unboundTokens(const SweepSpec& spec) {
    std::vector<std::string> out;
    const char* names[3] = {"x", "y", "z"};
    for (std::size_t axis = 0; axis < 3; ++axis) {
        if (spec.mesh.nodes[axis].values().size() < 2) {
            continue;
        }
        bool used = false;
        for (const Block& block : spec.templ.blocks) {
            if (block.kind != BlockKind::Mesh && substitutesGeometryTokens(block.kind) &&
                containsWholeWord(block.body, names[axis])) {
                used = true;
            }
        }
        if (!used) {
            out.emplace_back(names[axis]);
        }
    }
    return out;
}

std::vector<GeneratedScript> render(const SweepSpec& spec) {
    if (!spec.excitation) {
        throw Error(ErrorCode::EmptySweep, "spec has no [excitation] values to sweep");
    }
    const auto points = expandSweep(spec.mesh, *spec.excitation);
    std::vector<GeneratedScript> scripts;
    scripts.reserve(points.size());
    std::set<std::string> seen;
    for (const SweepPoint& p : points) {
        GeneratedScript s{makeFilename(spec.name, p, spec.precision), substitute(spec.templ, p, spec.precision)};
        if (!seen.insert(s.filename).second) {
            throw Error(ErrorCode::FilenameCollision,
                        s.filename + " is produced by two sweep points; raise the precision");
        }
        scripts.push_back(std::move(s));
    }
    return scripts;
}

std::vector<std::string> generate(const fs::path& specPath, const fs::path& outDir, const GenerateOptions& options) {
    SweepSpec spec = loadSpec(specPath);
    if (options.precision) {
        if (*options.precision < 1 || *options.precision > 15) {
            throw Error(ErrorCode::InvalidArgument, "precision must be between 1 and 15");
        }
        spec.precision = *options.precision;
    }
    for (const std::string& token : unboundTokens(spec)) {
        log::warn("'" + token + "' is swept but no geometry, region or parameter body uses it");
    }
    if (!spec.ovf2Text) {
        log::warn("output format is not OVF2_TEXT; the analysis commands only read OVF 2.0 text");
    }
    const std::vector<GeneratedScript> scripts = render(spec);
    std::vector<std::string> names;
    names.reserve(scripts.size());
    for (const auto& s : scripts) {
        names.push_back(s.filename);
    }
    if (options.dryRun) {
        return names;
    }

    std::error_code ec;
    fs::create_directories(outDir, ec);
    if (ec) {
        throw Error(ErrorCode::Io, "cannot create " + outDir.string() + ": " + ec.message());
    }
    if (!options.force) {
        for (const auto& s : scripts) {
            if (fs::exists(outDir / s.filename)) {
                throw Error(ErrorCode::OutputExists,
                            (outDir / s.filename).string() + " exists; pass --force to overwrite");
            }
        }
    }
    for (const auto& s : scripts) {
        const fs::path target = outDir / s.filename;
        const fs::path temp = outDir / ("." + s.filename + ".tmp");
        {
            std::ofstream out(temp, std::ios::binary | std::ios::trunc);
            if (!out || !out.write(s.content.data(), static_cast<std::streamsize>(s.content.size()))) {
                throw Error(ErrorCode::Io, "cannot write " + temp.string());
            }
        }
        fs::rename(temp, target, ec);
        if (ec) {
            throw Error(ErrorCode::Io, "cannot rename " + temp.string() + ": " + ec.message());
        }
    }
    return names;
}

}  // namespace spinfft::scriptgen
