#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinfft::scriptgen {

// Node counts start, start+step, ..., <= end.
struct AxisSweep {
    std::size_t start = 1;
    std::size_t end = 1;
    std::size_t step = 1;

    static AxisSweep fixed(std::size_t n) { return {n, n, 1}; }
    std::vector<std::size_t> values() const;
};

enum class MeshMode { Fixed, Sweep };

struct MeshSpec {
    MeshMode mode = MeshMode::Fixed;
    std::array<AxisSweep, 3> nodes;
    std::array<std::string, 3> cell{"1e-9", "1e-9", "1e-9"};  // verbatim numeric text, meters
    std::array<std::size_t, 3> pbc{0, 0, 0};
};

enum class ExcitationKind { Field, Current };

struct ExcitationSpec {
    ExcitationKind kind = ExcitationKind::Field;
    std::string function;  // e.g. "vector(0, amp*sinc(2*pi*f*t), 0)"
    std::vector<double> ampValues;
    std::vector<double> freqValues;
    std::string method;  // empty: plain assignment or SetRegion when a region is given
    std::optional<int> region;
};

struct SweepPoint {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 0;
    double amp = 0.0;
    double f = 0.0;
};

enum class BlockKind { Mesh, Geometry, Regions, Parameters, InitialM, Excitation, MiscRaw, Output, Run };

struct Block {
    BlockKind kind;
    std::string body;
};

struct ScriptTemplate {
    std::vector<Block> blocks;
};

// Everything a spec file declares.
struct SweepSpec {
    std::string name;
    int precision = 1;
    MeshSpec mesh;
    std::optional<ExcitationSpec> excitation;
    ScriptTemplate templ;
    bool ovf2Text = false;
};

struct GeneratedScript {
    std::string filename;
    std::string content;
};

// Parses the sectioned spec format (see README). Errors are SpecParse with
// the offending line number.
SweepSpec parseSpec(std::string_view text);
SweepSpec loadSpec(const std::filesystem::path& path);

// Cartesian product, nx outermost and f innermost. EmptySweep if any list is empty.
std::vector<SweepPoint> expandSweep(const MeshSpec& mesh, const ExcitationSpec& excitation);

// printf-style "%.<precision>e".
std::string formatScientific(double value, int precision = 1);

// Replaces `token` only where it is not adjacent to [A-Za-z0-9_].
std::string replaceWholeWord(std::string_view body, std::string_view token, std::string_view replacement);
bool containsWholeWord(std::string_view body, std::string_view token);

// x/y/z in mesh, geometry, region and parameter blocks become node counts;
// amp/f in excitation blocks become scientific-notation values.
std::string substitute(const ScriptTemplate& templ, const SweepPoint& point, int precision = 1);

// "<base>_<nx>_<ny>_<nz>_<amp>_<f>.txt"
std::string makeFilename(std::string_view base, const SweepPoint& point, int precision = 1);

// Swept tokens that no body references (reported as warnings by generate).
std::vector<std::string> unboundTokens(const SweepSpec& spec);

// Renders every script of the sweep in expansion order.
std::vector<GeneratedScript> render(const SweepSpec& spec);

struct GenerateOptions {
    bool force = false;
    bool dryRun = false;
    std::optional<int> precision;  // overrides the sweep file's precision
};

// Writes one script per sweep point; returns the filenames in order. Refuses
// (OutputExists, nothing written) if any target exists and force is unset.
std::vector<std::string> generate(const std::filesystem::path& specPath, const std::filesystem::path& outDir,
                                  const GenerateOptions& options = {});

}  // namespace spinfft::scriptgen
