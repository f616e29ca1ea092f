#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinfft {

enum class ErrorCode {
    // ovf
    MissingKey,
    UnsupportedEncoding,
    MalformedHeader,
    DataCountMismatch,
    NonNumericToken,
    BadValueDim,
    // ingest
    EmptyDataset,
    GridMismatch,
    NoTimeBase,
    EmptyRoi,
    // window
    BadLength,
    BadAttenuation,
    // analysis
    DegenerateTime,
    DegenerateSpace,
    ShapeMismatch,
    // scriptgen
    EmptySweep,
    SpecParse,
    OutputExists,
    FilenameCollision,
    // general
    InvalidArgument,
    Io,
};

std::string_view toString(ErrorCode code);

// All library failures surface as this type. what() is prefixed with the
// code name so one-line diagnostics stay greppable.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

    // Same code, message prefixed with a context (usually a file path).
    Error withContext(const std::string& context) const;

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace spinfft
