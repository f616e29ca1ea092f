#include "spinfft/error.hpp"

namespace spinfft {

std::string_view toString(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingKey: return "MissingKey";
        case ErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::DataCountMismatch: return "DataCountMismatch";
        case ErrorCode::NonNumericToken: return "NonNumericToken";
        case ErrorCode::BadValueDim: return "BadValueDim";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::NoTimeBase: return "NoTimeBase";
        case ErrorCode::EmptyRoi: return "EmptyRoi";
        case ErrorCode::BadLength: return "BadLength";
        case ErrorCode::BadAttenuation: return "BadAttenuation";
        case ErrorCode::DegenerateTime: return "DegenerateTime";
        case ErrorCode::DegenerateSpace: return "DegenerateSpace";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptySweep: return "EmptySweep";
        case ErrorCode::SpecParse: return "SpecParse";
        case ErrorCode::OutputExists: return "OutputExists";
        case ErrorCode::FilenameCollision: return "FilenameCollision";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(toString(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

Error Error::withContext(const std::string& context) const {
    return Error(code_, context + ": " + detail_);
}

}  // namespace spinfft
