#include "fgmatch/error.hpp"

namespace fgmatch {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::PhotometricNotNormalized: return "PhotometricNotNormalized";
        case ErrorCode::EmptyForeground: return "EmptyForeground";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DepthMismatch: return "DepthMismatch";
        case ErrorCode::ProfileDepthMismatch: return "ProfileDepthMismatch";
        case ErrorCode::MalformedProfile: return "MalformedProfile";
        case ErrorCode::MalformedFile: return "MalformedFile";
        case ErrorCode::UnsupportedTransferSyntax: return "UnsupportedTransferSyntax";
        case ErrorCode::UnsupportedPhotometric: return "UnsupportedPhotometric";
        case ErrorCode::MissingTag: return "MissingTag";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace fgmatch
