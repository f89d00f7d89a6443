#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fgmatch {

enum class ErrorCode {
    InvalidArgument,
    PhotometricNotNormalized,
    EmptyForeground,
    DimensionMismatch,
    DepthMismatch,
    ProfileDepthMismatch,
    MalformedProfile,
    MalformedFile,
    UnsupportedTransferSyntax,
    UnsupportedPhotometric,
    MissingTag,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Every recoverable failure in the library is reported as an Error carrying
/// a machine-readable code; the message holds the human context (file, index).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fgmatch
