#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fgmatch {

/// Whole-file read; throws Error(Io) when the file cannot be opened.
[[nodiscard]] std::string read_file(const std::filesystem::path& path);

/// Write to a sibling temp file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace fgmatch
