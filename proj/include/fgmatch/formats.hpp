#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fgmatch/image.hpp"

namespace fgmatch {

enum class Energy { Low, High };

std::string_view to_string(Energy e);
Energy parse_energy(std::string_view text);

/// An image plus the acquisition metadata that travels with it.
struct ImageRecord {
    GrayImage image;
    std::filesystem::path source_path;
    std::optional<std::string> vendor;
    std::optional<Energy> energy;
    Photometric original_photometric = Photometric::Mono2;
    /// Harmonization provenance, written into output sidecars.
    nlohmann::json provenance;
};

/// `path` + ".json".
[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

[[nodiscard]] nlohmann::json sidecar_json(const ImageRecord& record);

/// Binary PGM (P5). 16-bit samples are most significant byte first. The
/// bit depth is ceil(log2(maxval + 1)); a sidecar may override photometric
/// and supply vendor/energy.
[[nodiscard]] ImageRecord read_pgm(const std::filesystem::path& path);
[[nodiscard]] ImageRecord decode_pgm(std::string_view bytes, const std::filesystem::path& origin = {});

/// P5 with maxval 2^b - 1, plus the JSON sidecar. Both writes are atomic.
void write_pgm(const ImageRecord& record, const std::filesystem::path& path);
[[nodiscard]] std::string encode_pgm(const GrayImage& image);

/// Uncompressed little-endian DICOM (implicit or explicit VR), single frame,
/// unsigned, MONOCHROME1/2. Stored values are returned untouched: rescale
/// and VOI LUT attributes are ignored with a logged notice.
[[nodiscard]] ImageRecord read_dicom(const std::filesystem::path& path);
[[nodiscard]] ImageRecord decode_dicom(std::string_view bytes, const std::filesystem::path& origin = {});

/// Dispatch on content: "DICM" at offset 128 or a .dcm extension reads as
/// DICOM, anything else as PGM.
[[nodiscard]] ImageRecord read_image(const std::filesystem::path& path);

}  // namespace fgmatch
