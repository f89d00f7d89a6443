#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "fgmatch/error.hpp"
#include "fgmatch/formats.hpp"
#include "fgmatch/io.hpp"

namespace fgmatch {

namespace {

constexpr std::string_view kImplicitLittle = "1.2.840.10008.1.2";
constexpr std::string_view kExplicitLittle = "1.2.840.10008.1.2.1";

constexpr std::uint32_t tag(std::uint16_t group, std::uint16_t element) {
    return (std::uint32_t{group} << 16) | element;
}

constexpr std::uint32_t kTransferSyntax = tag(0x0002, 0x0010);
constexpr std::uint32_t kManufacturer = tag(0x0008, 0x0070);
constexpr std::uint32_t kSamplesPerPixel = tag(0x0028, 0x0002);
constexpr std::uint32_t kPhotometric = tag(0x0028, 0x0004);
constexpr std::uint32_t kNumberOfFrames = tag(0x0028, 0x0008);
constexpr std::uint32_t kRows = tag(0x0028, 0x0010);
constexpr std::uint32_t kColumns = tag(0x0028, 0x0011);
constexpr std::uint32_t kBitsAllocated = tag(0x0028, 0x0100);
constexpr std::uint32_t kBitsStored = tag(0x0028, 0x0101);
constexpr std::uint32_t kPixelRepresentation = tag(0x0028, 0x0103);
constexpr std::uint32_t kWindowCenter = tag(0x0028, 0x1050);
constexpr std::uint32_t kRescaleIntercept = tag(0x0028, 0x1052);
constexpr std::uint32_t kRescaleSlope = tag(0x0028, 0x1053);
constexpr std::uint32_t kVoiLutSequence = tag(0x0028, 0x3010);
constexpr std::uint32_t kPixelData = tag(0x7FE0, 0x0010);

constexpr std::uint32_t kItem = tag(0xFFFE, 0xE000);
constexpr std::uint32_t kItemDelimiter = tag(0xFFFE, 0xE00D);
constexpr std::uint32_t kSequenceDelimiter = tag(0xFFFE, 0xE0DD);
constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFFu;

bool long_form_vr(std::string_view vr) {
    return vr == "OB" || vr == "OW" || vr == "OF" || vr == "SQ" || vr == "UT" || vr == "UN" ||
           vr == "OD" || vr == "OL" || vr == "OV" || vr == "UC" || vr == "UR" || vr == "SV" || vr == "UV";
}

std::string trim(std::string_view v) {
    std::size_t end = v.size();
    while (end > 0 && (v[end - 1] == ' ' || v[end - 1] == '\0')) --end;
    std::size_t begin = 0;
    while (begin < end && v[begin] == ' ') ++begin;
    return std::string(v.substr(begin, end - begin));
}

/// Walks a little-endian data set, keeping top-level element values and
/// skipping nested sequences.
class DatasetParser {
public:
    DatasetParser(std::string_view bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

    [[noreturn]] void fail(ErrorCode code, const std::string& why) const {
        throw Error(code, origin_ + ": " + why);
    }

    std::uint16_t u16(std::size_t at) const {
        if (at + 2 > bytes_.size()) fail(ErrorCode::MalformedFile, "truncated element");
        return static_cast<std::uint16_t>(static_cast<unsigned char>(bytes_[at]) |
                                          (static_cast<unsigned char>(bytes_[at + 1]) << 8));
    }
    std::uint32_t u32(std::size_t at) const {
        return std::uint32_t{u16(at)} | (std::uint32_t{u16(at + 2)} << 16);
    }

    struct Header {
        std::uint32_t tag = 0;
        std::string vr;
        std::uint32_t length = 0;
        std::size_t value_offset = 0;
    };

    Header read_header(std::size_t at, bool explicit_vr) const {
        Header h;
        h.tag = (std::uint32_t{u16(at)} << 16) | u16(at + 2);
        const std::uint16_t group = static_cast<std::uint16_t>(h.tag >> 16);
        // Item and delimiter tags never carry a VR.
        if (group == 0xFFFE || !explicit_vr) {
            h.length = u32(at + 4);
            h.value_offset = at + 8;
            return h;
        }
        if (at + 6 > bytes_.size()) fail(ErrorCode::MalformedFile, "truncated element header");
        h.vr = std::string(bytes_.substr(at + 4, 2));
        if (long_form_vr(h.vr)) {
            h.length = u32(at + 8);
            h.value_offset = at + 12;
        } else {
            h.length = u16(at + 6);
            h.value_offset = at + 8;
        }
        return h;
    }

    /// Skip an undefined-length sequence starting at `at` (first item);
    /// returns the offset just past its delimiter.
    std::size_t skip_undefined_sequence(std::size_t at, bool explicit_vr) const {
        while (true) {
            const Header item = read_header(at, false);
            if (item.tag == kSequenceDelimiter) return item.value_offset;
            if (item.tag != kItem) fail(ErrorCode::MalformedFile, "expected sequence item");
            if (item.length != kUndefinedLength) {
                at = checked_end(item.value_offset, item.length);
                continue;
            }
            at = item.value_offset;
            while (true) {
                const Header inner = read_header(at, explicit_vr);
                if (inner.tag == kItemDelimiter) {
                    at = inner.value_offset;
                    break;
                }
                at = skip_element(inner, explicit_vr);
            }
        }
    }

    std::size_t skip_element(const Header& h, bool explicit_vr) const {
        if (h.length == kUndefinedLength) {
            if (h.tag == kPixelData) {
                fail(ErrorCode::UnsupportedTransferSyntax, "encapsulated pixel data is not supported");
            }
            return skip_undefined_sequence(h.value_offset, explicit_vr);
        }
        return checked_end(h.value_offset, h.length);
    }

    std::size_t checked_end(std::size_t offset, std::uint32_t length) const {
        if (offset + length > bytes_.size()) fail(ErrorCode::MalformedFile, "element runs past end of file");
        return offset + length;
    }

    /// Top-level elements from `at` to end of file (or up to stop_group).
    std::size_t parse(std::size_t at, bool explicit_vr, std::optional<std::uint16_t> only_group) {
        while (at + 8 <= bytes_.size()) {
            const Header h = read_header(at, explicit_vr);
            if (only_group && (h.tag >> 16) != *only_group) return at;
            if (h.length != kUndefinedLength) {
                const std::size_t end = checked_end(h.value_offset, h.length);
                elements_[h.tag] = bytes_.substr(h.value_offset, h.length);
                at = end;
            } else {
                elements_[h.tag] = std::string_view{};
                at = skip_element(h, explicit_vr);
            }
        }
        return at;
    }

    std::optional<std::string_view> find(std::uint32_t t) const {
        const auto it = elements_.find(t);
        if (it == elements_.end()) return std::nullopt;
        return it->second;
    }
    bool has(std::uint32_t t) const { return elements_.contains(t); }

    std::string_view require(std::uint32_t t, const char* name) const {
        const auto v = find(t);
        if (!v) fail(ErrorCode::MissingTag, std::string("missing tag ") + name);
        return *v;
    }

    std::uint16_t require_us(std::uint32_t t, const char* name) const {
        const auto v = require(t, name);
        if (v.size() < 2) fail(ErrorCode::MalformedFile, std::string(name) + " is not a US value");
        return static_cast<std::uint16_t>(static_cast<unsigned char>(v[0]) |
                                          (static_cast<unsigned char>(v[1]) << 8));
    }

    std::string_view bytes_;
    std::string origin_;
    std::map<std::uint32_t, std::string_view> elements_;
};

}  // namespace

ImageRecord decode_dicom(std::string_view bytes, const std::filesystem::path& origin) {
    DatasetParser parser(bytes, origin.empty() ? std::string("<dicom>") : origin.string());

    std::size_t at = 0;
    std::string syntax(kImplicitLittle);
    if (bytes.size() >= 132 && bytes.compare(128, 4, "DICM") == 0) {
        // File meta information is always explicit VR little endian.
        at = parser.parse(132, true, std::uint16_t{0x0002});
        syntax = trim(parser.require(kTransferSyntax, "TransferSyntaxUID"));
    }
    if (syntax != kImplicitLittle && syntax != kExplicitLittle) {
        parser.fail(ErrorCode::UnsupportedTransferSyntax, "transfer syntax " + syntax + " is not supported");
    }
    parser.parse(at, syntax == kExplicitLittle, std::nullopt);

    const std::string photometric_text = trim(parser.require(kPhotometric, "PhotometricInterpretation"));
    Photometric photometric;
    if (photometric_text == "MONOCHROME1") {
        photometric = Photometric::Mono1;
    } else if (photometric_text == "MONOCHROME2") {
        photometric = Photometric::Mono2;
    } else {
        parser.fail(ErrorCode::UnsupportedPhotometric, "photometric interpretation " + photometric_text);
    }

    if (parser.has(kSamplesPerPixel) && parser.require_us(kSamplesPerPixel, "SamplesPerPixel") != 1) {
        parser.fail(ErrorCode::MalformedFile, "only single-sample images are supported");
    }
    if (const auto frames = parser.find(kNumberOfFrames)) {
        const auto n = trim(*frames);
        if (!n.empty() && n != "1") parser.fail(ErrorCode::MalformedFile, "multi-frame images are not supported");
    }

    const int rows = parser.require_us(kRows, "Rows");
    const int columns = parser.require_us(kColumns, "Columns");
    const int bits_allocated = parser.require_us(kBitsAllocated, "BitsAllocated");
    const int bits_stored = parser.require_us(kBitsStored, "BitsStored");
    if (parser.require_us(kPixelRepresentation, "PixelRepresentation") != 0) {
        parser.fail(ErrorCode::MalformedFile, "signed pixel data is not supported");
    }
    if (bits_allocated != 8 && bits_allocated != 16) {
        parser.fail(ErrorCode::MalformedFile, "BitsAllocated must be 8 or 16");
    }
    if (bits_stored < 1 || bits_stored > bits_allocated) {
        parser.fail(ErrorCode::MalformedFile, "BitsStored out of range");
    }
    if (rows < 1 || columns < 1) parser.fail(ErrorCode::MalformedFile, "empty image");

    const auto data = parser.require(kPixelData, "PixelData");
    const std::size_t count = static_cast<std::size_t>(rows) * columns;
    const std::size_t sample_bytes = bits_allocated / 8;
    if (data.size() < count * sample_bytes) parser.fail(ErrorCode::MalformedFile, "truncated PixelData");

    const unsigned limit = (1u << bits_stored) - 1u;
    std::vector<GrayImage::Pixel> pixels(count);
    const auto* raw = reinterpret_cast<const unsigned char*>(data.data());
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = sample_bytes == 2 ? raw[2 * i] | (unsigned{raw[2 * i + 1]} << 8) : raw[i];
        if (v > limit) {
            parser.fail(ErrorCode::MalformedFile,
                        "stored value " + std::to_string(v) + " exceeds BitsStored=" + std::to_string(bits_stored));
        }
        pixels[i] = static_cast<GrayImage::Pixel>(v);
    }

    if (parser.has(kRescaleSlope) || parser.has(kRescaleIntercept) || parser.has(kWindowCenter) ||
        parser.has(kVoiLutSequence)) {
        spdlog::info("{}: rescale/VOI attributes present; using stored pixel values unchanged", parser.origin_);
    }

    ImageRecord record;
    record.image = GrayImage(columns, rows, bits_stored, photometric, std::move(pixels));
    record.original_photometric = photometric;
    record.source_path = origin;
    if (const auto m = parser.find(kManufacturer)) {
        auto vendor = trim(*m);
        if (!vendor.empty()) record.vendor = std::move(vendor);
    }
    return record;
}

ImageRecord read_dicom(const std::filesystem::path& path) { return decode_dicom(read_file(path), path); }

}  // namespace fgmatch
