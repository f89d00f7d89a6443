#include "fgmatch/formats.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>

#include "fgmatch/error.hpp"
#include "fgmatch/io.hpp"

namespace fgmatch {

std::string_view to_string(Energy e) { return e == Energy::Low ? "low" : "high"; }

Energy parse_energy(std::string_view text) {
    if (text == "low") return Energy::Low;
    if (text == "high") return Energy::High;
    throw Error(ErrorCode::InvalidArgument, "energy must be 'low' or 'high', got '" + std::string(text) + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& image_path) {
    auto p = image_path;
    p += ".json";
    return p;
}

nlohmann::json sidecar_json(const ImageRecord& record) {
    nlohmann::json doc;
    doc["photometric"] = std::string(to_string(record.image.photometric()));
    doc["original_photometric"] = std::string(to_string(record.original_photometric));
    doc["bit_depth"] = record.image.bit_depth();
    doc["vendor"] = record.vendor ? nlohmann::json(*record.vendor) : nlohmann::json(nullptr);
    doc["energy"] = record.energy ? nlohmann::json(std::string(to_string(*record.energy)))
                                  : nlohmann::json(nullptr);
    if (!record.provenance.is_null()) doc["harmonization"] = record.provenance;
    return doc;
}

namespace {

class HeaderReader {
public:
    HeaderReader(std::string_view bytes, std::string origin) : bytes_(bytes), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw Error(ErrorCode::MalformedFile, origin_ + ": " + why);
    }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    unsigned long number(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
        unsigned long value = 0;
        const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
        if (start == pos_ || ec != std::errc{}) fail(std::string("bad ") + what);
        return value;
    }

    std::size_t pos_ = 0;
    std::string_view bytes_;
    std::string origin_;
};

int depth_for_maxval(unsigned long maxval) {
    int bits = 0;
    while ((1ul << bits) <= maxval) ++bits;
    return bits;
}

void apply_sidecar(ImageRecord& record, const std::filesystem::path& image_path) {
    const auto path = sidecar_path(image_path);
    if (image_path.empty() || !std::filesystem::exists(path)) return;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
    }
    try {
        if (auto it = doc.find("photometric"); it != doc.end() && !it->is_null()) {
            const auto photometric = parse_photometric(it->get<std::string>());
            record.image = GrayImage(record.image.width(), record.image.height(), record.image.bit_depth(),
                                     photometric,
                                     {record.image.pixels().begin(), record.image.pixels().end()});
        }
        record.original_photometric = record.image.photometric();
        if (auto it = doc.find("original_photometric"); it != doc.end() && !it->is_null()) {
            record.original_photometric = parse_photometric(it->get<std::string>());
        }
        if (auto it = doc.find("vendor"); it != doc.end() && !it->is_null()) {
            record.vendor = it->get<std::string>();
        }
        if (auto it = doc.find("energy"); it != doc.end() && !it->is_null()) {
            record.energy = parse_energy(it->get<std::string>());
        }
        if (auto it = doc.find("harmonization"); it != doc.end()) record.provenance = *it;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
    }
}

}  // namespace

ImageRecord decode_pgm(std::string_view bytes, const std::filesystem::path& origin) {
    HeaderReader in(bytes, origin.empty() ? std::string("<pgm>") : origin.string());
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') in.fail("not a binary PGM (magic P5)");
    in.pos_ = 2;
    const auto width = in.number("width");
    const auto height = in.number("height");
    const auto maxval = in.number("maxval");
    if (width < 1 || height < 1 || width > 1u << 20 || height > 1u << 20) in.fail("bad dimensions");
    if (maxval < 1 || maxval > 65535) in.fail("maxval must be in [1, 65535]");
    if (in.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[in.pos_]))) {
        in.fail("missing whitespace after maxval");
    }
    ++in.pos_;

    const std::size_t count = static_cast<std::size_t>(width) * height;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (bytes.size() - in.pos_ < count * sample_bytes) in.fail("truncated pixel data");

    std::vector<GrayImage::Pixel> pixels(count);
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + in.pos_);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned v = sample_bytes == 2 ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
        if (v > maxval) in.fail("sample " + std::to_string(v) + " exceeds maxval " + std::to_string(maxval));
        pixels[i] = static_cast<GrayImage::Pixel>(v);
    }

    ImageRecord record;
    record.image = GrayImage(static_cast<int>(width), static_cast<int>(height), depth_for_maxval(maxval),
                             Photometric::Mono2, std::move(pixels));
    record.source_path = origin;
    return record;
}

ImageRecord read_pgm(const std::filesystem::path& path) {
    auto record = decode_pgm(read_file(path), path);
    apply_sidecar(record, path);
    return record;
}

std::string encode_pgm(const GrayImage& image) {
    const unsigned maxval = image.max_value();
    std::string out = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n" +
                      std::to_string(maxval) + "\n";
    const std::size_t header = out.size();
    const bool wide = maxval > 255;
    out.resize(header + image.size() * (wide ? 2 : 1));
    auto* dst = reinterpret_cast<unsigned char*>(out.data() + header);
    const auto px = image.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        if (wide) {
            dst[2 * i] = static_cast<unsigned char>(px[i] >> 8);
            dst[2 * i + 1] = static_cast<unsigned char>(px[i] & 0xFF);
        } else {
            dst[i] = static_cast<unsigned char>(px[i]);
        }
    }
    return out;
}

void write_pgm(const ImageRecord& record, const std::filesystem::path& path) {
    write_file_atomic(path, encode_pgm(record.image));
    write_file_atomic(sidecar_path(path), sidecar_json(record).dump(2) + "\n");
}

ImageRecord read_image(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    const bool dicm = bytes.size() >= 132 && bytes.compare(128, 4, "DICM") == 0;
    if (dicm || ext == ".dcm") return decode_dicom(bytes, path);
    auto record = decode_pgm(bytes, path);
    apply_sidecar(record, path);
    return record;
}

}  // namespace fgmatch
