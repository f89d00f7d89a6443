#include "fgmatch/image.hpp"

#include <algorithm>
#include <string>

#include "fgmatch/error.hpp"

namespace fgmatch {

std::string_view to_string(Photometric p) {
    return p == Photometric::Mono1 ? "MONO1" : "MONO2";
}

Photometric parse_photometric(std::string_view text) {
    if (text == "MONO1" || text == "MONOCHROME1") return Photometric::Mono1;
    if (text == "MONO2" || text == "MONOCHROME2") return Photometric::Mono2;
    throw Error(ErrorCode::UnsupportedPhotometric,
                "unsupported photometric interpretation '" + std::string(text) + "'");
}

namespace {

void check_geometry(int width, int height, int bit_depth) {
    if (width < 1 || height < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    if (bit_depth < GrayImage::kMinBitDepth || bit_depth > GrayImage::kMaxBitDepth) {
        throw Error(ErrorCode::InvalidArgument,
                    "bit depth out of range: " + std::to_string(bit_depth));
    }
}

}  // namespace

GrayImage::GrayImage(int width, int height, int bit_depth, Photometric photometric)
    : width_(width), height_(height), bit_depth_(bit_depth), photometric_(photometric) {
    check_geometry(width, height, bit_depth);
    pixels_.assign(static_cast<std::size_t>(width) * height, 0);
}

GrayImage::GrayImage(int width, int height, int bit_depth, Photometric photometric,
                     std::vector<Pixel> pixels)
    : width_(width),
      height_(height),
      bit_depth_(bit_depth),
      photometric_(photometric),
      pixels_(std::move(pixels)) {
    check_geometry(width, height, bit_depth);
    validate();
}

void GrayImage::validate() const {
    if (pixels_.size() != static_cast<std::size_t>(width_) * height_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "pixel buffer holds " + std::to_string(pixels_.size()) + " values, expected " +
                        std::to_string(static_cast<std::size_t>(width_) * height_));
    }
    const Pixel limit = max_value();
    const auto it = std::find_if(pixels_.begin(), pixels_.end(), [limit](Pixel p) { return p > limit; });
    if (it != pixels_.end()) {
        throw Error(ErrorCode::InvalidArgument,
                    "pixel value " + std::to_string(*it) + " exceeds " + std::to_string(bit_depth_) +
                        "-bit range");
    }
}

ForegroundMask::ForegroundMask(int width, int height, bool value)
    : width_(width),
      height_(height),
      flags_(static_cast<std::size_t>(width) * height, value ? 1 : 0) {}

ForegroundMask::ForegroundMask(int width, int height, std::vector<std::uint8_t> flags)
    : width_(width), height_(height), flags_(std::move(flags)) {
    if (flags_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::DimensionMismatch, "mask flag count does not match dimensions");
    }
    for (auto& f : flags_) f = f ? 1 : 0;
}

std::size_t ForegroundMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

GrayImage to_mono2(const GrayImage& img) {
    if (img.photometric() == Photometric::Mono2) return img;
    GrayImage out(img.width(), img.height(), img.bit_depth(), Photometric::Mono2);
    const GrayImage::Pixel top = img.max_value();
    std::transform(img.pixels().begin(), img.pixels().end(), out.mutable_pixels().begin(),
                   [top](GrayImage::Pixel p) { return static_cast<GrayImage::Pixel>(top - p); });
    return out;
}

ForegroundMask foreground_mask(const GrayImage& img, int min_intensity) {
    if (img.photometric() != Photometric::Mono2) {
        throw Error(ErrorCode::PhotometricNotNormalized,
                    "foreground masking requires a MONO2 image; convert with to_mono2 first");
    }
    if (min_intensity < 1) {
        throw Error(ErrorCode::InvalidArgument, "min_intensity must be >= 1");
    }
    std::vector<std::uint8_t> flags(img.size());
    const auto px = img.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
        flags[i] = px[i] >= min_intensity ? 1 : 0;
    }
    return ForegroundMask(img.width(), img.height(), std::move(flags));
}

ForegroundMask largest_component(const ForegroundMask& mask, Connectivity connectivity) {
    const int w = mask.width();
    const int h = mask.height();
    const std::size_t n = mask.size();

    // 0 = unvisited background/foreground, otherwise 1-based component label.
    std::vector<std::uint32_t> label(n, 0);
    std::vector<std::size_t> stack;

    std::uint32_t next_label = 0;
    std::uint32_t best_label = 0;
    std::size_t best_size = 0;

    const bool eight = connectivity == Connectivity::Eight;

    for (std::size_t start = 0; start < n; ++start) {
        if (!mask[start] || label[start] != 0) continue;
        const std::uint32_t current = ++next_label;
        std::size_t size = 0;
        label[start] = current;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(idx % w);
            const int y = static_cast<int>(idx / w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (!eight && dx != 0 && dy != 0) continue;
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (mask[nidx] && label[nidx] == 0) {
                        label[nidx] = current;
                        stack.push_back(nidx);
                    }
                }
            }
        }
        // Scan order visits each component first at its smallest index, so a
        // strict comparison keeps the earliest component on ties.
        if (size > best_size) {
            best_size = size;
            best_label = current;
        }
    }

    if (best_size == 0) {
        throw Error(ErrorCode::EmptyForeground, "mask has no foreground pixels");
    }

    std::vector<std::uint8_t> flags(n, 0);
    for (std::size_t i = 0; i < n; ++i) flags[i] = label[i] == best_label ? 1 : 0;
    return ForegroundMask(w, h, std::move(flags));
}

}  // namespace fgmatch
