#include "fgmatch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fgmatch/error.hpp"

namespace fgmatch {

void VendorStyle::validate() const {
    if (!std::isfinite(gamma) || gamma <= 0.0 || !std::isfinite(gain) || gain <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "vendor style needs finite, positive gamma and gain");
    }
}

namespace {

// Shape parameters drawn from reserved indices of the seed's stream, far
// above any pixel index.
constexpr std::uint64_t kParamBase = 0xFFFF'FFFF'0000'0000ull;

}  // namespace

GrayImage synth_image(std::uint64_t seed, int width, int height, int bit_depth) {
    if (width < 16 || height < 16) {
        throw Error(ErrorCode::InvalidArgument, "phantoms need at least 16x16 pixels");
    }
    GrayImage img(width, height, bit_depth, Photometric::Mono2);
    const double full = static_cast<double>(img.max_value());

    const bool right_edge = unit_uniform(seed, kParamBase) < 0.5;
    const double radius_scale = 0.75 + 0.2 * unit_uniform(seed, kParamBase + 1);
    const double center_jitter = 0.1 * (unit_uniform(seed, kParamBase + 2) - 0.5);
    const double falloff = 1.5 + 1.5 * unit_uniform(seed, kParamBase + 3);
    const double noise_amplitude = 0.02 * full;

    const double cx = right_edge ? static_cast<double>(width - 1) : 0.0;
    const double cy = (0.5 + center_jitter) * (height - 1);
    const double radius = radius_scale * std::min(static_cast<double>(width), 0.5 * height);

    auto px = img.mutable_pixels();
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double d = std::hypot(x - cx, y - cy) / radius;
            if (d >= 1.0) continue;
            const auto index = static_cast<std::uint64_t>(y) * width + x;
            const double level = 0.1 + 0.8 * (1.0 - std::pow(d, falloff));
            const double noise = noise_amplitude * (2.0 * unit_uniform(seed, index) - 1.0);
            const double value = std::round(level * full + noise);
            px[index] = static_cast<GrayImage::Pixel>(std::clamp(value, 1.0, full));
        }
    }
    return img;
}

GrayImage vendor_transform(const GrayImage& img, const VendorStyle& style) {
    style.validate();
    if (img.photometric() != Photometric::Mono2) {
        throw Error(ErrorCode::PhotometricNotNormalized, "vendor_transform requires a MONO2 image");
    }
    const double full = static_cast<double>(img.max_value());
    // Per-level table: the transform only depends on the value.
    std::vector<GrayImage::Pixel> lut(std::size_t{img.max_value()} + 1, 0);
    for (std::size_t p = 1; p < lut.size(); ++p) {
        const double v = std::round(style.gain * full * std::pow(p / full, style.gamma) + style.offset);
        lut[p] = static_cast<GrayImage::Pixel>(std::clamp(v, 1.0, full));
    }
    GrayImage out(img.width(), img.height(), img.bit_depth(), Photometric::Mono2);
    std::transform(img.pixels().begin(), img.pixels().end(), out.mutable_pixels().begin(),
                   [&lut](GrayImage::Pixel p) { return lut[p]; });
    return out;
}

}  // namespace fgmatch
