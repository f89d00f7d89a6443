#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace fgmatch {

enum class Photometric { Mono1, Mono2 };

std::string_view to_string(Photometric p);
Photometric parse_photometric(std::string_view text);

/// Row-major grayscale raster with an explicit stored bit depth.
///
/// The bit depth is part of the value, never inferred from the pixel data:
/// a 14-bit image whose brightest pixel is 900 still bins over [0, 16383].
class GrayImage {
public:
    using Pixel = std::uint16_t;

    static constexpr int kMinBitDepth = 1;
    static constexpr int kMaxBitDepth = 16;

    GrayImage() = default;
    /// Zero-filled image.
    GrayImage(int width, int height, int bit_depth, Photometric photometric = Photometric::Mono2);
    /// Validates dimensions, depth and every pixel against 2^bit_depth.
    GrayImage(int width, int height, int bit_depth, Photometric photometric,
              std::vector<Pixel> pixels);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] int bit_depth() const noexcept { return bit_depth_; }
    [[nodiscard]] Photometric photometric() const noexcept { return photometric_; }
    [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }
    [[nodiscard]] Pixel max_value() const noexcept {
        return static_cast<Pixel>((1u << bit_depth_) - 1u);
    }

    [[nodiscard]] std::span<const Pixel> pixels() const noexcept { return pixels_; }
    [[nodiscard]] std::span<const Pixel> row(int y) const noexcept {
        return std::span<const Pixel>(pixels_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }
    [[nodiscard]] Pixel at(int x, int y) const noexcept {
        return pixels_[static_cast<std::size_t>(y) * width_ + x];
    }

    /// Mutable access for producers; callers are responsible for keeping
    /// values below 2^bit_depth (validate() re-checks).
    [[nodiscard]] std::span<Pixel> mutable_pixels() noexcept { return pixels_; }
    void validate() const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int bit_depth_ = 8;
    Photometric photometric_ = Photometric::Mono2;
    std::vector<Pixel> pixels_;
};

class ForegroundMask {
public:
    ForegroundMask() = default;
    ForegroundMask(int width, int height, bool value = false);
    ForegroundMask(int width, int height, std::vector<std::uint8_t> flags);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return flags_.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const noexcept { return flags_[i] != 0; }
    [[nodiscard]] bool at(int x, int y) const noexcept {
        return flags_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(std::size_t i, bool v) noexcept { flags_[i] = v ? 1 : 0; }

    [[nodiscard]] std::span<const std::uint8_t> flags() const noexcept { return flags_; }
    [[nodiscard]] std::size_t count() const noexcept;

    [[nodiscard]] bool matches(const GrayImage& img) const noexcept {
        return img.width() == width_ && img.height() == height_;
    }

    friend bool operator==(const ForegroundMask&, const ForegroundMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> flags_;
};

enum class Connectivity { Four = 4, Eight = 8 };

/// MONOCHROME1 -> MONOCHROME2 by intensity complement; MONO2 passes through.
[[nodiscard]] GrayImage to_mono2(const GrayImage& img);

/// Flags pixels with value >= min_intensity. Requires a MONO2 image.
[[nodiscard]] ForegroundMask foreground_mask(const GrayImage& img, int min_intensity = 1);

/// Keeps only the largest connected component. Equal sizes resolve to the
/// component whose first pixel comes earliest in row-major order.
[[nodiscard]] ForegroundMask largest_component(const ForegroundMask& mask,
                                               Connectivity connectivity = Connectivity::Eight);

}  // namespace fgmatch
