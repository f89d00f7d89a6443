#pragma once

#include <cstdint>
#include <string>

#include "fgmatch/image.hpp"

namespace fgmatch {

/// Monotone intensity distortion standing in for a device's processing chain.
struct VendorStyle {
    double gamma = 1.0;
    double gain = 1.0;
    int offset = 0;
    std::string label;

    /// Throws InvalidArgument unless gamma and gain are finite and positive.
    void validate() const;
};

/// SplitMix64 finalizer. Pixel noise is drawn as mix(seed, index), so every
/// pixel's value depends only on the seed and its own position.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) for stream `seed`, element `index`.
[[nodiscard]] constexpr double unit_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
    const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Half-disc phantom anchored to the left or right edge, with a smooth radial
/// falloff over roughly [0.1, 0.9] of full scale plus seeded noise.
/// Background is exactly 0. Requires width, height >= 16.
[[nodiscard]] GrayImage synth_image(std::uint64_t seed, int width, int height, int bit_depth);

/// p -> clamp(round(gain * max * (p / max)^gamma + offset), 1, max) for p > 0;
/// zeros stay zero.
[[nodiscard]] GrayImage vendor_transform(const GrayImage& img, const VendorStyle& style);

}  // namespace fgmatch
