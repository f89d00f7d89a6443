#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fgmatch/error.hpp"
#include "fgmatch/synthgen.hpp"

using namespace fgmatch;

TEST(SynthImage, DeterministicPerSeed) {
    EXPECT_EQ(synth_image(42, 64, 48, 12), synth_image(42, 64, 48, 12));
}

TEST(SynthImage, DifferentSeedsDiffer) {
    for (std::uint64_t s = 0; s < 20; ++s) EXPECT_NE(synth_image(s, 32, 32, 12), synth_image(s + 1, 32, 32, 12));
}

TEST(SynthImage, HalfDiscOnZeroBackground) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto img = synth_image(seed, 80, 100, 12);
        EXPECT_EQ(img.photometric(), Photometric::Mono2);
        const auto mask = foreground_mask(img);
        // Connected and touching exactly one vertical edge.
        EXPECT_EQ(largest_component(mask), mask);
        bool left = false, right = false;
        for (int y = 0; y < img.height(); ++y) {
            left |= img.at(0, y) != 0;
            right |= img.at(img.width() - 1, y) != 0;
        }
        EXPECT_NE(left, right);
        // Roughly a half disc: between a quarter and three quarters of the frame.
        const double fill = static_cast<double>(mask.count()) / static_cast<double>(img.size());
        EXPECT_GT(fill, 0.2);
        EXPECT_LT(fill, 0.75);
        // Values span most of [0.1, 0.9] of full scale.
        const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end(),
                                                  [](auto a, auto b) { return (a == 0 ? 65535 : a) < (b == 0 ? 65535 : b); });
        EXPECT_LT(*lo, 0.2 * 4095);
        EXPECT_GT(*std::max_element(img.pixels().begin(), img.pixels().end()), 0.8 * 4095);
        (void)hi;
    }
}

TEST(SynthImage, RejectsTinyFrames) {
    EXPECT_THROW((void)synth_image(1, 15, 40, 12), Error);
}

TEST(VendorTransform, IdentityParameters) {
    const auto img = synth_image(3, 40, 40, 12);
    EXPECT_EQ(vendor_transform(img, {1.0, 1.0, 0, ""}), img);
}

TEST(VendorTransform, GammaTwoAt1024) {
    const GrayImage img(1, 1, 12, Photometric::Mono2, {1024});
    EXPECT_EQ(vendor_transform(img, {2.0, 1.0, 0, ""}).pixels()[0], 256);
}

TEST(VendorTransform, PreservesZeroSetAndOrder) {
    const auto img = synth_image(4, 64, 64, 12);
    for (const VendorStyle style : {VendorStyle{0.6, 1.0, 0, ""}, VendorStyle{1.4, 1.0, 0, ""},
                                    VendorStyle{2.5, 0.3, -200, ""}, VendorStyle{0.5, 1.5, 300, ""}}) {
        const auto out = vendor_transform(img, style);
        for (std::size_t i = 0; i < img.size(); ++i) ASSERT_EQ(img.pixels()[i] == 0, out.pixels()[i] == 0);
        // Order preserved over all levels.
        GrayImage ramp(4095, 1, 12);
        for (int v = 1; v < 4096; ++v) ramp.mutable_pixels()[v - 1] = static_cast<GrayImage::Pixel>(v);
        const auto mapped = vendor_transform(ramp, style);
        for (std::size_t i = 1; i < mapped.size(); ++i) ASSERT_LE(mapped.pixels()[i - 1], mapped.pixels()[i]);
        ASSERT_GE(mapped.pixels()[0], 1);
    }
}

TEST(VendorTransform, RejectsBadStyles) {
    const auto img = synth_image(4, 16, 16, 12);
    EXPECT_THROW((void)vendor_transform(img, {0.0, 1.0, 0, ""}), Error);
    EXPECT_THROW((void)vendor_transform(img, {1.0, -1.0, 0, ""}), Error);
    EXPECT_THROW((void)vendor_transform(img, {NAN, 1.0, 0, ""}), Error);
}

TEST(Prng, UnitUniformInRange) {
    double sum = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = unit_uniform(9, i);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / 10000, 0.5, 0.02);
    static_assert(splitmix64(0) == 0xE220A8397B1DCDAFull);
}
