#include <gtest/gtest.h>

#include <random>

#include "fgmatch/error.hpp"
#include "fgmatch/image.hpp"
#include "oracles.hpp"

using namespace fgmatch;

namespace {

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected fgmatch::Error";
    return ErrorCode::Io;
}

GrayImage random_image(std::mt19937_64& rng, int w, int h, int bits, Photometric photometric) {
    std::uniform_int_distribution<int> value(0, (1 << bits) - 1);
    std::vector<GrayImage::Pixel> px(static_cast<std::size_t>(w) * h);
    for (auto& p : px) p = static_cast<GrayImage::Pixel>(value(rng));
    return GrayImage(w, h, bits, photometric, std::move(px));
}

}  // namespace

TEST(GrayImage, RejectsValuesAboveBitDepth) {
    EXPECT_EQ(error_code_of([] { GrayImage(2, 1, 12, Photometric::Mono2, {0, 4096}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(error_code_of([] { GrayImage(2, 1, 12, Photometric::Mono2, {0}); }), ErrorCode::DimensionMismatch);
    EXPECT_EQ(error_code_of([] { GrayImage(0, 1, 12); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(error_code_of([] { GrayImage(1, 1, 17); }), ErrorCode::InvalidArgument);
}

TEST(ToMono2, Mono2IsIdentity) {
    const GrayImage img(3, 1, 12, Photometric::Mono2, {0, 17, 4095});
    EXPECT_EQ(to_mono2(img), img);
}

TEST(ToMono2, ComplementsMono1) {
    const GrayImage img(2, 1, 12, Photometric::Mono1, {0, 4095});
    const auto out = to_mono2(img);
    EXPECT_EQ(out.photometric(), Photometric::Mono2);
    EXPECT_EQ(out.pixels()[0], 4095);
    EXPECT_EQ(out.pixels()[1], 0);
    EXPECT_EQ(out.bit_depth(), 12);
}

TEST(ToMono2, ComplementTwiceRecoversOriginal) {
    std::mt19937_64 rng(7);
    for (int bits : {8, 12, 14, 16}) {
        const auto img = random_image(rng, 9, 7, bits, Photometric::Mono1);
        auto once = to_mono2(img);
        // Relabel as MONO1 to complement again.
        const GrayImage relabelled(once.width(), once.height(), bits, Photometric::Mono1,
                                   {once.pixels().begin(), once.pixels().end()});
        const auto twice = to_mono2(relabelled);
        EXPECT_TRUE(std::equal(twice.pixels().begin(), twice.pixels().end(), img.pixels().begin()));
        for (std::size_t i = 0; i < img.size(); ++i) {
            ASSERT_EQ(int{img.pixels()[i]} + int{once.pixels()[i]}, (1 << bits) - 1);
        }
        EXPECT_EQ(to_mono2(once), once);
    }
}

TEST(ForegroundMask, Thresholds) {
    const GrayImage img(3, 1, 8, Photometric::Mono2, {0, 1, 5});
    EXPECT_EQ(foreground_mask(img).flags()[0], 0);
    const auto m1 = foreground_mask(img, 1);
    EXPECT_EQ(std::vector<std::uint8_t>(m1.flags().begin(), m1.flags().end()), (std::vector<std::uint8_t>{0, 1, 1}));
    const auto m3 = foreground_mask(img, 3);
    EXPECT_EQ(std::vector<std::uint8_t>(m3.flags().begin(), m3.flags().end()), (std::vector<std::uint8_t>{0, 0, 1}));
}

TEST(ForegroundMask, AllZeroImageHasEmptyMask) {
    const GrayImage img(4, 4, 12);
    EXPECT_EQ(foreground_mask(img).count(), 0u);
}

TEST(ForegroundMask, DefaultThresholdIsStrictlyPositive) {
    std::mt19937_64 rng(3);
    const auto img = random_image(rng, 16, 16, 12, Photometric::Mono2);
    const auto mask = foreground_mask(img);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(mask[i], img.pixels()[i] > 0);
}

TEST(ForegroundMask, RejectsMono1) {
    const GrayImage img(1, 1, 12, Photometric::Mono1, {3});
    EXPECT_EQ(error_code_of([&] { (void)foreground_mask(img); }), ErrorCode::PhotometricNotNormalized);
}

TEST(LargestComponent, SingleComponentUnchanged) {
    const ForegroundMask mask(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0});
    EXPECT_EQ(largest_component(mask), mask);
    EXPECT_EQ(largest_component(mask, Connectivity::Four), mask);
}

TEST(LargestComponent, KeepsSixPixelBlob) {
    // 6-pixel blob top-left, 2-pixel blob bottom-right.
    const std::vector<std::uint8_t> flags = {
        1, 1, 0, 0,
        1, 1, 0, 0,
        1, 1, 0, 1,
        0, 0, 0, 1,
    };
    const std::vector<std::uint8_t> expected = {
        1, 1, 0, 0,
        1, 1, 0, 0,
        1, 1, 0, 0,
        0, 0, 0, 0,
    };
    ASSERT_EQ(fgmatch::testing::largest_component_oracle(flags, 4, 4, true), expected);
    const auto out = largest_component(ForegroundMask(4, 4, flags));
    EXPECT_EQ(std::vector<std::uint8_t>(out.flags().begin(), out.flags().end()), expected);
}

TEST(LargestComponent, TieGoesToEarliestComponent) {
    const std::vector<std::uint8_t> flags = {
        0, 0, 0, 1,
        0, 0, 0, 1,
        1, 0, 0, 0,
        1, 0, 0, 0,
    };
    const std::vector<std::uint8_t> expected = {
        0, 0, 0, 1,
        0, 0, 0, 1,
        0, 0, 0, 0,
        0, 0, 0, 0,
    };
    ASSERT_EQ(fgmatch::testing::largest_component_oracle(flags, 4, 4, true), expected);
    const auto out = largest_component(ForegroundMask(4, 4, flags));
    EXPECT_EQ(std::vector<std::uint8_t>(out.flags().begin(), out.flags().end()), expected);
}

TEST(LargestComponent, ConnectivityMatters) {
    // Diagonal chain: one component under 8-connectivity, three under 4.
    const std::vector<std::uint8_t> flags = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const ForegroundMask mask(3, 3, flags);
    EXPECT_EQ(largest_component(mask, Connectivity::Eight).count(), 3u);
    EXPECT_EQ(largest_component(mask, Connectivity::Four).count(), 1u);
    EXPECT_TRUE(largest_component(mask, Connectivity::Four)[0]);
}

TEST(LargestComponent, EmptyMaskThrows) {
    EXPECT_EQ(error_code_of([] { (void)largest_component(ForegroundMask(3, 3)); }), ErrorCode::EmptyForeground);
}

TEST(LargestComponent, MatchesRelaxationOracleOnRandomMasks) {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution on(0.45);
    for (int trial = 0; trial < 300; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 12);
        const int h = 1 + static_cast<int>(rng() % 12);
        std::vector<std::uint8_t> flags(static_cast<std::size_t>(w) * h);
        for (auto& f : flags) f = on(rng);
        if (std::count(flags.begin(), flags.end(), 1) == 0) flags[0] = 1;
        for (bool eight : {true, false}) {
            const auto expected = fgmatch::testing::largest_component_oracle(flags, w, h, eight);
            const auto got = largest_component(ForegroundMask(w, h, flags), eight ? Connectivity::Eight : Connectivity::Four);
            ASSERT_EQ(std::vector<std::uint8_t>(got.flags().begin(), got.flags().end()), expected)
                << "trial " << trial << " eight=" << eight;
            // Subset of the input, and connected: a single relaxation label.
            const auto labels = fgmatch::testing::relax_components(expected, w, h, eight);
            long seen = -1;
            for (std::size_t i = 0; i < flags.size(); ++i) {
                if (!got[i]) continue;
                ASSERT_TRUE(flags[i]);
                if (seen < 0) seen = labels[i];
                ASSERT_EQ(labels[i], seen);
            }
        }
    }
}
