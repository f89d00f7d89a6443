#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "fgmatch/error.hpp"
#include "fgmatch/reference.hpp"
#include "fgmatch/synthgen.hpp"
#include "oracles.hpp"

using namespace fgmatch;
namespace fs = std::filesystem;

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

struct Corpus {
    std::vector<GrayImage> images;
    std::vector<ForegroundMask> masks;

    void add(GrayImage img) {
        masks.push_back(foreground_mask(img));
        images.push_back(std::move(img));
    }
    std::vector<MaskedImage> items() const {
        std::vector<MaskedImage> out;
        for (std::size_t i = 0; i < images.size(); ++i) out.push_back({&images[i], &masks[i]});
        return out;
    }
};

fs::path temp_path(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "fgmatch_reference_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(BuildReference, SingleImageEqualsItsCdf) {
    Corpus c;
    c.add(synth_image(1, 32, 32, 10));
    const auto expected = normalize_cdf(fg_histogram(c.images[0], c.masks[0]).histogram);
    for (auto method : {ReferenceMethod::Averaged, ReferenceMethod::Pooled}) {
        ReferenceOptions opts;
        opts.method = method;
        const auto profile = build_reference(c.items(), opts);
        EXPECT_EQ(profile.cdf, expected);
        EXPECT_EQ(profile.image_count, 1);
    }
}

TEST(BuildReference, AveragedStepFunctions) {
    Corpus c;
    c.add(GrayImage(2, 1, 3, Photometric::Mono2, {2, 2}));
    c.add(GrayImage(3, 1, 3, Photometric::Mono2, {6, 6, 6}));
    const auto profile = build_reference(c.items(), {});
    const std::vector<double> expected = {0, 0, .5, .5, .5, .5, 1, 1};
    EXPECT_EQ(std::vector<double>(profile.cdf.values().begin(), profile.cdf.values().end()), expected);
}

TEST(BuildReference, EqualCountsMakeAveragedEqualPooled) {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> value(1, 255);
    for (int trial = 0; trial < 50; ++trial) {
        Corpus c;
        const int n = 1 + static_cast<int>(rng() % 50);
        for (int i = 0; i < 2; ++i) {
            std::vector<GrayImage::Pixel> px(n);
            for (auto& p : px) p = static_cast<GrayImage::Pixel>(value(rng));
            c.add(GrayImage(n, 1, 8, Photometric::Mono2, px));
        }
        ReferenceOptions pooled;
        pooled.method = ReferenceMethod::Pooled;
        const auto a = build_reference(c.items(), {});
        const auto b = build_reference(c.items(), pooled);
        for (std::size_t k = 0; k < a.cdf.bins(); ++k) ASSERT_NEAR(a.cdf[k], b.cdf[k], 1e-12);
    }
}

TEST(BuildReference, PermutationInvariant) {
    Corpus c;
    for (std::uint64_t s = 0; s < 6; ++s) c.add(vendor_transform(synth_image(s, 40, 30, 12), {0.6 + 0.15 * s, 1.0, 0, ""}));
    auto items = c.items();
    ReferenceOptions pooled;
    pooled.method = ReferenceMethod::Pooled;
    const auto avg0 = build_reference(items, {});
    const auto pool0 = build_reference(items, pooled);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(items.begin(), items.end(), rng);
        const auto avg = build_reference(items, {});
        EXPECT_EQ(build_reference(items, pooled).cdf, pool0.cdf);
        for (std::size_t k = 0; k < avg.cdf.bins(); ++k) ASSERT_NEAR(avg.cdf[k], avg0.cdf[k], 1e-12);
    }
}

TEST(BuildReference, ParallelMatchesSerial) {
    Corpus c;
    for (std::uint64_t s = 0; s < 7; ++s) c.add(synth_image(s, 40, 30, 12));
    ReferenceOptions opts;
    const auto serial = build_reference(c.items(), opts);
    opts.workers = 4;
    EXPECT_EQ(build_reference(c.items(), opts), serial);
}

TEST(BuildReference, EmptyForegroundNamesImage) {
    Corpus c;
    c.add(synth_image(1, 20, 20, 8));
    c.add(GrayImage(20, 20, 8));
    try {
        (void)build_reference(c.items(), {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyForeground);
        EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos);
    }
}

TEST(BuildReference, DepthHandling) {
    Corpus c;
    c.add(synth_image(1, 20, 20, 12));
    c.add(synth_image(2, 20, 20, 14));
    EXPECT_EQ(error_code_of([&] { (void)build_reference(c.items(), {}); }), ErrorCode::DepthMismatch);
    ReferenceOptions opts;
    opts.target_bits = 12;
    EXPECT_EQ(build_reference(c.items(), opts).bit_depth(), 12);
    opts.target_bits = 13;
    EXPECT_EQ(error_code_of([&] { (void)build_reference(c.items(), opts); }), ErrorCode::DepthMismatch);
}

TEST(Profile, SaveLoadRoundTrip) {
    Corpus c;
    for (std::uint64_t s = 0; s < 3; ++s) c.add(synth_image(s, 40, 30, 12));
    ReferenceOptions opts;
    opts.label = "low-energy";
    opts.created = "2024-01-02T03:04:05Z";
    const auto profile = build_reference(c.items(), opts);
    const auto path = temp_path("roundtrip.json");
    save_profile(profile, path);
    EXPECT_EQ(load_profile(path), profile);
}

TEST(Profile, DocumentShape) {
    ReferenceProfile p;
    p.cdf = NormalizedCdf(1, {0.0, 1.0});
    p.image_count = 2;
    p.label = "x";
    const auto text = to_json(p).dump();
    EXPECT_EQ(text.rfind("{\"version\":1,\"bit_depth\":1,\"method\":\"averaged\",\"image_count\":2", 0), 0u);
}

TEST(Profile, RejectsMalformedFiles) {
    auto write = [](const std::string& name, const std::string& body) {
        const auto path = temp_path(name);
        std::ofstream(path) << body;
        return path;
    };
    const auto decreasing = write("decreasing.json",
        R"({"version":1,"bit_depth":2,"method":"averaged","image_count":1,"label":"","cdf":[0,0.6,0.5,1]})");
    const auto terminal = write("terminal.json",
        R"({"version":1,"bit_depth":2,"method":"averaged","image_count":1,"label":"","cdf":[0,0.2,0.5,0.9]})");
    const auto short_cdf = write("short.json",
        R"({"version":1,"bit_depth":2,"method":"averaged","image_count":1,"cdf":[0,0.5,1]})");
    const auto version = write("version.json",
        R"({"version":2,"bit_depth":1,"method":"averaged","image_count":1,"cdf":[0,1]})");
    const auto count = write("count.json",
        R"({"version":1,"bit_depth":1,"method":"averaged","image_count":0,"cdf":[0,1]})");
    const auto method = write("method.json",
        R"({"version":1,"bit_depth":1,"method":"median","image_count":1,"cdf":[0,1]})");
    const auto syntax = write("syntax.json", "{not json");
    const auto missing = write("missing.json", R"({"version":1,"bit_depth":1,"image_count":1,"cdf":[0,1]})");
    for (const auto& path : {decreasing, terminal, short_cdf, version, count, method, syntax, missing}) {
        EXPECT_EQ(error_code_of([&] { (void)load_profile(path); }), ErrorCode::MalformedProfile) << path;
    }
    EXPECT_EQ(error_code_of([] { (void)load_profile(temp_path("absent.json")); }), ErrorCode::Io);
}
