#include <gtest/gtest.h>

#include <random>

#include "fgmatch/error.hpp"
#include "fgmatch/metrics.hpp"
#include "oracles.hpp"

using namespace fgmatch;
using fgmatch::testing::random_counts;

namespace {

NormalizedCdf step_at(int bits, std::size_t v) {
    std::vector<std::uint64_t> counts(std::size_t{1} << bits, 0);
    counts[v] = 1;
    return normalize_cdf(Histogram(bits, counts));
}

}  // namespace

TEST(CdfL1, IdentityAndSymmetry) {
    const auto a = step_at(3, 2);
    const auto b = step_at(3, 6);
    EXPECT_EQ(cdf_l1(a, a), 0.0);
    EXPECT_EQ(cdf_l1(a, b), cdf_l1(b, a));
}

TEST(CdfL1, TwoSteps) {
    // CDFs differ by exactly 1 on bins 2..5.
    EXPECT_DOUBLE_EQ(cdf_l1(step_at(3, 2), step_at(3, 6)), 4.0 / 7.0);
}

TEST(CdfL1, DepthMismatch) {
    EXPECT_THROW((void)cdf_l1(step_at(3, 2), step_at(4, 2)), Error);
}

TEST(CdfL1, MetricAxiomsOnRandomCurves) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const int bits = 1 + static_cast<int>(rng() % 10);
        const auto a = normalize_cdf(Histogram(bits, random_counts(rng, bits)));
        const auto b = normalize_cdf(Histogram(bits, random_counts(rng, bits)));
        const auto c = normalize_cdf(Histogram(bits, random_counts(rng, bits)));
        ASSERT_GE(cdf_l1(a, b), 0.0);
        ASSERT_EQ(cdf_l1(a, b), cdf_l1(b, a));
        ASSERT_LE(cdf_l1(a, c), cdf_l1(a, b) + cdf_l1(b, c) + 1e-12);
        if (a != b) ASSERT_GT(cdf_l1(a, b), 0.0);
    }
}

TEST(Kl, IdenticalIsZero) {
    std::mt19937_64 rng(32);
    const Histogram h(8, random_counts(rng, 8));
    EXPECT_LE(kl_divergence(h, h), 1e-12);
}

TEST(Kl, DisjointSupportIsLarge) {
    std::vector<std::uint64_t> p(256, 0), q(256, 0);
    p[10] = 5;
    q[200] = 5;
    const double kl = kl_divergence(Histogram(8, p), Histogram(8, q));
    // Dominated by ln(1 / epsilon).
    EXPECT_GT(kl, 15.0);
}

TEST(Kl, NonNegativeOnRandomPairs) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 1000; ++trial) {
        const int bits = 1 + static_cast<int>(rng() % 10);
        const Histogram p(bits, random_counts(rng, bits, 0.5, 100));
        const Histogram q(bits, random_counts(rng, bits, 0.5, 100));
        ASSERT_GE(kl_divergence(p, q), 0.0);
    }
}

TEST(Kl, Errors) {
    EXPECT_THROW((void)kl_divergence(Histogram(4), Histogram(4, {0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})), Error);
    EXPECT_THROW((void)kl_divergence(Histogram(3, {0, 1, 0, 0, 0, 0, 0, 0}), Histogram(2, {0, 1, 0, 0})), Error);
}

TEST(Kl, MassFromCdfMatchesHistogramRoute) {
    std::mt19937_64 rng(34);
    const Histogram p(6, random_counts(rng, 6));
    const Histogram q(6, random_counts(rng, 6));
    EXPECT_NEAR(kl_divergence(p, q), kl_divergence(mass_from_cdf(normalize_cdf(p)), mass_from_cdf(normalize_cdf(q))),
                1e-9);
}

TEST(GapReport, AllReferenceIsZero) {
    const auto ref = step_at(4, 7);
    const std::vector<NormalizedCdf> group = {ref};
    const auto gap = gap_report(group, group, ref);
    EXPECT_EQ(gap.cross.mean, 0.0);
    EXPECT_EQ(gap.cross.max, 0.0);
    EXPECT_EQ(gap.a_to_reference.max, 0.0);
    EXPECT_EQ(gap.b_to_reference.max, 0.0);
}

TEST(GapReport, SingletonsHaveMeanEqualMax) {
    const std::vector<NormalizedCdf> a = {step_at(3, 2)};
    const std::vector<NormalizedCdf> b = {step_at(3, 6)};
    const auto gap = gap_report(a, b, step_at(3, 4));
    EXPECT_EQ(gap.cross.mean, gap.cross.max);
    EXPECT_EQ(gap.cross.pairs, 1u);
    EXPECT_DOUBLE_EQ(gap.cross.mean, 4.0 / 7.0);
    EXPECT_EQ(gap.a_to_reference.mean, gap.a_to_reference.max);
    EXPECT_EQ(gap.within_a.pairs, 0u);
}

TEST(GapReport, AggregatesPairs) {
    const std::vector<NormalizedCdf> a = {step_at(3, 1), step_at(3, 3)};
    const std::vector<NormalizedCdf> b = {step_at(3, 5)};
    const auto gap = gap_report(a, b, step_at(3, 5));
    EXPECT_DOUBLE_EQ(gap.within_a.mean, 2.0 / 7.0);
    EXPECT_DOUBLE_EQ(gap.cross.mean, (4.0 / 7.0 + 2.0 / 7.0) / 2.0);
    EXPECT_DOUBLE_EQ(gap.cross.max, 4.0 / 7.0);
    EXPECT_EQ(gap.b_to_reference.mean, 0.0);
    EXPECT_NE(to_csv(gap).find("cross,"), std::string::npos);
    EXPECT_EQ(to_json(gap)["cross"]["pairs"], 2);
    EXPECT_THROW((void)gap_report({}, b, b[0]), Error);
}
