#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgmatch/histogram.hpp"

namespace fgmatch {

/// Per-image summary produced by harmonize().
struct HarmonizeReport {
    std::uint64_t foreground_count = 0;
    std::uint64_t dropped_zero_valued = 0;
    /// Nonzero pixels zeroed because they fell outside the foreground mask.
    std::uint64_t zeroed_outside_mask = 0;
    /// cdf_l1 from the image's foreground CDF to the reference, before and
    /// after harmonization, both on the matching grid.
    double pre_distance = 0.0;
    double post_distance = 0.0;
    bool rebin_applied = false;
    int matching_bits = 0;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const HarmonizeReport& report);

/// Mean absolute CDF gap on the normalized intensity axis; this is the
/// 1-Wasserstein distance between the two intensity distributions.
[[nodiscard]] double cdf_l1(const NormalizedCdf& a, const NormalizedCdf& b);

/// KL(p || q) over bins 1..2^b-1 after adding epsilon to every frequency and
/// renormalizing.
[[nodiscard]] double kl_divergence(const Histogram& p, const Histogram& q, double epsilon = 1e-9);

/// Same statistic over probability mass vectors of equal length (index 0 is
/// ignored). Used when one side only exists as a CDF.
[[nodiscard]] double kl_divergence(std::span<const double> p, std::span<const double> q,
                                   double epsilon = 1e-9);

/// Per-bin probability mass recovered from a CDF.
[[nodiscard]] std::vector<double> mass_from_cdf(const NormalizedCdf& cdf);

struct DistanceSummary {
    double mean = 0.0;
    double max = 0.0;
    std::size_t pairs = 0;
};

struct GapReport {
    DistanceSummary within_a;
    DistanceSummary within_b;
    DistanceSummary cross;
    DistanceSummary a_to_reference;
    DistanceSummary b_to_reference;
};

/// Within-group (unordered pairs), cross-group, and to-reference cdf_l1
/// statistics. Pairs are enumerated in input order.
[[nodiscard]] GapReport gap_report(std::span<const NormalizedCdf> group_a,
                                   std::span<const NormalizedCdf> group_b,
                                   const NormalizedCdf& reference);

nlohmann::json to_json(const GapReport& gap);
/// CSV with header `statistic,mean,max,pairs`.
std::string to_csv(const GapReport& gap);

}  // namespace fgmatch
