#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fgmatch/histogram.hpp"
#include "fgmatch/image.hpp"
#include "fgmatch/metrics.hpp"
#include "fgmatch/reference.hpp"

namespace fgmatch {

/// Lookup table from source to reference intensities. Construction enforces
/// table[0] == 0, table[p] in [1, 2^b-1] for p >= 1, and nondecreasing on
/// 1..2^b-1; a violation is a logic error and throws std::logic_error.
class IntensityMap {
public:
    using Value = std::uint16_t;

    IntensityMap() = default;
    IntensityMap(int bit_depth, std::vector<Value> table);

    [[nodiscard]] int bit_depth() const noexcept { return bit_depth_; }
    [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }
    [[nodiscard]] std::span<const Value> table() const noexcept { return table_; }
    [[nodiscard]] Value operator[](std::size_t p) const noexcept { return table_[p]; }

    /// Returns the first index that breaks an invariant, or -1.
    static long find_violation(std::span<const Value> table, int bit_depth);

    friend bool operator==(const IntensityMap&, const IntensityMap&) = default;

private:
    int bit_depth_ = 0;
    std::vector<Value> table_;
};

enum class RebinPolicy {
    /// Native when depths agree, Common12 otherwise.
    Auto,
    Native,
    Common12,
};

std::string_view to_string(RebinPolicy p);
RebinPolicy parse_rebin_policy(std::string_view text);

struct HarmonizeOptions {
    int min_intensity = 1;
    bool keep_largest_component = false;
    Connectivity connectivity = Connectivity::Eight;
    RebinPolicy rebin_policy = RebinPolicy::Auto;
    /// Row-parallelism inside one image; results are identical for any value.
    int workers = 1;
};

struct HarmonizeResult {
    GrayImage image;
    HarmonizeReport report;
    /// Native-depth map that was applied.
    IntensityMap map;
};

/// For every p >= 1, the smallest q in 1..2^b-1 minimizing
/// |source[p] - reference[q]|. Runs in O(2^b) with a forward sweep.
[[nodiscard]] IntensityMap build_map(const NormalizedCdf& source, const NormalizedCdf& reference);

/// Lift a map built on a coarse grid to native_bits: each native p goes
/// through its coarse bin and lands on the center of the resulting coarse bin.
[[nodiscard]] IntensityMap expand_map(const IntensityMap& coarse, int native_bits);

/// table[pixel] under the mask, 0 elsewhere.
[[nodiscard]] GrayImage apply_map(const GrayImage& img, const ForegroundMask& mask,
                                  const IntensityMap& map, int workers = 1);

/// Matching grid for an image of source_bits against a profile of
/// profile_bits; throws ProfileDepthMismatch when the policy cannot reconcile
/// them.
[[nodiscard]] int matching_bits(int source_bits, int profile_bits, RebinPolicy policy);

/// Full pipeline: MONO2 conversion, masking, optional component filter,
/// foreground histogram, optional rebin, CDF, map, masked application.
[[nodiscard]] HarmonizeResult harmonize(const GrayImage& img, const ReferenceProfile& profile,
                                        const HarmonizeOptions& options = {});

}  // namespace fgmatch
