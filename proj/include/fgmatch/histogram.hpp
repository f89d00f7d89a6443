#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fgmatch/image.hpp"

namespace fgmatch {

/// Foreground intensity histogram with 2^bit_depth bins. Bin 0 is the
/// background bin and is always empty; total() sums bins 1..2^b-1.
class Histogram {
public:
    using Count = std::uint64_t;

    Histogram() = default;
    explicit Histogram(int bit_depth);
    /// Throws InvalidArgument unless counts.size() == 2^bit_depth and counts[0] == 0.
    Histogram(int bit_depth, std::vector<Count> counts);

    [[nodiscard]] int bit_depth() const noexcept { return bit_depth_; }
    [[nodiscard]] std::size_t bins() const noexcept { return counts_.size(); }
    [[nodiscard]] Count total() const noexcept { return total_; }
    [[nodiscard]] bool empty() const noexcept { return total_ == 0; }
    [[nodiscard]] std::span<const Count> counts() const noexcept { return counts_; }
    [[nodiscard]] Count operator[](std::size_t k) const noexcept { return counts_[k]; }

    /// Adds to bin k >= 1.
    void add(std::size_t k, Count n = 1) noexcept {
        counts_[k] += n;
        total_ += n;
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;

private:
    int bit_depth_ = 0;
    std::vector<Count> counts_;
    Count total_ = 0;
};

/// Normalized cumulative distribution over bins 0..2^b-1 with values[0] = 0.
class NormalizedCdf {
public:
    NormalizedCdf() = default;
    /// Throws MalformedProfile when any invariant fails (see validate()).
    NormalizedCdf(int bit_depth, std::vector<double> values);

    [[nodiscard]] int bit_depth() const noexcept { return bit_depth_; }
    [[nodiscard]] std::size_t bins() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return values_[k]; }

    /// Invariants: length 2^b, values in [0,1], values[0] == 0, nondecreasing,
    /// terminal value within kTerminalTolerance of 1.
    static void validate(int bit_depth, std::span<const double> values);
    static constexpr double kTerminalTolerance = 1e-12;

    friend bool operator==(const NormalizedCdf&, const NormalizedCdf&) = default;

private:
    int bit_depth_ = 0;
    std::vector<double> values_;
};

struct ForegroundHistogram {
    Histogram histogram;
    /// Masked pixels of value 0; never counted.
    std::uint64_t dropped_zero_valued = 0;
};

struct RebinResult {
    Histogram histogram;
    /// Counts that landed in the coarse background bin and were discarded.
    std::uint64_t remainder = 0;
};

/// Tally masked pixels of rows [row_begin, row_end). Never throws on an empty
/// tally, so it can be used for tile-wise accumulation.
[[nodiscard]] ForegroundHistogram accumulate_rows(const GrayImage& img, const ForegroundMask& mask,
                                                  int row_begin, int row_end);

/// Foreground histogram over the whole image. Throws EmptyForeground when no
/// masked pixel has a nonzero value.
[[nodiscard]] ForegroundHistogram fg_histogram(const GrayImage& img, const ForegroundMask& mask);

/// Same result, accumulated over horizontal tiles on `workers` threads and
/// merged in tile order. Bitwise identical to the serial version.
[[nodiscard]] ForegroundHistogram fg_histogram(const GrayImage& img, const ForegroundMask& mask,
                                               int workers);

[[nodiscard]] NormalizedCdf normalize_cdf(const Histogram& hist);

/// Merge bins k -> k >> (b - target_bits); the coarse background bin is
/// re-zeroed and its count reported as the remainder.
[[nodiscard]] RebinResult rebin(const Histogram& hist, int target_bits);

[[nodiscard]] Histogram merge(const Histogram& a, const Histogram& b);

/// Coarsen a CDF to target_bits by sampling each coarse bin at its last fine
/// index, then dropping and renormalizing away the coarse background bin.
/// Throws ProfileDepthMismatch when all mass falls into that bin.
[[nodiscard]] NormalizedCdf rebin_cdf(const NormalizedCdf& cdf, int target_bits);

}  // namespace fgmatch
