#include "fgmatch/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fgmatch/error.hpp"
#include "fgmatch/parallel.hpp"

namespace fgmatch {

namespace {

void check_depth(int bit_depth) {
    if (bit_depth < 1 || bit_depth > 16) {
        throw Error(ErrorCode::InvalidArgument,
                    "histogram bit depth out of range: " + std::to_string(bit_depth));
    }
}

}  // namespace

Histogram::Histogram(int bit_depth) : bit_depth_(bit_depth) {
    check_depth(bit_depth);
    counts_.assign(std::size_t{1} << bit_depth, 0);
}

Histogram::Histogram(int bit_depth, std::vector<Count> counts)
    : bit_depth_(bit_depth), counts_(std::move(counts)) {
    check_depth(bit_depth);
    if (counts_.size() != (std::size_t{1} << bit_depth)) {
        throw Error(ErrorCode::InvalidArgument, "histogram needs 2^b bins");
    }
    if (counts_[0] != 0) {
        throw Error(ErrorCode::InvalidArgument, "histogram background bin must be empty");
    }
    for (std::size_t k = 1; k < counts_.size(); ++k) total_ += counts_[k];
}

NormalizedCdf::NormalizedCdf(int bit_depth, std::vector<double> values)
    : bit_depth_(bit_depth), values_(std::move(values)) {
    validate(bit_depth_, values_);
}

void NormalizedCdf::validate(int bit_depth, std::span<const double> values) {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::MalformedProfile, "invalid CDF: " + why); };
    if (bit_depth < 1 || bit_depth > 16) fail("bit depth " + std::to_string(bit_depth) + " out of range");
    if (values.size() != (std::size_t{1} << bit_depth)) {
        fail("expected " + std::to_string(std::size_t{1} << bit_depth) + " values, got " +
             std::to_string(values.size()));
    }
    if (values[0] != 0.0) fail("values[0] must be 0");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]) || values[k] < 0.0 || values[k] > 1.0) {
            fail("value at bin " + std::to_string(k) + " outside [0,1]");
        }
        if (k > 0 && values[k] < values[k - 1]) {
            fail("decreasing at bin " + std::to_string(k));
        }
    }
    if (std::abs(values.back() - 1.0) > kTerminalTolerance) {
        fail("terminal value " + std::to_string(values.back()) + " is not 1");
    }
}

ForegroundHistogram accumulate_rows(const GrayImage& img, const ForegroundMask& mask, int row_begin,
                                    int row_end) {
    if (!mask.matches(img)) {
        throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ from image");
    }
    if (img.photometric() != Photometric::Mono2) {
        throw Error(ErrorCode::PhotometricNotNormalized, "histogram requires a MONO2 image");
    }
    ForegroundHistogram out{Histogram(img.bit_depth()), 0};
    // Raw counting into a local buffer avoids the per-add total update.
    std::vector<Histogram::Count> counts(out.histogram.bins(), 0);
    const auto px = img.pixels();
    const auto flags = mask.flags();
    const std::size_t first = static_cast<std::size_t>(row_begin) * img.width();
    const std::size_t last = static_cast<std::size_t>(row_end) * img.width();
    for (std::size_t i = first; i < last; ++i) {
        counts[px[i]] += flags[i];
    }
    out.dropped_zero_valued = counts[0];
    counts[0] = 0;
    out.histogram = Histogram(img.bit_depth(), std::move(counts));
    return out;
}

ForegroundHistogram fg_histogram(const GrayImage& img, const ForegroundMask& mask) {
    auto out = accumulate_rows(img, mask, 0, img.height());
    if (out.histogram.empty()) {
        throw Error(ErrorCode::EmptyForeground, "no nonzero foreground pixels");
    }
    return out;
}

ForegroundHistogram fg_histogram(const GrayImage& img, const ForegroundMask& mask, int workers) {
    if (workers <= 1) return fg_histogram(img, mask);
    const auto tiles = split_range(img.height(), workers);
    std::vector<ForegroundHistogram> partial(tiles.size());
    parallel_for(tiles.size(), workers, [&](std::size_t t) {
        partial[t] = accumulate_rows(img, mask, tiles[t].begin, tiles[t].end);
    });
    ForegroundHistogram out{Histogram(img.bit_depth()), 0};
    for (const auto& p : partial) {
        out.histogram = merge(out.histogram, p.histogram);
        out.dropped_zero_valued += p.dropped_zero_valued;
    }
    if (out.histogram.empty()) {
        throw Error(ErrorCode::EmptyForeground, "no nonzero foreground pixels");
    }
    return out;
}

NormalizedCdf normalize_cdf(const Histogram& hist) {
    if (hist.empty()) {
        throw Error(ErrorCode::EmptyForeground, "cannot normalize an empty histogram");
    }
    std::vector<double> values(hist.bins(), 0.0);
    const auto total = static_cast<double>(hist.total());
    Histogram::Count running = 0;
    for (std::size_t p = 1; p < hist.bins(); ++p) {
        running += hist[p];
        values[p] = static_cast<double>(running) / total;
    }
    return NormalizedCdf(hist.bit_depth(), std::move(values));
}

RebinResult rebin(const Histogram& hist, int target_bits) {
    if (target_bits < 1 || target_bits > hist.bit_depth()) {
        throw Error(ErrorCode::InvalidArgument,
                    "rebin target " + std::to_string(target_bits) + " bits outside [1, " +
                        std::to_string(hist.bit_depth()) + "]");
    }
    if (target_bits == hist.bit_depth()) return {hist, 0};
    const int shift = hist.bit_depth() - target_bits;
    std::vector<Histogram::Count> coarse(std::size_t{1} << target_bits, 0);
    for (std::size_t k = 1; k < hist.bins(); ++k) coarse[k >> shift] += hist[k];
    const auto remainder = coarse[0];
    coarse[0] = 0;
    return {Histogram(target_bits, std::move(coarse)), remainder};
}

Histogram merge(const Histogram& a, const Histogram& b) {
    if (a.bit_depth() != b.bit_depth()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cannot merge " + std::to_string(a.bit_depth()) + "-bit and " +
                        std::to_string(b.bit_depth()) + "-bit histograms");
    }
    std::vector<Histogram::Count> counts(a.counts().begin(), a.counts().end());
    for (std::size_t k = 1; k < counts.size(); ++k) counts[k] += b[k];
    return Histogram(a.bit_depth(), std::move(counts));
}

NormalizedCdf rebin_cdf(const NormalizedCdf& cdf, int target_bits) {
    if (target_bits < 1 || target_bits > cdf.bit_depth()) {
        throw Error(ErrorCode::ProfileDepthMismatch,
                    "cannot rebin a " + std::to_string(cdf.bit_depth()) + "-bit CDF to " +
                        std::to_string(target_bits) + " bits");
    }
    if (target_bits == cdf.bit_depth()) return cdf;
    const int shift = cdf.bit_depth() - target_bits;
    const std::size_t coarse_bins = std::size_t{1} << target_bits;
    const std::size_t span = std::size_t{1} << shift;
    const double floor_mass = cdf[span - 1];
    const double kept = 1.0 - floor_mass;
    if (kept <= 0.0) {
        throw Error(ErrorCode::ProfileDepthMismatch,
                    "all reference mass falls into the coarse background bin at " +
                        std::to_string(target_bits) + " bits");
    }
    std::vector<double> values(coarse_bins, 0.0);
    for (std::size_t j = 1; j < coarse_bins; ++j) {
        values[j] = std::clamp((cdf[(j + 1) * span - 1] - floor_mass) / kept, 0.0, 1.0);
    }
    values.back() = 1.0;
    return NormalizedCdf(target_bits, std::move(values));
}

}  // namespace fgmatch
