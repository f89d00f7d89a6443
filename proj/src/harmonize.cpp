#include "fgmatch/harmonize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fgmatch/error.hpp"
#include "fgmatch/parallel.hpp"

namespace fgmatch {

IntensityMap::IntensityMap(int bit_depth, std::vector<Value> table)
    : bit_depth_(bit_depth), table_(std::move(table)) {
    if (bit_depth < 1 || bit_depth > 16 || table_.size() != (std::size_t{1} << bit_depth)) {
        throw std::logic_error("intensity map needs 2^b entries");
    }
    if (const long bad = find_violation(table_, bit_depth); bad >= 0) {
        throw std::logic_error("intensity map invariant broken at index " + std::to_string(bad));
    }
}

long IntensityMap::find_violation(std::span<const Value> table, int bit_depth) {
    const auto top = static_cast<Value>((1u << bit_depth) - 1u);
    if (table.empty() || table[0] != 0) return 0;
    for (std::size_t p = 1; p < table.size(); ++p) {
        if (table[p] < 1 || table[p] > top) return static_cast<long>(p);
        if (p > 1 && table[p] < table[p - 1]) return static_cast<long>(p);
    }
    return -1;
}

std::string_view to_string(RebinPolicy p) {
    switch (p) {
        case RebinPolicy::Auto: return "auto";
        case RebinPolicy::Native: return "native";
        case RebinPolicy::Common12: return "common12";
    }
    return "auto";
}

RebinPolicy parse_rebin_policy(std::string_view text) {
    if (text == "auto") return RebinPolicy::Auto;
    if (text == "native") return RebinPolicy::Native;
    if (text == "common12" || text == "common-12-bit") return RebinPolicy::Common12;
    throw Error(ErrorCode::InvalidArgument, "unknown rebin policy '" + std::string(text) + "'");
}

IntensityMap build_map(const NormalizedCdf& source, const NormalizedCdf& reference) {
    if (source.bit_depth() != reference.bit_depth()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "source CDF is " + std::to_string(source.bit_depth()) + "-bit, reference is " +
                        std::to_string(reference.bit_depth()) + "-bit");
    }
    const std::size_t bins = source.bins();
    const std::size_t last = bins - 1;
    std::vector<IntensityMap::Value> table(bins, 0);
    if (last == 0) return IntensityMap(source.bit_depth(), std::move(table));

    const auto r = reference.values();

    // plateau_start[q]: smallest q' >= 1 with r[q'] == r[q].
    std::vector<std::size_t> plateau_start(bins, 1);
    for (std::size_t q = 2; q <= last; ++q) {
        plateau_start[q] = r[q] == r[q - 1] ? plateau_start[q - 1] : q;
    }

    // |s - r[q]| is nonincreasing while r[q] < s and nondecreasing once
    // r[q] >= s, so the minimizers sit on the last plateau below s or at the
    // first q with r[q] >= s. `upper` only moves forward as s grows.
    std::size_t upper = 1;
    for (std::size_t p = 1; p <= last; ++p) {
        const double s = source[p];
        while (upper <= last && r[upper] < s) ++upper;

        std::size_t best = 0;
        double best_distance = 0.0;
        if (upper > 1) {
            // Walk back over any earlier plateaus that round to the same distance.
            std::size_t q = plateau_start[upper - 1];
            best_distance = std::abs(s - r[q]);
            while (q > 1 && std::abs(s - r[q - 1]) <= best_distance) {
                q = plateau_start[q - 1];
                best_distance = std::abs(s - r[q]);
            }
            best = q;
        }
        if (upper <= last) {
            const double d = std::abs(s - r[upper]);
            if (best == 0 || d < best_distance) best = upper;
        }
        table[p] = static_cast<IntensityMap::Value>(best);
    }
    return IntensityMap(source.bit_depth(), std::move(table));
}

IntensityMap expand_map(const IntensityMap& coarse, int native_bits) {
    const int coarse_bits = coarse.bit_depth();
    if (native_bits < coarse_bits || native_bits > 16) {
        throw Error(ErrorCode::InvalidArgument, "cannot expand a map to fewer bits");
    }
    if (native_bits == coarse_bits) return coarse;
    const int shift = native_bits - coarse_bits;
    const std::size_t bins = std::size_t{1} << native_bits;
    const auto top = static_cast<std::int64_t>(bins - 1);
    const double width = static_cast<double>(std::size_t{1} << shift);
    std::vector<IntensityMap::Value> table(bins, 0);
    for (std::size_t p = 1; p < bins; ++p) {
        const auto q = coarse[p >> shift];
        const auto center = static_cast<std::int64_t>(std::floor((q + 0.5) * width));
        table[p] = static_cast<IntensityMap::Value>(std::clamp<std::int64_t>(center, 1, top));
    }
    return IntensityMap(native_bits, std::move(table));
}

namespace {

void apply_rows(const GrayImage& img, const ForegroundMask& mask, const IntensityMap& map,
                std::span<GrayImage::Pixel> out, int row_begin, int row_end) {
    const auto px = img.pixels();
    const auto flags = mask.flags();
    const auto table = map.table();
    const std::size_t first = static_cast<std::size_t>(row_begin) * img.width();
    const std::size_t last = static_cast<std::size_t>(row_end) * img.width();
    for (std::size_t i = first; i < last; ++i) {
        out[i] = flags[i] ? table[px[i]] : GrayImage::Pixel{0};
    }
}

}  // namespace

GrayImage apply_map(const GrayImage& img, const ForegroundMask& mask, const IntensityMap& map,
                    int workers) {
    if (!mask.matches(img)) {
        throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ from image");
    }
    if (map.bit_depth() != img.bit_depth()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "map is " + std::to_string(map.bit_depth()) + "-bit, image is " +
                        std::to_string(img.bit_depth()) + "-bit");
    }
    if (img.photometric() != Photometric::Mono2) {
        throw Error(ErrorCode::PhotometricNotNormalized, "apply_map requires a MONO2 image");
    }
    GrayImage out(img.width(), img.height(), img.bit_depth(), Photometric::Mono2);
    const auto tiles = split_range(img.height(), workers);
    parallel_for(tiles.size(), workers, [&](std::size_t t) {
        apply_rows(img, mask, map, out.mutable_pixels(), tiles[t].begin, tiles[t].end);
    });
    return out;
}

int matching_bits(int source_bits, int profile_bits, RebinPolicy policy) {
    constexpr int kCommonGrid = 12;
    if (policy == RebinPolicy::Auto) {
        policy = source_bits == profile_bits ? RebinPolicy::Native : RebinPolicy::Common12;
    }
    if (policy == RebinPolicy::Native) {
        if (source_bits != profile_bits) {
            throw Error(ErrorCode::ProfileDepthMismatch,
                        "native matching needs equal depths: image is " + std::to_string(source_bits) +
                            "-bit, profile is " + std::to_string(profile_bits) + "-bit");
        }
        return source_bits;
    }
    return std::min({source_bits, profile_bits, kCommonGrid});
}

HarmonizeResult harmonize(const GrayImage& input, const ReferenceProfile& profile,
                          const HarmonizeOptions& options) {
    if (options.min_intensity < 1) {
        throw Error(ErrorCode::InvalidArgument, "min_intensity must be >= 1");
    }
    GrayImage converted;
    const GrayImage* img = &input;
    if (input.photometric() != Photometric::Mono2) {
        converted = to_mono2(input);
        img = &converted;
    }

    ForegroundMask mask = foreground_mask(*img, options.min_intensity);
    if (options.keep_largest_component) {
        mask = largest_component(mask, options.connectivity);
    }

    HarmonizeResult result;
    HarmonizeReport& report = result.report;

    const auto tally = fg_histogram(*img, mask, options.workers);
    report.dropped_zero_valued = tally.dropped_zero_valued;
    report.foreground_count = tally.histogram.total();

    const int native_bits = img->bit_depth();
    const int grid = matching_bits(native_bits, profile.bit_depth(), options.rebin_policy);
    report.matching_bits = grid;
    report.rebin_applied = grid != native_bits || grid != profile.bit_depth();

    const auto coarse = rebin(tally.histogram, grid);
    if (coarse.histogram.empty()) {
        throw Error(ErrorCode::EmptyForeground,
                    "all foreground pixels fall into the background bin at " + std::to_string(grid) + " bits");
    }
    if (coarse.remainder > 0) {
        report.warnings.push_back(std::to_string(coarse.remainder) +
                                  " foreground pixels fall in the coarse background bin");
    }
    const NormalizedCdf reference = rebin_cdf(profile.cdf, grid);
    const NormalizedCdf source = normalize_cdf(coarse.histogram);

    std::size_t occupied = 0;
    for (std::size_t q = 1; q < reference.bins(); ++q) occupied += reference[q] != reference[q - 1];
    if (occupied == 1) {
        report.warnings.emplace_back("reference occupies a single bin; foreground collapses to it");
    }

    result.map = expand_map(build_map(source, reference), native_bits);
    result.image = apply_map(*img, mask, result.map, options.workers);

    const auto after = fg_histogram(result.image, mask, options.workers);
    report.pre_distance = cdf_l1(source, reference);
    report.post_distance = cdf_l1(normalize_cdf(rebin(after.histogram, grid).histogram), reference);

    const auto px = img->pixels();
    const auto flags = mask.flags();
    std::uint64_t zeroed = 0;
    for (std::size_t i = 0; i < px.size(); ++i) zeroed += (px[i] != 0) & (flags[i] == 0);
    report.zeroed_outside_mask = zeroed;
    return result;
}

}  // namespace fgmatch
