#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fgmatch/histogram.hpp"
#include "fgmatch/image.hpp"

namespace fgmatch {

enum class ReferenceMethod { Averaged, Pooled };

std::string_view to_string(ReferenceMethod m);
ReferenceMethod parse_reference_method(std::string_view text);

/// Target foreground CDF together with how it was built.
struct ReferenceProfile {
    static constexpr int kFormatVersion = 1;

    NormalizedCdf cdf;
    int image_count = 0;
    ReferenceMethod method = ReferenceMethod::Averaged;
    std::string label;
    /// ISO-8601 UTC; supplied by the caller so identical inputs serialize to
    /// identical bytes.
    std::string created;

    [[nodiscard]] int bit_depth() const noexcept { return cdf.bit_depth(); }

    friend bool operator==(const ReferenceProfile&, const ReferenceProfile&) = default;
};

struct MaskedImage {
    const GrayImage* image = nullptr;
    const ForegroundMask* mask = nullptr;
};

struct ReferenceOptions {
    ReferenceMethod method = ReferenceMethod::Averaged;
    /// Common grid for all inputs. Defaults to the (shared) input depth.
    std::optional<int> target_bits;
    std::string label;
    std::string created;
    int workers = 1;
};

/// Averaged: equal-weight bin-wise mean of per-image CDFs. Pooled: merged
/// histograms normalized once. Reduction always runs in input order.
[[nodiscard]] ReferenceProfile build_reference(std::span<const MaskedImage> images,
                                               const ReferenceOptions& options);

/// Fields in documented order: version, bit_depth, method, image_count,
/// label, created, cdf.
nlohmann::ordered_json to_json(const ReferenceProfile& profile);
/// Validates schema and every CDF invariant; throws MalformedProfile.
[[nodiscard]] ReferenceProfile profile_from_json(const nlohmann::json& doc);

void save_profile(const ReferenceProfile& profile, const std::filesystem::path& path);
[[nodiscard]] ReferenceProfile load_profile(const std::filesystem::path& path);

}  // namespace fgmatch
