#include "fgmatch/reference.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "fgmatch/error.hpp"
#include "fgmatch/io.hpp"
#include "fgmatch/parallel.hpp"

namespace fgmatch {

std::string_view to_string(ReferenceMethod m) {
    return m == ReferenceMethod::Averaged ? "averaged" : "pooled";
}

ReferenceMethod parse_reference_method(std::string_view text) {
    if (text == "averaged") return ReferenceMethod::Averaged;
    if (text == "pooled") return ReferenceMethod::Pooled;
    throw Error(ErrorCode::InvalidArgument, "unknown reference method '" + std::string(text) + "'");
}

namespace {

Histogram image_histogram(const MaskedImage& item, std::size_t index, int target_bits) {
    const auto fail_empty = [index] {
        return Error(ErrorCode::EmptyForeground,
                     "reference image #" + std::to_string(index) + " has no foreground pixels");
    };
    if (item.image->bit_depth() < target_bits) {
        throw Error(ErrorCode::DepthMismatch,
                    "reference image #" + std::to_string(index) + " is " +
                        std::to_string(item.image->bit_depth()) + "-bit, below the " +
                        std::to_string(target_bits) + "-bit target");
    }
    auto tally = accumulate_rows(*item.image, *item.mask, 0, item.image->height());
    if (tally.histogram.empty()) throw fail_empty();
    auto coarse = rebin(tally.histogram, target_bits).histogram;
    if (coarse.empty()) throw fail_empty();
    return coarse;
}

}  // namespace

ReferenceProfile build_reference(std::span<const MaskedImage> images, const ReferenceOptions& options) {
    if (images.empty()) throw Error(ErrorCode::InvalidArgument, "reference needs at least one image");

    int target_bits = 0;
    if (options.target_bits) {
        target_bits = *options.target_bits;
    } else {
        target_bits = images[0].image->bit_depth();
        for (std::size_t i = 1; i < images.size(); ++i) {
            if (images[i].image->bit_depth() != target_bits) {
                throw Error(ErrorCode::DepthMismatch,
                            "reference images have different bit depths; pass target_bits");
            }
        }
    }
    if (target_bits < 1 || target_bits > GrayImage::kMaxBitDepth) {
        throw Error(ErrorCode::InvalidArgument, "target_bits out of range");
    }

    std::vector<Histogram> hists(images.size());
    parallel_for(images.size(), options.workers,
                 [&](std::size_t i) { hists[i] = image_histogram(images[i], i, target_bits); });

    ReferenceProfile profile;
    profile.image_count = static_cast<int>(images.size());
    profile.method = options.method;
    profile.label = options.label;
    profile.created = options.created;

    if (options.method == ReferenceMethod::Pooled) {
        Histogram pooled(target_bits);
        for (const auto& h : hists) pooled = merge(pooled, h);
        profile.cdf = normalize_cdf(pooled);
        return profile;
    }

    std::vector<double> sum(std::size_t{1} << target_bits, 0.0);
    for (const auto& h : hists) {
        const auto cdf = normalize_cdf(h);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += cdf[k];
    }
    const auto n = static_cast<double>(images.size());
    for (auto& v : sum) v /= n;
    profile.cdf = NormalizedCdf(target_bits, std::move(sum));
    return profile;
}

nlohmann::ordered_json to_json(const ReferenceProfile& p) {
    nlohmann::ordered_json doc;
    doc["version"] = ReferenceProfile::kFormatVersion;
    doc["bit_depth"] = p.bit_depth();
    doc["method"] = std::string(to_string(p.method));
    doc["image_count"] = p.image_count;
    doc["label"] = p.label;
    doc["created"] = p.created;
    doc["cdf"] = std::vector<double>(p.cdf.values().begin(), p.cdf.values().end());
    return doc;
}

ReferenceProfile profile_from_json(const nlohmann::json& doc) {
    auto fail = [](const std::string& why) { return Error(ErrorCode::MalformedProfile, "profile: " + why); };
    try {
        if (!doc.is_object()) throw fail("document is not an object");
        for (const char* key : {"version", "bit_depth", "method", "image_count", "cdf"}) {
            if (!doc.contains(key)) throw fail(std::string("missing field '") + key + "'");
        }
        if (doc.at("version").get<int>() != ReferenceProfile::kFormatVersion) {
            throw fail("unsupported version " + doc.at("version").dump());
        }
        ReferenceProfile p;
        const int bits = doc.at("bit_depth").get<int>();
        if (bits < 1 || bits > GrayImage::kMaxBitDepth) throw fail("bit_depth out of range");
        p.method = parse_reference_method(doc.at("method").get<std::string>());
        p.image_count = doc.at("image_count").get<int>();
        if (p.image_count < 1) throw fail("image_count must be >= 1");
        p.label = doc.value("label", std::string{});
        p.created = doc.value("created", std::string{});
        auto values = doc.at("cdf").get<std::vector<double>>();
        p.cdf = NormalizedCdf(bits, std::move(values));
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw fail(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedProfile) throw;
        throw fail(e.what());
    }
}

void save_profile(const ReferenceProfile& profile, const std::filesystem::path& path) {
    write_file_atomic(path, to_json(profile).dump(2) + "\n");
}

ReferenceProfile load_profile(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedProfile, path.string() + ": " + e.what());
    }
    try {
        return profile_from_json(doc);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace fgmatch
