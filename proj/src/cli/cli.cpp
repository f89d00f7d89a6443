#include "fgmatch/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "fgmatch/error.hpp"
#include "fgmatch/formats.hpp"
#include "fgmatch/harmonize.hpp"
#include "fgmatch/io.hpp"
#include "fgmatch/metrics.hpp"
#include "fgmatch/parallel.hpp"
#include "fgmatch/reference.hpp"
#include "fgmatch/synthgen.hpp"

namespace fs = std::filesystem;

namespace fgmatch::cli {

void configure_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_logger_mt("fgmatch");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        spdlog::set_level(spdlog::level::warn);
        if (const char* env = std::getenv("HARMONIZE_LOG")) {
            spdlog::set_level(spdlog::level::from_str(env));
        }
    });
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Data-level failure collected while processing a batch.
struct Failure {
    fs::path path;
    std::string message;
};

void report_failures(const std::vector<Failure>& failures, std::ostream& err) {
    for (const auto& f : failures) err << "error: " << f.path.string() << ": " << f.message << '\n';
}

std::vector<fs::path> read_manifest(const fs::path& manifest) {
    std::istringstream in(read_file(manifest));
    std::vector<fs::path> paths;
    const fs::path base = manifest.parent_path();
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        const auto start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        fs::path p = line.substr(start);
        paths.push_back(p.is_relative() ? base / p : p);
    }
    return paths;
}

/// Inputs from positional args and an optional manifest, sorted and
/// de-duplicated so shell-glob order never reaches a reduction.
std::vector<fs::path> collect_inputs(const std::vector<std::string>& positional, const std::string& manifest) {
    std::vector<fs::path> paths(positional.begin(), positional.end());
    if (!manifest.empty()) {
        auto listed = read_manifest(manifest);
        paths.insert(paths.end(), listed.begin(), listed.end());
    }
    for (auto& p : paths) p = p.lexically_normal();
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
    return paths;
}

std::string iso_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// SOURCE_DATE_EPOCH when set, otherwise the newest input mtime; either way
/// re-running on unchanged inputs yields the same value.
std::string creation_stamp(const std::vector<fs::path>& inputs) {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        return iso_utc(static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)));
    }
    std::time_t newest = 0;
    for (const auto& p : inputs) {
        std::error_code ec;
        const auto ft = fs::last_write_time(p, ec);
        if (ec) continue;
        const auto sys = std::chrono::time_point_cast<std::chrono::seconds>(
            ft - fs::file_time_type::clock::now() + std::chrono::system_clock::now());
        newest = std::max(newest, std::chrono::system_clock::to_time_t(sys));
    }
    return iso_utc(newest);
}

struct MaskOptions {
    int min_intensity = 1;
    bool keep_largest_component = false;
};

struct PreparedImage {
    GrayImage image;
    ForegroundMask mask;
};

PreparedImage prepare(const GrayImage& raw, const MaskOptions& opts) {
    PreparedImage out{to_mono2(raw), {}};
    out.mask = foreground_mask(out.image, opts.min_intensity);
    if (opts.keep_largest_component && out.mask.count() > 0) out.mask = largest_component(out.mask);
    return out;
}

/// Foreground CDF of an image on a `bits`-bit grid.
NormalizedCdf image_cdf(const GrayImage& raw, const MaskOptions& opts, int bits) {
    const auto prepared = prepare(raw, opts);
    const auto tally = fg_histogram(prepared.image, prepared.mask);
    const auto coarse = rebin(tally.histogram, bits).histogram;
    if (coarse.empty()) throw Error(ErrorCode::EmptyForeground, "no foreground at " + std::to_string(bits) + " bits");
    return normalize_cdf(coarse);
}

void add_mask_flags(CLI::App* cmd, MaskOptions& opts) {
    cmd->add_option("--min-intensity", opts.min_intensity, "Foreground threshold (pixel >= K)")
        ->check(CLI::Range(1, 65535));
    cmd->add_flag("--keep-largest-component", opts.keep_largest_component,
                  "Restrict the foreground to its largest 8-connected component");
}

bool is_image_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".pgm" || ext == ".dcm";
}

// ---------------------------------------------------------------- build-ref

struct BuildRefArgs {
    std::vector<std::string> inputs;
    std::string manifest;
    std::string method = "averaged";
    std::optional<int> bits;
    std::string label = "reference";
    std::string out;
    std::string created;
    int workers = 1;
    MaskOptions mask;
};

int cmd_build_ref(const BuildRefArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> paths;
    try {
        paths = collect_inputs(args.inputs, args.manifest);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    if (paths.empty()) {
        err << "error: build-ref needs at least one input image\n";
        return kUsageError;
    }

    std::vector<std::optional<PreparedImage>> prepared(paths.size());
    std::vector<std::optional<Failure>> failed(paths.size());
    parallel_for(paths.size(), args.workers, [&](std::size_t i) {
        try {
            auto item = prepare(read_image(paths[i]).image, args.mask);
            if (item.mask.count() == 0 ||
                std::none_of(item.image.pixels().begin(), item.image.pixels().end(),
                             [](auto p) { return p != 0; })) {
                throw Error(ErrorCode::EmptyForeground, "image has no foreground pixels");
            }
            prepared[i] = std::move(item);
        } catch (const Error& e) {
            failed[i] = Failure{paths[i], e.what()};
        }
    });
    std::vector<Failure> failures;
    for (auto& f : failed)
        if (f) failures.push_back(*f);
    if (!failures.empty()) {
        report_failures(failures, err);
        return kDataError;
    }

    std::vector<MaskedImage> items;
    items.reserve(prepared.size());
    for (const auto& p : prepared) items.push_back({&p->image, &p->mask});

    ReferenceOptions options;
    options.method = parse_reference_method(args.method);
    options.target_bits = args.bits;
    options.label = args.label;
    options.created = args.created.empty() ? creation_stamp(paths) : args.created;
    options.workers = args.workers;

    try {
        const auto profile = build_reference(items, options);
        save_profile(profile, args.out);
        out << "wrote " << args.out << " (" << profile.image_count << " images, " << profile.bit_depth()
            << "-bit, " << to_string(profile.method) << ")\n";
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) {
            err << "error: " << e.what() << '\n';
            return kUsageError;
        }
        std::string message = e.what();
        // Map "#<index>" back to the file it came from.
        if (const auto at = message.find('#'); at != std::string::npos) {
            const auto index = std::strtoul(message.c_str() + at + 1, nullptr, 10);
            if (index < paths.size()) message = paths[index].string() + ": " + message;
        }
        err << "error: " << message << '\n';
        return kDataError;
    }
    return kSuccess;
}

// ---------------------------------------------------------------- harmonize

struct HarmonizeArgs {
    std::vector<std::string> inputs;
    std::string manifest;
    std::string profile;
    std::string out;
    std::string report;
    std::string rebin = "auto";
    int workers = 1;
    MaskOptions mask;
};

nlohmann::json provenance(const ReferenceProfile& profile, const HarmonizeOptions& options,
                          const HarmonizeReport& report, const fs::path& source) {
    return {
        {"source", source.filename().string()},
        {"profile_label", profile.label},
        {"profile_method", std::string(to_string(profile.method))},
        {"profile_bit_depth", profile.bit_depth()},
        {"profile_image_count", profile.image_count},
        {"rebin_policy", std::string(to_string(options.rebin_policy))},
        {"map_expansion", "bin-center"},
        {"min_intensity", options.min_intensity},
        {"keep_largest_component", options.keep_largest_component},
        {"report", to_json(report)},
    };
}

int cmd_harmonize(const HarmonizeArgs& args, std::ostream& out, std::ostream& err) {
    if (!fs::is_regular_file(args.profile)) {
        err << "error: profile '" << args.profile << "' does not exist\n"
            << "usage: fgmatch harmonize --profile PROFILE.json --out DIR INPUT...\n";
        return kUsageError;
    }
    std::vector<fs::path> paths;
    try {
        paths = collect_inputs(args.inputs, args.manifest);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    if (paths.empty()) {
        err << "error: harmonize needs at least one input image\n";
        return kUsageError;
    }

    ReferenceProfile profile;
    try {
        profile = load_profile(args.profile);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }

    const fs::path out_dir = args.out;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        err << "error: cannot create output directory " << out_dir << '\n';
        return kUsageError;
    }
    const auto out_canonical = fs::weakly_canonical(out_dir);
    std::set<std::string> names;
    for (const auto& p : paths) {
        if (fs::weakly_canonical(p).parent_path() == out_canonical || fs::weakly_canonical(p) == out_canonical) {
            err << "error: output directory must differ from input locations (" << p.string() << ")\n";
            return kUsageError;
        }
        if (!names.insert(p.stem().string()).second) {
            err << "error: two inputs map to the same output name '" << p.stem().string() << ".pgm'\n";
            return kUsageError;
        }
    }

    HarmonizeOptions options;
    options.min_intensity = args.mask.min_intensity;
    options.keep_largest_component = args.mask.keep_largest_component;
    options.rebin_policy = parse_rebin_policy(args.rebin);

    std::vector<std::optional<HarmonizeReport>> reports(paths.size());
    std::vector<std::optional<Failure>> failed(paths.size());
    parallel_for(paths.size(), args.workers, [&](std::size_t i) {
        try {
            const auto record = read_image(paths[i]);
            auto result = harmonize(record.image, profile, options);
            for (const auto& w : result.report.warnings) spdlog::warn("{}: {}", paths[i].string(), w);
            ImageRecord output;
            output.image = std::move(result.image);
            output.source_path = paths[i];
            output.vendor = record.vendor;
            output.energy = record.energy;
            output.original_photometric = record.original_photometric;
            output.provenance = provenance(profile, options, result.report, paths[i]);
            write_pgm(output, out_dir / (paths[i].stem().string() + ".pgm"));
            reports[i] = std::move(result.report);
        } catch (const Error& e) {
            failed[i] = Failure{paths[i], e.what()};
        }
    });

    std::ostringstream csv;
    csv << "image,foreground_count,dropped_zero_valued,zeroed_outside_mask,pre_distance,post_distance,"
           "rebin_applied\n";
    std::vector<Failure> failures;
    std::size_t written = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (failed[i]) {
            failures.push_back(*failed[i]);
            continue;
        }
        const auto& r = *reports[i];
        csv << paths[i].filename().string() << ',' << r.foreground_count << ',' << r.dropped_zero_valued << ','
            << r.zeroed_outside_mask << ',' << format_double(r.pre_distance) << ','
            << format_double(r.post_distance) << ',' << (r.rebin_applied ? "true" : "false") << '\n';
        ++written;
    }
    const fs::path report_path = args.report.empty() ? out_dir / "report.csv" : fs::path(args.report);
    try {
        write_file_atomic(report_path, csv.str());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    report_failures(failures, err);
    out << "harmonized " << written << " of " << paths.size() << " images into " << out_dir.string() << '\n';
    return failures.empty() ? kSuccess : kDataError;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
    std::string path;
    std::string out;
    std::optional<int> bits;
    MaskOptions mask;
};

int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
    std::ostringstream csv;
    csv << "bin,count,cdf\n";
    try {
        if (fs::path(args.path).extension() == ".json" && !fs::path(args.path).stem().has_extension()) {
            auto profile = load_profile(args.path);
            const auto cdf = args.bits ? rebin_cdf(profile.cdf, *args.bits) : profile.cdf;
            for (std::size_t k = 0; k < cdf.bins(); ++k) csv << k << ",," << format_double(cdf[k]) << '\n';
        } else {
            const auto record = read_image(args.path);
            const auto prepared = prepare(record.image, args.mask);
            auto tally = fg_histogram(prepared.image, prepared.mask);
            const auto hist = args.bits ? rebin(tally.histogram, *args.bits).histogram : tally.histogram;
            const auto cdf = normalize_cdf(hist);
            for (std::size_t k = 0; k < hist.bins(); ++k)
                csv << k << ',' << hist[k] << ',' << format_double(cdf[k]) << '\n';
        }
    } catch (const Error& e) {
        err << "error: " << args.path << ": " << e.what() << '\n';
        return kDataError;
    }
    if (args.out.empty()) {
        out << csv.str();
    } else {
        write_file_atomic(args.out, csv.str());
    }
    return kSuccess;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
    std::string before;
    std::string after;
    std::string profile;
    std::string out;
    std::string summary;
    std::string group_by;
    MaskOptions mask;
};

std::string group_key(const ImageRecord& record, const std::string& by) {
    if (by == "vendor") return record.vendor.value_or("");
    return record.energy ? std::string(to_string(*record.energy)) : "";
}

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(args.before) || !fs::is_directory(args.after) || !fs::is_regular_file(args.profile)) {
        err << "error: metrics needs existing --before DIR, --after DIR and --profile FILE\n";
        return kUsageError;
    }
    ReferenceProfile profile;
    try {
        profile = load_profile(args.profile);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }

    std::vector<fs::path> befores;
    for (const auto& entry : fs::directory_iterator(args.before))
        if (entry.is_regular_file() && is_image_file(entry.path())) befores.push_back(entry.path());
    std::sort(befores.begin(), befores.end());
    if (befores.empty()) {
        err << "error: no images in " << args.before << '\n';
        return kDataError;
    }

    struct Row {
        std::string name;
        std::string group;
        NormalizedCdf pre;
        NormalizedCdf post;
        double pre_l1 = 0, post_l1 = 0, kl_pre = 0, kl_post = 0;
    };
    std::vector<Row> rows;
    std::vector<Failure> failures;
    std::optional<int> common_grid;
    std::optional<NormalizedCdf> common_ref;
    for (const auto& path : befores) {
        try {
            const auto before = read_image(path);
            const auto after_path = fs::path(args.after) / (path.stem().string() + ".pgm");
            if (!fs::exists(after_path)) throw Error(ErrorCode::Io, "no harmonized counterpart " + after_path.string());
            const auto after = read_image(after_path);
            const int grid = matching_bits(before.image.bit_depth(), profile.bit_depth(), RebinPolicy::Auto);
            const auto ref = rebin_cdf(profile.cdf, grid);
            Row row;
            row.name = path.filename().string();
            row.group = group_key(before, args.group_by);
            row.pre = image_cdf(before.image, args.mask, grid);
            row.post = image_cdf(after.image, MaskOptions{}, grid);
            row.pre_l1 = cdf_l1(row.pre, ref);
            row.post_l1 = cdf_l1(row.post, ref);
            const auto ref_mass = mass_from_cdf(ref);
            row.kl_pre = kl_divergence(mass_from_cdf(row.pre), ref_mass);
            row.kl_post = kl_divergence(mass_from_cdf(row.post), ref_mass);
            if (common_grid && *common_grid != grid) common_grid = -1;
            else if (!common_grid) {
                common_grid = grid;
                common_ref = ref;
            }
            rows.push_back(std::move(row));
        } catch (const Error& e) {
            failures.push_back({path, e.what()});
        }
    }

    std::ostringstream csv;
    csv << "image,pre_l1,post_l1,kl_pre,kl_post\n";
    double sums[4] = {0, 0, 0, 0};
    for (const auto& r : rows) {
        csv << r.name << ',' << format_double(r.pre_l1) << ',' << format_double(r.post_l1) << ','
            << format_double(r.kl_pre) << ',' << format_double(r.kl_post) << '\n';
        sums[0] += r.pre_l1;
        sums[1] += r.post_l1;
        sums[2] += r.kl_pre;
        sums[3] += r.kl_post;
    }
    const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
    nlohmann::json summary = {
        {"images", rows.size()},
        {"failed", failures.size()},
        {"mean_pre_l1", sums[0] / n},
        {"mean_post_l1", sums[1] / n},
        {"mean_kl_pre", sums[2] / n},
        {"mean_kl_post", sums[3] / n},
    };

    if (!args.group_by.empty() && !rows.empty()) {
        std::map<std::string, std::pair<std::vector<NormalizedCdf>, std::vector<NormalizedCdf>>> groups;
        for (const auto& r : rows) {
            groups[r.group].first.push_back(r.pre);
            groups[r.group].second.push_back(r.post);
        }
        if (groups.size() != 2 || !common_grid || *common_grid < 0) {
            err << "error: --group-by needs exactly two groups on a common grid, found " << groups.size()
                << " groups\n";
            return kDataError;
        }
        const auto& [name_a, a] = *groups.begin();
        const auto& [name_b, b] = *std::next(groups.begin());
        summary["gap"] = {
            {"group_a", name_a},
            {"group_b", name_b},
            {"before", to_json(gap_report(a.first, b.first, *common_ref))},
            {"after", to_json(gap_report(a.second, b.second, *common_ref))},
        };
    }

    if (args.out.empty()) {
        out << csv.str();
    } else {
        write_file_atomic(args.out, csv.str());
    }
    if (!args.summary.empty()) {
        write_file_atomic(args.summary, summary.dump(2) + "\n");
    } else if (!args.out.empty()) {
        out << summary.dump(2) << '\n';
    }
    report_failures(failures, err);
    return failures.empty() ? kSuccess : kDataError;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string out;
    int count = 10;
    std::uint64_t seed = 1;
    int width = 256;
    int height = 256;
    int bits = 12;
    double gamma = 1.0;
    double gain = 1.0;
    int offset = 0;
    std::string vendor = "synthetic";
    std::string energy;
    std::string prefix = "phantom";
    int workers = 1;
};

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
    VendorStyle style{args.gamma, args.gain, args.offset, args.vendor};
    std::optional<Energy> energy;
    try {
        style.validate();
        if (!args.energy.empty()) energy = parse_energy(args.energy);
        fs::create_directories(args.out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    parallel_for(static_cast<std::size_t>(args.count), args.workers, [&](std::size_t i) {
        const std::uint64_t seed = args.seed + i;
        ImageRecord record;
        record.image = vendor_transform(synth_image(seed, args.width, args.height, args.bits), style);
        record.vendor = style.label;
        record.energy = energy;
        char name[64];
        std::snprintf(name, sizeof name, "_%06llu.pgm", static_cast<unsigned long long>(seed));
        write_pgm(record, fs::path(args.out) / (args.prefix + name));
    });
    out << "wrote " << args.count << " phantoms to " << args.out << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------- verify

void verify_output_sidecar(const ImageRecord& record) {
    const auto& h = record.provenance;
    auto fail = [&](const std::string& why) {
        throw Error(ErrorCode::MalformedFile, "sidecar: " + why);
    };
    if (record.image.photometric() != Photometric::Mono2) fail("harmonized output must be MONO2");
    const auto& report = h.at("report");
    const auto fg = report.at("foreground_count").get<std::uint64_t>();
    const auto px = record.image.pixels();
    const auto nonzero = static_cast<std::uint64_t>(std::count_if(px.begin(), px.end(), [](auto p) { return p != 0; }));
    if (fg != nonzero) {
        fail("foreground_count " + std::to_string(fg) + " but image has " + std::to_string(nonzero) +
             " nonzero pixels");
    }
    for (const char* key : {"pre_distance", "post_distance"}) {
        const double d = report.at(key).get<double>();
        if (!(d >= 0.0) || d > 1.0) fail(std::string(key) + " outside [0,1]");
    }
    const int bits = report.at("matching_bits").get<int>();
    if (bits < 1 || bits > record.image.bit_depth()) fail("matching_bits out of range");
    if (h.at("min_intensity").get<int>() < 1) fail("min_intensity must be >= 1");
    parse_rebin_policy(h.at("rebin_policy").get<std::string>());
}

int cmd_verify(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err) {
    int status = kSuccess;
    for (const auto& arg : paths) {
        fs::path path = arg;
        try {
            if (!fs::exists(path)) throw Error(ErrorCode::Io, "no such file");
            // A sidecar stands for its image.
            if (path.extension() == ".json" && path.stem().has_extension()) path.replace_extension();
            if (path.extension() == ".json") {
                const auto profile = load_profile(path);
                out << "ok " << path.string() << " (profile, " << profile.bit_depth() << "-bit, "
                    << profile.image_count << " images)\n";
                continue;
            }
            const auto record = read_image(path);
            record.image.validate();
            if (!record.provenance.is_null()) verify_output_sidecar(record);
            out << "ok " << path.string() << " (" << record.image.width() << "x" << record.image.height() << ", "
                << record.image.bit_depth() << "-bit)\n";
        } catch (const nlohmann::json::exception& e) {
            err << "invalid " << path.string() << ": " << e.what() << '\n';
            status = kDataError;
        } catch (const Error& e) {
            err << "invalid " << path.string() << ": " << e.what() << '\n';
            status = kDataError;
        }
    }
    return status;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_logging();

    CLI::App app{"Foreground-only CDF matching for high-bit-depth grayscale images", "fgmatch"};
    app.set_config("--config", "", "TOML job file; command-line flags take precedence");
    app.require_subcommand(1);

    BuildRefArgs build;
    auto* build_cmd = app.add_subcommand("build-ref", "Build a reference profile from a set of images");
    build_cmd->add_option("inputs", build.inputs, "Input images (PGM or DICOM)");
    build_cmd->add_option("--manifest", build.manifest, "File listing one input path per line");
    build_cmd->add_option("--method", build.method, "averaged or pooled")
        ->check(CLI::IsMember({"averaged", "pooled"}));
    build_cmd->add_option("--bits", build.bits, "Profile bit depth (default: input depth)")->check(CLI::Range(1, 16));
    build_cmd->add_option("--label", build.label, "Free-text profile label");
    build_cmd->add_option("--created", build.created, "Creation stamp to record (ISO-8601)");
    build_cmd->add_option("--out,--profile", build.out, "Output profile path")->required();
    build_cmd->add_option("--workers", build.workers, "Worker threads")->check(CLI::PositiveNumber);
    add_mask_flags(build_cmd, build.mask);

    HarmonizeArgs harm;
    auto* harm_cmd = app.add_subcommand("harmonize", "Match images to a reference profile");
    harm_cmd->add_option("inputs", harm.inputs, "Input images (PGM or DICOM)");
    harm_cmd->add_option("--manifest", harm.manifest, "File listing one input path per line");
    harm_cmd->add_option("--profile", harm.profile, "Reference profile JSON")->required();
    harm_cmd->add_option("--out", harm.out, "Output directory")->required();
    harm_cmd->add_option("--report", harm.report, "CSV report path (default OUT/report.csv)");
    harm_cmd->add_option("--rebin", harm.rebin, "auto, native or common12")
        ->check(CLI::IsMember({"auto", "native", "common12"}));
    harm_cmd->add_option("--workers", harm.workers, "Worker threads")->check(CLI::PositiveNumber);
    add_mask_flags(harm_cmd, harm.mask);

    InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Dump a foreground histogram and CDF as CSV");
    inspect_cmd->add_option("path", inspect.path, "Image or profile")->required();
    inspect_cmd->add_option("--out", inspect.out, "Write CSV here instead of stdout");
    inspect_cmd->add_option("--bits", inspect.bits, "Rebin to this many bits")->check(CLI::Range(1, 16));
    add_mask_flags(inspect_cmd, inspect.mask);

    MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare images before and after harmonization");
    metrics_cmd->add_option("--before", metrics.before, "Directory of original images")->required();
    metrics_cmd->add_option("--after", metrics.after, "Directory of harmonized images")->required();
    metrics_cmd->add_option("--profile", metrics.profile, "Reference profile JSON")->required();
    metrics_cmd->add_option("--out", metrics.out, "Per-image CSV path (default stdout)");
    metrics_cmd->add_option("--summary", metrics.summary, "JSON summary path");
    metrics_cmd->add_option("--group-by", metrics.group_by, "Add a two-group gap report (vendor or energy)")
        ->check(CLI::IsMember({"vendor", "energy"}));
    add_mask_flags(metrics_cmd, metrics.mask);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic phantoms as PGM");
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--count", synth.count, "Number of phantoms")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.seed, "First seed; phantom i uses seed + i");
    synth_cmd->add_option("--width", synth.width)->check(CLI::Range(16, 1 << 16));
    synth_cmd->add_option("--height", synth.height)->check(CLI::Range(16, 1 << 16));
    synth_cmd->add_option("--bits", synth.bits)->check(CLI::Range(1, 16));
    synth_cmd->add_option("--gamma", synth.gamma, "Vendor style gamma");
    synth_cmd->add_option("--gain", synth.gain, "Vendor style gain");
    synth_cmd->add_option("--offset", synth.offset, "Vendor style offset");
    synth_cmd->add_option("--vendor", synth.vendor, "Vendor label written to sidecars");
    synth_cmd->add_option("--energy", synth.energy, "low or high")->check(CLI::IsMember({"low", "high"}));
    synth_cmd->add_option("--prefix", synth.prefix, "File name prefix");
    synth_cmd->add_option("--workers", synth.workers)->check(CLI::PositiveNumber);

    std::vector<std::string> verify_paths;
    auto* verify_cmd = app.add_subcommand("verify", "Re-check the invariants of a profile or output image");
    verify_cmd->add_option("paths", verify_paths, "Profiles, images or sidecars")->required();

    std::vector<std::string> argv_tail(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(argv_tail.begin(), argv_tail.end());
    try {
        app.parse(argv_tail);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return kUsageError;
    }

    try {
        if (*build_cmd) return cmd_build_ref(build, out, err);
        if (*harm_cmd) return cmd_harmonize(harm, out, err);
        if (*inspect_cmd) return cmd_inspect(inspect, out, err);
        if (*metrics_cmd) return cmd_metrics(metrics, out, err);
        if (*synth_cmd) return cmd_synth(synth, out, err);
        if (*verify_cmd) return cmd_verify(verify_paths, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::Io || e.code() == ErrorCode::InvalidArgument ? kUsageError : kDataError;
    }
    return kUsageError;
}

}  // namespace fgmatch::cli
