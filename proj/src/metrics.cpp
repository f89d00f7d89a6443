#include "fgmatch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fgmatch/error.hpp"

namespace fgmatch {

nlohmann::json to_json(const HarmonizeReport& r) {
    return {
        {"foreground_count", r.foreground_count},
        {"dropped_zero_valued", r.dropped_zero_valued},
        {"zeroed_outside_mask", r.zeroed_outside_mask},
        {"pre_distance", r.pre_distance},
        {"post_distance", r.post_distance},
        {"rebin_applied", r.rebin_applied},
        {"matching_bits", r.matching_bits},
        {"warnings", r.warnings},
    };
}

double cdf_l1(const NormalizedCdf& a, const NormalizedCdf& b) {
    if (a.bit_depth() != b.bit_depth()) {
        throw Error(ErrorCode::DimensionMismatch, "cdf_l1 needs CDFs of equal bit depth");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < a.bins(); ++k) sum += std::abs(a[k] - b[k]);
    return sum / static_cast<double>(a.bins() - 1);
}

namespace {

std::vector<double> frequencies(const Histogram& h) {
    if (h.empty()) throw Error(ErrorCode::EmptyForeground, "KL divergence of an empty histogram");
    std::vector<double> f(h.bins(), 0.0);
    const auto n = static_cast<double>(h.total());
    for (std::size_t k = 1; k < h.bins(); ++k) f[k] = static_cast<double>(h[k]) / n;
    return f;
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
    if (p.size() != q.size() || p.size() < 2) {
        throw Error(ErrorCode::DimensionMismatch, "KL divergence needs mass vectors of equal length");
    }
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    double p_total = 0.0;
    double q_total = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        p_total += p[k] + epsilon;
        q_total += q[k] + epsilon;
    }
    double kl = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double ps = (p[k] + epsilon) / p_total;
        const double qs = (q[k] + epsilon) / q_total;
        kl += ps * std::log(ps / qs);
    }
    // Gibbs' inequality; a negative sum is rounding noise.
    return std::max(kl, 0.0);
}

double kl_divergence(const Histogram& p, const Histogram& q, double epsilon) {
    if (p.bit_depth() != q.bit_depth()) {
        throw Error(ErrorCode::DimensionMismatch, "KL divergence needs histograms of equal bit depth");
    }
    const auto pf = frequencies(p);
    const auto qf = frequencies(q);
    return kl_divergence(pf, qf, epsilon);
}

std::vector<double> mass_from_cdf(const NormalizedCdf& cdf) {
    std::vector<double> mass(cdf.bins(), 0.0);
    for (std::size_t k = 1; k < cdf.bins(); ++k) mass[k] = cdf[k] - cdf[k - 1];
    return mass;
}

namespace {

class Accumulator {
public:
    void add(double d) {
        sum_ += d;
        max_ = std::max(max_, d);
        ++n_;
    }
    [[nodiscard]] DistanceSummary summary() const {
        return {n_ == 0 ? 0.0 : sum_ / static_cast<double>(n_), max_, n_};
    }

private:
    double sum_ = 0.0;
    double max_ = 0.0;
    std::size_t n_ = 0;
};

DistanceSummary within(std::span<const NormalizedCdf> group) {
    Accumulator acc;
    for (std::size_t i = 0; i < group.size(); ++i)
        for (std::size_t j = i + 1; j < group.size(); ++j) acc.add(cdf_l1(group[i], group[j]));
    return acc.summary();
}

DistanceSummary to_reference(std::span<const NormalizedCdf> group, const NormalizedCdf& ref) {
    Accumulator acc;
    for (const auto& c : group) acc.add(cdf_l1(c, ref));
    return acc.summary();
}

nlohmann::json to_json(const DistanceSummary& s) {
    return {{"mean", s.mean}, {"max", s.max}, {"pairs", s.pairs}};
}

}  // namespace

GapReport gap_report(std::span<const NormalizedCdf> group_a, std::span<const NormalizedCdf> group_b,
                     const NormalizedCdf& reference) {
    if (group_a.empty() || group_b.empty()) {
        throw Error(ErrorCode::InvalidArgument, "gap report needs two non-empty groups");
    }
    GapReport gap;
    gap.within_a = within(group_a);
    gap.within_b = within(group_b);
    Accumulator cross;
    for (const auto& a : group_a)
        for (const auto& b : group_b) cross.add(cdf_l1(a, b));
    gap.cross = cross.summary();
    gap.a_to_reference = to_reference(group_a, reference);
    gap.b_to_reference = to_reference(group_b, reference);
    return gap;
}

nlohmann::json to_json(const GapReport& gap) {
    return {
        {"within_a", to_json(gap.within_a)},
        {"within_b", to_json(gap.within_b)},
        {"cross", to_json(gap.cross)},
        {"a_to_reference", to_json(gap.a_to_reference)},
        {"b_to_reference", to_json(gap.b_to_reference)},
    };
}

std::string to_csv(const GapReport& gap) {
    std::ostringstream out;
    out.precision(17);
    out << "statistic,mean,max,pairs\n";
    auto row = [&out](const char* name, const DistanceSummary& s) {
        out << name << ',' << s.mean << ',' << s.max << ',' << s.pairs << '\n';
    };
    row("within_a", gap.within_a);
    row("within_b", gap.within_b);
    row("cross", gap.cross);
    row("a_to_reference", gap.a_to_reference);
    row("b_to_reference", gap.b_to_reference);
    return out.str();
}

}  // namespace fgmatch
