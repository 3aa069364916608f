#include "sheetscan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sheetscan::stats {

namespace {

void require_nonempty(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("samples must be non-empty");
    }
}

// Midranks of the pooled sample, doubled so ties stay integral.
// Returns doubled midranks aligned with the sorted pool.
std::vector<long long> doubled_midranks(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    std::vector<long long> out(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        // ranks i+1 .. j+1 share midrank ((i+1)+(j+1))/2; doubled: i+j+2
        const long long doubled = static_cast<long long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) out[k] = doubled;
        i = j + 1;
    }
    return out;
}

long long doubled_rank_sum(std::span<const double> sample,
                           const std::vector<double>& pool_sorted,
                           const std::vector<long long>& pool_ranks) {
    long long sum = 0;
    for (double v : sample) {
        auto it = std::lower_bound(pool_sorted.begin(), pool_sorted.end(), v);
        sum += pool_ranks[static_cast<std::size_t>(it - pool_sorted.begin())];
    }
    return sum;
}

double u_statistic_x(std::span<const double> x, std::span<const double> y) {
    std::vector<double> pool(x.begin(), x.end());
    pool.insert(pool.end(), y.begin(), y.end());
    std::sort(pool.begin(), pool.end());
    auto ranks = doubled_midranks(pool);
    const long long sx = doubled_rank_sum(x, pool, ranks);
    const double r1 = static_cast<double>(sx) / 2.0;
    const double n1 = static_cast<double>(x.size());
    return r1 - n1 * (n1 + 1.0) / 2.0;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

EffectLabel label_effect(double d) {
    const double a = std::fabs(d);
    if (a < 0.147) return EffectLabel::negligible;
    if (a < 0.33) return EffectLabel::small;
    if (a < 0.474) return EffectLabel::medium;
    return EffectLabel::large;
}

std::string_view effect_label_name(EffectLabel label) {
    switch (label) {
        case EffectLabel::negligible: return "negligible";
        case EffectLabel::small: return "small";
        case EffectLabel::medium: return "medium";
        case EffectLabel::large: return "large";
    }
    return "?";
}

double mann_whitney_exact_p(std::span<const double> x,
                            std::span<const double> y) {
    require_nonempty(x, y);
    const std::size_t n = x.size();
    const std::size_t m = y.size();
    const std::size_t total = n + m;
    if (total > 60) {
        throw std::invalid_argument(
            "exact Mann-Whitney limited to n+m <= 60");
    }

    std::vector<double> pool(x.begin(), x.end());
    pool.insert(pool.end(), y.begin(), y.end());
    std::sort(pool.begin(), pool.end());
    auto ranks = doubled_midranks(pool);

    const long long s_obs = doubled_rank_sum(x, pool, ranks);
    // delta(S) = |S - n(n+1) - n*m| is |2*(U1 - n*m/2)| scaled to integers.
    const long long shift = static_cast<long long>(n) * (n + 1) +
                            static_cast<long long>(n) * m;
    const long long d_obs = std::llabs(s_obs - shift);

    // ways[j][s]: number of size-j subsets of the pooled ranks with doubled
    // rank sum s.
    long long max_sum = 0;
    for (long long r : ranks) max_sum += r;
    std::vector<std::vector<std::uint64_t>> ways(
        n + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
    ways[0][0] = 1;
    for (std::size_t item = 0; item < total; ++item) {
        const long long r = ranks[item];
        const std::size_t jmax = std::min(n, item + 1);
        for (std::size_t j = jmax; j >= 1; --j) {
            auto& row = ways[j];
            const auto& prev = ways[j - 1];
            for (long long s = max_sum; s >= r; --s) {
                if (prev[s - r]) row[s] += prev[s - r];
            }
        }
    }

    std::uint64_t extreme = 0;
    std::uint64_t all = 0;
    for (long long s = 0; s <= max_sum; ++s) {
        const std::uint64_t w = ways[n][s];
        if (!w) continue;
        all += w;
        if (std::llabs(s - shift) >= d_obs) extreme += w;
    }
    return static_cast<double>(extreme) / static_cast<double>(all);
}

double mann_whitney_normal_p(std::span<const double> x,
                             std::span<const double> y) {
    require_nonempty(x, y);
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    const double total = n1 + n2;

    std::vector<double> pool(x.begin(), x.end());
    pool.insert(pool.end(), y.begin(), y.end());
    std::sort(pool.begin(), pool.end());

    double tie_term = 0;  // sum of t^3 - t over tie groups
    std::size_t i = 0;
    while (i < pool.size()) {
        std::size_t j = i;
        while (j + 1 < pool.size() && pool[j + 1] == pool[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }

    const double u = u_statistic_x(x, y);
    const double mu = n1 * n2 / 2.0;
    double var = n1 * n2 / 12.0 *
                 ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if (var <= 0.0) return 1.0;
    const double sd = std::sqrt(var);
    double diff = std::fabs(u - mu) - 0.5;  // continuity correction
    if (diff < 0.0) diff = 0.0;
    double p = 2.0 * normal_sf(diff / sd);
    return std::clamp(p, 0.0, 1.0);
}

TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                        int exact_cap) {
    require_nonempty(x, y);
    TestResult out;
    out.u_statistic = u_statistic_x(x, y);
    if (static_cast<long long>(x.size()) + static_cast<long long>(y.size()) <=
        exact_cap) {
        out.method = TestResult::Method::exact;
        out.p_value = mann_whitney_exact_p(x, y);
    } else {
        out.method = TestResult::Method::normal_approx;
        out.p_value = mann_whitney_normal_p(x, y);
    }
    return out;
}

EffectSize cliffs_delta(std::span<const double> x,
                        std::span<const double> y) {
    require_nonempty(x, y);
    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    long long greater = 0;  // pairs with x_i > y_j
    long long less = 0;     // pairs with x_i < y_j
    for (double v : x) {
        auto lo = std::lower_bound(ys.begin(), ys.end(), v);
        auto hi = std::upper_bound(ys.begin(), ys.end(), v);
        greater += lo - ys.begin();
        less += ys.end() - hi;
    }
    EffectSize out;
    const long long pairs =
        static_cast<long long>(x.size()) * static_cast<long long>(y.size());
    out.d = static_cast<double>(greater - less) / static_cast<double>(pairs);
    out.label = label_effect(out.d);
    return out;
}

double quantile(std::span<const double> sorted_sample, double p) {
    const std::size_t n = sorted_sample.size();
    if (n == 0) throw std::invalid_argument("empty sample");
    if (n == 1) return sorted_sample[0];
    const double h = (static_cast<double>(n) - 1.0) * p + 1.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo >= n) return sorted_sample[n - 1];
    if (frac == 0.0) return sorted_sample[lo - 1];
    return sorted_sample[lo - 1] +
           frac * (sorted_sample[lo] - sorted_sample[lo - 1]);
}

FiveNumber quantile_summary(std::span<const double> sample) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    FiveNumber out;
    out.min = sorted.front();
    out.q1 = quantile(sorted, 0.25);
    out.median = quantile(sorted, 0.5);
    out.q3 = quantile(sorted, 0.75);
    out.max = sorted.back();
    return out;
}

MetricComparison compare_metric(std::span<const double> x,
                                std::span<const double> y, int exact_cap) {
    MetricComparison out;
    out.test = mann_whitney(x, y, exact_cap);
    out.effect = cliffs_delta(x, y);
    return out;
}

std::string p_value_band(double p) {
    if (p < 0.01) return "<0.01";
    if (p <= 0.05) return "<0.05";
    return ">0.05";
}

}  // namespace sheetscan::stats
