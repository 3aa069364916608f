#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace sheetscan::stats {

struct TestResult {
    enum class Method { exact, normal_approx };

    double u_statistic = 0;  // U for the first sample, midrank ties
    double p_value = 1;      // two-sided, in [0, 1]
    Method method = Method::normal_approx;
};

enum class EffectLabel { negligible, small, medium, large };

std::string_view effect_label_name(EffectLabel label);

struct EffectSize {
    double d = 0;  // in [-1, 1]
    EffectLabel label = EffectLabel::negligible;
};

// |d| < 0.147 negligible, < 0.33 small, < 0.474 medium, else large.
EffectLabel label_effect(double d);

inline constexpr int kDefaultExactCap = 16;  // exact test when n+m <= cap

// Two-sided Wilcoxon-Mann-Whitney test. Exact enumeration over all
// C(n+m, n) group labelings when n+m <= exact_cap, otherwise normal
// approximation with tie and continuity correction. Empty samples are an
// invalid_argument.
TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                        int exact_cap = kDefaultExactCap);

// The two engines, exposed for oracle checks. The exact engine counts
// labelings by dynamic programming over rank sums and matches brute-force
// enumeration identically; it requires n+m <= 60.
double mann_whitney_exact_p(std::span<const double> x,
                            std::span<const double> y);
double mann_whitney_normal_p(std::span<const double> x,
                             std::span<const double> y);

// d = (#{x_i > y_j} - #{x_i < y_j}) / (n*m), computed by sort-and-rank
// but exactly equal to the all-pairs definition.
EffectSize cliffs_delta(std::span<const double> x, std::span<const double> y);

struct FiveNumber {
    double min = 0;
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double max = 0;
};

// Linear-interpolation quantiles: h = (n-1)p + 1 over the sorted sample.
FiveNumber quantile_summary(std::span<const double> sample);
double quantile(std::span<const double> sorted_sample, double p);

struct MetricComparison {
    TestResult test;
    EffectSize effect;
};

MetricComparison compare_metric(std::span<const double> x,
                                std::span<const double> y,
                                int exact_cap = kDefaultExactCap);

// "<0.01", "<0.05" or ">0.05".
std::string p_value_band(double p);

}  // namespace sheetscan::stats
