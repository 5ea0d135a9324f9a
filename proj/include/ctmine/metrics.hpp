#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctmine/harness.hpp"

namespace ctmine::classify {

enum class MetricClass { Positive, Negative };

const char* metric_class_name(MetricClass c);

struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

    // Undefined (zero-denominator) metrics stay empty rather than becoming 0.
    std::optional<double> precision() const;
    std::optional<double> recall() const;
};

// Abstain counts as a negative answer before tallying. Rows whose item has
// no gold label are ignored; non-ok rows are ignored.
ConfusionCounts tally_confusion(std::span<const Prediction> rows,
                                const std::map<std::string, int>& gold, MetricClass cls);

struct AggregateMetrics {
    std::string model;
    PromptVariant prompt = PromptVariant::Simple;
    MetricClass cls = MetricClass::Positive;
    int n_seeds = 0;
    std::vector<double> precision_by_seed;  // defined values only
    std::vector<double> recall_by_seed;
    std::optional<double> precision_mean, precision_ci95;
    std::optional<double> recall_mean, recall_ci95;
};

// Per (model, prompt): one confusion per seed, then mean and a 95% normal
// interval (1.96 * sample sd) across seeds.
std::vector<AggregateMetrics> compute_metrics(std::span<const Prediction> rows,
                                              const std::map<std::string, int>& gold,
                                              MetricClass cls);

void write_metrics_csv(std::span<const AggregateMetrics> metrics, const std::string& case_name,
                       const std::string& path);

// --- transcript-length quartiles ---------------------------------------------

// Whitespace-token count.
std::int64_t word_count(std::string_view text);

// Nearest-rank quartile upper bounds (Q1..Q4) of the items' word counts.
std::array<std::int64_t, 4> word_count_quartile_bounds(std::span<const DatasetItem> items);

struct QuartileMetrics {
    int quartile = 1;  // 1..4
    std::int64_t upper_bound = 0;
    std::int64_t n_items = 0;
    std::vector<AggregateMetrics> metrics;
};

// Buckets items by the dataset-wide quartile bounds (bucket q holds items
// with bound[q-1] < words <= bound[q]) and evaluates each bucket separately.
std::vector<QuartileMetrics> quartile_breakdown(std::span<const Prediction> rows,
                                                std::span<const DatasetItem> items,
                                                MetricClass cls);

void write_quartile_csv(std::span<const QuartileMetrics> buckets, const std::string& case_name,
                        const std::string& path);

// --- fine-tuned reference constants -------------------------------------------

struct BaselineBand {
    double precision_mean = 0.0, precision_spread = 0.0;
    double recall_mean = 0.0, recall_spread = 0.0;
};

// Published fine-tuned-encoder validation scores used as the comparison band
// in reports; available for C1 and C3 only.
std::optional<BaselineBand> finetuned_baseline(ExperimentCase c);

}  // namespace ctmine::classify
