#include "ctmine/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ctmine/csv.hpp"

namespace ctmine::classify {

const char* metric_class_name(MetricClass c) {
    return c == MetricClass::Positive ? "positive" : "negative";
}

std::optional<double> ConfusionCounts::precision() const {
    if (tp + fp == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

std::optional<double> ConfusionCounts::recall() const {
    if (tp + fn == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

ConfusionCounts tally_confusion(std::span<const Prediction> rows,
                                const std::map<std::string, int>& gold, MetricClass cls) {
    const int target = cls == MetricClass::Positive ? 1 : 0;
    ConfusionCounts c;
    for (const auto& p : rows) {
        if (p.status != PredictionStatus::Ok) continue;
        const auto it = gold.find(p.item_id);
        if (it == gold.end()) continue;
        const int predicted = p.label == Label::Positive ? 1 : 0;  // abstain -> 0
        const bool pred_hit = predicted == target;
        const bool gold_hit = it->second == target;
        if (pred_hit && gold_hit) ++c.tp;
        else if (pred_hit && !gold_hit) ++c.fp;
        else if (!pred_hit && gold_hit) ++c.fn;
        else ++c.tn;
    }
    return c;
}

namespace {

struct MeanSpread {
    std::optional<double> mean, ci95;
};

MeanSpread mean_and_ci95(const std::vector<double>& xs) {
    if (xs.empty()) return {};
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, std::nullopt};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    return {mean, 1.96 * sd};
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", *v);
    return buf;
}

}  // namespace

std::vector<AggregateMetrics> compute_metrics(std::span<const Prediction> rows,
                                              const std::map<std::string, int>& gold,
                                              MetricClass cls) {
    // (model, prompt) -> seed -> row list; std::map keeps the report ordering
    // stable across runs regardless of append order.
    std::map<std::pair<std::string, PromptVariant>, std::map<std::int64_t, std::vector<Prediction>>>
        groups;
    for (const auto& p : rows) {
        if (p.status != PredictionStatus::Ok) continue;
        groups[{p.model, p.prompt}][p.seed].push_back(p);
    }

    std::vector<AggregateMetrics> out;
    for (const auto& [key, by_seed] : groups) {
        AggregateMetrics agg;
        agg.model = key.first;
        agg.prompt = key.second;
        agg.cls = cls;
        agg.n_seeds = static_cast<int>(by_seed.size());
        for (const auto& [seed, seed_rows] : by_seed) {
            const ConfusionCounts c = tally_confusion(seed_rows, gold, cls);
            if (const auto p = c.precision()) agg.precision_by_seed.push_back(*p);
            if (const auto r = c.recall()) agg.recall_by_seed.push_back(*r);
        }
        const MeanSpread p = mean_and_ci95(agg.precision_by_seed);
        const MeanSpread r = mean_and_ci95(agg.recall_by_seed);
        agg.precision_mean = p.mean;
        agg.precision_ci95 = p.ci95;
        agg.recall_mean = r.mean;
        agg.recall_ci95 = r.ci95;
        out.push_back(std::move(agg));
    }
    return out;
}

void write_metrics_csv(std::span<const AggregateMetrics> metrics, const std::string& case_name,
                       const std::string& path) {
    csv::Writer w(path);
    w.row({"case", "class", "model", "prompt", "precision_mean", "precision_ci95", "recall_mean",
           "recall_ci95", "n_seeds"});
    for (const auto& m : metrics) {
        w.row({case_name, metric_class_name(m.cls), m.model, prompt_variant_name(m.prompt),
               fmt_opt(m.precision_mean), fmt_opt(m.precision_ci95), fmt_opt(m.recall_mean),
               fmt_opt(m.recall_ci95), std::to_string(m.n_seeds)});
    }
}

std::int64_t word_count(std::string_view text) {
    std::int64_t count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::array<std::int64_t, 4> word_count_quartile_bounds(std::span<const DatasetItem> items) {
    if (items.empty()) throw std::invalid_argument("quartile bounds: empty dataset");
    std::vector<std::int64_t> counts;
    counts.reserve(items.size());
    for (const auto& item : items) counts.push_back(word_count(item.transcript));
    std::sort(counts.begin(), counts.end());

    const auto n = static_cast<double>(counts.size());
    std::array<std::int64_t, 4> bounds{};
    const double qs[4] = {0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 4; ++i) {
        const auto rank = static_cast<std::size_t>(std::ceil(qs[i] * n));
        bounds[static_cast<std::size_t>(i)] = counts[std::max<std::size_t>(rank, 1) - 1];
    }
    return bounds;
}

std::vector<QuartileMetrics> quartile_breakdown(std::span<const Prediction> rows,
                                                std::span<const DatasetItem> items,
                                                MetricClass cls) {
    const auto bounds = word_count_quartile_bounds(items);

    std::map<std::string, int> item_bucket;
    std::map<std::string, int> gold;
    std::array<std::int64_t, 4> bucket_sizes{};
    for (const auto& item : items) {
        const std::int64_t words = word_count(item.transcript);
        int bucket = 3;
        for (int q = 0; q < 4; ++q) {
            if (words <= bounds[static_cast<std::size_t>(q)]) {
                bucket = q;
                break;
            }
        }
        item_bucket[item.item_id] = bucket;
        gold[item.item_id] = item.gold;
        bucket_sizes[static_cast<std::size_t>(bucket)] += 1;
    }

    std::array<std::vector<Prediction>, 4> bucket_rows;
    for (const auto& p : rows) {
        const auto it = item_bucket.find(p.item_id);
        if (it == item_bucket.end()) continue;
        bucket_rows[static_cast<std::size_t>(it->second)].push_back(p);
    }

    std::vector<QuartileMetrics> out;
    for (int q = 0; q < 4; ++q) {
        QuartileMetrics qm;
        qm.quartile = q + 1;
        qm.upper_bound = bounds[static_cast<std::size_t>(q)];
        qm.n_items = bucket_sizes[static_cast<std::size_t>(q)];
        qm.metrics = compute_metrics(bucket_rows[static_cast<std::size_t>(q)], gold, cls);
        out.push_back(std::move(qm));
    }
    return out;
}

void write_quartile_csv(std::span<const QuartileMetrics> buckets, const std::string& case_name,
                        const std::string& path) {
    csv::Writer w(path);
    w.row({"case", "class", "quartile", "upper_bound_words", "n_items", "model", "prompt",
           "precision_mean", "precision_ci95", "recall_mean", "recall_ci95", "n_seeds"});
    for (const auto& b : buckets) {
        for (const auto& m : b.metrics) {
            w.row({case_name, metric_class_name(m.cls), std::to_string(b.quartile),
                   std::to_string(b.upper_bound), std::to_string(b.n_items), m.model,
                   prompt_variant_name(m.prompt), fmt_opt(m.precision_mean),
                   fmt_opt(m.precision_ci95), fmt_opt(m.recall_mean), fmt_opt(m.recall_ci95),
                   std::to_string(m.n_seeds)});
        }
    }
}

std::optional<BaselineBand> finetuned_baseline(ExperimentCase c) {
    switch (c) {
        case ExperimentCase::C1: return BaselineBand{0.83, 0.01, 0.83, 0.01};
        case ExperimentCase::C3: return BaselineBand{0.68, 0.04, 0.67, 0.01};
        case ExperimentCase::C2: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace ctmine::classify
