#pragma once

#include <cstdint>
#include <fstream>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ctmine/llm_client.hpp"
#include "ctmine/prompts.hpp"

namespace ctmine::classify {

// --- datasets ----------------------------------------------------------------

struct DatasetItem {
    std::string item_id;
    std::string transcript;
    int gold = 0;              // 1 = conspiracy
    std::string source;        // "distant" or "manual"
};

// CSV: item_id,transcript,gold_label,source
std::vector<DatasetItem> load_dataset_csv(const std::string& path);
void write_dataset_csv(std::span<const DatasetItem> items, const std::string& path);

enum class ExperimentCase { C1, C2, C3 };

const char* experiment_case_name(ExperimentCase c);
ExperimentCase parse_experiment_case(std::string_view name);

struct CaseShape {
    int positives = 0;
    int negatives = 0;
    int total() const { return positives + negatives; }
};

// C1: balanced 887/779; C2 and C3: unbalanced 100/779.
CaseShape expected_case_shape(ExperimentCase c);

// Empty when the dataset matches the case's canonical shape.
std::vector<std::string> validate_case_shape(ExperimentCase c,
                                             std::span<const DatasetItem> items);

// The 25 replication seeds used for every sweep by default.
std::span<const std::int64_t> replication_seeds();

struct ExperimentSpec {
    ExperimentCase case_id = ExperimentCase::C1;
    std::vector<DatasetItem> dataset;
    std::vector<PromptVariant> prompts;
    std::vector<ClassifierConfig> models;
    std::vector<std::int64_t> seeds;
};

// --- predictions -------------------------------------------------------------

enum class PredictionStatus { Ok, Failed, Overflow };

struct Prediction {
    std::string item_id;
    std::string model;
    PromptVariant prompt = PromptVariant::Simple;
    std::int64_t seed = 0;
    PredictionStatus status = PredictionStatus::Ok;
    Label label = Label::Abstain;
    std::int64_t latency_ms = 0;
    std::string raw_output;  // error message for failed rows

    std::string key() const;
};

// Append-only CSV of predictions. Opening an existing file resumes it:
// previously completed keys are skipped by the sweep, and a torn final line
// (crash mid-write) is truncated away. Appends are serialized and flushed
// row by row so a killed run leaves a usable prefix.
class ResultsStore {
public:
    explicit ResultsStore(const std::string& path);

    // A key counts as done when it has an ok or overflow row; failed rows
    // are retried on resume.
    bool contains(const std::string& key) const;
    void append(const Prediction& p);

    const std::vector<Prediction>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    static std::vector<Prediction> load(const std::string& path);

private:
    std::string path_;
    std::ofstream out_;
    std::vector<Prediction> rows_;
    std::unordered_set<std::string> done_;
    std::mutex mutex_;
};

struct RunStats {
    std::int64_t invoked = 0;
    std::int64_t skipped = 0;   // already present in the store
    std::int64_t failures = 0;
    std::int64_t overflows = 0;
    std::int64_t abstains = 0;
};

// Executes the items x prompts x models x seeds cross-product against the
// configured endpoints. Per-item failures are recorded and never abort the
// sweep. Invocations run on `workers` threads with the store serializing
// appends; rerunning with the same store only fills missing cells.
RunStats run_experiment(const ExperimentSpec& spec, ResultsStore& store, int workers = 1);

// Majority-vote rows (model = "ensemble") for every (item, prompt, seed)
// covered by exactly the three given models.
std::vector<Prediction> ensemble_predictions(std::span<const Prediction> rows,
                                             const std::vector<std::string>& model_names);

}  // namespace ctmine::classify
