#include "ctmine/harness.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <thread>

#include "ctmine/csv.hpp"
#include "ctmine/errors.hpp"
#include "ctmine/log.hpp"

namespace ctmine::classify {

namespace fs = std::filesystem;

std::vector<DatasetItem> load_dataset_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    std::vector<DatasetItem> items;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
        if (i == 0 && row[0] == "item_id") continue;
        if (row.size() < 3) throw std::runtime_error("dataset row " + std::to_string(i + 1) +
                                                     " has fewer than 3 fields: " + path);
        DatasetItem item;
        item.item_id = row[0];
        item.transcript = row[1];
        item.gold = std::stoi(row[2]);
        if (item.gold != 0 && item.gold != 1)
            throw std::runtime_error("dataset row " + std::to_string(i + 1) +
                                     " has non-binary gold label: " + path);
        if (row.size() > 3) item.source = row[3];
        items.push_back(std::move(item));
    }
    return items;
}

void write_dataset_csv(std::span<const DatasetItem> items, const std::string& path) {
    csv::Writer w(path);
    w.row({"item_id", "transcript", "gold_label", "source"});
    for (const auto& item : items)
        w.row({item.item_id, item.transcript, std::to_string(item.gold), item.source});
}

const char* experiment_case_name(ExperimentCase c) {
    switch (c) {
        case ExperimentCase::C1: return "C1";
        case ExperimentCase::C2: return "C2";
        case ExperimentCase::C3: return "C3";
    }
    return "C1";
}

ExperimentCase parse_experiment_case(std::string_view name) {
    if (name == "C1" || name == "c1") return ExperimentCase::C1;
    if (name == "C2" || name == "c2") return ExperimentCase::C2;
    if (name == "C3" || name == "c3") return ExperimentCase::C3;
    throw std::invalid_argument("unknown experiment case: " + std::string(name));
}

CaseShape expected_case_shape(ExperimentCase c) {
    switch (c) {
        case ExperimentCase::C1: return {887, 779};
        case ExperimentCase::C2:
        case ExperimentCase::C3: return {100, 779};
    }
    return {};
}

std::vector<std::string> validate_case_shape(ExperimentCase c,
                                             std::span<const DatasetItem> items) {
    const CaseShape want = expected_case_shape(c);
    int pos = 0, neg = 0;
    for (const auto& item : items) (item.gold == 1 ? pos : neg) += 1;

    std::vector<std::string> problems;
    if (pos != want.positives)
        problems.push_back("expected " + std::to_string(want.positives) + " positive items, got " +
                           std::to_string(pos));
    if (neg != want.negatives)
        problems.push_back("expected " + std::to_string(want.negatives) + " negative items, got " +
                           std::to_string(neg));
    return problems;
}

std::span<const std::int64_t> replication_seeds() {
    static const std::int64_t seeds[] = {123, 42, 37,  57, 50,   73,   0,  69,  25,
                                         100, 12, 4,   49, 420,  17,   444, 1111, 7,
                                         8,   26, 10,  33, 666,  777,  1999};
    return seeds;
}

std::string Prediction::key() const {
    return item_id + "\x1f" + model + "\x1f" + prompt_variant_name(prompt) + "\x1f" +
           std::to_string(seed);
}

namespace {

const char* status_name(PredictionStatus s) {
    switch (s) {
        case PredictionStatus::Ok: return "ok";
        case PredictionStatus::Failed: return "failed";
        case PredictionStatus::Overflow: return "overflow";
    }
    return "ok";
}

PredictionStatus parse_status(std::string_view s) {
    if (s == "ok") return PredictionStatus::Ok;
    if (s == "failed") return PredictionStatus::Failed;
    if (s == "overflow") return PredictionStatus::Overflow;
    throw std::invalid_argument("unknown prediction status");
}

constexpr const char* kResultsHeader = "item_id,model,prompt,seed,status,label,latency_ms,raw_output";

std::vector<Prediction> parse_result_rows(const std::vector<std::vector<std::string>>& rows,
                                          const std::string& path) {
    std::vector<Prediction> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
        if (row[0] == "item_id") continue;  // header (possibly repeated after resume)
        if (row.size() < 8) {
            log::warn("skipping malformed results row",
                      {{"file", path}, {"line", std::to_string(i + 1)}});
            continue;
        }
        try {
            Prediction p;
            p.item_id = row[0];
            p.model = row[1];
            p.prompt = parse_prompt_variant(row[2]);
            p.seed = std::stoll(row[3]);
            p.status = parse_status(row[4]);
            p.label = parse_label_name(row[5]);
            p.latency_ms = std::stoll(row[6]);
            p.raw_output = row[7];
            out.push_back(std::move(p));
        } catch (const std::exception&) {
            log::warn("skipping malformed results row",
                      {{"file", path}, {"line", std::to_string(i + 1)}});
        }
    }

    // last-writer-wins on identical keys (retries append a fresh row)
    std::unordered_map<std::string, std::size_t> last_by_key;
    for (std::size_t i = 0; i < out.size(); ++i) last_by_key[out[i].key()] = i;
    std::vector<Prediction> deduped;
    deduped.reserve(last_by_key.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (last_by_key.at(out[i].key()) == i) deduped.push_back(std::move(out[i]));
    return deduped;
}

// A crash can leave a torn final line; drop everything past the last newline
// before appending to the file again.
void truncate_torn_tail(const std::string& path) {
    std::error_code ec;
    const auto size = fs::file_size(path, ec);
    if (ec || size == 0) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) return;
    in.seekg(-1, std::ios::end);
    char last = 0;
    in.get(last);
    if (last == '\n') return;

    // walk back to the last newline
    std::string content(size, '\0');
    in.seekg(0);
    in.read(content.data(), static_cast<std::streamsize>(size));
    const auto cut = content.rfind('\n');
    in.close();
    fs::resize_file(path, cut == std::string::npos ? 0 : cut + 1, ec);
    if (!ec)
        log::warn("truncated torn final line of results file", {{"file", path}});
}

}  // namespace

ResultsStore::ResultsStore(const std::string& path) : path_(path) {
    const bool existed = fs::exists(path);
    if (existed) {
        truncate_torn_tail(path);
        rows_ = parse_result_rows(csv::read_file(path), path);
        for (const auto& p : rows_)
            if (p.status != PredictionStatus::Failed) done_.insert(p.key());
    }
    out_.open(path, std::ios::app | std::ios::binary);
    if (!out_) throw std::runtime_error("cannot open results file: " + path);
    if (!existed || fs::file_size(path) == 0) {
        out_ << kResultsHeader << '\n';
        out_.flush();
    }
}

bool ResultsStore::contains(const std::string& key) const { return done_.contains(key); }

void ResultsStore::append(const Prediction& p) {
    std::lock_guard lock(mutex_);
    out_ << csv::join_row({p.item_id, p.model, prompt_variant_name(p.prompt),
                           std::to_string(p.seed), status_name(p.status),
                           label_name(p.label), std::to_string(p.latency_ms), p.raw_output})
         << '\n';
    out_.flush();
    rows_.push_back(p);
    if (p.status != PredictionStatus::Failed) done_.insert(p.key());
}

std::vector<Prediction> ResultsStore::load(const std::string& path) {
    return parse_result_rows(csv::read_file(path), path);
}

RunStats run_experiment(const ExperimentSpec& spec, ResultsStore& store, int workers) {
    struct Cell {
        const DatasetItem* item;
        const ClassifierConfig* model;
        PromptVariant prompt;
        std::int64_t seed;
    };

    std::vector<Cell> cells;
    cells.reserve(spec.dataset.size() * spec.prompts.size() * spec.models.size() *
                  spec.seeds.size());
    RunStats stats;
    for (const std::int64_t seed : spec.seeds) {
        for (const auto& model : spec.models) {
            for (const PromptVariant prompt : spec.prompts) {
                for (const auto& item : spec.dataset) {
                    Prediction probe;
                    probe.item_id = item.item_id;
                    probe.model = model.name;
                    probe.prompt = prompt;
                    probe.seed = seed;
                    if (store.contains(probe.key())) {
                        ++stats.skipped;
                        continue;
                    }
                    cells.push_back({&item, &model, prompt, seed});
                }
            }
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::int64_t> invoked{0}, failures{0}, overflows{0}, abstains{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];

            Prediction p;
            p.item_id = cell.item->item_id;
            p.model = cell.model->name;
            p.prompt = cell.prompt;
            p.seed = cell.seed;

            ClassifierConfig config = *cell.model;
            config.seed = cell.seed;

            try {
                const std::string prompt_text = render_prompt(cell.prompt, cell.item->transcript);
                InvokeResult r = invoke(config, prompt_text);
                p.status = PredictionStatus::Ok;
                p.label = parse_label(r.text);
                p.latency_ms = r.latency_ms;
                p.raw_output = std::move(r.text);
                if (p.label == Label::Abstain) abstains.fetch_add(1);
            } catch (const ContextOverflow& e) {
                p.status = PredictionStatus::Overflow;
                p.raw_output = e.what();
                overflows.fetch_add(1);
                log::warn("item excluded: context overflow",
                          {{"item", p.item_id}, {"model", p.model}});
            } catch (const std::exception& e) {
                p.status = PredictionStatus::Failed;
                p.raw_output = e.what();
                failures.fetch_add(1);
                log::warn("invocation failed",
                          {{"item", p.item_id}, {"model", p.model}, {"reason", e.what()}});
            }
            invoked.fetch_add(1);
            store.append(p);
        }
    };

    const int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    stats.invoked = invoked.load();
    stats.failures = failures.load();
    stats.overflows = overflows.load();
    stats.abstains = abstains.load();
    return stats;
}

std::vector<Prediction> ensemble_predictions(std::span<const Prediction> rows,
                                             const std::vector<std::string>& model_names) {
    if (model_names.size() != 3)
        throw std::invalid_argument("ensemble_predictions: exactly 3 models required");

    auto model_index = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < model_names.size(); ++i)
            if (model_names[i] == name) return static_cast<int>(i);
        return -1;
    };

    struct Slot {
        std::array<Label, 3> votes{Label::Abstain, Label::Abstain, Label::Abstain};
        std::array<bool, 3> present{false, false, false};
        std::int64_t latency_ms = 0;
    };
    // key -> votes; std::map keeps output order deterministic
    std::map<std::tuple<std::string, PromptVariant, std::int64_t>, Slot> slots;
    for (const auto& p : rows) {
        if (p.status != PredictionStatus::Ok) continue;
        const int idx = model_index(p.model);
        if (idx < 0) continue;
        auto& slot = slots[{p.item_id, p.prompt, p.seed}];
        slot.votes[static_cast<std::size_t>(idx)] = p.label;
        slot.present[static_cast<std::size_t>(idx)] = true;
        slot.latency_ms += p.latency_ms;
    }

    std::vector<Prediction> out;
    for (const auto& [key, slot] : slots) {
        if (!(slot.present[0] && slot.present[1] && slot.present[2])) continue;
        Prediction p;
        p.item_id = std::get<0>(key);
        p.prompt = std::get<1>(key);
        p.seed = std::get<2>(key);
        p.model = "ensemble";
        p.status = PredictionStatus::Ok;
        p.label = majority_vote(slot.votes);
        p.latency_ms = slot.latency_ms;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace ctmine::classify
