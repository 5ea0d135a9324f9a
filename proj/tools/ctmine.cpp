// ctmine - pipeline CLI: ingest -> cooccur -> enrich -> label -> estimate ->
// classify -> evaluate -> report, plus fetch and a bundled mock endpoint.
//
// Exit codes: 0 ok, 1 runtime error, 2 configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ctmine/cooccurrence.hpp"
#include "ctmine/corpus_ingest.hpp"
#include "ctmine/csv.hpp"
#include "ctmine/enrichment.hpp"
#include "ctmine/harness.hpp"
#include "ctmine/log.hpp"
#include "ctmine/metrics.hpp"
#include "ctmine/mock_llm.hpp"
#include "ctmine/population.hpp"
#include "ctmine/research_client.hpp"
#include "ctmine/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ctmine;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ${VAR} interpolation for secrets in config values.
std::string interpolate_env(const std::string& input) {
    std::string out;
    std::size_t i = 0;
    while (i < input.size()) {
        if (input[i] == '$' && i + 1 < input.size() && input[i + 1] == '{') {
            const auto end = input.find('}', i + 2);
            if (end == std::string::npos)
                throw ConfigError("unterminated ${...} in config value: " + input);
            const std::string name = input.substr(i + 2, end - i - 2);
            const char* value = std::getenv(name.c_str());
            if (!value)
                throw ConfigError("config references unset environment variable: " + name);
            out += value;
            i = end + 1;
        } else {
            out.push_back(input[i++]);
        }
    }
    return out;
}

json g_config;  // flat defaults loaded from --config

void load_global_config(const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
        in >> g_config;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!g_config.is_object()) throw ConfigError("config file must hold a JSON object");
}

// Flags override file values: only options the user left untouched are filled.
void apply_config_defaults(CLI::App* sub) {
    if (g_config.is_null()) return;
    for (CLI::Option* opt : sub->get_options()) {
        if (opt->count() > 0 || opt->get_lnames().empty()) continue;
        std::string key = opt->get_lnames().front();
        std::replace(key.begin(), key.end(), '-', '_');
        if (!g_config.contains(key)) continue;
        const json& v = g_config.at(key);
        std::string text =
            v.is_string() ? interpolate_env(v.get<std::string>()) : v.dump();
        try {
            opt->add_result(text)->run_callback();
        } catch (const std::exception& e) {
            throw ConfigError("config value for '" + key + "' is invalid: " + e.what());
        }
    }
}

void require_input_file(const std::string& path, const std::string& flag) {
    if (path.empty()) throw ConfigError(flag + ": a value is required");
    if (!fs::exists(path)) throw ConfigError(flag + ": path does not exist: " + path);
}

void require_value(const std::string& value, const std::string& flag) {
    if (value.empty()) throw ConfigError(flag + ": a value is required");
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// --- ingest --------------------------------------------------------------------

struct IngestArgs {
    std::string corpus, out_dir, transcripts, unique_out;
    std::int64_t min_duration = 0;
};

int cmd_ingest(const IngestArgs& args) {
    require_value(args.out_dir, "--out-dir");
    require_input_file(args.corpus, "--corpus");
    if (!args.transcripts.empty()) require_input_file(args.transcripts, "--transcripts");
    fs::create_directories(args.out_dir);

    auto loaded = ingest::load_corpus(args.corpus);
    if (!args.transcripts.empty()) {
        const auto attached = ingest::attach_transcripts(loaded.records, args.transcripts);
        log::info("attached external transcripts", {{"count", std::to_string(attached)}});
    }
    if (args.min_duration > 0) {
        const auto before = loaded.records.size();
        std::erase_if(loaded.records, [&](const ingest::VideoRecord& r) {
            return r.duration < args.min_duration;
        });
        log::info("duration filter applied",
                  {{"dropped", std::to_string(before - loaded.records.size())}});
    }

    auto [unique, stats] = ingest::deduplicate(loaded.records);
    ingest::write_stats_json(stats, loaded.skipped,
                             (fs::path(args.out_dir) / "corpus_stats.json").string());
    ingest::write_histogram_csvs(ingest::temporal_histograms(unique), args.out_dir);

    if (!args.unique_out.empty()) {
        std::ofstream out(args.unique_out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + args.unique_out);
        for (const auto& rec : unique) out << ingest::record_to_json(rec) << '\n';
    }
    log::info("ingest complete", {{"total", std::to_string(stats.total)},
                                  {"unique", std::to_string(stats.unique)},
                                  {"duplicates", std::to_string(stats.duplicates)},
                                  {"skipped_lines", std::to_string(loaded.skipped)}});
    return 0;
}

// --- cooccur -------------------------------------------------------------------

struct CooccurArgs {
    std::string corpus, out_dir;
    std::int64_t min_df = 2;
    bool csv_export = false;
};

int cmd_cooccur(const CooccurArgs& args) {
    require_value(args.out_dir, "--out-dir");
    require_input_file(args.corpus, "--corpus");
    fs::create_directories(args.out_dir);

    // two streaming passes: vocabulary, then matrices
    cooc::VocabularyBuilder vocab_builder;
    {
        ingest::JsonlCorpusReader reader(args.corpus);
        ingest::VideoRecord rec;
        while (reader.next(rec)) vocab_builder.observe(rec);
    }
    const auto vocab = vocab_builder.finalize(args.min_df);
    log::info("vocabulary built", {{"hashtags", std::to_string(vocab.hashtag_count())},
                                   {"words", std::to_string(vocab.word_count())}});

    cooc::CooccurrenceBuilder matrix_builder(vocab);
    {
        ingest::JsonlCorpusReader reader(args.corpus);
        ingest::VideoRecord rec;
        while (reader.next(rec)) matrix_builder.add(rec);
    }
    auto matrices = matrix_builder.finalize();
    matrices.save(args.out_dir);
    vocab.save((fs::path(args.out_dir) / "vocab_hashtags.txt").string(),
               (fs::path(args.out_dir) / "vocab_words.txt").string());
    if (args.csv_export) matrices.export_csv(args.out_dir);

    log::info("co-occurrence matrices written",
              {{"hh_nnz", std::to_string(matrices.hashtag_hashtag.nnz())},
               {"hw_nnz", std::to_string(matrices.hashtag_word.nnz())}});
    return 0;
}

// --- enrich --------------------------------------------------------------------

struct EnrichArgs {
    std::string matrices_dir, out, merged_out, seeds_file;
    double alpha = 0.3;
    int top_k = 20;
};

int cmd_enrich(const EnrichArgs& args) {
    require_value(args.out, "--out");
    require_input_file(args.matrices_dir, "--matrices");
    if (!args.seeds_file.empty()) require_input_file(args.seeds_file, "--seeds-file");

    const auto vocab =
        cooc::Vocabulary::load((fs::path(args.matrices_dir) / "vocab_hashtags.txt").string(),
                               (fs::path(args.matrices_dir) / "vocab_words.txt").string());
    const auto matrices = cooc::SparseCooccurrence::load(args.matrices_dir);

    enrich::SeedSet seed_set = enrich::default_seed_set();
    if (!args.seeds_file.empty()) seed_set.seeds = enrich::load_seeds_file(args.seeds_file);
    seed_set.alpha = args.alpha;
    seed_set.top_k = args.top_k;
    if (seed_set.seeds.empty()) throw ConfigError("--seeds-file: no seeds found");

    enrich::Enricher enricher(vocab, matrices);
    const auto result = enricher.enrich(seed_set);
    enrich::write_enrichment_csv(result, args.out);

    const std::set<std::string> seed_names(seed_set.seeds.begin(), seed_set.seeds.end());
    std::size_t merged_without_seeds = 0;
    for (const auto& r : result.merged)
        if (!seed_names.contains(r.neighbor)) ++merged_without_seeds;

    if (!args.merged_out.empty()) {
        csv::Writer w(args.merged_out);
        w.row({"neighbor", "score", "df", "best_seed", "is_seed"});
        for (const auto& r : result.merged)
            w.row({r.neighbor, fmt_double(r.score), std::to_string(r.neighbor_df), r.seed,
                   seed_names.contains(r.neighbor) ? "1" : "0"});
    }
    log::info("enrichment complete",
              {{"merged", std::to_string(result.merged.size())},
               {"merged_excluding_seeds", std::to_string(merged_without_seeds)},
               {"missing_seeds", std::to_string(result.missing_seeds.size())}});
    return 0;
}

// --- label ----------------------------------------------------------------------

struct LabelArgs {
    std::string corpus, labels, out;
};

int cmd_label(const LabelArgs& args) {
    require_value(args.out, "--out");
    require_input_file(args.corpus, "--corpus");
    require_input_file(args.labels, "--labels");

    const auto merged = enrich::merge_labels(enrich::load_labels_csv(args.labels));
    csv::Writer w(args.out);
    w.row({"video_id", "label"});
    ingest::JsonlCorpusReader reader(args.corpus);
    ingest::VideoRecord rec;
    std::int64_t positives = 0, total = 0;
    while (reader.next(rec)) {
        const auto label = enrich::distant_label_one(rec, merged);
        const bool positive = label == enrich::VideoLabel::Conspiracy;
        positives += positive;
        ++total;
        w.row({rec.video_id, positive ? "1" : "0"});
    }
    log::info("distant labeling complete", {{"videos", std::to_string(total)},
                                            {"positives", std::to_string(positives)}});
    return 0;
}

// --- estimate --------------------------------------------------------------------

struct EstimateArgs {
    std::string corpus, video_labels, out;
    std::string denominator = "draws";
    int mle_iterations = 1000;
    double mle_m0 = 10.0;
};

int cmd_estimate(const EstimateArgs& args) {
    require_value(args.out, "--out");
    require_input_file(args.corpus, "--corpus");
    if (args.denominator != "draws" && args.denominator != "uniques")
        throw ConfigError("--denominator: must be 'draws' or 'uniques'");

    std::unordered_map<std::string, bool> positive;
    if (!args.video_labels.empty()) {
        require_input_file(args.video_labels, "--video-labels");
        const auto rows = csv::read_file(args.video_labels);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() < 2 || rows[i][0] == "video_id") continue;
            positive[rows[i][0]] = rows[i][1] == "1";
        }
    }

    ingest::Deduplicator dedup;
    std::map<YearMonth, popest::MonthlyPositives> positives_by_month;
    std::map<YearMonth, std::unordered_set<std::string>> positive_ids_by_month;
    {
        ingest::JsonlCorpusReader reader(args.corpus);
        ingest::VideoRecord rec;
        while (reader.next(rec)) {
            dedup.insert(rec);
            const auto it = positive.find(rec.video_id);
            if (it != positive.end() && it->second) {
                const auto ym = year_month_of(rec.create_time);
                positives_by_month[ym].positive_draws += 1;
                if (positive_ids_by_month[ym].insert(rec.video_id).second)
                    positives_by_month[ym].positive_uniques += 1;
            }
        }
    }

    const auto stats = dedup.finish();
    const auto denom = args.denominator == "draws"
                           ? popest::PrevalenceDenominator::Draws
                           : popest::PrevalenceDenominator::Uniques;
    const auto series = popest::monthly_series(stats.per_month, positives_by_month, denom,
                                               args.mle_iterations, args.mle_m0);
    popest::write_series_csv(series, args.out);

    int failed_months = 0;
    for (const auto& r : series)
        if (!r.error.empty()) ++failed_months;
    log::info("estimate complete", {{"months", std::to_string(series.size())},
                                    {"failed_months", std::to_string(failed_months)}});
    return 0;
}

// --- classify ---------------------------------------------------------------------

struct ClassifyArgs {
    std::string experiment, results, metrics_out;
    int workers = 1;
    bool mock = false;
    bool strict_shape = false;
};

classify::ExperimentSpec load_experiment(const std::string& path, bool mock) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("experiment file is not valid JSON: ") + e.what());
    }

    classify::ExperimentSpec spec;
    spec.case_id = classify::parse_experiment_case(j.value("case", "C1"));

    const std::string dataset_path = j.value("dataset", "");
    require_input_file(dataset_path, "experiment.dataset");
    spec.dataset = classify::load_dataset_csv(dataset_path);

    if (!j.contains("prompts") || j.at("prompts").empty())
        throw ConfigError("experiment.prompts: at least one prompt variant required");
    for (const auto& p : j.at("prompts"))
        spec.prompts.push_back(classify::parse_prompt_variant(p.get<std::string>()));

    if (!j.contains("models") || j.at("models").empty())
        throw ConfigError("experiment.models: at least one model required");
    for (const auto& m : j.at("models")) {
        classify::ClassifierConfig config;
        config.name = m.value("name", "");
        config.endpoint = interpolate_env(m.value("endpoint", ""));
        config.max_output_tokens = m.value("max_output_tokens", 256);
        if (config.name.empty()) throw ConfigError("experiment.models[].name is required");
        if (mock) config.endpoint = "mock:plain";
        if (config.endpoint.empty())
            throw ConfigError("experiment.models[].endpoint is required (or pass --mock)");
        config.temperature = 0.0;  // pinned for replication
        spec.models.push_back(std::move(config));
    }

    if (j.contains("seeds")) {
        for (const auto& s : j.at("seeds")) spec.seeds.push_back(s.get<std::int64_t>());
    } else {
        const auto canonical = classify::replication_seeds();
        spec.seeds.assign(canonical.begin(), canonical.end());
    }
    if (spec.seeds.empty()) throw ConfigError("experiment.seeds: must not be empty");
    return spec;
}

std::map<std::string, int> gold_of(const std::vector<classify::DatasetItem>& items) {
    std::map<std::string, int> gold;
    for (const auto& item : items) gold[item.item_id] = item.gold;
    return gold;
}

void write_all_metrics(const std::vector<classify::Prediction>& rows,
                       const classify::ExperimentSpec& spec, const std::string& out_dir,
                       bool quartiles) {
    fs::create_directories(out_dir);
    const auto gold = gold_of(spec.dataset);
    const std::string case_name = classify::experiment_case_name(spec.case_id);

    auto with_ensemble = rows;
    if (spec.models.size() == 3) {
        std::vector<std::string> names;
        for (const auto& m : spec.models) names.push_back(m.name);
        const auto ens = classify::ensemble_predictions(rows, names);
        with_ensemble.insert(with_ensemble.end(), ens.begin(), ens.end());
    }

    const auto positive =
        classify::compute_metrics(with_ensemble, gold, classify::MetricClass::Positive);
    classify::write_metrics_csv(positive, case_name,
                                (fs::path(out_dir) / "metrics_positive.csv").string());
    const auto negative =
        classify::compute_metrics(with_ensemble, gold, classify::MetricClass::Negative);
    classify::write_metrics_csv(negative, case_name,
                                (fs::path(out_dir) / "metrics_negative.csv").string());

    if (const auto baseline = classify::finetuned_baseline(spec.case_id)) {
        csv::Writer w((fs::path(out_dir) / "baseline.csv").string());
        w.row({"case", "model", "precision_mean", "precision_spread", "recall_mean",
               "recall_spread"});
        w.row({case_name, "finetuned_encoder", fmt_double(baseline->precision_mean),
               fmt_double(baseline->precision_spread), fmt_double(baseline->recall_mean),
               fmt_double(baseline->recall_spread)});
    }

    if (quartiles) {
        const auto buckets = classify::quartile_breakdown(with_ensemble, spec.dataset,
                                                          classify::MetricClass::Positive);
        classify::write_quartile_csv(buckets, case_name,
                                     (fs::path(out_dir) / "quartiles_positive.csv").string());
    }
}

int cmd_classify(const ClassifyArgs& args) {
    require_value(args.results, "--results");
    require_input_file(args.experiment, "--experiment");
    const auto spec = load_experiment(args.experiment, args.mock);

    const auto problems = classify::validate_case_shape(spec.case_id, spec.dataset);
    for (const auto& p : problems) {
        if (args.strict_shape) throw ConfigError("dataset shape: " + p);
        log::warn("dataset shape differs from the canonical case", {{"detail", p}});
    }

    classify::ResultsStore store(args.results);
    const auto stats = classify::run_experiment(spec, store, args.workers);
    log::info("classification sweep finished",
              {{"invoked", std::to_string(stats.invoked)},
               {"skipped", std::to_string(stats.skipped)},
               {"failures", std::to_string(stats.failures)},
               {"overflows", std::to_string(stats.overflows)},
               {"abstains", std::to_string(stats.abstains)}});

    if (!args.metrics_out.empty())
        write_all_metrics(store.rows(), spec, args.metrics_out, /*quartiles=*/true);
    return stats.failures == 0 ? 0 : 1;
}

// --- evaluate ---------------------------------------------------------------------

struct EvaluateArgs {
    std::string results, dataset, out_dir;
    std::string case_name = "C1";
    bool quartiles = false;
};

int cmd_evaluate(const EvaluateArgs& args) {
    require_value(args.out_dir, "--out-dir");
    require_input_file(args.results, "--results");
    require_input_file(args.dataset, "--dataset");

    classify::ExperimentSpec spec;
    spec.case_id = classify::parse_experiment_case(args.case_name);
    spec.dataset = classify::load_dataset_csv(args.dataset);

    const auto rows = classify::ResultsStore::load(args.results);
    std::set<std::string> model_names;
    for (const auto& r : rows) model_names.insert(r.model);
    for (const auto& name : model_names) {
        classify::ClassifierConfig c;
        c.name = name;
        c.endpoint = "unused";
        spec.models.push_back(std::move(c));
    }

    write_all_metrics(rows, spec, args.out_dir, args.quartiles);
    log::info("evaluation written", {{"rows", std::to_string(rows.size())},
                                     {"models", std::to_string(model_names.size())}});
    return 0;
}

// --- report -----------------------------------------------------------------------

struct ReportArgs {
    std::string out_dir;
    std::string stats, hist_dir, estimates, metrics_dir, labels, enrichment;
    std::string before, after, wer_pairs;
    std::int64_t long_video_threshold = 60;
};

void copy_into(const std::string& src, const fs::path& dst, json& manifest) {
    fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
    manifest["inputs"].push_back(src);
    manifest["outputs"].push_back(dst.filename().string());
}

int cmd_report(const ReportArgs& args) {
    require_value(args.out_dir, "--out-dir");
    fs::create_directories(args.out_dir);
    const fs::path out(args.out_dir);
    json manifest;
    manifest["inputs"] = json::array();
    manifest["outputs"] = json::array();

    if (!args.stats.empty()) {
        require_input_file(args.stats, "--stats");
        std::ifstream in(args.stats);
        json stats;
        in >> stats;
        csv::Writer w((out / "fig_monthly_volume.csv").string());
        w.row({"month", "draws", "uniques", "singletons"});
        for (const auto& [month, mc] : stats.at("per_month").items())
            w.row({month, mc.at("draws").dump(), mc.at("uniques").dump(),
                   mc.at("singletons").dump()});
        manifest["inputs"].push_back(args.stats);
        manifest["outputs"].push_back("fig_monthly_volume.csv");
    }

    if (!args.hist_dir.empty()) {
        for (const char* name : {"hist_day_of_month.csv", "hist_day_of_week.csv",
                                 "hist_hour_of_day.csv", "hist_minute_of_hour.csv"}) {
            const auto src = (fs::path(args.hist_dir) / name).string();
            require_input_file(src, "--hist-dir");
            copy_into(src, out / (std::string("fig_") + name), manifest);
        }
    }

    if (!args.labels.empty()) {
        require_input_file(args.labels, "--labels");
        const auto labels = enrich::merge_labels(enrich::load_labels_csv(args.labels));
        std::map<std::string, std::int64_t> tally;
        for (const auto& [tag, cls] : labels) tally[enrich::hashtag_class_name(cls)] += 1;
        csv::Writer w((out / "fig_hashtag_classes.csv").string());
        w.row({"class", "count"});
        for (const auto& [cls, count] : tally) w.row({cls, std::to_string(count)});
        manifest["inputs"].push_back(args.labels);
        manifest["outputs"].push_back("fig_hashtag_classes.csv");
    }

    if (!args.enrichment.empty()) {
        require_input_file(args.enrichment, "--enrichment");
        copy_into(args.enrichment, out / "fig_enrichment.csv", manifest);
    }

    if (!args.estimates.empty()) {
        require_input_file(args.estimates, "--estimates");
        copy_into(args.estimates, out / "fig_estimates.csv", manifest);
    }

    if (!args.metrics_dir.empty()) {
        for (const char* name :
             {"metrics_positive.csv", "metrics_negative.csv", "quartiles_positive.csv",
              "baseline.csv"}) {
            const auto src = (fs::path(args.metrics_dir) / name).string();
            if (!fs::exists(src)) continue;  // quartiles/baseline are optional
            copy_into(src, out / (std::string("fig_") + name), manifest);
        }
    }

    if (!args.before.empty() || !args.after.empty()) {
        require_input_file(args.before, "--before");
        require_input_file(args.after, "--after");
        auto durations = [](const std::string& path) {
            std::vector<double> out;
            ingest::JsonlCorpusReader reader(path);
            ingest::VideoRecord rec;
            while (reader.next(rec)) out.push_back(static_cast<double>(rec.duration));
            return out;
        };
        const auto before = durations(args.before);
        const auto after = durations(args.after);
        if (before.empty() || after.empty())
            throw std::runtime_error("duration comparison needs non-empty samples");

        const auto mwu = stats::mann_whitney_u(before, after);
        auto long_count = [&](const std::vector<double>& xs) {
            return static_cast<std::int64_t>(
                std::count_if(xs.begin(), xs.end(), [&](double d) {
                    return d >= static_cast<double>(args.long_video_threshold);
                }));
        };
        const std::int64_t long_before = long_count(before);
        const std::int64_t long_after = long_count(after);
        const std::array<std::array<std::int64_t, 2>, 2> table{
            {{long_before, static_cast<std::int64_t>(before.size()) - long_before},
             {long_after, static_cast<std::int64_t>(after.size()) - long_after}}};
        const auto chi = stats::chi_square(table);

        csv::Writer w((out / "duration_comparison.csv").string());
        w.row({"group", "n", "median_s", "long_videos", "mwu_u", "mwu_p", "chi2", "chi2_p"});
        w.row({"before", std::to_string(before.size()), fmt_double(stats::median(before)),
               std::to_string(long_before), fmt_double(mwu.u), fmt_double(mwu.p),
               fmt_double(chi.statistic), fmt_double(chi.p)});
        w.row({"after", std::to_string(after.size()), fmt_double(stats::median(after)),
               std::to_string(long_after), "", "", "", ""});
        manifest["inputs"].push_back(args.before);
        manifest["inputs"].push_back(args.after);
        manifest["outputs"].push_back("duration_comparison.csv");
    }

    if (!args.wer_pairs.empty()) {
        require_input_file(args.wer_pairs, "--wer-pairs");
        const auto rows = csv::read_file(args.wer_pairs);
        std::vector<double> scores;
        csv::Writer w((out / "wer_distribution.csv").string());
        w.row({"pair", "wer"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].size() < 2) continue;
            const double score = stats::wer_text(rows[i][0], rows[i][1]);
            scores.push_back(score);
            w.row({std::to_string(i), fmt_double(score)});
        }
        if (!scores.empty()) {
            csv::Writer s((out / "wer_summary.csv").string());
            s.row({"n", "median", "q1", "q3"});
            s.row({std::to_string(scores.size()), fmt_double(stats::median(scores)),
                   fmt_double(stats::quantile_nearest_rank(scores, 0.25)),
                   fmt_double(stats::quantile_nearest_rank(scores, 0.75))});
        }
        manifest["inputs"].push_back(args.wer_pairs);
        manifest["outputs"].push_back("wer_distribution.csv");
        manifest["outputs"].push_back("wer_summary.csv");
    }

    std::ofstream mf(out / "manifest.json");
    mf << manifest.dump(2) << '\n';
    log::info("report bundled",
              {{"outputs", std::to_string(manifest["outputs"].size())}});
    return 0;
}

// --- fetch ------------------------------------------------------------------------

struct FetchArgs {
    std::string endpoint, out, audit;
    std::string region = "US";
    std::string start_date, end_date;
    std::int64_t min_duration = 60;
    std::int64_t budget = 1000;
    int max_pages = 1000;
    int page_size = 100;
    std::string token_env = "RESEARCH_API_TOKEN";
};

int cmd_fetch(const FetchArgs& args) {
    if (args.endpoint.empty()) throw ConfigError("--endpoint is required");
    if (args.start_date.empty() || args.end_date.empty())
        throw ConfigError("--start and --end are required (YYYYMMDD)");

    ingest::FetchQuery query;
    query.region = args.region;
    query.min_duration = args.min_duration;
    query.start_date = args.start_date;
    query.end_date = args.end_date;

    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    ingest::QuotaBudget budget;
    budget.max_requests_per_day = args.budget;
    budget.day_anchor = civil_from_epoch(now).date;

    ingest::FetchOptions opts;
    opts.max_pages = args.max_pages;
    opts.page_size = args.page_size;
    opts.token_env = args.token_env;
    std::ofstream audit_stream;
    if (!args.audit.empty()) {
        audit_stream.open(args.audit, std::ios::app | std::ios::binary);
        if (!audit_stream) throw std::runtime_error("cannot open audit file: " + args.audit);
        opts.audit = &audit_stream;
    }

    const auto result = ingest::fetch_window(query, budget, args.endpoint, opts);

    if (!args.out.empty()) {
        std::ofstream out(args.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + args.out);
        for (const auto& rec : result.records) out << ingest::record_to_json(rec) << '\n';
    }
    const char* status = result.status == ingest::FetchStatus::Complete ? "complete"
                         : result.status == ingest::FetchStatus::QuotaExhausted
                             ? "quota_exhausted"
                             : "page_cap";
    log::info("fetch finished", {{"records", std::to_string(result.records.size())},
                                 {"requests", std::to_string(result.requests_made)},
                                 {"status", status}});
    return 0;
}

// --- mock-serve ---------------------------------------------------------------------

struct MockServeArgs {
    int port = 0;
    std::string behavior = "plain";
    int fail_first = 0;
    std::int64_t context_limit = 0;
};

int cmd_mock_serve(const MockServeArgs& args) {
    if (args.port <= 0) throw ConfigError("--port: a positive port is required");
    classify::MockLlmServer::Options opts;
    opts.behavior = args.behavior;
    opts.port = args.port;
    opts.fail_first = args.fail_first;
    opts.context_limit = static_cast<std::size_t>(args.context_limit);
    classify::MockLlmServer server(opts);
    const int port = server.start();
    log::info("mock endpoint serving", {{"port", std::to_string(port)},
                                        {"behavior", args.behavior}});
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "ctmine: measurement pipeline for conspiracy-related short-video content"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file; values fill unset flags, ${VAR} pulls secrets from "
                   "the environment");
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "debug|info|warn|error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}));

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest", "load, dedup and profile a JSONL corpus");
    ingest_cmd->add_option("--corpus", ingest_args.corpus, "JSONL corpus path");
    ingest_cmd->add_option("--out-dir", ingest_args.out_dir, "output directory");
    ingest_cmd->add_option("--transcripts", ingest_args.transcripts,
                           "CSV video_id,transcript with externally produced transcripts");
    ingest_cmd->add_option("--min-duration", ingest_args.min_duration,
                           "drop videos shorter than this many seconds");
    ingest_cmd->add_option("--unique-out", ingest_args.unique_out,
                           "write the deduplicated corpus here (JSONL)");

    CooccurArgs cooccur_args;
    auto* cooccur_cmd =
        app.add_subcommand("cooccur", "build hashtag/hashtag and hashtag/word matrices");
    cooccur_cmd->add_option("--corpus", cooccur_args.corpus, "JSONL corpus path");
    cooccur_cmd->add_option("--out-dir", cooccur_args.out_dir, "output directory");
    cooccur_cmd->add_option("--min-df", cooccur_args.min_df,
                            "drop hashtags with document frequency below this");
    cooccur_cmd->add_flag("--csv", cooccur_args.csv_export, "also export matrices as CSV");

    EnrichArgs enrich_args;
    auto* enrich_cmd = app.add_subcommand("enrich", "seed-based hashtag enrichment");
    enrich_cmd->add_option("--matrices", enrich_args.matrices_dir,
                           "directory written by cooccur");
    enrich_cmd->add_option("--out", enrich_args.out, "enrichment report CSV");
    enrich_cmd->add_option("--merged-out", enrich_args.merged_out,
                           "deduplicated union CSV (optional)");
    enrich_cmd->add_option("--seeds-file", enrich_args.seeds_file,
                           "seed tags, one per line ('#' comments); default: bundled seeds");
    enrich_cmd->add_option("--alpha", enrich_args.alpha, "word-cosine weight in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    enrich_cmd->add_option("--top-k", enrich_args.top_k, "neighbors per seed")
        ->check(CLI::PositiveNumber);

    LabelArgs label_args;
    auto* label_cmd =
        app.add_subcommand("label", "distant-label videos from hashtag classes");
    label_cmd->add_option("--corpus", label_args.corpus, "JSONL corpus path");
    label_cmd->add_option("--labels", label_args.labels, "hashtag labels CSV");
    label_cmd->add_option("--out", label_args.out, "per-video labels CSV");

    EstimateArgs estimate_args;
    auto* estimate_cmd =
        app.add_subcommand("estimate", "monthly population estimates and prevalence");
    estimate_cmd->add_option("--corpus", estimate_args.corpus,
                             "raw JSONL corpus (with duplicates)");
    estimate_cmd->add_option("--video-labels", estimate_args.video_labels,
                             "per-video labels CSV from `label`");
    estimate_cmd->add_option("--out", estimate_args.out, "series CSV");
    estimate_cmd->add_option("--denominator", estimate_args.denominator,
                             "prevalence denominator: draws|uniques");
    estimate_cmd->add_option("--mle-iterations", estimate_args.mle_iterations,
                             "fixed-point iteration cap");
    estimate_cmd->add_option("--mle-m0", estimate_args.mle_m0, "fixed-point starting value");

    ClassifyArgs classify_args;
    auto* classify_cmd =
        app.add_subcommand("classify", "run the zero-shot sweep against chat endpoints");
    classify_cmd->add_option("--experiment", classify_args.experiment, "experiment JSON");
    classify_cmd->add_option("--results", classify_args.results,
                             "append-only predictions CSV (resumable)");
    classify_cmd->add_option("--metrics-out", classify_args.metrics_out,
                             "also write the metrics report into this directory");
    classify_cmd
        ->add_option("--workers", classify_args.workers, "bounded concurrency per endpoint")
        ->check(CLI::PositiveNumber);
    classify_cmd->add_flag("--mock", classify_args.mock,
                           "replace every endpoint with the in-process deterministic mock");
    classify_cmd->add_flag("--strict-shape", classify_args.strict_shape,
                           "fail when the dataset does not match the canonical case shape");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "metrics report from predictions");
    evaluate_cmd->add_option("--results", evaluate_args.results, "predictions CSV");
    evaluate_cmd->add_option("--dataset", evaluate_args.dataset,
                             "dataset CSV with gold labels");
    evaluate_cmd->add_option("--case", evaluate_args.case_name, "C1|C2|C3");
    evaluate_cmd->add_option("--out-dir", evaluate_args.out_dir, "output directory");
    evaluate_cmd->add_flag("--quartiles", evaluate_args.quartiles,
                           "also break metrics down by transcript-length quartile");

    ReportArgs report_args;
    auto* report_cmd =
        app.add_subcommand("report", "bundle figure-ready CSVs from prior stage outputs");
    report_cmd->add_option("--out-dir", report_args.out_dir, "report directory");
    report_cmd->add_option("--stats", report_args.stats, "corpus_stats.json from ingest");
    report_cmd->add_option("--hist-dir", report_args.hist_dir, "histogram dir from ingest");
    report_cmd->add_option("--estimates", report_args.estimates, "series CSV from estimate");
    report_cmd->add_option("--metrics-dir", report_args.metrics_dir,
                           "metrics dir from evaluate");
    report_cmd->add_option("--labels", report_args.labels, "hashtag labels CSV");
    report_cmd->add_option("--enrichment", report_args.enrichment,
                           "enrichment report CSV");
    report_cmd->add_option("--before", report_args.before,
                           "JSONL sample before the policy change");
    report_cmd->add_option("--after", report_args.after,
                           "JSONL sample after the policy change");
    report_cmd->add_option("--wer-pairs", report_args.wer_pairs,
                           "CSV reference,hypothesis transcript pairs");
    report_cmd->add_option("--long-video-threshold", report_args.long_video_threshold,
                           "seconds; long-video cutoff for the 2x2 test");

    FetchArgs fetch_args;
    auto* fetch_cmd = app.add_subcommand(
        "fetch", "page a research-API-style endpoint under a daily quota");
    fetch_cmd->add_option("--endpoint", fetch_args.endpoint, "base URL");
    fetch_cmd->add_option("--start", fetch_args.start_date, "start date YYYYMMDD");
    fetch_cmd->add_option("--end", fetch_args.end_date, "end date YYYYMMDD");
    fetch_cmd->add_option("--region", fetch_args.region, "region code");
    fetch_cmd->add_option("--min-duration", fetch_args.min_duration, "seconds");
    fetch_cmd->add_option("--budget", fetch_args.budget, "max requests per UTC day");
    fetch_cmd->add_option("--max-pages", fetch_args.max_pages, "paging safety cap");
    fetch_cmd->add_option("--page-size", fetch_args.page_size, "records per page");
    fetch_cmd->add_option("--out", fetch_args.out, "output JSONL");
    fetch_cmd->add_option("--audit", fetch_args.audit, "audit log JSONL (appended)");
    fetch_cmd->add_option("--token-env", fetch_args.token_env,
                          "environment variable holding the bearer token");

    MockServeArgs mock_args;
    auto* mock_cmd =
        app.add_subcommand("mock-serve", "serve the bundled mock chat endpoint");
    mock_cmd->add_option("--port", mock_args.port, "port to bind");
    mock_cmd->add_option("--behavior", mock_args.behavior, "plain|verbose|noisy<P>|abstain");
    mock_cmd->add_option("--fail-first", mock_args.fail_first,
                         "return 500 for the first N requests");
    mock_cmd->add_option("--context-limit", mock_args.context_limit,
                         "reject prompts longer than this many bytes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are configuration errors
    }

    if (log_level == "debug") log::set_min_level(log::Level::Debug);
    else if (log_level == "warn") log::set_min_level(log::Level::Warn);
    else if (log_level == "error") log::set_min_level(log::Level::Error);

    try {
        load_global_config(config_path);
        CLI::App* sub = app.get_subcommands().front();
        apply_config_defaults(sub);

        if (sub == ingest_cmd) return cmd_ingest(ingest_args);
        if (sub == cooccur_cmd) return cmd_cooccur(cooccur_args);
        if (sub == enrich_cmd) return cmd_enrich(enrich_args);
        if (sub == label_cmd) return cmd_label(label_args);
        if (sub == estimate_cmd) return cmd_estimate(estimate_args);
        if (sub == classify_cmd) return cmd_classify(classify_args);
        if (sub == evaluate_cmd) return cmd_evaluate(evaluate_args);
        if (sub == report_cmd) return cmd_report(report_args);
        if (sub == fetch_cmd) return cmd_fetch(fetch_args);
        if (sub == mock_cmd) return cmd_mock_serve(mock_args);
        throw ConfigError("unknown subcommand");
    } catch (const ConfigError& e) {
        log::error(e.what());
        return 2;
    } catch (const std::exception& e) {
        log::error(e.what());
        return 1;
    }
}
