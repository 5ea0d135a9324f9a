#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ctmine/csv.hpp"
#include "ctmine/errors.hpp"
#include "ctmine/harness.hpp"
#include "ctmine/llm_client.hpp"
#include "ctmine/metrics.hpp"
#include "ctmine/mock_llm.hpp"
#include "ctmine/prompts.hpp"
#include "test_support.hpp"

using namespace ctmine;
using namespace ctmine::classify;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr const char* kGoldenTranscript = "the earth is flat and the moon landing was staged";

}  // namespace

TEST_CASE("prompts: all three variants byte-match their golden files") {
    const auto golden_dir = testsup::fixtures_dir() + "/golden";
    CHECK(render_prompt(PromptVariant::Simple, kGoldenTranscript) ==
          slurp(golden_dir + "/prompt_simple.txt"));
    CHECK(render_prompt(PromptVariant::Definition, kGoldenTranscript) ==
          slurp(golden_dir + "/prompt_definition.txt"));
    CHECK(render_prompt(PromptVariant::StepByStep, kGoldenTranscript) ==
          slurp(golden_dir + "/prompt_step_by_step.txt"));
}

TEST_CASE("prompts: published anchor phrases appear where they must") {
    const auto simple = render_prompt(PromptVariant::Simple, "t");
    CHECK(simple.starts_with("Decide whether the following transcription"));

    const auto definition = render_prompt(PromptVariant::Definition, "t");
    CHECK(definition.find("two or more actors have coordinated in secret") != std::string::npos);
    CHECK(definition.starts_with("Given this definition of conspiracy theory:"));

    const auto steps = render_prompt(PromptVariant::StepByStep, "t");
    CHECK(steps.find("First, extract the narrative or claim") != std::string::npos);
    CHECK(steps.find("no justification") == std::string::npos);
}

TEST_CASE("prompts: empty transcript is rejected") {
    CHECK_THROWS_AS(render_prompt(PromptVariant::Simple, ""), std::invalid_argument);
}

TEST_CASE("parse_label: plain digits and prose endings") {
    CHECK(parse_label("1") == Label::Positive);
    CHECK(parse_label("0") == Label::Negative);
    CHECK(parse_label("The claim is about chemtrails... Third: output = 1") == Label::Positive);
    CHECK(parse_label("First 1 then reconsidering: output = 0") == Label::Negative);
    CHECK(parse_label("I cannot help with that.") == Label::Abstain);
    CHECK(parse_label("") == Label::Abstain);
    CHECK(parse_label("10") == Label::Abstain);   // not a standalone binary digit
    CHECK(parse_label("a1b") == Label::Abstain);  // embedded in a token
}

TEST_CASE("parse_label: any single binary digit in a rendered answer is found") {
    std::mt19937 rng(64);
    const std::vector<std::string> shells{
        "output = %", "The answer is %.", "%", "after much deliberation: %\n",
        "Step three gives %"};
    for (int trial = 0; trial < 50; ++trial) {
        const int digit = static_cast<int>(rng() % 2);
        std::string text = shells[rng() % shells.size()];
        text.replace(text.find('%'), 1, std::to_string(digit));
        CHECK(parse_label(text) == (digit ? Label::Positive : Label::Negative));
    }
}

TEST_CASE("majority_vote: two of three wins, abstain counts negative") {
    CHECK(majority_vote({Label::Positive, Label::Positive, Label::Negative}) == Label::Positive);
    CHECK(majority_vote({Label::Positive, Label::Abstain, Label::Negative}) == Label::Negative);
    CHECK(majority_vote({Label::Negative, Label::Negative, Label::Positive}) == Label::Negative);
    CHECK(majority_vote({Label::Positive, Label::Positive, Label::Positive}) == Label::Positive);
    CHECK(majority_vote({Label::Abstain, Label::Abstain, Label::Abstain}) == Label::Negative);
}

TEST_CASE("majority_vote: symmetric in its arguments") {
    const std::array<Label, 3> votes{Label::Positive, Label::Abstain, Label::Negative};
    std::array<std::size_t, 3> idx{0, 1, 2};
    const Label expected = majority_vote(votes);
    std::sort(idx.begin(), idx.end());
    do {
        CHECK(majority_vote({votes[idx[0]], votes[idx[1]], votes[idx[2]]}) == expected);
    } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("mock: marker decides, seed and temperature do not exist for it") {
    const auto prompt = render_prompt(PromptVariant::Simple, "stuff [label:1] more");
    CHECK(mock_response("plain", "m1", prompt) == "1");
    const auto neg = render_prompt(PromptVariant::Simple, "stuff [label:0] more");
    CHECK(mock_response("plain", "m1", neg) == "0");
    const auto verbose = mock_response("verbose", "m1", prompt);
    CHECK(parse_label(verbose) == Label::Positive);
    CHECK(verbose.find("output = 1") != std::string::npos);
    CHECK(parse_label(mock_response("abstain", "m1", prompt)) == Label::Abstain);
}

TEST_CASE("invoke: mock endpoints answer without a network") {
    ClassifierConfig config;
    config.name = "m1";
    config.endpoint = "mock:plain";
    const auto res = invoke(config, render_prompt(PromptVariant::Simple, "x [label:1]"));
    CHECK(res.text == "1");
}

TEST_CASE("invoke: http round trip, deterministic answer") {
    MockLlmServer server;
    server.start();
    ClassifierConfig config;
    config.name = "modelA";
    config.endpoint = server.base_url();
    config.backoff_ms = 1;
    const auto res = invoke(config, render_prompt(PromptVariant::Simple, "x [label:1]"));
    CHECK(res.text == "1");
    CHECK(server.requests_seen() == 1);
}

TEST_CASE("invoke: two 500s then success within the retry budget") {
    MockLlmServer::Options opts;
    opts.fail_first = 2;
    MockLlmServer server(opts);
    server.start();
    ClassifierConfig config;
    config.name = "modelA";
    config.endpoint = server.base_url();
    config.backoff_ms = 1;
    const auto res = invoke(config, render_prompt(PromptVariant::Simple, "x [label:0]"));
    CHECK(res.text == "0");
    CHECK(server.requests_seen() == 3);
}

TEST_CASE("invoke: persistent 500 exhausts retries into TransportError") {
    MockLlmServer::Options opts;
    opts.fail_first = 100;
    MockLlmServer server(opts);
    server.start();
    ClassifierConfig config;
    config.name = "modelA";
    config.endpoint = server.base_url();
    config.backoff_ms = 1;
    config.max_retries = 2;
    CHECK_THROWS_AS(invoke(config, render_prompt(PromptVariant::Simple, "x")),
                    TransportError);
    CHECK(server.requests_seen() == 3);
}

TEST_CASE("invoke: over-length prompt raises ContextOverflow") {
    MockLlmServer::Options opts;
    opts.context_limit = 64;
    MockLlmServer server(opts);
    server.start();
    ClassifierConfig config;
    config.name = "modelA";
    config.endpoint = server.base_url();
    config.backoff_ms = 1;
    const std::string long_transcript(2000, 'a');
    CHECK_THROWS_AS(invoke(config, render_prompt(PromptVariant::Simple, long_transcript)),
                    ContextOverflow);
}

TEST_CASE("invoke: a recorded step-by-step answer passes through verbatim") {
    // the fixture answer a verbose backend would produce
    const auto prompt = render_prompt(PromptVariant::StepByStep, "claims [label:1] here");
    const std::string fixture = mock_response("verbose", "modelA", prompt);
    REQUIRE(fixture.ends_with("output = 1"));

    MockLlmServer::Options opts;
    opts.behavior = "verbose";
    MockLlmServer server(opts);
    server.start();
    ClassifierConfig config;
    config.name = "modelA";
    config.endpoint = server.base_url();
    const auto res = invoke(config, prompt);
    CHECK(res.text == fixture);  // byte equality
}

// --- datasets and the sweep ---------------------------------------------------

namespace {

std::vector<DatasetItem> synthetic_dataset(int positives, int negatives) {
    std::vector<DatasetItem> items;
    int id = 0;
    for (int i = 0; i < positives; ++i) {
        DatasetItem item;
        item.item_id = "item" + std::to_string(id++);
        item.transcript = "they hid the truth [label:1] case " + std::to_string(i);
        item.gold = 1;
        item.source = "distant";
        items.push_back(std::move(item));
    }
    for (int i = 0; i < negatives; ++i) {
        DatasetItem item;
        item.item_id = "item" + std::to_string(id++);
        item.transcript = "cooking pasta tonight [label:0] case " + std::to_string(i);
        item.gold = 0;
        item.source = "distant";
        items.push_back(std::move(item));
    }
    return items;
}

ExperimentSpec mock_spec(std::vector<DatasetItem> items, std::vector<std::int64_t> seeds,
                         std::vector<PromptVariant> prompts = {PromptVariant::Simple}) {
    ExperimentSpec spec;
    spec.case_id = ExperimentCase::C1;
    spec.dataset = std::move(items);
    spec.prompts = std::move(prompts);
    for (const char* name : {"model-a", "model-b", "model-c"}) {
        ClassifierConfig c;
        c.name = name;
        c.endpoint = "mock:plain";
        spec.models.push_back(std::move(c));
    }
    spec.seeds = std::move(seeds);
    return spec;
}

}  // namespace

TEST_CASE("dataset csv round trip") {
    const auto items = synthetic_dataset(3, 2);
    testsup::TempDir dir("ds");
    write_dataset_csv(items, dir.file("ds.csv"));
    const auto loaded = load_dataset_csv(dir.file("ds.csv"));
    REQUIRE(loaded.size() == items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        CHECK(loaded[i].item_id == items[i].item_id);
        CHECK(loaded[i].transcript == items[i].transcript);
        CHECK(loaded[i].gold == items[i].gold);
        CHECK(loaded[i].source == items[i].source);
    }
}

TEST_CASE("case shapes: canonical sizes and validation messages") {
    CHECK(expected_case_shape(ExperimentCase::C1).total() == 1666);
    CHECK(expected_case_shape(ExperimentCase::C1).positives == 887);
    CHECK(expected_case_shape(ExperimentCase::C2).positives == 100);
    CHECK(expected_case_shape(ExperimentCase::C3).negatives == 779);

    const auto ok = synthetic_dataset(887, 779);
    CHECK(validate_case_shape(ExperimentCase::C1, ok).empty());
    const auto bad = synthetic_dataset(10, 5);
    CHECK(validate_case_shape(ExperimentCase::C1, bad).size() == 2);
}

TEST_CASE("replication seeds: the canonical 25") {
    const auto seeds = replication_seeds();
    REQUIRE(seeds.size() == 25);
    CHECK(seeds[0] == 123);
    CHECK(seeds[1] == 42);
    CHECK(seeds[24] == 1999);
}

TEST_CASE("run_experiment: cross product cardinality on mocks") {
    auto spec = mock_spec(synthetic_dataset(1, 1), {1, 2});
    testsup::TempDir dir("run");
    ResultsStore store(dir.file("results.csv"));
    const auto stats = run_experiment(spec, store);
    CHECK(stats.invoked == 2 * 1 * 3 * 2);  // items x prompts x models x seeds
    CHECK(stats.skipped == 0);
    CHECK(stats.failures == 0);
    CHECK(store.rows().size() == 12);
}

TEST_CASE("run_experiment: resume only fills missing cells") {
    auto spec = mock_spec(synthetic_dataset(2, 2), {1, 2});
    testsup::TempDir dir("resume");
    const auto path = dir.file("results.csv");
    {
        ResultsStore store(path);
        const auto stats = run_experiment(spec, store);
        CHECK(stats.invoked == 4 * 3 * 2);
    }

    // drop half the rows, keeping the header
    const auto rows = csv::read_file(path);
    {
        std::ofstream out(path, std::ios::trunc | std::ios::binary);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && i % 2 == 0) continue;
            out << csv::join_row(rows[i]) << "\n";
        }
    }

    ResultsStore store(path);
    const auto stats = run_experiment(spec, store);
    CHECK(stats.invoked == 12);  // exactly the deleted half
    CHECK(stats.skipped == 12);
    CHECK(store.rows().size() == 24);
}

TEST_CASE("run_experiment: mock tables are identical across seeds") {
    auto spec = mock_spec(synthetic_dataset(3, 3), {7, 77, 777});
    testsup::TempDir dir("det");
    ResultsStore store(dir.file("results.csv"));
    run_experiment(spec, store);

    // label of every (item, model, prompt) must not depend on the seed
    std::map<std::string, std::set<Label>> by_cell;
    for (const auto& p : store.rows())
        by_cell[p.item_id + "|" + p.model + "|" + prompt_variant_name(p.prompt)].insert(p.label);
    for (const auto& [cell, labels] : by_cell) CHECK(labels.size() == 1);
}

TEST_CASE("run_experiment: bounded concurrency yields the same cells") {
    auto spec = mock_spec(synthetic_dataset(4, 4), {1, 2});
    testsup::TempDir serial_dir("serw1"), parallel_dir("serw4");
    ResultsStore serial(serial_dir.file("r.csv"));
    ResultsStore parallel(parallel_dir.file("r.csv"));
    run_experiment(spec, serial, 1);
    run_experiment(spec, parallel, 4);
    REQUIRE(serial.rows().size() == parallel.rows().size());

    auto table = [](const ResultsStore& store) {
        std::map<std::string, Label> t;
        for (const auto& p : store.rows()) t[p.key()] = p.label;
        return t;
    };
    CHECK(table(serial) == table(parallel));
}

TEST_CASE("results store: last ok row wins over an earlier failed row on load") {
    testsup::TempDir dir("lww");
    const auto path = dir.file("r.csv");
    {
        ResultsStore store(path);
        Prediction p;
        p.item_id = "a";
        p.model = "m";
        p.prompt = PromptVariant::Simple;
        p.seed = 1;
        p.status = PredictionStatus::Failed;
        p.raw_output = "boom";
        store.append(p);
        p.status = PredictionStatus::Ok;
        p.label = Label::Positive;
        p.raw_output = "1";
        store.append(p);
    }
    const auto rows = ResultsStore::load(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status == PredictionStatus::Ok);
    CHECK(rows[0].label == Label::Positive);
}

TEST_CASE("run_experiment: failed rows are retried on resume") {
    testsup::TempDir dir("retry");
    const auto path = dir.file("results.csv");
    {
        ResultsStore store(path);
        Prediction failed;
        failed.item_id = "item0";
        failed.model = "model-a";
        failed.prompt = PromptVariant::Simple;
        failed.seed = 1;
        failed.status = PredictionStatus::Failed;
        failed.raw_output = "boom";
        store.append(failed);
    }
    auto spec = mock_spec(synthetic_dataset(1, 0), {1});
    ResultsStore store(path);
    const auto stats = run_experiment(spec, store);
    CHECK(stats.invoked == 3);  // the failed cell plus the two other models
    CHECK(stats.skipped == 0);
}

TEST_CASE("results store: torn final line is truncated on resume") {
    testsup::TempDir dir("torn");
    const auto path = dir.file("results.csv");
    {
        ResultsStore store(path);
        Prediction p;
        p.item_id = "item0";
        p.model = "m";
        p.prompt = PromptVariant::Simple;
        p.seed = 1;
        p.status = PredictionStatus::Ok;
        p.label = Label::Positive;
        p.raw_output = "1";
        store.append(p);
    }
    {
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << "item1,m,simple,2,ok,1,0";  // no newline: simulated crash
    }
    ResultsStore store(path);
    CHECK(store.rows().size() == 1);  // torn row dropped
    CHECK(store.contains(store.rows()[0].key()));

    Prediction p2;
    p2.item_id = "item2";
    p2.model = "m";
    p2.prompt = PromptVariant::Simple;
    p2.seed = 3;
    p2.status = PredictionStatus::Ok;
    p2.label = Label::Negative;
    p2.raw_output = "0";
    store.append(p2);
    const auto rows = ResultsStore::load(path);
    CHECK(rows.size() == 2);  // the append went onto a clean newline
}

// --- metrics -------------------------------------------------------------------

namespace {

Prediction ok_row(const std::string& item, const std::string& model, Label label,
                  std::int64_t seed = 1, PromptVariant prompt = PromptVariant::Simple) {
    Prediction p;
    p.item_id = item;
    p.model = model;
    p.prompt = prompt;
    p.seed = seed;
    p.status = PredictionStatus::Ok;
    p.label = label;
    return p;
}

}  // namespace

TEST_CASE("metrics: perfect predictions score 1/1") {
    std::vector<Prediction> rows{ok_row("a", "m", Label::Positive),
                                 ok_row("b", "m", Label::Negative)};
    const std::map<std::string, int> gold{{"a", 1}, {"b", 0}};
    const auto metrics = compute_metrics(rows, gold, MetricClass::Positive);
    REQUIRE(metrics.size() == 1);
    CHECK(*metrics[0].precision_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*metrics[0].recall_mean == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metrics: all-positive classifier on a 100/779 split") {
    std::vector<Prediction> rows;
    std::map<std::string, int> gold;
    for (int i = 0; i < 879; ++i) {
        const auto id = "i" + std::to_string(i);
        rows.push_back(ok_row(id, "m", Label::Positive));
        gold[id] = i < 100 ? 1 : 0;
    }
    const auto metrics = compute_metrics(rows, gold, MetricClass::Positive);
    REQUIRE(metrics.size() == 1);
    CHECK(*metrics[0].recall_mean == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*metrics[0].precision_mean ==
          doctest::Approx(100.0 / 879.0).epsilon(1e-12));
}

TEST_CASE("metrics: hand-tallied 20-item confusion fixture") {
    // 6 TP, 3 FP, 4 FN, 7 TN by construction
    std::vector<Prediction> rows;
    std::map<std::string, int> gold;
    int id = 0;
    auto add = [&](Label pred, int g, int count) {
        for (int i = 0; i < count; ++i) {
            const auto item = "x" + std::to_string(id++);
            rows.push_back(ok_row(item, "m", pred));
            gold[item] = g;
        }
    };
    add(Label::Positive, 1, 6);
    add(Label::Positive, 0, 3);
    add(Label::Negative, 1, 4);
    add(Label::Negative, 0, 7);
    REQUIRE(rows.size() == 20);

    const auto c = tally_confusion(rows, gold, MetricClass::Positive);
    CHECK(c.tp == 6);
    CHECK(c.fp == 3);
    CHECK(c.fn == 4);
    CHECK(c.tn == 7);
    CHECK(*c.precision() == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
    CHECK(*c.recall() == doctest::Approx(6.0 / 10.0).epsilon(1e-12));
}

TEST_CASE("metrics: abstain counts as a negative answer") {
    std::vector<Prediction> rows{ok_row("a", "m", Label::Abstain),
                                 ok_row("b", "m", Label::Positive)};
    const std::map<std::string, int> gold{{"a", 1}, {"b", 1}};
    const auto c = tally_confusion(rows, gold, MetricClass::Positive);
    CHECK(c.tp == 1);
    CHECK(c.fn == 1);
}

TEST_CASE("metrics: zero denominators stay undefined, never zero") {
    std::vector<Prediction> rows{ok_row("a", "m", Label::Negative)};
    const std::map<std::string, int> gold{{"a", 0}};
    const auto c = tally_confusion(rows, gold, MetricClass::Positive);
    CHECK_FALSE(c.precision().has_value());  // no positive predictions
    CHECK_FALSE(c.recall().has_value());     // no positive gold
    const auto metrics = compute_metrics(rows, gold, MetricClass::Positive);
    REQUIRE(metrics.size() == 1);
    CHECK_FALSE(metrics[0].precision_mean.has_value());
}

TEST_CASE("metrics: swapping classes swaps the metrics") {
    std::mt19937 rng(3131);
    std::vector<Prediction> rows;
    std::map<std::string, int> gold;
    for (int i = 0; i < 60; ++i) {
        const auto id = "r" + std::to_string(i);
        rows.push_back(ok_row(id, "m", rng() % 2 ? Label::Positive : Label::Negative));
        gold[id] = rng() % 2;
    }
    auto flipped_rows = rows;
    for (auto& p : flipped_rows)
        p.label = p.label == Label::Positive ? Label::Negative : Label::Positive;
    std::map<std::string, int> flipped_gold;
    for (const auto& [k, v] : gold) flipped_gold[k] = 1 - v;

    const auto neg = compute_metrics(rows, gold, MetricClass::Negative);
    const auto pos_flipped = compute_metrics(flipped_rows, flipped_gold, MetricClass::Positive);
    REQUIRE(neg.size() == 1);
    REQUIRE(pos_flipped.size() == 1);
    CHECK(*neg[0].precision_mean ==
          doctest::Approx(*pos_flipped[0].precision_mean).epsilon(1e-12));
    CHECK(*neg[0].recall_mean == doctest::Approx(*pos_flipped[0].recall_mean).epsilon(1e-12));
}

TEST_CASE("metrics: seed spread is a 95% normal interval") {
    std::vector<Prediction> rows;
    std::map<std::string, int> gold{{"a", 1}, {"b", 1}};
    // seed 1: both right; seed 2: one right
    rows.push_back(ok_row("a", "m", Label::Positive, 1));
    rows.push_back(ok_row("b", "m", Label::Positive, 1));
    rows.push_back(ok_row("a", "m", Label::Positive, 2));
    rows.push_back(ok_row("b", "m", Label::Negative, 2));
    const auto metrics = compute_metrics(rows, gold, MetricClass::Positive);
    REQUIRE(metrics.size() == 1);
    const auto& m = metrics[0];
    REQUIRE(m.recall_by_seed.size() == 2);
    CHECK(*m.recall_mean == doctest::Approx(0.75).epsilon(1e-12));
    // sd of {1.0, 0.5} is 0.353553...; interval = 1.96 * sd
    CHECK(*m.recall_ci95 ==
          doctest::Approx(1.96 * std::sqrt(0.125)).epsilon(1e-9));
}

TEST_CASE("ensemble: majority over exactly three models per cell") {
    std::vector<Prediction> rows{
        ok_row("a", "m1", Label::Positive), ok_row("a", "m2", Label::Positive),
        ok_row("a", "m3", Label::Negative), ok_row("b", "m1", Label::Negative),
        ok_row("b", "m2", Label::Abstain),  ok_row("b", "m3", Label::Positive),
        ok_row("c", "m1", Label::Positive),  // incomplete cell: no ensemble row
    };
    const auto ens = ensemble_predictions(rows, {"m1", "m2", "m3"});
    REQUIRE(ens.size() == 2);
    CHECK(ens[0].item_id == "a");
    CHECK(ens[0].label == Label::Positive);
    CHECK(ens[1].item_id == "b");
    CHECK(ens[1].label == Label::Negative);  // abstain counted negative
    CHECK(ens[0].model == "ensemble");
}

// --- quartiles ------------------------------------------------------------------

namespace {

DatasetItem item_with_words(const std::string& id, int words, int gold) {
    DatasetItem item;
    item.item_id = id;
    std::string t;
    for (int i = 0; i < words; ++i) t += "w ";
    item.transcript = t;
    item.gold = gold;
    return item;
}

}  // namespace

TEST_CASE("quartiles: forced bounds 210/325/472/1919 with exact buckets") {
    std::vector<DatasetItem> items{
        item_with_words("a", 100, 1),  item_with_words("b", 210, 0),
        item_with_words("c", 300, 1),  item_with_words("d", 325, 0),
        item_with_words("e", 400, 1),  item_with_words("f", 472, 0),
        item_with_words("g", 500, 1),  item_with_words("h", 1919, 0),
    };
    const auto bounds = word_count_quartile_bounds(items);
    CHECK(bounds[0] == 210);
    CHECK(bounds[1] == 325);
    CHECK(bounds[2] == 472);
    CHECK(bounds[3] == 1919);

    std::vector<Prediction> rows;
    for (const auto& item : items)
        rows.push_back(ok_row(item.item_id, "m",
                              item.gold ? Label::Positive : Label::Negative));
    const auto buckets = quartile_breakdown(rows, items, MetricClass::Positive);
    REQUIRE(buckets.size() == 4);
    for (const auto& b : buckets) CHECK(b.n_items == 2);
    CHECK(buckets[0].upper_bound == 210);
    CHECK(buckets[3].upper_bound == 1919);
}

TEST_CASE("quartiles: uniform word counts split near-evenly") {
    std::vector<DatasetItem> items;
    for (int i = 0; i < 101; ++i)
        items.push_back(item_with_words("u" + std::to_string(i), 10 + i, i % 2));
    const auto bounds = word_count_quartile_bounds(items);
    std::array<std::int64_t, 4> sizes{};
    for (const auto& item : items) {
        const auto words = word_count(item.transcript);
        for (int q = 0; q < 4; ++q) {
            if (words <= bounds[static_cast<std::size_t>(q)]) {
                ++sizes[static_cast<std::size_t>(q)];
                break;
            }
        }
    }
    for (auto s : sizes) {
        CHECK(s >= 101 / 4);
        CHECK(s <= 101 / 4 + 1);
    }
}

TEST_CASE("quartiles: planted difficulty gives monotone precision") {
    // short items are always misclassified as positive, long always right
    std::vector<DatasetItem> items;
    std::vector<Prediction> rows;
    int id = 0;
    for (int q = 0; q < 4; ++q) {
        for (int i = 0; i < 10; ++i) {
            const int words = 50 + q * 100 + i;
            const bool positive = i % 2 == 0;
            const auto name = "p" + std::to_string(id++);
            items.push_back(item_with_words(name, words, positive ? 1 : 0));
            // exactly 4-q false positives per bucket: precision rises with q
            const bool misfire = !positive && ((i - 1) / 2 < 4 - q);
            rows.push_back(ok_row(name, "m",
                                  positive || misfire ? Label::Positive : Label::Negative));
        }
    }
    const auto buckets = quartile_breakdown(rows, items, MetricClass::Positive);
    REQUIRE(buckets.size() == 4);
    double prev = 0.0;
    for (const auto& b : buckets) {
        REQUIRE(b.metrics.size() == 1);
        const double precision = *b.metrics[0].precision_mean;
        CHECK(precision >= prev - 1e-12);
        prev = precision;
    }
}

TEST_CASE("quartiles: empty positive bucket carries undefined markers") {
    std::vector<DatasetItem> items{
        item_with_words("a", 10, 0), item_with_words("b", 20, 0),
        item_with_words("c", 30, 0), item_with_words("d", 40, 1)};
    std::vector<Prediction> rows{
        ok_row("a", "m", Label::Negative), ok_row("b", "m", Label::Negative),
        ok_row("c", "m", Label::Negative), ok_row("d", "m", Label::Positive)};
    const auto buckets = quartile_breakdown(rows, items, MetricClass::Positive);
    REQUIRE(buckets.size() == 4);
    // first bucket has no positive gold and no positive predictions
    REQUIRE(buckets[0].metrics.size() == 1);
    CHECK_FALSE(buckets[0].metrics[0].precision_mean.has_value());
    CHECK_FALSE(buckets[0].metrics[0].recall_mean.has_value());
}

TEST_CASE("word_count: whitespace tokenization") {
    CHECK(word_count("") == 0);
    CHECK(word_count("one") == 1);
    CHECK(word_count("  two   words \n and\tmore ") == 4);
}

TEST_CASE("baseline constants: published validation bands") {
    const auto c1 = finetuned_baseline(ExperimentCase::C1);
    REQUIRE(c1.has_value());
    CHECK(c1->precision_mean == 0.83);
    CHECK(c1->recall_mean == 0.83);
    const auto c3 = finetuned_baseline(ExperimentCase::C3);
    REQUIRE(c3.has_value());
    CHECK(c3->precision_mean == 0.68);
    CHECK(c3->recall_mean == 0.67);
    CHECK_FALSE(finetuned_baseline(ExperimentCase::C2).has_value());
}

TEST_CASE("metrics csv: stable header and one row per group") {
    std::vector<Prediction> rows{ok_row("a", "m1", Label::Positive),
                                 ok_row("a", "m2", Label::Positive)};
    const std::map<std::string, int> gold{{"a", 1}};
    const auto metrics = compute_metrics(rows, gold, MetricClass::Positive);
    testsup::TempDir dir("mcsv");
    write_metrics_csv(metrics, "C1", dir.file("metrics.csv"));
    const auto loaded = csv::read_file(dir.file("metrics.csv"));
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0][0] == "case");
    CHECK(loaded[1][2] == "m1");
    CHECK(loaded[2][2] == "m2");
}
