#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "ctmine/cooccurrence.hpp"
#include "ctmine/corpus_ingest.hpp"
#include "test_support.hpp"

using namespace ctmine;
using namespace ctmine::cooc;
using testsup::make_record;

TEST_CASE("tokenizer: lowercase, length filter, own hashtags removed") {
    const std::vector<std::string> own{"fyp"};
    const auto toks = tokenize_description("Hello, World! #fyp a x 42", own);
    REQUIRE(toks.size() == 3);
    CHECK(toks[0] == "hello");
    CHECK(toks[1] == "world");
    CHECK(toks[2] == "42");
}

TEST_CASE("vocabulary: min_df filter keeps only repeated hashtags") {
    std::vector<ingest::VideoRecord> records{
        make_record("v1", {"x", "y"}),
        make_record("v2", {"y"}),
        make_record("v3", {"y"}),
    };
    const auto vocab = build_vocabulary(records, 2);
    CHECK(vocab.hashtag_count() == 1);
    CHECK(vocab.hashtag_id("y").has_value());
    CHECK_FALSE(vocab.hashtag_id("x").has_value());
}

TEST_CASE("vocabulary: min_df = 1 keeps every observed tag") {
    std::vector<ingest::VideoRecord> records{
        make_record("v1", {"x", "y"}),
        make_record("v2", {"z"}),
    };
    const auto vocab = build_vocabulary(records, 1);
    CHECK(vocab.hashtag_count() == 3);
}

TEST_CASE("vocabulary: empty corpus is a valid empty vocabulary") {
    const auto vocab = build_vocabulary({}, 2);
    CHECK(vocab.hashtag_count() == 0);
    CHECK(vocab.word_count() == 0);
}

TEST_CASE("vocabulary: surviving count equals a brute-force df filter at scale") {
    // planted frequencies: tag i appears in (i % 5) + 1 videos
    std::mt19937 rng(404);
    std::vector<ingest::VideoRecord> records;
    const int n_tags = 50000;
    std::map<std::string, int> planted;
    int vid = 0;
    for (int i = 0; i < n_tags; ++i) {
        const std::string tag = "t" + std::to_string(i);
        const int df = (i % 5) + 1;
        planted[tag] = df;
        for (int d = 0; d < df; ++d)
            records.push_back(make_record("v" + std::to_string(vid++), {tag}));
    }
    std::shuffle(records.begin(), records.end(), rng);

    const std::int64_t min_df = 2;
    const auto vocab = build_vocabulary(records, min_df);
    std::int64_t expected = 0;
    for (const auto& [tag, df] : planted)
        if (df >= min_df) ++expected;
    CHECK(static_cast<std::int64_t>(vocab.hashtag_count()) == expected);
}

TEST_CASE("matrices: single video wiring") {
    std::vector<ingest::VideoRecord> records{make_record("v1", {"a", "b"}, "hello world")};
    const auto vocab = build_vocabulary(records, 1);
    const auto cooc = build_matrices(records, vocab);

    const auto a = *vocab.hashtag_id("a");
    const auto b = *vocab.hashtag_id("b");
    const auto hello = *vocab.word_id("hello");

    CHECK(cooc.df(a) == 1);
    CHECK(cooc.df(b) == 1);
    const auto cols = cooc.hashtag_hashtag.row_cols(a);
    REQUIRE(cols.size() == 1);
    CHECK(cols[0] == b);
    CHECK(cooc.hashtag_hashtag.row_values(a)[0] == 1);
    const auto wcols = cooc.hashtag_word.row_cols(a);
    REQUIRE(wcols.size() == 2);
    CHECK(std::find(wcols.begin(), wcols.end(), hello) != wcols.end());
}

TEST_CASE("matrices: two identical videos double every count") {
    std::vector<ingest::VideoRecord> one{make_record("v1", {"a", "b"}, "hello world")};
    std::vector<ingest::VideoRecord> two{make_record("v1", {"a", "b"}, "hello world"),
                                         make_record("v2", {"a", "b"}, "hello world")};
    const auto vocab = build_vocabulary(two, 1);
    const auto m1 = build_matrices(one, vocab);
    const auto m2 = build_matrices(two, vocab);

    const auto a = *vocab.hashtag_id("a");
    CHECK(m2.df(a) == 2 * m1.df(a));
    CHECK(m2.hashtag_hashtag.row_values(a)[0] == 2 * m1.hashtag_hashtag.row_values(a)[0]);
    CHECK(m2.hashtag_word.row_values(a)[0] == 2 * m1.hashtag_word.row_values(a)[0]);
}

TEST_CASE("matrices: repeated tags and words within one video count once") {
    std::vector<ingest::VideoRecord> records{
        make_record("v1", {"a", "a", "b"}, "echo echo echo")};
    const auto vocab = build_vocabulary(records, 1);
    const auto cooc = build_matrices(records, vocab);
    const auto a = *vocab.hashtag_id("a");
    CHECK(cooc.df(a) == 1);
    CHECK(cooc.hashtag_hashtag.row_values(a)[0] == 1);
    CHECK(cooc.hashtag_word.row_values(a)[0] == 1);
}

namespace {

std::vector<ingest::VideoRecord> load_toy_corpus() {
    auto loaded = ingest::load_corpus(testsup::fixtures_dir() + "/toy_corpus.jsonl");
    REQUIRE(loaded.skipped == 0);
    REQUIRE(loaded.records.size() == 50);
    return std::move(loaded.records);
}

}  // namespace

TEST_CASE("matrices: toy corpus equals the brute-force pairwise construction") {
    const auto records = load_toy_corpus();
    const auto vocab = build_vocabulary(records, 2);
    const auto cooc = build_matrices(records, vocab);
    const auto oracle = testsup::dense_cooc_oracle(records, 2);

    REQUIRE(vocab.hashtag_count() == oracle.tags.size());
    for (std::uint32_t i = 0; i < vocab.hashtag_count(); ++i) {
        CHECK(vocab.hashtag(i) == oracle.tags[i]);  // same first-seen order
        CHECK(cooc.df(i) == oracle.df.at(vocab.hashtag(i)));
    }

    // every nonzero cell must match, in both directions
    std::int64_t nnz_seen = 0;
    for (std::uint32_t i = 0; i < vocab.hashtag_count(); ++i) {
        const auto cols = cooc.hashtag_hashtag.row_cols(i);
        const auto vals = cooc.hashtag_hashtag.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto key = std::make_pair(vocab.hashtag(i), vocab.hashtag(cols[k]));
            REQUIRE(oracle.hh.count(key) == 1);
            CHECK(static_cast<std::int64_t>(vals[k]) == oracle.hh.at(key));
            ++nnz_seen;
        }
    }
    CHECK(nnz_seen == static_cast<std::int64_t>(oracle.hh.size()));

    std::int64_t hw_seen = 0;
    for (std::uint32_t i = 0; i < vocab.hashtag_count(); ++i) {
        const auto cols = cooc.hashtag_word.row_cols(i);
        const auto vals = cooc.hashtag_word.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const auto key = std::make_pair(vocab.hashtag(i), vocab.word(cols[k]));
            REQUIRE(oracle.hw.count(key) == 1);
            CHECK(static_cast<std::int64_t>(vals[k]) == oracle.hw.at(key));
            ++hw_seen;
        }
    }
    CHECK(hw_seen == static_cast<std::int64_t>(oracle.hw.size()));
}

TEST_CASE("matrices: symmetric hh, zero diagonal, df dominates every cell") {
    const auto records = load_toy_corpus();
    const auto vocab = build_vocabulary(records, 2);
    const auto cooc = build_matrices(records, vocab);
    const auto& hh = cooc.hashtag_hashtag;

    for (std::uint32_t i = 0; i < hh.rows(); ++i) {
        const auto cols = hh.row_cols(i);
        const auto vals = hh.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            CHECK(cols[k] != i);  // no self-co-occurrence
            // symmetry: find (cols[k], i)
            const auto back_cols = hh.row_cols(cols[k]);
            const auto it = std::lower_bound(back_cols.begin(), back_cols.end(), i);
            REQUIRE(it != back_cols.end());
            REQUIRE(*it == i);
            const auto back_vals = hh.row_values(cols[k]);
            CHECK(back_vals[static_cast<std::size_t>(it - back_cols.begin())] == vals[k]);
            CHECK(static_cast<std::int64_t>(vals[k]) <= cooc.df(i));
        }
    }
}

TEST_CASE("matrices: construction is invariant under record order") {
    auto records = load_toy_corpus();
    const auto vocab = build_vocabulary(records, 2);
    const auto base = build_matrices(records, vocab);

    std::mt19937 rng(777);
    std::shuffle(records.begin(), records.end(), rng);
    const auto shuffled = build_matrices(records, vocab);

    REQUIRE(base.hashtag_hashtag.nnz() == shuffled.hashtag_hashtag.nnz());
    for (std::uint32_t i = 0; i < base.hashtag_hashtag.rows(); ++i) {
        const auto c1 = base.hashtag_hashtag.row_cols(i);
        const auto c2 = shuffled.hashtag_hashtag.row_cols(i);
        REQUIRE(c1.size() == c2.size());
        CHECK(std::equal(c1.begin(), c1.end(), c2.begin()));
        const auto v1 = base.hashtag_hashtag.row_values(i);
        const auto v2 = shuffled.hashtag_hashtag.row_values(i);
        CHECK(std::equal(v1.begin(), v1.end(), v2.begin()));
    }
}

TEST_CASE("cosine: identical rows score 1, disjoint rows score 0") {
    SparseMatrixBuilder b(3, 4);
    b.add(0, 0, 2);
    b.add(0, 1, 3);
    b.add(1, 0, 2);
    b.add(1, 1, 3);
    b.add(2, 2, 5);
    const auto m = b.finalize();
    CHECK(m.cosine_rows(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.cosine_rows(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.cosine_rows(0, 2) == 0.0);
}

TEST_CASE("cosine: zero rows score 0 against anything") {
    SparseMatrixBuilder b(2, 3);
    b.add(0, 0, 1);
    const auto m = b.finalize();
    CHECK(m.cosine_rows(0, 1) == 0.0);
    CHECK(m.cosine_rows(1, 1) == 0.0);
}

TEST_CASE("cosine: dense oracle on the worked row pair") {
    // rows (1,2,0) and (2,1,1)
    SparseMatrixBuilder b(2, 3);
    b.add(0, 0, 1);
    b.add(0, 1, 2);
    b.add(1, 0, 2);
    b.add(1, 1, 1);
    b.add(1, 2, 1);
    const auto m = b.finalize();
    const double expected =
        (1.0 * 2 + 2.0 * 1 + 0.0 * 1) /
        (std::sqrt(1.0 + 4.0) * std::sqrt(4.0 + 1.0 + 1.0));
    CHECK(m.cosine_rows(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(m.cosine_rows(0, 1) >= 0.0);
    CHECK(m.cosine_rows(0, 1) <= 1.0);
}

TEST_CASE("cosine: invariant under positive scaling of either row") {
    SparseMatrixBuilder b1(2, 3), b2(2, 3);
    b1.add(0, 0, 1);
    b1.add(0, 2, 2);
    b1.add(1, 0, 3);
    b1.add(1, 1, 1);
    b2.add(0, 0, 7);  // row 0 scaled by 7
    b2.add(0, 2, 14);
    b2.add(1, 0, 3);
    b2.add(1, 1, 1);
    const auto m1 = b1.finalize();
    const auto m2 = b2.finalize();
    CHECK(m1.cosine_rows(0, 1) == doctest::Approx(m2.cosine_rows(0, 1)).epsilon(1e-12));
}

TEST_CASE("sparse container: save/load round trip preserves everything") {
    const auto records = load_toy_corpus();
    const auto vocab = build_vocabulary(records, 2);
    auto cooc = build_matrices(records, vocab);

    testsup::TempDir dir("cooc");
    cooc.save(dir.path().string());
    const auto loaded = SparseCooccurrence::load(dir.path().string());

    REQUIRE(loaded.hashtag_hashtag.nnz() == cooc.hashtag_hashtag.nnz());
    REQUIRE(loaded.hashtag_word.nnz() == cooc.hashtag_word.nnz());
    REQUIRE(loaded.document_frequency == cooc.document_frequency);
    for (std::uint32_t i = 0; i < cooc.hashtag_hashtag.rows(); ++i) {
        const auto a = cooc.hashtag_hashtag.row_cols(i);
        const auto b = loaded.hashtag_hashtag.row_cols(i);
        REQUIRE(a.size() == b.size());
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    // vocabulary round trip alongside
    vocab.save(dir.file("tags.txt"), dir.file("words.txt"));
    const auto vloaded = Vocabulary::load(dir.file("tags.txt"), dir.file("words.txt"));
    CHECK(vloaded.hashtag_count() == vocab.hashtag_count());
    CHECK(vloaded.word_count() == vocab.word_count());
    CHECK(*vloaded.hashtag_id(vocab.hashtag(0)) == 0);
}

TEST_CASE("sparse container: corrupt file is rejected") {
    testsup::TempDir dir("badmat");
    const auto path = dir.file("x.mat");
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOTAMATRIX";
    }
    CHECK_THROWS(SparseCountMatrix::load(path));
}

TEST_CASE("builder: sharded construction merges to the single-pass result") {
    auto records = load_toy_corpus();
    const auto vocab = build_vocabulary(records, 2);
    const auto whole = build_matrices(records, vocab);

    CooccurrenceBuilder shard_a(vocab), shard_b(vocab);
    for (std::size_t i = 0; i < records.size(); ++i)
        (i % 2 == 0 ? shard_a : shard_b).add(records[i]);
    // merge at the sparse-accumulator level
    SparseMatrixBuilder left(vocab.hashtag_count(), vocab.hashtag_count());
    SparseMatrixBuilder right(vocab.hashtag_count(), vocab.hashtag_count());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& builder = i % 2 == 0 ? left : right;
        std::vector<std::uint32_t> ids;
        for (const auto& tag : records[i].hashtags)
            if (auto id = vocab.hashtag_id(tag)) ids.push_back(*id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                builder.add(ids[a], ids[b]);
                builder.add(ids[b], ids[a]);
            }
        }
    }
    left.merge(std::move(right));
    const auto merged = left.finalize();

    REQUIRE(merged.nnz() == whole.hashtag_hashtag.nnz());
    for (std::uint32_t r = 0; r < merged.rows(); ++r) {
        const auto a = merged.row_cols(r);
        const auto b = whole.hashtag_hashtag.row_cols(r);
        REQUIRE(a.size() == b.size());
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
        const auto av = merged.row_values(r);
        const auto bv = whole.hashtag_hashtag.row_values(r);
        CHECK(std::equal(av.begin(), av.end(), bv.begin()));
    }
}

TEST_CASE("matrix transpose: round trip restores the original") {
    SparseMatrixBuilder b(3, 5);
    std::mt19937 rng(12);
    for (int i = 0; i < 30; ++i)
        b.add(static_cast<std::uint32_t>(rng() % 3), static_cast<std::uint32_t>(rng() % 5));
    const auto m = b.finalize();
    const auto tt = m.transpose().transpose();
    REQUIRE(tt.rows() == m.rows());
    REQUIRE(tt.nnz() == m.nnz());
    for (std::uint32_t r = 0; r < m.rows(); ++r) {
        const auto a = m.row_cols(r);
        const auto c = tt.row_cols(r);
        REQUIRE(a.size() == c.size());
        CHECK(std::equal(a.begin(), a.end(), c.begin()));
        const auto av = m.row_values(r);
        const auto cv = tt.row_values(r);
        CHECK(std::equal(av.begin(), av.end(), cv.begin()));
    }
}
