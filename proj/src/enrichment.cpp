#include "ctmine/enrichment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ctmine/csv.hpp"
#include "ctmine/errors.hpp"
#include "ctmine/log.hpp"

namespace ctmine::enrich {

SeedSet default_seed_set() {
    SeedSet s;
    s.seeds = {"conspiracy", "flatearth",   "qanon",    "newworldorder", "chemtrails",
               "mindcontrol", "reptilian",  "bigfoot",  "illuminati",    "ufo"};
    return s;
}

std::vector<std::string> load_seeds_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seeds file: " + path);
    std::vector<std::string> seeds;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        std::string tag = line.substr(first, last - first + 1);
        if (tag.empty() || tag.front() == '#') continue;
        for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        seeds.push_back(std::move(tag));
    }
    return seeds;
}

namespace {

double damped_blend(double word_cos, double tag_cos, double alpha, std::int64_t target_df) {
    const double damping = 1.0 + std::log(static_cast<double>(target_df));
    return (alpha * word_cos + (1.0 - alpha) * tag_cos) / damping;
}

// the deterministic neighbor order: score desc, df asc, tag lexicographic
bool result_less(const SimilarityResult& a, const SimilarityResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.neighbor_df != b.neighbor_df) return a.neighbor_df < b.neighbor_df;
    return a.neighbor < b.neighbor;
}

}  // namespace

double similarity(std::string_view seed, std::string_view target, const cooc::Vocabulary& vocab,
                  const cooc::SparseCooccurrence& matrices, double alpha) {
    const auto s = vocab.hashtag_id(seed);
    if (!s) throw KeyMissing("similarity: unknown seed hashtag: " + std::string(seed));
    const auto t = vocab.hashtag_id(target);
    if (!t) throw KeyMissing("similarity: unknown target hashtag: " + std::string(target));

    const double word_cos = matrices.hashtag_word.cosine_rows(*s, *t);
    const double tag_cos = matrices.hashtag_hashtag.cosine_rows(*s, *t);
    const std::int64_t df = matrices.df(*t);
    if (df < 1) return 0.0;  // cannot co-occur with anything; both cosines are 0 too
    return damped_blend(word_cos, tag_cos, alpha, df);
}

Enricher::Enricher(const cooc::Vocabulary& vocab, const cooc::SparseCooccurrence& matrices)
    : vocab_(vocab), matrices_(matrices), word_to_tags_(matrices.hashtag_word.transpose()) {}

std::vector<SimilarityResult> Enricher::top_k_similar(std::string_view seed,
                                                      const SeedSet& params) const {
    const auto seed_id = vocab_.hashtag_id(seed);
    if (!seed_id) throw KeyMissing("top_k_similar: unknown seed hashtag: " + std::string(seed));

    const auto& hh = matrices_.hashtag_hashtag;
    const auto& hw = matrices_.hashtag_word;
    const std::uint32_t n_tags = vocab_.hashtag_count();

    // scatter-accumulate dot products against every candidate sharing support
    std::vector<double> tag_dots(n_tags, 0.0);
    std::vector<double> word_dots(n_tags, 0.0);
    std::vector<std::uint32_t> touched;

    {
        const auto cols = hh.row_cols(*seed_id);
        const auto vals = hh.row_values(*seed_id);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const double v = static_cast<double>(vals[i]);
            const auto tcols = hh.row_cols(cols[i]);  // hh symmetric: column = row
            const auto tvals = hh.row_values(cols[i]);
            for (std::size_t k = 0; k < tcols.size(); ++k) {
                if (tag_dots[tcols[k]] == 0.0 && word_dots[tcols[k]] == 0.0)
                    touched.push_back(tcols[k]);
                tag_dots[tcols[k]] += v * static_cast<double>(tvals[k]);
            }
        }
    }
    {
        const auto cols = hw.row_cols(*seed_id);
        const auto vals = hw.row_values(*seed_id);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const double v = static_cast<double>(vals[i]);
            const auto tcols = word_to_tags_.row_cols(cols[i]);
            const auto tvals = word_to_tags_.row_values(cols[i]);
            for (std::size_t k = 0; k < tcols.size(); ++k) {
                if (tag_dots[tcols[k]] == 0.0 && word_dots[tcols[k]] == 0.0)
                    touched.push_back(tcols[k]);
                word_dots[tcols[k]] += v * static_cast<double>(tvals[k]);
            }
        }
    }

    const double seed_tag_norm = hh.row_norm(*seed_id);
    const double seed_word_norm = hw.row_norm(*seed_id);

    std::vector<SimilarityResult> results;
    results.reserve(touched.size());
    for (std::uint32_t t : touched) {
        if (t == *seed_id) continue;
        const std::int64_t df = matrices_.df(t);
        if (df < 1) continue;
        double tag_cos = 0.0;
        if (seed_tag_norm > 0.0) {
            const double tn = hh.row_norm(t);
            if (tn > 0.0) tag_cos = tag_dots[t] / (seed_tag_norm * tn);
        }
        double word_cos = 0.0;
        if (seed_word_norm > 0.0) {
            const double wn = hw.row_norm(t);
            if (wn > 0.0) word_cos = word_dots[t] / (seed_word_norm * wn);
        }
        const double score = damped_blend(word_cos, tag_cos, params.alpha, df);
        if (score > 0.0)
            results.push_back({std::string(seed), vocab_.hashtag(t), score, df});
    }

    const std::size_t k = static_cast<std::size_t>(std::max(params.top_k, 1));
    if (results.size() > k) {
        std::nth_element(results.begin(), results.begin() + static_cast<std::ptrdiff_t>(k),
                         results.end(), result_less);
        results.resize(k);
    }
    std::sort(results.begin(), results.end(), result_less);
    return results;
}

Enricher::EnrichmentResult Enricher::enrich(const SeedSet& seed_set) const {
    if (seed_set.seeds.empty()) throw std::invalid_argument("enrich: empty seed set");

    EnrichmentResult out;
    std::unordered_map<std::string, SimilarityResult> best;
    for (const auto& seed : seed_set.seeds) {
        try {
            auto neighbors = top_k_similar(seed, seed_set);
            for (const auto& r : neighbors) {
                auto it = best.find(r.neighbor);
                if (it == best.end() || r.score > it->second.score) best[r.neighbor] = r;
            }
            out.per_seed.emplace_back(seed, std::move(neighbors));
        } catch (const KeyMissing&) {
            log::warn("seed hashtag not in vocabulary, skipping", {{"seed", seed}});
            out.missing_seeds.push_back(seed);
        }
    }
    if (out.per_seed.empty())
        throw KeyMissing("enrich: no seed hashtag is present in the vocabulary");

    out.merged.reserve(best.size());
    for (auto& [tag, r] : best) out.merged.push_back(std::move(r));
    std::sort(out.merged.begin(), out.merged.end(), result_less);
    return out;
}

void write_enrichment_csv(const Enricher::EnrichmentResult& result, const std::string& path) {
    csv::Writer w(path);
    w.row({"seed", "neighbor", "score", "df", "rank"});
    for (const auto& [seed, neighbors] : result.per_seed) {
        int rank = 1;
        for (const auto& r : neighbors) {
            char score[32];
            std::snprintf(score, sizeof(score), "%.12g", r.score);
            w.row({seed, r.neighbor, score, std::to_string(r.neighbor_df),
                   std::to_string(rank++)});
        }
    }
}

const char* hashtag_class_name(HashtagClass c) {
    switch (c) {
        case HashtagClass::CT: return "CT";
        case HashtagClass::DW: return "DW";
        case HashtagClass::NOCT: return "NOCT";
        case HashtagClass::HJ: return "HJ";
        case HashtagClass::RHJ: return "RHJ";
        case HashtagClass::Unlabeled: return "UNLABELED";
    }
    return "UNLABELED";
}

HashtagClass parse_hashtag_class(std::string_view name) {
    std::string upper(name);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "CT") return HashtagClass::CT;
    if (upper == "DW") return HashtagClass::DW;
    if (upper == "NOCT") return HashtagClass::NOCT;
    if (upper == "HJ") return HashtagClass::HJ;
    if (upper == "RHJ") return HashtagClass::RHJ;
    if (upper == "UNLABELED") return HashtagClass::Unlabeled;
    throw std::invalid_argument("unknown hashtag class: " + std::string(name));
}

std::vector<HashtagLabel> load_labels_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    std::vector<HashtagLabel> labels;
    bool header_seen = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
        if (!row[0].empty() && row[0].front() == '#') continue;  // comment line
        if (!header_seen && row[0] == "tag") {
            header_seen = true;
            continue;
        }
        if (row.size() < 2) {
            log::warn("labels row too short, skipping", {{"line", std::to_string(i + 1)}});
            continue;
        }
        HashtagLabel l;
        l.tag = row[0];
        for (char& c : l.tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        try {
            l.cls = parse_hashtag_class(row[1]);
        } catch (const std::invalid_argument& e) {
            log::warn("labels row has unknown class, skipping",
                      {{"line", std::to_string(i + 1)}, {"reason", e.what()}});
            continue;
        }
        if (row.size() > 2) l.annotator = row[2];
        if (row.size() > 3) l.note = row[3];
        labels.push_back(std::move(l));
    }
    return labels;
}

MergedLabels merge_labels(std::span<const HashtagLabel> labels) {
    MergedLabels merged;
    for (const auto& l : labels) {
        auto [it, inserted] = merged.try_emplace(l.tag, l.cls);
        if (!inserted && it->second != l.cls) {
            log::warn("conflicting label, keeping the later row",
                      {{"tag", l.tag},
                       {"old", hashtag_class_name(it->second)},
                       {"new", hashtag_class_name(l.cls)}});
            it->second = l.cls;
        }
    }
    return merged;
}

VideoLabel distant_label_one(const VideoRecord& rec, const MergedLabels& labels) {
    bool has_positive = false;
    for (const auto& tag : rec.hashtags) {
        auto it = labels.find(tag);
        if (it == labels.end()) continue;
        switch (it->second) {
            case HashtagClass::CT:
            case HashtagClass::DW:
                has_positive = true;
                break;
            case HashtagClass::NOCT:
            case HashtagClass::HJ:
            case HashtagClass::RHJ:
                return VideoLabel::NotConspiracy;  // exclusion wins outright
            case HashtagClass::Unlabeled:
                break;
        }
    }
    return has_positive ? VideoLabel::Conspiracy : VideoLabel::NotConspiracy;
}

std::vector<VideoLabel> distant_label(std::span<const VideoRecord> records,
                                      const MergedLabels& labels) {
    std::vector<VideoLabel> out;
    out.reserve(records.size());
    for (const auto& rec : records) out.push_back(distant_label_one(rec, labels));
    return out;
}

}  // namespace ctmine::enrich
