#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctmine/cooccurrence.hpp"
#include "ctmine/video_record.hpp"

namespace ctmine::enrich {

using ingest::VideoRecord;

// Seed-driven expansion parameters. alpha weighs the word-vector cosine
// against the hashtag-vector cosine; top_k bounds each seed's neighbor list.
struct SeedSet {
    std::vector<std::string> seeds;
    double alpha = 0.3;
    int top_k = 20;
};

// The bundled default: nine high-signal seeds plus the topic's own name.
SeedSet default_seed_set();

// Seeds file: one tag per line, '#' starts a comment.
std::vector<std::string> load_seeds_file(const std::string& path);

struct SimilarityResult {
    std::string seed;
    std::string neighbor;
    double score = 0.0;
    std::int64_t neighbor_df = 0;
};

// Similarity of a target tag to a seed tag:
//   (alpha * cos(word rows) + (1 - alpha) * cos(hashtag rows)) / (1 + ln(df(target)))
// Natural log. Throws KeyMissing when either tag is not in the vocabulary.
double similarity(std::string_view seed, std::string_view target, const cooc::Vocabulary& vocab,
                  const cooc::SparseCooccurrence& matrices, double alpha);

// Precomputes the word-column inverted index once so repeated seed queries
// stay cheap; the matrices must outlive the enricher.
class Enricher {
public:
    Enricher(const cooc::Vocabulary& vocab, const cooc::SparseCooccurrence& matrices);

    // k highest-scoring targets with score > 0, seed excluded. Ties broken
    // by (score desc, df asc, tag lexicographic). Throws KeyMissing when the
    // seed is not in the vocabulary.
    std::vector<SimilarityResult> top_k_similar(std::string_view seed, const SeedSet& params) const;

    // Union of top_k_similar over all seeds, deduplicated by neighbor tag
    // keeping the best score. Seeds missing from the vocabulary are skipped
    // with a warning; throws KeyMissing only when every seed is missing.
    struct EnrichmentResult {
        std::vector<std::pair<std::string, std::vector<SimilarityResult>>> per_seed;
        std::vector<SimilarityResult> merged;  // sorted by the tie order
        std::vector<std::string> missing_seeds;
    };
    EnrichmentResult enrich(const SeedSet& seed_set) const;

private:
    const cooc::Vocabulary& vocab_;
    const cooc::SparseCooccurrence& matrices_;
    cooc::SparseCountMatrix word_to_tags_;  // transpose of hashtag_word
};

// Report CSV: seed,neighbor,score,df,rank (rank restarts per seed).
void write_enrichment_csv(const Enricher::EnrichmentResult& result, const std::string& path);

// --- hashtag taxonomy & distant labeling -----------------------------------

enum class HashtagClass { CT, DW, NOCT, HJ, RHJ, Unlabeled };

const char* hashtag_class_name(HashtagClass c);
HashtagClass parse_hashtag_class(std::string_view name);  // throws std::invalid_argument

struct HashtagLabel {
    std::string tag;
    HashtagClass cls = HashtagClass::Unlabeled;
    std::string annotator;
    std::string note;
};

// Labels file: CSV tag,class,annotator,note (header optional). Rows with an
// unknown class are skipped with a warning.
std::vector<HashtagLabel> load_labels_csv(const std::string& path);

// One final class per tag; later rows win, conflicts are warned.
using MergedLabels = std::unordered_map<std::string, HashtagClass>;
MergedLabels merge_labels(std::span<const HashtagLabel> labels);

enum class VideoLabel { Conspiracy, NotConspiracy };

// Positive iff the video carries at least one CT/DW tag and no NOCT/HJ/RHJ
// tag. Unlabeled tags never influence the decision.
VideoLabel distant_label_one(const VideoRecord& rec, const MergedLabels& labels);

std::vector<VideoLabel> distant_label(std::span<const VideoRecord> records,
                                      const MergedLabels& labels);

}  // namespace ctmine::enrich
