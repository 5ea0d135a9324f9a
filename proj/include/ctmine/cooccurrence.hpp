#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctmine/sparse_matrix.hpp"
#include "ctmine/video_record.hpp"

namespace ctmine::cooc {

using ingest::VideoRecord;

// Description tokenizer: lowercase, split on non-alphanumeric, tokens
// shorter than 2 chars dropped. Tokens equal to one of the video's own
// hashtags are excluded from the word stream (they belong to the hashtag
// matrix).
std::vector<std::string> tokenize_description(std::string_view description,
                                              std::span<const std::string> own_hashtags);

// Dense contiguous ids for hashtags and description words. Ids are assigned
// in first-seen order over the corpus; only hashtags with document frequency
// >= min_df survive.
class Vocabulary {
public:
    std::optional<std::uint32_t> hashtag_id(std::string_view tag) const;
    std::optional<std::uint32_t> word_id(std::string_view word) const;

    const std::string& hashtag(std::uint32_t id) const { return hashtags_.at(id); }
    const std::string& word(std::uint32_t id) const { return words_.at(id); }

    std::uint32_t hashtag_count() const { return static_cast<std::uint32_t>(hashtags_.size()); }
    std::uint32_t word_count() const { return static_cast<std::uint32_t>(words_.size()); }

    void save(const std::string& hashtags_path, const std::string& words_path) const;
    static Vocabulary load(const std::string& hashtags_path, const std::string& words_path);

    friend class VocabularyBuilder;

private:
    std::vector<std::string> hashtags_;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::uint32_t> hashtag_ids_;
    std::unordered_map<std::string, std::uint32_t> word_ids_;

    void rebuild_indices();
};

// Streaming vocabulary construction: observe() every record, then
// finalize(min_df).
class VocabularyBuilder {
public:
    void observe(const VideoRecord& rec);
    Vocabulary finalize(std::int64_t min_df) const;

private:
    std::vector<std::string> hashtag_order_;
    std::unordered_map<std::string, std::int64_t> hashtag_df_;
    std::vector<std::string> word_order_;
    std::unordered_map<std::string, bool> word_seen_;
};

Vocabulary build_vocabulary(std::span<const VideoRecord> records, std::int64_t min_df = 2);

// hh: videos containing both tags (symmetric, zero diagonal).
// hw: videos containing the tag whose description contains the word.
// df: videos containing the tag.
struct SparseCooccurrence {
    SparseCountMatrix hashtag_hashtag;
    SparseCountMatrix hashtag_word;
    std::vector<std::int64_t> document_frequency;

    std::int64_t df(std::uint32_t hashtag_id) const { return document_frequency.at(hashtag_id); }

    void save(const std::string& dir) const;  // hh.mat, hw.mat, df.tab
    static SparseCooccurrence load(const std::string& dir);
    void export_csv(const std::string& dir) const;
};

// Streaming matrix construction over records; tags/words not in the
// vocabulary are ignored. Within one video, repeated tags and words count
// once.
class CooccurrenceBuilder {
public:
    explicit CooccurrenceBuilder(const Vocabulary& vocab);

    void add(const VideoRecord& rec);
    SparseCooccurrence finalize();

private:
    const Vocabulary& vocab_;
    SparseMatrixBuilder hh_;
    SparseMatrixBuilder hw_;
    std::vector<std::int64_t> df_;
    std::vector<std::uint32_t> tag_scratch_;
    std::vector<std::uint32_t> word_scratch_;
};

SparseCooccurrence build_matrices(std::span<const VideoRecord> records, const Vocabulary& vocab);

}  // namespace ctmine::cooc
