#include "ctmine/cooccurrence.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "ctmine/csv.hpp"

namespace ctmine::cooc {

namespace fs = std::filesystem;

std::vector<std::string> tokenize_description(std::string_view description,
                                              std::span<const std::string> own_hashtags) {
    std::unordered_set<std::string_view> own(own_hashtags.begin(), own_hashtags.end());
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.size() >= 2 && !own.contains(cur)) tokens.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : description) {
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

std::optional<std::uint32_t> Vocabulary::hashtag_id(std::string_view tag) const {
    auto it = hashtag_ids_.find(std::string(tag));
    if (it == hashtag_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::uint32_t> Vocabulary::word_id(std::string_view word) const {
    auto it = word_ids_.find(std::string(word));
    if (it == word_ids_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::rebuild_indices() {
    hashtag_ids_.clear();
    hashtag_ids_.reserve(hashtags_.size());
    for (std::uint32_t i = 0; i < hashtags_.size(); ++i) hashtag_ids_[hashtags_[i]] = i;
    word_ids_.clear();
    word_ids_.reserve(words_.size());
    for (std::uint32_t i = 0; i < words_.size(); ++i) word_ids_[words_[i]] = i;
}

void Vocabulary::save(const std::string& hashtags_path, const std::string& words_path) const {
    auto dump = [](const std::vector<std::string>& items, const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
        for (const auto& s : items) out << s << '\n';
    };
    dump(hashtags_, hashtags_path);
    dump(words_, words_path);
}

Vocabulary Vocabulary::load(const std::string& hashtags_path, const std::string& words_path) {
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read vocabulary file: " + path);
        std::vector<std::string> items;
        std::string line;
        while (std::getline(in, line)) items.push_back(line);
        return items;
    };
    Vocabulary v;
    v.hashtags_ = slurp(hashtags_path);
    v.words_ = slurp(words_path);
    v.rebuild_indices();
    return v;
}

void VocabularyBuilder::observe(const VideoRecord& rec) {
    std::unordered_set<std::string_view> seen_tags;
    for (const auto& tag : rec.hashtags) {
        if (!seen_tags.insert(tag).second) continue;  // df counts videos, not mentions
        auto [it, inserted] = hashtag_df_.try_emplace(tag, 0);
        if (inserted) hashtag_order_.push_back(tag);
        it->second += 1;
    }
    for (auto& word : tokenize_description(rec.description, rec.hashtags)) {
        auto [it, inserted] = word_seen_.try_emplace(std::move(word), true);
        if (inserted) word_order_.push_back(it->first);
    }
}

Vocabulary VocabularyBuilder::finalize(std::int64_t min_df) const {
    Vocabulary v;
    for (const auto& tag : hashtag_order_)
        if (hashtag_df_.at(tag) >= min_df) v.hashtags_.push_back(tag);
    v.words_ = word_order_;
    v.rebuild_indices();
    return v;
}

Vocabulary build_vocabulary(std::span<const VideoRecord> records, std::int64_t min_df) {
    VocabularyBuilder builder;
    for (const auto& rec : records) builder.observe(rec);
    return builder.finalize(min_df);
}

CooccurrenceBuilder::CooccurrenceBuilder(const Vocabulary& vocab)
    : vocab_(vocab),
      hh_(vocab.hashtag_count(), vocab.hashtag_count()),
      hw_(vocab.hashtag_count(), vocab.word_count()),
      df_(vocab.hashtag_count(), 0) {}

void CooccurrenceBuilder::add(const VideoRecord& rec) {
    auto& tags = tag_scratch_;
    tags.clear();
    for (const auto& tag : rec.hashtags)
        if (auto id = vocab_.hashtag_id(tag)) tags.push_back(*id);
    std::sort(tags.begin(), tags.end());
    tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    if (tags.empty()) return;

    auto& words = word_scratch_;
    words.clear();
    for (const auto& word : tokenize_description(rec.description, rec.hashtags))
        if (auto id = vocab_.word_id(word)) words.push_back(*id);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());

    for (std::size_t i = 0; i < tags.size(); ++i) {
        df_[tags[i]] += 1;
        for (std::size_t j = i + 1; j < tags.size(); ++j) {
            hh_.add(tags[i], tags[j]);
            hh_.add(tags[j], tags[i]);
        }
        for (std::uint32_t w : words) hw_.add(tags[i], w);
    }
}

SparseCooccurrence CooccurrenceBuilder::finalize() {
    SparseCooccurrence out;
    out.hashtag_hashtag = hh_.finalize();
    out.hashtag_word = hw_.finalize();
    out.document_frequency = std::move(df_);
    return out;
}

SparseCooccurrence build_matrices(std::span<const VideoRecord> records, const Vocabulary& vocab) {
    CooccurrenceBuilder builder(vocab);
    for (const auto& rec : records) builder.add(rec);
    return builder.finalize();
}

void SparseCooccurrence::save(const std::string& dir) const {
    fs::create_directories(dir);
    hashtag_hashtag.save((fs::path(dir) / "hh.mat").string());
    hashtag_word.save((fs::path(dir) / "hw.mat").string());
    std::ofstream out(fs::path(dir) / "df.tab", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write df table in " + dir);
    const std::uint64_t n = document_frequency.size();
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::int64_t v = document_frequency[i];
        out.write(reinterpret_cast<const char*>(&i), sizeof(i));
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

SparseCooccurrence SparseCooccurrence::load(const std::string& dir) {
    SparseCooccurrence c;
    c.hashtag_hashtag = SparseCountMatrix::load((fs::path(dir) / "hh.mat").string());
    c.hashtag_word = SparseCountMatrix::load((fs::path(dir) / "hw.mat").string());
    std::ifstream in(fs::path(dir) / "df.tab", std::ios::binary);
    if (!in) throw std::runtime_error("cannot read df table in " + dir);
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    c.document_frequency.assign(n, 0);
    for (std::uint64_t k = 0; k < n; ++k) {
        std::uint32_t id = 0;
        std::int64_t v = 0;
        in.read(reinterpret_cast<char*>(&id), sizeof(id));
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!in || id >= n) throw std::runtime_error("corrupt df table in " + dir);
        c.document_frequency[id] = v;
    }
    return c;
}

void SparseCooccurrence::export_csv(const std::string& dir) const {
    fs::create_directories(dir);
    hashtag_hashtag.export_csv((fs::path(dir) / "hh.csv").string());
    hashtag_word.export_csv((fs::path(dir) / "hw.csv").string());
    csv::Writer w((fs::path(dir) / "df.csv").string());
    w.row({"tag_id", "df"});
    for (std::size_t i = 0; i < document_frequency.size(); ++i)
        w.row({std::to_string(i), std::to_string(document_frequency[i])});
}

}  // namespace ctmine::cooc
