#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ctmine/monthly_counts.hpp"
#include "ctmine/video_record.hpp"

namespace ctmine::ingest {

// --- JSONL parsing ----------------------------------------------------------

// Parses one JSONL line using the research-API field names: id, create_time,
// video_duration, video_description, hashtag_names, region_code,
// voice_to_text (plus optional username). Throws std::invalid_argument on a
// malformed line.
VideoRecord parse_record_json(const std::string& line);

std::string record_to_json(const VideoRecord& rec);

// Streams records out of a JSONL file; malformed lines are counted, warned
// with their line number, and skipped.
class JsonlCorpusReader {
public:
    explicit JsonlCorpusReader(const std::string& path);

    // Returns false at end of file.
    bool next(VideoRecord& out);

    std::int64_t lines_read() const { return lines_read_; }
    std::int64_t lines_skipped() const { return lines_skipped_; }

private:
    std::string path_;
    std::unique_ptr<std::istream> in_;
    std::int64_t lines_read_ = 0;
    std::int64_t lines_skipped_ = 0;
};

struct LoadResult {
    std::vector<VideoRecord> records;
    std::int64_t skipped = 0;
};

LoadResult load_corpus(const std::string& path);

// Attaches externally produced transcripts (CSV: video_id,transcript) to
// records that lack a native one; returns the number attached.
std::int64_t attach_transcripts(std::vector<VideoRecord>& records, const std::string& csv_path);

// --- deduplication ----------------------------------------------------------

struct CorpusStats {
    std::int64_t total = 0;       // draws seen (valid records)
    std::int64_t unique = 0;      // distinct video ids
    std::int64_t duplicates = 0;  // total - unique
    std::int64_t unique_users = 0;
    std::map<YearMonth, MonthlyCounts> per_month;
};

// Streaming first-occurrence-by-id filter that tallies CorpusStats as draws
// pass through. Month assignment uses the UTC calendar month of create_time;
// singletons are ids drawn exactly once within their month.
class Deduplicator {
public:
    // Returns true when the record is the first occurrence of its id.
    bool insert(const VideoRecord& rec);

    CorpusStats finish() const;

private:
    std::unordered_map<std::string, std::int64_t> id_counts_;
    std::map<YearMonth, std::unordered_map<std::string, std::int64_t>> month_counts_;
    std::unordered_set<std::string> users_;
    std::int64_t total_ = 0;
};

// Convenience wrapper over Deduplicator.
std::pair<std::vector<VideoRecord>, CorpusStats> deduplicate(
    const std::vector<VideoRecord>& records);

void write_stats_json(const CorpusStats& stats, std::int64_t skipped_lines,
                      const std::string& path);

// --- temporal histograms ------------------------------------------------------

struct TemporalHistograms {
    std::array<std::int64_t, 31> day_of_month{};   // bins 1..31 at index day-1
    std::array<std::int64_t, 7> day_of_week{};     // 0 = Monday
    std::array<std::int64_t, 24> hour_of_day{};    // UTC
    std::array<std::int64_t, 60> minute_of_hour{};

    void add(std::int64_t create_time);
    std::int64_t total() const;
};

TemporalHistograms temporal_histograms(const std::vector<VideoRecord>& records);

// One CSV per histogram: header "bin,count".
void write_histogram_csvs(const TemporalHistograms& h, const std::string& out_dir);

}  // namespace ctmine::ingest
