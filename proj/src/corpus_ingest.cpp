#include "ctmine/corpus_ingest.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ctmine/csv.hpp"
#include "ctmine/log.hpp"

namespace ctmine::ingest {

using nlohmann::json;

const char* transcript_source_name(TranscriptSource s) {
    switch (s) {
        case TranscriptSource::None: return "none";
        case TranscriptSource::Native: return "native";
        case TranscriptSource::External: return "external";
    }
    return "none";
}

namespace {

// Lowercases, strips a leading '#'. Tags that come out empty or still carry
// whitespace are rejected.
bool normalize_hashtag(std::string tag, std::string& out) {
    if (!tag.empty() && tag.front() == '#') tag.erase(tag.begin());
    for (char& c : tag) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (tag.empty()) return false;
    for (unsigned char c : tag)
        if (std::isspace(c)) return false;
    out = std::move(tag);
    return true;
}

std::string id_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    throw std::invalid_argument("id is neither string nor integer");
}

}  // namespace

VideoRecord parse_record_json(const std::string& line) {
    json j = json::parse(line);  // throws json::parse_error on bad syntax
    if (!j.is_object()) throw std::invalid_argument("record is not a JSON object");

    VideoRecord rec;
    if (!j.contains("id")) throw std::invalid_argument("missing id");
    rec.video_id = id_to_string(j.at("id"));
    if (rec.video_id.empty()) throw std::invalid_argument("empty id");

    if (!j.contains("create_time")) throw std::invalid_argument("missing create_time");
    const auto& ct = j.at("create_time");
    if (ct.is_number())
        rec.create_time = ct.get<std::int64_t>();
    else if (ct.is_string())
        rec.create_time = std::stoll(ct.get<std::string>());
    else
        throw std::invalid_argument("bad create_time");

    rec.duration = j.value("video_duration", std::int64_t{0});
    if (rec.duration < 0) throw std::invalid_argument("negative duration");
    rec.description = j.value("video_description", std::string{});
    rec.region = j.value("region_code", std::string{});
    rec.username = j.value("username", std::string{});

    if (j.contains("hashtag_names") && j.at("hashtag_names").is_array()) {
        for (const auto& t : j.at("hashtag_names")) {
            if (!t.is_string()) continue;
            std::string norm;
            if (normalize_hashtag(t.get<std::string>(), norm)) rec.hashtags.push_back(std::move(norm));
        }
    }

    if (j.contains("voice_to_text") && j.at("voice_to_text").is_string()) {
        std::string vtt = j.at("voice_to_text").get<std::string>();
        if (!vtt.empty()) {
            rec.transcript = std::move(vtt);
            rec.transcript_source = TranscriptSource::Native;
        }
    }
    return rec;
}

std::string record_to_json(const VideoRecord& rec) {
    json j;
    j["id"] = rec.video_id;
    j["create_time"] = rec.create_time;
    j["video_duration"] = rec.duration;
    j["video_description"] = rec.description;
    j["hashtag_names"] = rec.hashtags;
    j["region_code"] = rec.region;
    if (!rec.username.empty()) j["username"] = rec.username;
    if (rec.transcript) j["voice_to_text"] = *rec.transcript;
    return j.dump();
}

JsonlCorpusReader::JsonlCorpusReader(const std::string& path) : path_(path) {
    auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file) throw std::runtime_error("cannot open corpus file: " + path);
    in_ = std::move(file);
}

bool JsonlCorpusReader::next(VideoRecord& out) {
    std::string line;
    while (std::getline(*in_, line)) {
        ++lines_read_;
        if (line.empty()) continue;
        try {
            out = parse_record_json(line);
            return true;
        } catch (const std::exception& e) {
            ++lines_skipped_;
            log::warn("skipping malformed corpus line",
                      {{"file", path_}, {"line", std::to_string(lines_read_)}, {"reason", e.what()}});
        }
    }
    return false;
}

LoadResult load_corpus(const std::string& path) {
    JsonlCorpusReader reader(path);
    LoadResult res;
    VideoRecord rec;
    while (reader.next(rec)) res.records.push_back(std::move(rec));
    res.skipped = reader.lines_skipped();
    if (res.skipped > 0)
        log::warn("corpus contained malformed lines",
                  {{"file", path}, {"skipped", std::to_string(res.skipped)}});
    return res;
}

std::int64_t attach_transcripts(std::vector<VideoRecord>& records, const std::string& csv_path) {
    const auto rows = csv::read_file(csv_path);
    std::unordered_map<std::string, std::string> by_id;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == 0 && !rows[i].empty() && rows[i][0] == "video_id") continue;  // header
        if (rows[i].size() < 2) continue;
        by_id[rows[i][0]] = rows[i][1];
    }
    std::int64_t attached = 0;
    for (auto& rec : records) {
        if (rec.transcript) continue;
        auto it = by_id.find(rec.video_id);
        if (it == by_id.end() || it->second.empty()) continue;
        rec.transcript = it->second;
        rec.transcript_source = TranscriptSource::External;
        ++attached;
    }
    return attached;
}

bool Deduplicator::insert(const VideoRecord& rec) {
    ++total_;
    if (!rec.username.empty()) users_.insert(rec.username);
    ++month_counts_[year_month_of(rec.create_time)][rec.video_id];
    return ++id_counts_[rec.video_id] == 1;
}

CorpusStats Deduplicator::finish() const {
    CorpusStats stats;
    stats.total = total_;
    stats.unique = static_cast<std::int64_t>(id_counts_.size());
    stats.duplicates = stats.total - stats.unique;
    stats.unique_users = static_cast<std::int64_t>(users_.size());
    for (const auto& [ym, ids] : month_counts_) {
        MonthlyCounts mc;
        mc.month = ym;
        for (const auto& [id, count] : ids) {
            mc.draws += count;
            mc.uniques += 1;
            if (count == 1) mc.singletons += 1;
        }
        stats.per_month[ym] = mc;
    }
    return stats;
}

std::pair<std::vector<VideoRecord>, CorpusStats> deduplicate(
    const std::vector<VideoRecord>& records) {
    Deduplicator dedup;
    std::vector<VideoRecord> unique;
    for (const auto& rec : records)
        if (dedup.insert(rec)) unique.push_back(rec);
    return {std::move(unique), dedup.finish()};
}

void write_stats_json(const CorpusStats& stats, std::int64_t skipped_lines,
                      const std::string& path) {
    json j;
    j["total"] = stats.total;
    j["unique"] = stats.unique;
    j["duplicates"] = stats.duplicates;
    j["unique_users"] = stats.unique_users;
    j["skipped_lines"] = skipped_lines;
    json months = json::object();
    for (const auto& [ym, mc] : stats.per_month) {
        months[format_year_month(ym)] = {
            {"draws", mc.draws}, {"uniques", mc.uniques}, {"singletons", mc.singletons}};
    }
    j["per_month"] = months;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stats file: " + path);
    out << j.dump(2) << '\n';
}

void TemporalHistograms::add(std::int64_t create_time) {
    const CivilTime t = civil_from_epoch(create_time);
    day_of_month[static_cast<std::size_t>(t.date.day - 1)] += 1;
    const std::int64_t days = days_from_civil(t.date.year, t.date.month, t.date.day);
    day_of_week[static_cast<std::size_t>(weekday_from_days(days))] += 1;
    hour_of_day[static_cast<std::size_t>(t.hour)] += 1;
    minute_of_hour[static_cast<std::size_t>(t.minute)] += 1;
}

std::int64_t TemporalHistograms::total() const {
    std::int64_t s = 0;
    for (auto v : hour_of_day) s += v;
    return s;
}

TemporalHistograms temporal_histograms(const std::vector<VideoRecord>& records) {
    TemporalHistograms h;
    for (const auto& rec : records) h.add(rec.create_time);
    return h;
}

namespace {

template <std::size_t N>
void write_histogram(const std::array<std::int64_t, N>& bins, int first_bin,
                     const std::string& path) {
    csv::Writer w(path);
    w.row({"bin", "count"});
    for (std::size_t i = 0; i < N; ++i)
        w.row({std::to_string(first_bin + static_cast<int>(i)), std::to_string(bins[i])});
}

}  // namespace

void write_histogram_csvs(const TemporalHistograms& h, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    write_histogram(h.day_of_month, 1, (fs::path(out_dir) / "hist_day_of_month.csv").string());
    write_histogram(h.day_of_week, 0, (fs::path(out_dir) / "hist_day_of_week.csv").string());
    write_histogram(h.hour_of_day, 0, (fs::path(out_dir) / "hist_hour_of_day.csv").string());
    write_histogram(h.minute_of_hour, 0,
                    (fs::path(out_dir) / "hist_minute_of_hour.csv").string());
}

}  // namespace ctmine::ingest
