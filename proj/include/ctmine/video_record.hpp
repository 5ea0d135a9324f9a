#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctmine::ingest {

enum class TranscriptSource { None, Native, External };

// One video's metadata. Hashtags are lowercase, no leading '#', no
// whitespace. transcript_source == None iff transcript is absent.
struct VideoRecord {
    std::string video_id;
    std::int64_t create_time = 0;  // UTC epoch seconds
    std::int64_t duration = 0;     // seconds, >= 0
    std::string description;
    std::vector<std::string> hashtags;
    std::string region;
    std::string username;  // may be empty; feeds the unique-user tally
    std::optional<std::string> transcript;
    TranscriptSource transcript_source = TranscriptSource::None;

    bool valid() const {
        return !video_id.empty() && duration >= 0 &&
               (transcript.has_value() != (transcript_source == TranscriptSource::None));
    }
};

const char* transcript_source_name(TranscriptSource s);

}  // namespace ctmine::ingest
