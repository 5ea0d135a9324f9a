#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ctmine/time_util.hpp"
#include "ctmine/video_record.hpp"

namespace ctmine::ingest {

// Shared daily request quota. used_today resets when the UTC date moves past
// day_anchor; it never exceeds max_requests_per_day.
struct QuotaBudget {
    std::int64_t max_requests_per_day = 1000;
    std::int64_t used_today = 0;
    CivilDate day_anchor{};

    bool exhausted() const { return used_today >= max_requests_per_day; }
};

struct FetchQuery {
    std::string region = "US";
    std::int64_t min_duration = 0;  // seconds
    std::string start_date;         // "YYYYMMDD"
    std::string end_date;
    bool randomized = true;
};

enum class FetchStatus {
    Complete,        // server reported no more pages
    QuotaExhausted,  // daily budget ran out mid-window
    PageCap,         // stopped at the max_pages safety cap
};

struct FetchResult {
    std::vector<VideoRecord> records;
    FetchStatus status = FetchStatus::Complete;
    std::int64_t requests_made = 0;
};

struct FetchOptions {
    int max_pages = 1000;  // safety cap; the API contract leaves paging open-ended
    int page_size = 100;
    int max_retries = 3;
    int backoff_ms = 100;
    std::string path = "/video/query";
    std::string token_env = "RESEARCH_API_TOKEN";
    std::ostream* audit = nullptr;  // request/response bodies, one JSON line each
    std::function<std::int64_t()> now;  // epoch seconds; defaults to wall clock
};

// Pages through the query window until the server reports the end, the page
// cap is reached, or the budget is exhausted. Every HTTP attempt (including
// retries) consumes one unit of budget. Requests go out strictly
// sequentially. Throws TransportError after max_retries failed retries of a
// transient error.
FetchResult fetch_window(const FetchQuery& query, QuotaBudget& budget,
                         const std::string& endpoint, const FetchOptions& opts = {});

}  // namespace ctmine::ingest
