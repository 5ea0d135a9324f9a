#include "ctmine/research_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ctmine/corpus_ingest.hpp"
#include "ctmine/errors.hpp"
#include "ctmine/log.hpp"

namespace ctmine::ingest {

using nlohmann::json;

namespace {

std::int64_t wall_clock_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void roll_day(QuotaBudget& budget, std::int64_t now_epoch) {
    const CivilDate today = civil_from_epoch(now_epoch).date;
    if (today.year != budget.day_anchor.year || today.month != budget.day_anchor.month ||
        today.day != budget.day_anchor.day) {
        budget.day_anchor = today;
        budget.used_today = 0;
    }
}

void audit_line(std::ostream* audit, const json& record) {
    if (!audit) return;
    *audit << record.dump() << '\n';
    audit->flush();
}

}  // namespace

FetchResult fetch_window(const FetchQuery& query, QuotaBudget& budget,
                         const std::string& endpoint, const FetchOptions& opts) {
    httplib::Client client(endpoint);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);

    httplib::Headers headers;
    if (const char* token = std::getenv(opts.token_env.c_str()); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);

    const auto now = opts.now ? opts.now : wall_clock_seconds;

    FetchResult result;
    std::int64_t cursor = 0;
    for (int page = 0; page < opts.max_pages; ++page) {
        json body = {
            {"query", {{"region_code", query.region}, {"min_duration", query.min_duration}}},
            {"start_date", query.start_date},
            {"end_date", query.end_date},
            {"is_random", query.randomized},
            {"max_count", opts.page_size},
            {"cursor", cursor},
        };
        const std::string body_str = body.dump();

        httplib::Result resp;
        bool sent = false;
        for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
            roll_day(budget, now());
            if (budget.exhausted()) {
                result.status = FetchStatus::QuotaExhausted;
                return result;
            }
            budget.used_today += 1;
            result.requests_made += 1;

            audit_line(opts.audit, {{"direction", "request"},
                                    {"path", opts.path},
                                    {"attempt", attempt},
                                    {"body", body}});
            resp = client.Post(opts.path, headers, body_str, "application/json");

            if (resp && resp->status < 500) {
                audit_line(opts.audit, {{"direction", "response"},
                                        {"status", resp->status},
                                        {"body", resp->body}});
                sent = true;
                break;
            }
            audit_line(opts.audit,
                       {{"direction", "response"},
                        {"status", resp ? resp->status : 0},
                        {"error", resp ? "server error" : httplib::to_string(resp.error())}});
            if (attempt < opts.max_retries)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(opts.backoff_ms << attempt));
        }
        if (!sent)
            throw TransportError("fetch_window: transport failed after " +
                                 std::to_string(opts.max_retries) + " retries");
        if (resp->status != 200)
            throw TransportError("fetch_window: HTTP " + std::to_string(resp->status));

        json payload;
        try {
            payload = json::parse(resp->body);
        } catch (const std::exception& e) {
            throw TransportError(std::string("fetch_window: malformed response: ") + e.what());
        }
        const json& data = payload.contains("data") ? payload.at("data") : payload;
        if (data.contains("videos") && data.at("videos").is_array()) {
            for (const auto& v : data.at("videos")) {
                try {
                    result.records.push_back(parse_record_json(v.dump()));
                } catch (const std::exception& e) {
                    log::warn("skipping malformed fetched record", {{"reason", e.what()}});
                }
            }
        }
        const bool has_more = data.value("has_more", false);
        cursor = data.value("cursor", cursor);
        if (!has_more) {
            result.status = FetchStatus::Complete;
            return result;
        }
    }
    result.status = FetchStatus::PageCap;
    return result;
}

}  // namespace ctmine::ingest
