#include "ctmine/llm_client.hpp"

#include <cctype>
#include <chrono>
#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ctmine/errors.hpp"
#include "ctmine/mock_llm.hpp"

namespace ctmine::classify {

using nlohmann::json;

const char* label_name(Label l) {
    switch (l) {
        case Label::Negative: return "0";
        case Label::Positive: return "1";
        case Label::Abstain: return "abstain";
    }
    return "abstain";
}

Label parse_label_name(std::string_view name) {
    if (name == "0") return Label::Negative;
    if (name == "1") return Label::Positive;
    if (name == "abstain") return Label::Abstain;
    throw std::invalid_argument("unknown label: " + std::string(name));
}

Label parse_label(std::string_view raw_output) {
    Label last = Label::Abstain;
    std::size_t i = 0;
    const std::size_t n = raw_output.size();
    while (i < n) {
        while (i < n && !std::isalnum(static_cast<unsigned char>(raw_output[i]))) ++i;
        const std::size_t start = i;
        while (i < n && std::isalnum(static_cast<unsigned char>(raw_output[i]))) ++i;
        if (i - start == 1) {
            if (raw_output[start] == '0') last = Label::Negative;
            else if (raw_output[start] == '1') last = Label::Positive;
        }
    }
    return last;
}

Label majority_vote(const std::array<Label, 3>& votes) {
    int positives = 0;
    for (Label v : votes)
        if (v == Label::Positive) ++positives;  // abstain counts negative
    return positives >= 2 ? Label::Positive : Label::Negative;
}

namespace {

// "http://host:port/some/path" -> {"http://host:port", "/some/path"}
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = endpoint.find('/', host_start);
    if (path_start == std::string::npos) return {endpoint, "/v1/chat"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

InvokeResult invoke(const ClassifierConfig& config, const std::string& prompt_text) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&t0] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };

    if (config.endpoint.starts_with("mock:")) {
        const std::string behavior = config.endpoint.substr(5);
        std::string text = mock_response(behavior, config.name, prompt_text);
        return {std::move(text), elapsed_ms()};
    }

    const auto [base, path] = split_endpoint(config.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);

    const json body = {
        {"model", config.name},
        {"messages", json::array({{{"role", "user"}, {"content", prompt_text}}})},
        {"temperature", config.temperature},
        {"seed", config.seed},
        {"max_tokens", config.max_output_tokens},
    };
    const std::string body_str = body.dump();

    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        auto resp = client.Post(path, body_str, "application/json");
        if (resp && resp->status < 500) {
            if (resp->status == 200) {
                json payload;
                try {
                    payload = json::parse(resp->body);
                } catch (const std::exception& e) {
                    throw TransportError(std::string("invoke: malformed response: ") + e.what());
                }
                return {payload.value("text", std::string{}), elapsed_ms()};
            }
            // 4xx: inspect for a context-window rejection, otherwise fatal
            if (resp->body.find("context_overflow") != std::string::npos ||
                resp->status == 413)
                throw ContextOverflow("invoke: prompt exceeds the model context window");
            throw TransportError("invoke: HTTP " + std::to_string(resp->status));
        }
        if (attempt < config.max_retries)
            std::this_thread::sleep_for(std::chrono::milliseconds(config.backoff_ms << attempt));
    }
    throw TransportError("invoke: transport failed after " + std::to_string(config.max_retries) +
                         " retries");
}

}  // namespace ctmine::classify
