#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace ctmine::classify {

// Deterministic stand-in for a chat endpoint. The decision depends only on
// the model name and the transcript (seed and temperature are ignored), so
// repeated sweeps are bit-reproducible.
//
// Behaviors:
//   plain      - answers "1" or "0"
//   verbose    - same decision wrapped in step-by-step prose ending
//                "output = X"
//   noisy<P>   - flips the marker decision for a deterministic P% of
//                (model, transcript) pairs
//   abstain    - always returns unparseable text
//
// Transcripts may plant their intended answer with "[label:1]" / "[label:0]";
// otherwise the decision is a hash parity.
std::string mock_response(std::string_view behavior, std::string_view model,
                          std::string_view prompt_text);

// The transcript portion of a rendered prompt (after the header); the whole
// prompt when no header is present.
std::string_view transcript_of_prompt(std::string_view prompt_text);

// Bundled HTTP mock implementing the chat endpoint protocol on
// POST <path>: request {model, messages, temperature, seed, max_tokens},
// response {"text": ...}. Supports failing the first N requests with 500 and
// rejecting prompts over a context limit with {"error":"context_overflow"}.
class MockLlmServer {
public:
    struct Options {
        std::string behavior = "plain";
        std::string path = "/v1/chat";
        int port = 0;                   // 0 = pick an ephemeral port
        int fail_first = 0;             // 500s before the first success
        std::size_t context_limit = 0;  // 0 = unlimited, in prompt bytes
    };

    MockLlmServer() : MockLlmServer(Options{}) {}
    explicit MockLlmServer(Options opts);
    ~MockLlmServer();

    MockLlmServer(const MockLlmServer&) = delete;
    MockLlmServer& operator=(const MockLlmServer&) = delete;

    // Binds an ephemeral localhost port and serves from a background thread.
    int start();
    void stop();

    int port() const { return port_; }
    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::int64_t requests_seen() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace ctmine::classify
