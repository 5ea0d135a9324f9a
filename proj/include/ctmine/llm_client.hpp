#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ctmine::classify {

enum class Label { Negative = 0, Positive = 1, Abstain = 2 };

const char* label_name(Label l);
Label parse_label_name(std::string_view name);  // throws std::invalid_argument

// The last standalone '0' or '1' token of the output decides the label
// (step-by-step answers put reasoning before the digit). No such token ->
// Abstain.
Label parse_label(std::string_view raw_output);

// Majority over three votes; Abstain counts as a negative vote.
Label majority_vote(const std::array<Label, 3>& votes);

struct ClassifierConfig {
    std::string name;      // model identifier sent to the endpoint
    std::string endpoint;  // "http://host:port[/path]" or "mock:<behavior>"
    double temperature = 0.0;
    std::int64_t seed = 0;
    int max_output_tokens = 256;
    int max_retries = 3;
    int backoff_ms = 100;
};

struct InvokeResult {
    std::string text;
    std::int64_t latency_ms = 0;
};

// Sends one chat-completion request {model, messages, temperature, seed,
// max_tokens} and returns the response text. "mock:" endpoints dispatch to
// the in-process deterministic mock and never touch the network. Transient
// failures (connect errors, 5xx) are retried up to max_retries with
// exponential backoff. Throws TransportError when retries are exhausted and
// ContextOverflow when the endpoint rejects the prompt as too long.
InvokeResult invoke(const ClassifierConfig& config, const std::string& prompt_text);

}  // namespace ctmine::classify
