#include "ctmine/mock_llm.hpp"

#include <stdexcept>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace ctmine::classify {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string_view transcript_of_prompt(std::string_view prompt_text) {
    constexpr std::string_view header = "Transcription:\n";
    const auto pos = prompt_text.rfind(header);
    if (pos == std::string_view::npos) return prompt_text;
    return prompt_text.substr(pos + header.size());
}

std::string mock_response(std::string_view behavior, std::string_view model,
                          std::string_view prompt_text) {
    if (behavior == "abstain") return "I cannot help with that.";

    const std::string_view transcript = transcript_of_prompt(prompt_text);

    int decision;
    if (transcript.find("[label:1]") != std::string_view::npos) {
        decision = 1;
    } else if (transcript.find("[label:0]") != std::string_view::npos) {
        decision = 0;
    } else {
        decision = static_cast<int>(fnv1a(std::string(model) + "|" + std::string(transcript)) & 1u);
    }

    if (behavior.starts_with("noisy")) {
        int percent = 10;
        if (behavior.size() > 5) percent = std::stoi(std::string(behavior.substr(5)));
        const std::uint64_t h =
            fnv1a(std::string("flip|") + std::string(model) + "|" + std::string(transcript));
        if (static_cast<int>(h % 100) < percent) decision = 1 - decision;
    }

    if (behavior == "verbose" || behavior.starts_with("noisy")) {
        std::string out = "First, the narrative of the text was examined. Second, the claim was ";
        out += decision == 1 ? "found to match a conspiracy narrative." : "found to be ordinary content.";
        out += " Third: output = ";
        out += decision == 1 ? '1' : '0';
        return out;
    }
    return decision == 1 ? "1" : "0";
}

struct MockLlmServer::Impl {
    Options opts;
    httplib::Server server;
    std::thread thread;
    std::atomic<std::int64_t> requests{0};
    std::atomic<int> failures_left{0};
};

MockLlmServer::MockLlmServer(Options opts) : impl_(std::make_unique<Impl>()) {
    impl_->opts = std::move(opts);
    impl_->failures_left = impl_->opts.fail_first;
}

MockLlmServer::~MockLlmServer() { stop(); }

int MockLlmServer::start() {
    auto* impl = impl_.get();
    impl->server.Post(impl->opts.path, [impl](const httplib::Request& req,
                                              httplib::Response& res) {
        impl->requests.fetch_add(1);
        if (impl->failures_left.load() > 0) {
            impl->failures_left.fetch_sub(1);
            res.status = 500;
            res.set_content("{\"error\":\"transient\"}", "application/json");
            return;
        }
        json body;
        try {
            body = json::parse(req.body);
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"bad_json\"}", "application/json");
            return;
        }
        std::string prompt;
        if (body.contains("messages") && body.at("messages").is_array() &&
            !body.at("messages").empty())
            prompt = body.at("messages").back().value("content", std::string{});
        if (impl->opts.context_limit > 0 && prompt.size() > impl->opts.context_limit) {
            res.status = 400;
            res.set_content("{\"error\":\"context_overflow\"}", "application/json");
            return;
        }
        const std::string model = body.value("model", std::string{});
        json out;
        out["text"] = mock_response(impl->opts.behavior, model, prompt);
        res.set_content(out.dump(), "application/json");
    });

    if (impl->opts.port > 0) {
        if (!impl->server.bind_to_port("127.0.0.1", impl->opts.port))
            throw std::runtime_error("mock server: cannot bind port " +
                                     std::to_string(impl->opts.port));
        port_ = impl->opts.port;
    } else {
        port_ = impl->server.bind_to_any_port("127.0.0.1");
    }
    if (port_ <= 0) throw std::runtime_error("mock server: cannot bind a port");
    impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
    impl->server.wait_until_ready();
    return port_;
}

void MockLlmServer::stop() {
    if (!impl_) return;
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::int64_t MockLlmServer::requests_seen() const { return impl_->requests.load(); }

}  // namespace ctmine::classify
