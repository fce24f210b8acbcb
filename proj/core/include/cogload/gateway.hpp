#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "cogload/errors.hpp"

namespace cogload::gateway {

enum class ProviderKind { OpenAiChat, AnthropicMessages, GeminiGenerate, InProcessSim };

std::string_view to_string(ProviderKind kind);
ProviderKind provider_kind_from_string(const std::string& name);

struct RateLimit {
    int requests_per_minute = 600;
    int tokens_per_minute = 1000000;
};

struct ModelEndpoint {
    std::string id;
    ProviderKind kind = ProviderKind::InProcessSim;
    std::string base_url;
    std::string model_name;
    /// Name of the environment variable holding the credential. The secret
    /// itself is never stored in config or code.
    std::string credential_env;
    RateLimit rate_limit;
    int max_retries = 3;
    /// Registered handler name for InProcessSim endpoints.
    std::string sim_handler;

    bool hosted() const { return kind != ProviderKind::InProcessSim; }
    void validate() const;
};

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

enum class FinishReason { Stop, Length, Filtered, Error };
std::string_view to_string(FinishReason reason);

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_output_tokens = 4096;

    void validate() const;  // at least one user message, temperature in [0,2]
    static ChatRequest user(std::string content);
    const std::string& first_user_content() const;
};

struct ChatResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::Stop;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    bool usage_estimated = false;
    long latency_ms = 0;
};

/// ProviderError carrying the HTTP status (0 = no response at all).
/// 5xx and status 0 are treated as transient; 4xx are not.
class ProviderHttpError : public Error {
public:
    ProviderHttpError(int status, const std::string& body)
        : Error(ErrorCode::ProviderError, "HTTP " + std::to_string(status), body),
          status_(status) {}

    int status() const noexcept { return status_; }
    bool transient() const noexcept { return status_ == 0 || status_ >= 500; }

private:
    int status_;
};

/// Provider wire dialects as pure functions, so the formats are testable
/// without a network.
namespace wire {
std::string request_path(const ModelEndpoint& endpoint, const std::string& credential);
std::map<std::string, std::string> request_headers(const ModelEndpoint& endpoint,
                                                   const std::string& credential);
std::string build_request_body(const ModelEndpoint& endpoint, const ChatRequest& request);
/// Throws ProviderError when the body is not a recognizable success
/// envelope. Text extraction is whitespace-preserving.
ChatResponse parse_response_body(ProviderKind kind, const std::string& body);
}  // namespace wire

/// Injectable time source so retry/rate-limit behavior is testable.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::milliseconds now() = 0;
    virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

class SystemClock final : public Clock {
public:
    std::chrono::milliseconds now() override;
    void sleep_for(std::chrono::milliseconds duration) override;
};

class FakeClock final : public Clock {
public:
    std::chrono::milliseconds now() override { return now_; }
    void sleep_for(std::chrono::milliseconds duration) override { now_ += duration; }
    void advance(std::chrono::milliseconds duration) { now_ += duration; }

private:
    std::chrono::milliseconds now_{0};
};

using SimHandler = std::function<ChatResponse(const ChatRequest&)>;
/// Raw transport: one attempt against one endpoint. Tests swap this in to
/// script failures; the default performs an HTTP round trip.
using Transport = std::function<ChatResponse(const ModelEndpoint&, const ChatRequest&)>;

/// Uniform chat-completion front door: normalizes provider dialects,
/// retries transient failures with exponential backoff (base 1s, cap 60s,
/// jittered), and enforces per-endpoint request/token budgets over a
/// sliding 60-second window.
class Gateway {
public:
    explicit Gateway(std::shared_ptr<Clock> clock = std::make_shared<SystemClock>(),
                     std::uint32_t jitter_seed = 0x5eed);

    void register_endpoint(ModelEndpoint endpoint);
    void register_sim(const std::string& handler_name, SimHandler handler);
    void set_transport(const std::string& endpoint_id, Transport transport);

    bool has_endpoint(const std::string& id) const;
    const ModelEndpoint& endpoint(const std::string& id) const;
    std::vector<std::string> endpoint_ids() const;

    ChatResponse complete(const std::string& endpoint_id, const ChatRequest& request);
    ChatResponse complete(const ModelEndpoint& endpoint, const ChatRequest& request);

    /// Dispatch timestamps recorded by the rate limiter (test hook).
    std::vector<std::chrono::milliseconds> dispatch_times(const std::string& endpoint_id) const;

private:
    struct Limiter {
        std::deque<std::pair<std::chrono::milliseconds, std::size_t>> window;
        std::vector<std::chrono::milliseconds> history;
    };

    ChatResponse attempt(const ModelEndpoint& endpoint, const ChatRequest& request);
    void wait_for_budget(const ModelEndpoint& endpoint, std::size_t request_tokens);
    std::chrono::milliseconds backoff_delay(int attempt);

    std::shared_ptr<Clock> clock_;
    std::mt19937 jitter_;
    mutable std::mutex mutex_;
    std::map<std::string, ModelEndpoint> endpoints_;
    std::map<std::string, SimHandler> sims_;
    std::map<std::string, Transport> transports_;
    std::map<std::string, Limiter> limiters_;
};

}  // namespace cogload::gateway
