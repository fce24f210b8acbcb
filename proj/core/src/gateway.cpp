#include "cogload/gateway.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cogload/text.hpp"
#include "cogload/tokenize.hpp"

namespace cogload::gateway {

using nlohmann::json;

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::OpenAiChat: return "openai";
        case ProviderKind::AnthropicMessages: return "anthropic";
        case ProviderKind::GeminiGenerate: return "gemini";
        case ProviderKind::InProcessSim: return "sim";
    }
    return "?";
}

ProviderKind provider_kind_from_string(const std::string& name) {
    if (name == "openai") return ProviderKind::OpenAiChat;
    if (name == "anthropic") return ProviderKind::AnthropicMessages;
    if (name == "gemini") return ProviderKind::GeminiGenerate;
    if (name == "sim") return ProviderKind::InProcessSim;
    raise(ErrorCode::UsageError, "unknown provider kind: " + name);
}

std::string_view to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::Stop: return "stop";
        case FinishReason::Length: return "length";
        case FinishReason::Filtered: return "filtered";
        case FinishReason::Error: return "error";
    }
    return "?";
}

void ModelEndpoint::validate() const {
    if (id.empty()) raise(ErrorCode::UsageError, "endpoint id is empty");
    if (rate_limit.requests_per_minute <= 0 || rate_limit.tokens_per_minute <= 0) {
        raise(ErrorCode::UsageError, "rate limits must be positive: " + id);
    }
    if (max_retries < 0) raise(ErrorCode::UsageError, "max_retries negative: " + id);
    if (hosted() && base_url.empty()) {
        raise(ErrorCode::UsageError, "hosted endpoint without base_url: " + id);
    }
}

void ChatRequest::validate() const {
    bool has_user = false;
    for (const auto& message : messages) {
        if (message.role == "user") has_user = true;
    }
    if (!has_user) raise(ErrorCode::UsageError, "request has no user message");
    if (temperature < 0.0 || temperature > 2.0) {
        raise(ErrorCode::UsageError, "temperature outside [0, 2]");
    }
    if (max_output_tokens <= 0) {
        raise(ErrorCode::UsageError, "max_output_tokens must be positive");
    }
}

ChatRequest ChatRequest::user(std::string content) {
    ChatRequest request;
    request.messages.push_back({"user", std::move(content)});
    return request;
}

const std::string& ChatRequest::first_user_content() const {
    for (const auto& message : messages) {
        if (message.role == "user") return message.content;
    }
    raise(ErrorCode::UsageError, "request has no user message");
}

// ---------------------------------------------------------------------------
// Wire dialects

namespace wire {

std::string request_path(const ModelEndpoint& endpoint, const std::string& credential) {
    switch (endpoint.kind) {
        case ProviderKind::OpenAiChat:
            return "/chat/completions";
        case ProviderKind::AnthropicMessages:
            return "/messages";
        case ProviderKind::GeminiGenerate:
            return "/models/" + endpoint.model_name +
                   ":generateContent?key=" + credential;
        case ProviderKind::InProcessSim:
            break;
    }
    raise(ErrorCode::UsageError, "sim endpoints have no wire path");
}

std::map<std::string, std::string> request_headers(const ModelEndpoint& endpoint,
                                                   const std::string& credential) {
    switch (endpoint.kind) {
        case ProviderKind::OpenAiChat:
            return {{"Authorization", "Bearer " + credential}};
        case ProviderKind::AnthropicMessages:
            return {{"x-api-key", credential},
                    {"anthropic-version", "2023-06-01"}};
        case ProviderKind::GeminiGenerate:
            return {};  // credential travels in the query string
        case ProviderKind::InProcessSim:
            break;
    }
    raise(ErrorCode::UsageError, "sim endpoints have no wire headers");
}

std::string build_request_body(const ModelEndpoint& endpoint,
                               const ChatRequest& request) {
    switch (endpoint.kind) {
        case ProviderKind::OpenAiChat: {
            json body;
            body["model"] = endpoint.model_name;
            body["temperature"] = request.temperature;
            body["max_tokens"] = request.max_output_tokens;
            body["messages"] = json::array();
            for (const auto& message : request.messages) {
                body["messages"].push_back(
                    {{"role", message.role}, {"content", message.content}});
            }
            return body.dump();
        }
        case ProviderKind::AnthropicMessages: {
            json body;
            body["model"] = endpoint.model_name;
            body["temperature"] = request.temperature;
            body["max_tokens"] = request.max_output_tokens;
            body["messages"] = json::array();
            std::string system;
            for (const auto& message : request.messages) {
                if (message.role == "system") {
                    system += (system.empty() ? "" : "\n") + message.content;
                    continue;
                }
                body["messages"].push_back(
                    {{"role", message.role}, {"content", message.content}});
            }
            if (!system.empty()) body["system"] = system;
            return body.dump();
        }
        case ProviderKind::GeminiGenerate: {
            json body;
            body["contents"] = json::array();
            for (const auto& message : request.messages) {
                if (message.role == "system") {
                    body["systemInstruction"] = {
                        {"parts", json::array({{{"text", message.content}}})}};
                    continue;
                }
                std::string role = message.role == "assistant" ? "model" : "user";
                body["contents"].push_back(
                    {{"role", role},
                     {"parts", json::array({{{"text", message.content}}})}});
            }
            body["generationConfig"] = {
                {"temperature", request.temperature},
                {"maxOutputTokens", request.max_output_tokens}};
            return body.dump();
        }
        case ProviderKind::InProcessSim:
            break;
    }
    raise(ErrorCode::UsageError, "sim endpoints have no wire body");
}

namespace {

FinishReason map_finish(const std::string& raw) {
    if (raw == "stop" || raw == "end_turn" || raw == "STOP" || raw.empty()) {
        return FinishReason::Stop;
    }
    if (raw == "length" || raw == "max_tokens" || raw == "MAX_TOKENS") {
        return FinishReason::Length;
    }
    if (raw == "content_filter" || raw == "SAFETY" || raw == "refusal") {
        return FinishReason::Filtered;
    }
    return FinishReason::Error;
}

json parse_json(const std::string& body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) {
        throw ProviderHttpError(0, "response body is not JSON: " + body);
    }
    return parsed;
}

}  // namespace

ChatResponse parse_response_body(ProviderKind kind, const std::string& body) {
    json parsed = parse_json(body);
    ChatResponse response;
    switch (kind) {
        case ProviderKind::OpenAiChat: {
            if (!parsed.contains("choices") || parsed["choices"].empty()) {
                throw ProviderHttpError(0, body);
            }
            const auto& choice = parsed["choices"][0];
            response.text = choice["message"].value("content", "");
            response.finish_reason = map_finish(choice.value("finish_reason", "stop"));
            if (parsed.contains("usage")) {
                response.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
                response.completion_tokens =
                    parsed["usage"].value("completion_tokens", 0);
            }
            return response;
        }
        case ProviderKind::AnthropicMessages: {
            if (!parsed.contains("content")) throw ProviderHttpError(0, body);
            for (const auto& block : parsed["content"]) {
                if (block.value("type", "text") == "text") {
                    response.text += block.value("text", "");
                }
            }
            response.finish_reason = map_finish(parsed.value("stop_reason", "end_turn"));
            if (parsed.contains("usage")) {
                response.prompt_tokens = parsed["usage"].value("input_tokens", 0);
                response.completion_tokens = parsed["usage"].value("output_tokens", 0);
            }
            return response;
        }
        case ProviderKind::GeminiGenerate: {
            if (!parsed.contains("candidates") || parsed["candidates"].empty()) {
                throw ProviderHttpError(0, body);
            }
            const auto& candidate = parsed["candidates"][0];
            if (candidate.contains("content") && candidate["content"].contains("parts")) {
                for (const auto& part : candidate["content"]["parts"]) {
                    response.text += part.value("text", "");
                }
            }
            response.finish_reason = map_finish(candidate.value("finishReason", "STOP"));
            if (parsed.contains("usageMetadata")) {
                response.prompt_tokens =
                    parsed["usageMetadata"].value("promptTokenCount", 0);
                response.completion_tokens =
                    parsed["usageMetadata"].value("candidatesTokenCount", 0);
            }
            return response;
        }
        case ProviderKind::InProcessSim:
            break;
    }
    raise(ErrorCode::UsageError, "sim endpoints have no wire responses");
}

}  // namespace wire

// ---------------------------------------------------------------------------
// Clocks

std::chrono::milliseconds SystemClock::now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(std::chrono::milliseconds duration) {
    std::this_thread::sleep_for(duration);
}

// ---------------------------------------------------------------------------
// Gateway

namespace {

std::string resolve_credential(const ModelEndpoint& endpoint) {
    if (endpoint.credential_env.empty()) {
        raise(ErrorCode::AuthError, "no credential_env configured for " + endpoint.id);
    }
    const char* value = std::getenv(endpoint.credential_env.c_str());
    if (!value || !*value) {
        raise(ErrorCode::AuthError,
              "environment variable " + endpoint.credential_env + " is not set");
    }
    return value;
}

// Splits "https://host:port/prefix" into client target and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        raise(ErrorCode::UsageError, "base_url missing scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    return {base_url.substr(0, path_start), base_url.substr(path_start)};
}

ChatResponse http_round_trip(const ModelEndpoint& endpoint, const ChatRequest& request) {
    std::string credential = resolve_credential(endpoint);
    auto [client_target, path_prefix] = split_base_url(endpoint.base_url);

    httplib::Client client(client_target);
    client.set_connection_timeout(std::chrono::seconds(15));
    client.set_read_timeout(std::chrono::seconds(180));
    client.set_write_timeout(std::chrono::seconds(30));

    httplib::Headers headers;
    for (const auto& [key, value] : wire::request_headers(endpoint, credential)) {
        headers.emplace(key, value);
    }
    std::string path = path_prefix + wire::request_path(endpoint, credential);
    std::string body = wire::build_request_body(endpoint, request);

    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
        auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
            err == httplib::Error::Write) {
            raise(ErrorCode::Timeout, "no response from " + endpoint.id);
        }
        throw ProviderHttpError(0, httplib::to_string(err));
    }
    if (result->status == 401 || result->status == 403) {
        raise(ErrorCode::AuthError,
              "provider rejected credentials (" + std::to_string(result->status) + ")");
    }
    if (result->status == 429) {
        raise(ErrorCode::RateLimited, "provider rate limit hit for " + endpoint.id);
    }
    if (result->status < 200 || result->status >= 300) {
        throw ProviderHttpError(result->status, result->body);
    }
    return wire::parse_response_body(endpoint.kind, result->body);
}

bool is_transient(const Error& error) {
    if (error.code() == ErrorCode::RateLimited || error.code() == ErrorCode::Timeout) {
        return true;
    }
    if (const auto* http = dynamic_cast<const ProviderHttpError*>(&error)) {
        return http->transient();
    }
    return false;
}

}  // namespace

Gateway::Gateway(std::shared_ptr<Clock> clock, std::uint32_t jitter_seed)
    : clock_(std::move(clock)), jitter_(jitter_seed) {}

void Gateway::register_endpoint(ModelEndpoint endpoint) {
    endpoint.validate();
    std::lock_guard lock(mutex_);
    endpoints_[endpoint.id] = std::move(endpoint);
}

void Gateway::register_sim(const std::string& handler_name, SimHandler handler) {
    std::lock_guard lock(mutex_);
    sims_[handler_name] = std::move(handler);
}

void Gateway::set_transport(const std::string& endpoint_id, Transport transport) {
    std::lock_guard lock(mutex_);
    transports_[endpoint_id] = std::move(transport);
}

bool Gateway::has_endpoint(const std::string& id) const {
    std::lock_guard lock(mutex_);
    return endpoints_.count(id) != 0;
}

const ModelEndpoint& Gateway::endpoint(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = endpoints_.find(id);
    if (it == endpoints_.end()) {
        raise(ErrorCode::UsageError, "unknown endpoint: " + id);
    }
    return it->second;
}

std::vector<std::string> Gateway::endpoint_ids() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : endpoints_) out.push_back(id);
    return out;
}

ChatResponse Gateway::complete(const std::string& endpoint_id,
                               const ChatRequest& request) {
    return complete(endpoint(endpoint_id), request);
}

ChatResponse Gateway::complete(const ModelEndpoint& endpoint,
                               const ChatRequest& request) {
    endpoint.validate();
    request.validate();

    std::size_t request_tokens = 0;
    for (const auto& message : request.messages) {
        request_tokens += metrics::count_tokens(message.content, "whitespace");
    }

    int attempt_index = 0;
    for (;;) {
        wait_for_budget(endpoint, request_tokens);
        auto started = clock_->now();
        try {
            ChatResponse response = attempt(endpoint, request);
            response.latency_ms = (clock_->now() - started).count();
            if (response.completion_tokens == 0 && !response.text.empty()) {
                response.completion_tokens =
                    metrics::count_tokens(response.text, "whitespace");
                response.usage_estimated = true;
            }
            if (response.prompt_tokens == 0) {
                response.prompt_tokens = request_tokens;
                response.usage_estimated = true;
            }
            return response;
        } catch (const Error& error) {
            if (!is_transient(error) || attempt_index >= endpoint.max_retries) {
                throw;
            }
            clock_->sleep_for(backoff_delay(attempt_index));
            ++attempt_index;
        }
    }
}

ChatResponse Gateway::attempt(const ModelEndpoint& endpoint,
                              const ChatRequest& request) {
    Transport transport;
    SimHandler sim;
    {
        std::lock_guard lock(mutex_);
        auto custom = transports_.find(endpoint.id);
        if (custom != transports_.end()) {
            transport = custom->second;
        } else if (endpoint.kind == ProviderKind::InProcessSim) {
            std::string name =
                endpoint.sim_handler.empty() ? endpoint.id : endpoint.sim_handler;
            auto handler = sims_.find(name);
            if (handler == sims_.end()) {
                raise(ErrorCode::UsageError, "no sim handler registered: " + name);
            }
            sim = handler->second;
        }
    }
    if (transport) return transport(endpoint, request);
    if (sim) return sim(request);
    return http_round_trip(endpoint, request);
}

void Gateway::wait_for_budget(const ModelEndpoint& endpoint,
                              std::size_t request_tokens) {
    using std::chrono::milliseconds;
    const milliseconds window{60000};
    for (;;) {
        milliseconds wait{0};
        {
            std::lock_guard lock(mutex_);
            Limiter& limiter = limiters_[endpoint.id];
            milliseconds now = clock_->now();
            while (!limiter.window.empty() &&
                   limiter.window.front().first + window <= now) {
                limiter.window.pop_front();
            }
            std::size_t tokens_in_window = 0;
            for (const auto& [_, tokens] : limiter.window) tokens_in_window += tokens;

            bool over_requests =
                limiter.window.size() >=
                static_cast<std::size_t>(endpoint.rate_limit.requests_per_minute);
            bool over_tokens =
                !limiter.window.empty() &&
                tokens_in_window + request_tokens >
                    static_cast<std::size_t>(endpoint.rate_limit.tokens_per_minute);
            if (!over_requests && !over_tokens) {
                limiter.window.emplace_back(now, request_tokens);
                limiter.history.push_back(now);
                return;
            }
            wait = limiter.window.front().first + window - now;
        }
        if (wait.count() <= 0) wait = milliseconds{1};
        clock_->sleep_for(wait);
    }
}

std::chrono::milliseconds Gateway::backoff_delay(int attempt) {
    long base_ms = 1000;
    for (int i = 0; i < attempt && base_ms < 60000; ++i) base_ms *= 2;
    if (base_ms > 60000) base_ms = 60000;
    double factor;
    {
        std::lock_guard lock(mutex_);
        factor = 0.5 + std::uniform_real_distribution<double>(0.0, 0.5)(jitter_);
    }
    return std::chrono::milliseconds(static_cast<long>(base_ms * factor));
}

std::vector<std::chrono::milliseconds> Gateway::dispatch_times(
    const std::string& endpoint_id) const {
    std::lock_guard lock(mutex_);
    auto it = limiters_.find(endpoint_id);
    if (it == limiters_.end()) return {};
    return it->second.history;
}

}  // namespace cogload::gateway
