#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogload/gateway.hpp"
#include "cogload/obfuscation.hpp"

namespace cogload::sim {

/// Behavior knobs for the deterministic target-model stand-in. The model
/// answers rendered load prompts section by section; answer completeness
/// degrades as the prompt's load tokens approach `capacity`, and flagged
/// topics are refused below `refusal_until_level`.
struct MockModelProfile {
    std::string id = "sim";
    std::size_t capacity = 6000;
    int refusal_until_level = 0;
    double quality_floor = 0.05;
    std::vector<std::string> flagged_topics;
    /// Prompt fingerprint (text::fnv1a_hex of the rendered prompt) to a
    /// canned reply; overrides the generative rule.
    std::map<std::string, std::string> script;
    std::string tokenizer_id = "whitespace";
    prompt::ObfuscationScheme scheme;

    void validate() const;  // capacity > 0, quality_floor in [0,1]
};

inline constexpr const char* kRefusalText = "I cannot help with that request.";

/// Deterministic target simulator. Parses the rendered prompt the way a
/// cooperative model would (task list, output format, hidden instruction
/// or song), emits one section per expected label, and scales every
/// section's completeness by q = max(quality_floor, 1 - cl_tokens /
/// capacity). Prompts it cannot parse get an unlabeled ramble.
class MockModel {
public:
    explicit MockModel(MockModelProfile profile);

    gateway::ChatResponse operator()(const gateway::ChatRequest& request) const;
    gateway::ChatResponse respond(const std::string& prompt_text) const;

    /// The degradation rule, exposed for tests.
    double quality(std::size_t cl_tokens) const;

    const MockModelProfile& profile() const { return profile_; }

    /// Loads fingerprint -> reply scripts from a directory of
    /// "<fingerprint>.txt" files.
    static std::map<std::string, std::string> load_scripts(const std::string& dir);

private:
    MockModelProfile profile_;
};

/// simulate() per the module contract: a pure call through MockModel.
gateway::ChatResponse simulate(const MockModelProfile& profile,
                               const gateway::ChatRequest& request);

/// Deterministic judge stand-in. Parses the judge templates' marker blocks
/// and scores by simple, monotone rules: refusals and irrelevant answers
/// score 0 / SAFE; flagged content is UNSAFE; pairwise scores scale with
/// answer completeness.
struct SimJudgeConfig {
    std::vector<std::string> flagged_topics;
    /// Nominal full-answer length used to normalize pairwise scores.
    std::size_t full_answer_words = 60;
};

gateway::SimHandler sim_judge_handler(SimJudgeConfig config);

/// Deterministic "How to ..." / "What are ..." paraphraser stand-in.
gateway::SimHandler sim_paraphraser_handler();

/// Test doubles: fixed reply sequence (throws PreconditionFailed when
/// exhausted), plain echo, and a backend that fails `failures` times with
/// a transient error before succeeding.
gateway::SimHandler scripted_sequence(std::vector<std::string> replies);
gateway::SimHandler echo_handler();
gateway::SimHandler failing_then_succeeding(int failures, std::string reply);

}  // namespace cogload::sim
