#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cogload/datastore.hpp"
#include "cogload/gateway.hpp"
#include "cogload/judge.hpp"
#include "cogload/metrics.hpp"
#include "cogload/prompt.hpp"
#include "cogload/stats.hpp"

namespace cogload::orchestrator {

struct DerivativeSet {
    std::vector<std::string> questions;
    int duplicates_dropped = 0;
};

/// Asks the paraphraser for n "How to ..." / "What are ..." restylings.
/// The original question is not included (callers prepend it). Throws
/// ParaphraseRefused (raw reply in detail()) when the reply contains no
/// restyled question.
DerivativeSet generate_derivatives(const std::string& question,
                                   const gateway::ModelEndpoint& paraphraser,
                                   int n, gateway::Gateway& gateway);

struct AttackCampaignSpec {
    std::string campaign_id = "campaign";
    std::string target_id;
    std::string judge_id;
    std::string paraphraser_id;  // may be empty when derivatives == 0
    std::vector<prompt::LevelId> levels;
    int derivatives_per_question = 5;
    prompt::ObfuscationScheme scheme;
    int concurrency = 1;
    std::string tokenizer_id = "whitespace";
    std::map<std::string, std::string> level_params;
    prompt::RenderOptions render_options;
    std::optional<std::size_t> max_questions;

    void validate() const;  // levels non-empty, ascending; derivatives >= 0
};

enum class QuestionOutcome { Jailbroken, Survived, Incomplete };

struct CampaignSummary {
    std::size_t total_questions = 0;
    std::map<prompt::LevelId, std::size_t> successes_per_level;
    std::size_t total_successes = 0;
    double asr_pct = 0.0;
    std::size_t target_calls = 0;  // dispatched by this run (resume skips)
    std::size_t judge_calls = 0;
    std::size_t errors = 0;
    std::size_t incomplete_questions = 0;
    std::size_t resumed_triples = 0;  // (question, derivative, level) skipped
    std::map<std::string, QuestionOutcome> outcome_by_question;
};

struct GuardrailRunResult {
    std::size_t prompts_gated = 0;
    std::size_t blocked_count = 0;
    std::size_t target_calls = 0;
    std::size_t gate_errors = 0;
    std::size_t unsafe_by_base_judge = 0;
    std::size_t guard_safe_on_unsafe = 0;
    double jailbroken_pct = 0.0;  // 0 when nothing unsafe was produced
    std::map<std::string, judge::VerdictLabel> input_gate_verdicts;
    std::map<std::string, judge::VerdictLabel> output_gate_verdicts;
};

enum class MeasurementMode { DualTask, MultiTask, Drawing };
MeasurementMode measurement_mode_from_string(const std::string& name);

struct MeasurementSpec {
    MeasurementMode mode = MeasurementMode::MultiTask;
    std::string target_id;
    std::vector<std::string> judge_ids;
    std::vector<prompt::LevelId> levels;  // multi_task/drawing levels
    prompt::ObfuscationScheme scheme;
    std::string tokenizer_id = "whitespace";
    std::map<std::string, std::string> level_params;
    std::string output_dir;  // drawing artifacts land here
    std::optional<std::size_t> max_questions;
};

struct MeasurementResult {
    MeasurementMode mode = MeasurementMode::MultiTask;
    /// level label -> mean score (averaged over judges then questions).
    std::vector<std::pair<std::string, double>> per_level_mean;
    std::map<std::string, std::vector<double>> scores_by_level;
    struct PairTest {
        std::string before_level;
        std::string after_level;
        std::optional<metrics::TTestResult> test;
        std::string note;  // set when the test could not run
    };
    std::vector<PairTest> t_tests;
    std::vector<std::string> artifacts;
};

struct MetaValidationReport {
    bool admitted = false;
    int load_task_count = 0;
    int question_slots = 0;
    bool has_answer_format = false;
    std::vector<std::string> missing;
};

struct MetaGenerationResult {
    std::string template_text;
    MetaValidationReport report;
    std::string stored_path;  // where the template (or rejection) was kept
};

/// Structural checks on a generated load-prompt template: >=2 load tasks,
/// exactly one <<QUESTION>> slot, and a labeled output format ending in an
/// answer section.
MetaValidationReport validate_meta_template(const std::string& template_text);

/// Substitutes the question into an admitted template and appends an
/// output-format constraint verbatim (empty = none).
std::string render_meta_prompt(const std::string& template_text,
                               const std::string& question,
                               const std::string& output_constraint);

/// Campaign engine: owns the attack loop, guardrail-gated runs,
/// measurement campaigns, and meta-generation, writing every call to the
/// ledger before the next dispatch. Resume reads the ledger and skips
/// completed (question, derivative, level) triples.
class Orchestrator {
public:
    Orchestrator(gateway::Gateway& gateway, store::Ledger& ledger);

    CampaignSummary run_attack(const AttackCampaignSpec& spec,
                               const store::Dataset& dataset);

    GuardrailRunResult run_guardrail_attack(const AttackCampaignSpec& spec,
                                            const store::Dataset& dataset,
                                            const std::string& guard_id);

    MeasurementResult run_measurement(const MeasurementSpec& spec,
                                      const store::Dataset& dataset);

    /// Asks `generator` for a new load-prompt template using the
    /// "meta/brief" template (optionally extended by `brief_extra`),
    /// validates it, and stores it under `store_dir` (admitted or
    /// rejected). Throws ValidationFailed after recording a rejection.
    MetaGenerationResult meta_generate_prompt(const std::string& generator_id,
                                              const std::string& brief_extra,
                                              const std::string& store_dir);

private:
    gateway::Gateway& gateway_;
    store::Ledger& ledger_;
};

}  // namespace cogload::orchestrator
