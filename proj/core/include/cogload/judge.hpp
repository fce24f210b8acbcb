#pragma once

#include <map>
#include <string>
#include <vector>

#include "cogload/gateway.hpp"

namespace cogload::judge {

enum class VerdictLabel { Safe, Unsafe, Neutral };

std::string_view to_string(VerdictLabel label);
VerdictLabel verdict_from_string(const std::string& name);

struct Verdict {
    VerdictLabel label = VerdictLabel::Neutral;
    std::string rationale;
};

/// 0 means the answer was not relevant; 1..10 is poor..good.
struct PairwiseScore {
    int score_a = 0;
    int score_b = 0;
};

struct CLSelfReport {
    double intrinsic = 0.0;
    double extraneous = 0.0;
    std::string explanation;
};

struct JuryReport {
    /// judge id -> verdict label -> count over all records.
    std::map<std::string, std::map<VerdictLabel, std::size_t>> per_judge;
    /// one majority verdict per record (plurality, ties -> NEUTRAL).
    std::vector<VerdictLabel> per_record_majority;
    /// plurality over per_record_majority, ties -> NEUTRAL.
    VerdictLabel majority = VerdictLabel::Neutral;
};

/// Extracts the single verdict word from a judge reply. The reply must
/// contain exactly one distinct label (word-boundary match, any case);
/// anything else throws UnparseableVerdict.
Verdict parse_verdict_reply(const std::string& reply);

/// Parses "Score A: <int>, Score B: <int>" (tolerant of case and spacing).
/// Throws UnparseableScores / OutOfRangeScore.
PairwiseScore parse_pairwise_reply(const std::string& reply);

/// Parses "INT: <num> ... EXT: <num>" plus free-text explanation.
CLSelfReport parse_self_report_reply(const std::string& reply);

/// Judge-model protocols over the gateway. Templates come from the
/// template store ("judge/harmfulness", "judge/pairwise",
/// "judge/self_report"); unparseable replies are re-asked up to
/// `reask_limit` times before the parse error escapes.
class JudgeClient {
public:
    explicit JudgeClient(gateway::Gateway& gateway, int reask_limit = 2);

    Verdict judge_harmfulness(const std::string& answer,
                              const gateway::ModelEndpoint& judge) const;

    /// Runs both answer orders and averages (round half-up) to cancel
    /// position bias.
    PairwiseScore pairwise_compare(const std::string& question,
                                   const std::string& answer_a,
                                   const std::string& answer_b,
                                   const gateway::ModelEndpoint& judge) const;

    CLSelfReport self_report_cl(const std::string& prompt_under_test,
                                const gateway::ModelEndpoint& judge) const;

private:
    gateway::Gateway& gateway_;
    int reask_limit_;
};

/// One already-judged answer heading into re-evaluation.
struct JuryRecord {
    std::string record_id;
    std::string answer;  // extracted answer text
    VerdictLabel base_verdict = VerdictLabel::Unsafe;
};

/// Re-judges every record with every judge. Records must carry an UNSAFE
/// base verdict (only flagged answers are re-evaluated); the record list
/// must be non-empty.
JuryReport jury_reevaluate(const std::vector<JuryRecord>& records,
                           const std::vector<gateway::ModelEndpoint>& judges,
                           const JudgeClient& client);

}  // namespace cogload::judge
