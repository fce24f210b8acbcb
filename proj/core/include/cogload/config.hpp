#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogload/datastore.hpp"
#include "cogload/gateway.hpp"
#include "cogload/obfuscation.hpp"
#include "cogload/simlab.hpp"
#include "cogload/tasks.hpp"

namespace cogload::cli {

/// One endpoint from the config file. Hosted endpoints carry wire details;
/// sim endpoints carry a role plus the mock-model knobs.
struct EndpointSpec {
    gateway::ModelEndpoint endpoint;
    std::string sim_role = "target";  // target | judge | paraphraser | echo
    sim::MockModelProfile profile;
    sim::SimJudgeConfig judge_config;
    std::string scripts_dir;
};

/// Merged run configuration (CLI flag > config file > default). Input
/// resource paths resolve against the config file's directory; output
/// paths resolve against the working directory.
struct RunConfig {
    prompt::ObfuscationScheme scheme;
    std::string tokenizer_id = "whitespace";
    std::string tokenizer_vocab;  // merges file for the default BPE
    std::string templates_dir;

    std::map<std::string, EndpointSpec> endpoints;
    std::map<std::string, std::string> datasets;  // name -> manifest path

    std::string target_id;
    std::string judge_id;
    std::string paraphraser_id;
    std::string guard_id;
    std::string generator_id;
    std::vector<std::string> jury_ids;
    std::vector<std::string> measure_judge_ids;

    std::vector<prompt::LevelId> levels;
    int derivatives_per_question = 5;
    int concurrency = 1;
    std::optional<std::size_t> max_questions;
    std::map<std::string, std::string> level_params;

    std::string dataset_ref;  // dataset name or manifest path
    std::string campaign_id = "campaign";
    std::string measurement_mode = "multi_task";
    std::string ledger_path = "runs/ledger.jsonl";
    std::string output_dir = "runs";
    bool ack_risks = false;

    /// Manifest path for dataset_ref (throws UsageError when unknown).
    std::string resolve_dataset() const;
};

/// "CL1..CL6" ranges or "CL1,CL3" lists.
std::vector<prompt::LevelId> parse_levels(const std::string& text);

/// Loads the JSON config file into a RunConfig (defaults where absent).
RunConfig load_config_file(const std::string& path);

/// Full validation before any network call: referenced endpoints and
/// resources must exist, levels must be ascending, and any hosted endpoint
/// among `used_endpoints` requires the risk acknowledgment. Throws
/// UsageError.
void validate_run(const RunConfig& config,
                  const std::vector<std::string>& used_endpoints);

/// Everything a subcommand needs, built only after validation passes.
struct Engine {
    std::shared_ptr<gateway::Gateway> gateway;
    std::unique_ptr<store::Ledger> ledger;
};

/// Registers endpoints and sim handlers, loads template overrides and the
/// BPE vocabulary, and opens the ledger.
Engine build_engine(const RunConfig& config, bool open_ledger = true);

}  // namespace cogload::cli
