#include "cogload/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cogload/errors.hpp"
#include "cogload/templates.hpp"
#include "cogload/text.hpp"
#include "cogload/tokenize.hpp"

namespace cogload::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string RunConfig::resolve_dataset() const {
    if (dataset_ref.empty()) raise(ErrorCode::UsageError, "no dataset selected");
    auto it = datasets.find(dataset_ref);
    if (it != datasets.end()) return it->second;
    if (fs::exists(dataset_ref)) return dataset_ref;
    raise(ErrorCode::UsageError,
          "dataset is neither a configured name nor a manifest path: " + dataset_ref);
}

std::vector<prompt::LevelId> parse_levels(const std::string& spec) {
    std::vector<prompt::LevelId> levels;
    auto range_at = spec.find("..");
    if (range_at != std::string::npos) {
        prompt::LevelId from = prompt::level_from_string(text::trim(spec.substr(0, range_at)));
        prompt::LevelId to = prompt::level_from_string(text::trim(spec.substr(range_at + 2)));
        if (prompt::level_index(to) < prompt::level_index(from)) {
            raise(ErrorCode::UsageError, "descending level range: " + spec);
        }
        for (int i = prompt::level_index(from); i <= prompt::level_index(to); ++i) {
            levels.push_back(static_cast<prompt::LevelId>(i));
        }
        return levels;
    }
    std::istringstream in(spec);
    std::string token;
    while (std::getline(in, token, ',')) {
        token = text::trim(token);
        if (!token.empty()) levels.push_back(prompt::level_from_string(token));
    }
    if (levels.empty()) raise(ErrorCode::UsageError, "empty level list: " + spec);
    return levels;
}

namespace {

std::string resolve_against(const fs::path& base, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (base / p).lexically_normal().string();
}

EndpointSpec parse_endpoint(const std::string& id, const json& node,
                            const fs::path& config_dir,
                            const prompt::ObfuscationScheme& scheme,
                            const std::string& tokenizer_id) {
    EndpointSpec spec;
    spec.endpoint.id = id;
    spec.endpoint.kind =
        gateway::provider_kind_from_string(node.value("kind", "sim"));
    spec.endpoint.base_url = node.value("base_url", "");
    spec.endpoint.model_name = node.value("model", "");
    spec.endpoint.credential_env = node.value("credential_env", "");
    spec.endpoint.rate_limit.requests_per_minute =
        node.value("requests_per_minute", 600);
    spec.endpoint.rate_limit.tokens_per_minute =
        node.value("tokens_per_minute", 1000000);
    spec.endpoint.max_retries = node.value("max_retries", 3);
    spec.endpoint.sim_handler = id;

    if (spec.endpoint.kind == gateway::ProviderKind::InProcessSim) {
        spec.sim_role = node.value("role", "target");
        spec.profile.id = id;
        spec.profile.capacity = node.value("capacity", 6000u);
        spec.profile.refusal_until_level = node.value("refusal_until_level", 0);
        spec.profile.quality_floor = node.value("quality_floor", 0.05);
        spec.profile.tokenizer_id = tokenizer_id;
        spec.profile.scheme = scheme;
        const json topics = node.value("flagged_topics", json::array());
        for (const auto& topic : topics) {
            spec.profile.flagged_topics.push_back(topic.get<std::string>());
            spec.judge_config.flagged_topics.push_back(topic.get<std::string>());
        }
        spec.scripts_dir = resolve_against(config_dir, node.value("scripts_dir", ""));
    }
    return spec;
}

}  // namespace

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::UsageError, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json parsed = json::parse(buf.str(), nullptr, false);
    if (parsed.is_discarded()) {
        raise(ErrorCode::UsageError, "config file is not valid JSON: " + path);
    }

    fs::path config_dir = fs::path(path).parent_path();
    RunConfig config;

    if (parsed.contains("scheme")) {
        const auto& scheme = parsed["scheme"];
        config.scheme.id = scheme.value("id", config.scheme.id);
        config.scheme.open_tag = scheme.value("open_tag", config.scheme.open_tag);
        config.scheme.close_tag = scheme.value("close_tag", config.scheme.close_tag);
        config.scheme.glyph_separator =
            scheme.value("glyph_separator", config.scheme.glyph_separator);
        config.scheme.word_separator =
            scheme.value("word_separator", config.scheme.word_separator);
    }
    if (parsed.contains("tokenizer")) {
        config.tokenizer_id = parsed["tokenizer"].value("id", "whitespace");
        config.tokenizer_vocab =
            resolve_against(config_dir, parsed["tokenizer"].value("vocab", ""));
    }
    config.templates_dir =
        resolve_against(config_dir, parsed.value("templates_dir", ""));

    const json endpoint_table = parsed.value("endpoints", json::object());
    for (const auto& [id, node] : endpoint_table.items()) {
        config.endpoints[id] = parse_endpoint(id, node, config_dir, config.scheme,
                                              config.tokenizer_id);
    }
    const json dataset_table = parsed.value("datasets", json::object());
    for (const auto& [name, manifest] : dataset_table.items()) {
        config.datasets[name] =
            resolve_against(config_dir, manifest.get<std::string>());
    }

    if (parsed.contains("campaign")) {
        const auto& campaign = parsed["campaign"];
        config.campaign_id = campaign.value("id", config.campaign_id);
        config.target_id = campaign.value("target", "");
        config.judge_id = campaign.value("judge", "");
        config.paraphraser_id = campaign.value("paraphraser", "");
        config.guard_id = campaign.value("guard", "");
        config.generator_id = campaign.value("generator", "");
        if (campaign.contains("levels")) {
            config.levels = parse_levels(campaign["levels"].get<std::string>());
        }
        config.derivatives_per_question =
            campaign.value("derivatives_per_question", 5);
        config.concurrency = campaign.value("concurrency", 1);
        if (campaign.contains("max_questions")) {
            config.max_questions = campaign["max_questions"].get<std::size_t>();
        }
        config.dataset_ref = campaign.value("dataset", "");
        const json param_table = campaign.value("level_params", json::object());
        for (const auto& [key, value] : param_table.items()) {
            config.level_params[key] = value.is_string()
                                           ? value.get<std::string>()
                                           : value.dump();
        }
    }
    if (parsed.contains("measure")) {
        const auto& measure = parsed["measure"];
        config.measurement_mode = measure.value("mode", "multi_task");
        const json measure_judges = measure.value("judges", json::array());
        for (const auto& id : measure_judges) {
            config.measure_judge_ids.push_back(id.get<std::string>());
        }
    }
    if (parsed.contains("jury")) {
        const json jury_judges = parsed["jury"].value("judges", json::array());
        for (const auto& id : jury_judges) {
            config.jury_ids.push_back(id.get<std::string>());
        }
    }
    if (parsed.contains("output")) {
        config.ledger_path = parsed["output"].value("ledger", config.ledger_path);
        config.output_dir = parsed["output"].value("dir", config.output_dir);
    }
    config.ack_risks = parsed.value("i_understand_risks", false);
    return config;
}

void validate_run(const RunConfig& config,
                  const std::vector<std::string>& used_endpoints) {
    config.scheme.validate();

    for (const auto& id : used_endpoints) {
        auto it = config.endpoints.find(id);
        if (it == config.endpoints.end()) {
            raise(ErrorCode::UsageError, "endpoint not configured: " + id);
        }
        it->second.endpoint.validate();
        if (it->second.endpoint.hosted()) {
            if (!config.ack_risks) {
                raise(ErrorCode::UsageError,
                      "hosted endpoint '" + id +
                          "' requires --i-understand-risks (attacks against "
                          "hosted models are opt-in)");
            }
            if (it->second.endpoint.credential_env.empty()) {
                raise(ErrorCode::UsageError,
                      "hosted endpoint '" + id + "' has no credential_env");
            }
        }
    }

    if (!config.levels.empty()) {
        for (std::size_t i = 1; i < config.levels.size(); ++i) {
            if (prompt::level_index(config.levels[i]) <=
                prompt::level_index(config.levels[i - 1])) {
                raise(ErrorCode::UsageError, "levels must be strictly ascending");
            }
        }
    }

    if (!config.templates_dir.empty() && !fs::is_directory(config.templates_dir)) {
        raise(ErrorCode::UsageError,
              "templates_dir does not exist: " + config.templates_dir);
    }
    if (!config.tokenizer_vocab.empty() && !fs::exists(config.tokenizer_vocab)) {
        raise(ErrorCode::UsageError,
              "tokenizer vocabulary not found: " + config.tokenizer_vocab);
    }
    if (config.tokenizer_id != "whitespace" && config.tokenizer_vocab.empty() &&
        !metrics::TokenizerRegistry::instance().has(config.tokenizer_id)) {
        raise(ErrorCode::UsageError,
              "tokenizer '" + config.tokenizer_id + "' has no vocabulary file");
    }
    for (const auto& [name, manifest] : config.datasets) {
        if (!fs::exists(manifest)) {
            raise(ErrorCode::UsageError,
                  "dataset manifest missing for '" + name + "': " + manifest);
        }
    }
}

Engine build_engine(const RunConfig& config, bool open_ledger) {
    if (!config.templates_dir.empty()) {
        prompt::TemplateStore::instance().load_overrides(config.templates_dir);
    }
    if (!config.tokenizer_vocab.empty() &&
        !metrics::TokenizerRegistry::instance().has(config.tokenizer_id)) {
        metrics::TokenizerRegistry::instance().register_bpe(config.tokenizer_id,
                                                            config.tokenizer_vocab);
    }

    Engine engine;
    engine.gateway = std::make_shared<gateway::Gateway>();
    for (const auto& [id, spec] : config.endpoints) {
        engine.gateway->register_endpoint(spec.endpoint);
        if (spec.endpoint.kind != gateway::ProviderKind::InProcessSim) continue;
        if (spec.sim_role == "target") {
            sim::MockModelProfile profile = spec.profile;
            if (!spec.scripts_dir.empty()) {
                profile.script = sim::MockModel::load_scripts(spec.scripts_dir);
            }
            engine.gateway->register_sim(id, sim::MockModel(std::move(profile)));
        } else if (spec.sim_role == "judge") {
            engine.gateway->register_sim(id, sim::sim_judge_handler(spec.judge_config));
        } else if (spec.sim_role == "paraphraser") {
            engine.gateway->register_sim(id, sim::sim_paraphraser_handler());
        } else if (spec.sim_role == "echo") {
            engine.gateway->register_sim(id, sim::echo_handler());
        } else {
            raise(ErrorCode::UsageError,
                  "unknown sim role '" + spec.sim_role + "' for " + id);
        }
    }
    if (open_ledger) {
        engine.ledger = std::make_unique<store::Ledger>(config.ledger_path);
    }
    return engine;
}

}  // namespace cogload::cli
