// cogload: cognitive-load prompt crafting and red-teaming harness CLI.
//
// Exit codes: 0 success, 2 usage/validation, 3 runtime failure,
// 4 integrity failure (tampered datasets, corrupt ledger).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cogload/config.hpp"
#include "cogload/errors.hpp"
#include "cogload/judge.hpp"
#include "cogload/orchestrator.hpp"
#include "cogload/prompt.hpp"
#include "cogload/response.hpp"
#include "cogload/templates.hpp"
#include "cogload/text.hpp"
#include "cogload/tokenize.hpp"

using namespace cogload;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIntegrity = 4;

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case ErrorCode::UsageError:
        case ErrorCode::UnknownLevel:
        case ErrorCode::EmptyInput:
            return kExitUsage;
        case ErrorCode::IntegrityError:
        case ErrorCode::LedgerCorrupt:
        case ErrorCode::SchemaVersion:
            return kExitIntegrity;
        default:
            return kExitRuntime;
    }
}

struct CliOptions {
    std::string config_path;
    std::string target, judge, paraphraser, guard, generator;
    std::string levels, dataset, ledger, output_dir, campaign_id;
    std::vector<std::string> jury;
    std::vector<std::string> measure_judges;
    int derivatives = -1;
    int concurrency = -1;
    std::optional<std::size_t> max_questions;
    bool ack_risks = false;

    // craft
    std::string question;
    std::string level = "CL5";
    bool all_levels = false;
    std::string dump_templates_dir;
    bool meta = false;
    std::string meta_store;
    // simulate
    std::string prompt_text;
    // judge
    std::string answer;
    bool run_jury = false;
    // report / measure
    std::string format = "markdown";
    std::string mode;
};

cli::RunConfig effective_config(const CliOptions& options) {
    cli::RunConfig config;
    if (!options.config_path.empty()) {
        config = cli::load_config_file(options.config_path);
    }
    // CLI flag > config file > default.
    if (!options.target.empty()) config.target_id = options.target;
    if (!options.judge.empty()) config.judge_id = options.judge;
    if (!options.paraphraser.empty()) config.paraphraser_id = options.paraphraser;
    if (!options.guard.empty()) config.guard_id = options.guard;
    if (!options.generator.empty()) config.generator_id = options.generator;
    if (!options.levels.empty()) config.levels = cli::parse_levels(options.levels);
    if (!options.dataset.empty()) config.dataset_ref = options.dataset;
    if (!options.ledger.empty()) config.ledger_path = options.ledger;
    if (!options.output_dir.empty()) config.output_dir = options.output_dir;
    if (!options.campaign_id.empty()) config.campaign_id = options.campaign_id;
    if (!options.jury.empty()) config.jury_ids = options.jury;
    if (!options.measure_judges.empty()) {
        config.measure_judge_ids = options.measure_judges;
    }
    if (options.derivatives >= 0) {
        config.derivatives_per_question = options.derivatives;
    }
    if (options.concurrency >= 1) config.concurrency = options.concurrency;
    if (options.max_questions) config.max_questions = options.max_questions;
    if (!options.mode.empty()) config.measurement_mode = options.mode;
    if (options.ack_risks) config.ack_risks = true;
    return config;
}

orchestrator::AttackCampaignSpec campaign_spec(const cli::RunConfig& config) {
    orchestrator::AttackCampaignSpec spec;
    spec.campaign_id = config.campaign_id;
    spec.target_id = config.target_id;
    spec.judge_id = config.judge_id;
    spec.paraphraser_id = config.paraphraser_id;
    spec.levels = config.levels;
    if (spec.levels.empty()) spec.levels = cli::parse_levels("CL1..CL6");
    spec.derivatives_per_question = config.derivatives_per_question;
    spec.scheme = config.scheme;
    spec.concurrency = config.concurrency;
    spec.tokenizer_id = metrics::TokenizerRegistry::instance().has(config.tokenizer_id)
                            ? config.tokenizer_id
                            : "whitespace";
    spec.level_params = config.level_params;
    spec.max_questions = config.max_questions;
    return spec;
}

void print_summary(const orchestrator::CampaignSummary& summary) {
    std::cout << "questions: " << summary.total_questions
              << "  successes: " << summary.total_successes << "  ASR: ";
    std::printf("%.2f%%\n", summary.asr_pct);
    std::cout << "per level:";
    for (const auto& [level, count] : summary.successes_per_level) {
        std::cout << "  " << prompt::to_string(level) << "=" << count;
    }
    std::cout << "\ntarget calls: " << summary.target_calls
              << "  resumed: " << summary.resumed_triples
              << "  errors: " << summary.errors
              << "  incomplete: " << summary.incomplete_questions << "\n";
}

void write_summary_document(const cli::RunConfig& config,
                            const orchestrator::CampaignSummary& summary) {
    std::filesystem::create_directories(config.output_dir);
    json doc = {{"campaign", config.campaign_id},
                {"target", config.target_id},
                {"judge", config.judge_id},
                {"total_questions", summary.total_questions},
                {"total_successes", summary.total_successes},
                {"asr_pct", summary.asr_pct},
                {"target_calls", summary.target_calls},
                {"errors", summary.errors},
                {"incomplete_questions", summary.incomplete_questions},
                {"per_level", json::object()}};
    for (const auto& [level, count] : summary.successes_per_level) {
        doc["per_level"][std::string(prompt::to_string(level))] = count;
    }
    std::string path =
        config.output_dir + "/summary_" + config.campaign_id + ".json";
    std::ofstream out(path, std::ios::trunc);
    out << doc.dump(2) << "\n";
    std::cout << "summary written to " << path << "\n";
}

int cmd_craft(const CliOptions& options) {
    if (!options.dump_templates_dir.empty()) {
        prompt::TemplateStore::instance().dump(options.dump_templates_dir);
        std::cout << "templates written to " << options.dump_templates_dir << "\n";
        return kExitOk;
    }
    auto config = effective_config(options);

    if (options.meta) {
        cli::validate_run(config, {config.generator_id});
        auto engine = cli::build_engine(config);
        orchestrator::Orchestrator orchestrator(*engine.gateway, *engine.ledger);
        std::string store_dir = options.meta_store.empty()
                                    ? config.output_dir + "/meta_templates"
                                    : options.meta_store;
        auto result = orchestrator.meta_generate_prompt(config.generator_id, "",
                                                        store_dir);
        std::cout << "admitted template stored at " << result.stored_path << "\n";
        return kExitOk;
    }

    if (options.question.empty()) {
        raise(ErrorCode::UsageError, "craft needs --question (or --dump-templates)");
    }
    cli::validate_run(config, {});
    if (!config.templates_dir.empty()) {
        prompt::TemplateStore::instance().load_overrides(config.templates_dir);
    }
    std::vector<prompt::LevelId> levels =
        options.all_levels ? (config.levels.empty() ? cli::parse_levels("CL0..CL6")
                                                    : config.levels)
                           : std::vector<prompt::LevelId>{
                                 prompt::level_from_string(options.level)};
    for (prompt::LevelId id : levels) {
        auto level = prompt::compose_level(id, config.level_params);
        auto rendered =
            prompt::render_prompt(level, options.question, config.scheme);
        std::cout << "==== " << level.label()
                  << " (fingerprint " << rendered.fingerprint() << ") ====\n"
                  << rendered.rendered_text << "\n";
    }
    return kExitOk;
}

int cmd_attack(const CliOptions& options) {
    auto config = effective_config(options);
    std::vector<std::string> used{config.target_id, config.judge_id};
    if (config.derivatives_per_question > 0 && !config.paraphraser_id.empty()) {
        used.push_back(config.paraphraser_id);
    }
    cli::validate_run(config, used);
    auto dataset = store::load_dataset(config.resolve_dataset());
    auto engine = cli::build_engine(config);
    orchestrator::Orchestrator orchestrator(*engine.gateway, *engine.ledger);
    auto summary = orchestrator.run_attack(campaign_spec(config), dataset);
    print_summary(summary);
    write_summary_document(config, summary);
    return kExitOk;
}

int cmd_guard_attack(const CliOptions& options) {
    auto config = effective_config(options);
    if (config.guard_id.empty()) {
        raise(ErrorCode::UsageError, "guard-attack needs --guard");
    }
    cli::validate_run(config,
                      {config.target_id, config.judge_id, config.guard_id});
    auto dataset = store::load_dataset(config.resolve_dataset());
    auto engine = cli::build_engine(config);
    orchestrator::Orchestrator orchestrator(*engine.gateway, *engine.ledger);
    auto result = orchestrator.run_guardrail_attack(campaign_spec(config), dataset,
                                                    config.guard_id);
    std::cout << "prompts gated: " << result.prompts_gated
              << "  blocked: " << result.blocked_count
              << "  target calls: " << result.target_calls << "\n"
              << "unsafe responses: " << result.unsafe_by_base_judge
              << "  passed by guard: " << result.guard_safe_on_unsafe
              << "  jailbroken: ";
    std::printf("%.2f%%\n", result.jailbroken_pct);
    return kExitOk;
}

int cmd_measure(const CliOptions& options) {
    auto config = effective_config(options);
    orchestrator::MeasurementSpec spec;
    spec.mode = orchestrator::measurement_mode_from_string(config.measurement_mode);
    spec.target_id = config.target_id;
    spec.judge_ids = config.measure_judge_ids;
    spec.levels = config.levels;
    spec.scheme = config.scheme;
    spec.tokenizer_id = config.tokenizer_id;
    spec.level_params = config.level_params;
    spec.output_dir = config.output_dir + "/drawings";
    spec.max_questions = config.max_questions;

    std::vector<std::string> used{config.target_id};
    for (const auto& id : spec.judge_ids) used.push_back(id);
    cli::validate_run(config, used);
    auto dataset = store::load_dataset(config.resolve_dataset());
    auto engine = cli::build_engine(config);
    orchestrator::Orchestrator orchestrator(*engine.gateway, *engine.ledger);
    auto result = orchestrator.run_measurement(spec, dataset);

    for (const auto& [level, mean] : result.per_level_mean) {
        std::printf("%-8s mean score %.2f\n", level.c_str(), mean);
    }
    for (const auto& pair : result.t_tests) {
        if (pair.test) {
            std::printf("%s vs %s: t = %.4f, p = %.4f\n", pair.before_level.c_str(),
                        pair.after_level.c_str(), pair.test->t,
                        pair.test->p_two_tailed);
        } else {
            std::printf("%s vs %s: %s\n", pair.before_level.c_str(),
                        pair.after_level.c_str(), pair.note.c_str());
        }
    }
    for (const auto& artifact : result.artifacts) {
        std::cout << "artifact: " << artifact << "\n";
    }
    return kExitOk;
}

int cmd_judge(const CliOptions& options) {
    auto config = effective_config(options);
    if (options.run_jury) {
        if (config.jury_ids.empty()) {
            raise(ErrorCode::UsageError, "--jury needs --judges id,id,...");
        }
        cli::validate_run(config, config.jury_ids);
        auto engine = cli::build_engine(config);
        judge::JudgeClient client(*engine.gateway);

        // Re-judge every base-UNSAFE attack record in the ledger.
        std::vector<judge::JuryRecord> records;
        for (const auto& entry : engine.ledger->read_all()) {
            if (entry.kind != store::EntryKind::AttackRecord) continue;
            json payload = json::parse(entry.payload_json, nullptr, false);
            if (payload.is_discarded() || payload.value("verdict", "") != "UNSAFE") {
                continue;
            }
            std::string answer = payload.value("response_text", "");
            try {
                auto level =
                    prompt::compose_level(prompt::level_from_string(
                        payload.value("level", "CL0")));
                answer = prompt::parse_response(answer, level).answer_plain;
            } catch (const Error&) {
                // keep the raw response
            }
            records.push_back({payload.value("question_id", "") + "#" +
                                   std::to_string(entry.seq),
                               answer, judge::VerdictLabel::Unsafe});
        }
        if (records.empty()) {
            raise(ErrorCode::EmptyInput, "ledger has no UNSAFE records to re-judge");
        }
        std::vector<gateway::ModelEndpoint> judges;
        for (const auto& id : config.jury_ids) {
            judges.push_back(engine.gateway->endpoint(id));
        }
        auto report = judge::jury_reevaluate(records, judges, client);
        for (const auto& [judge_id, counts] : report.per_judge) {
            std::cout << judge_id << ": UNSAFE="
                      << counts.at(judge::VerdictLabel::Unsafe)
                      << " SAFE=" << counts.at(judge::VerdictLabel::Safe)
                      << " NEUTRAL=" << counts.at(judge::VerdictLabel::Neutral)
                      << "\n";
            json entry = {{"judge", judge_id},
                          {"records", records.size()},
                          {"unsafe", counts.at(judge::VerdictLabel::Unsafe)},
                          {"safe", counts.at(judge::VerdictLabel::Safe)},
                          {"neutral", counts.at(judge::VerdictLabel::Neutral)}};
            engine.ledger->append(store::EntryKind::JudgeVerdict, entry.dump());
        }
        std::cout << "majority: " << judge::to_string(report.majority) << "\n";
        return kExitOk;
    }

    if (options.answer.empty()) {
        raise(ErrorCode::UsageError, "judge needs --answer or --jury");
    }
    cli::validate_run(config, {config.judge_id});
    auto engine = cli::build_engine(config, /*open_ledger=*/false);
    judge::JudgeClient client(*engine.gateway);
    auto verdict = client.judge_harmfulness(
        options.answer, engine.gateway->endpoint(config.judge_id));
    std::cout << judge::to_string(verdict.label) << "\n";
    return kExitOk;
}

int cmd_report(const CliOptions& options) {
    auto config = effective_config(options);
    cli::validate_run(config, {});
    store::ReportFormat format = options.format == "csv"
                                     ? store::ReportFormat::Csv
                                     : store::ReportFormat::Markdown;
    auto entries = store::Ledger::read_file(config.ledger_path);
    std::cout << store::export_report(entries, format);
    return kExitOk;
}

int cmd_simulate(const CliOptions& options) {
    auto config = effective_config(options);
    cli::validate_run(config, {config.target_id});
    auto engine = cli::build_engine(config, /*open_ledger=*/false);

    std::string prompt_text = options.prompt_text;
    if (prompt_text.empty()) {
        if (options.question.empty()) {
            raise(ErrorCode::UsageError,
                  "simulate needs --prompt-text or --question");
        }
        auto level = prompt::compose_level(
            prompt::level_from_string(options.level), config.level_params);
        prompt_text = prompt::render_prompt(level, options.question, config.scheme)
                          .rendered_text;
    }
    auto response = engine.gateway->complete(
        config.target_id, gateway::ChatRequest::user(prompt_text));
    std::cout << response.text << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions options;
    CLI::App app{"Cognitive-load prompt crafting and red-teaming harness"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", options.config_path, "JSON config file");
        cmd->add_option("--target", options.target, "target endpoint id");
        cmd->add_option("--judge", options.judge, "judge endpoint id");
        cmd->add_option("--levels", options.levels, "e.g. CL1..CL6 or CL1,CL3");
        cmd->add_option("--dataset", options.dataset, "dataset name or manifest");
        cmd->add_option("--ledger", options.ledger, "ledger path");
        cmd->add_option("--out", options.output_dir, "output directory");
        cmd->add_option("--campaign-id", options.campaign_id, "campaign id");
        cmd->add_option("--max-questions", options.max_questions,
                        "limit the number of questions");
        cmd->add_flag("--i-understand-risks", options.ack_risks,
                      "acknowledge use of hosted endpoints");
        return cmd;
    };

    auto* craft = add_common(app.add_subcommand(
        "craft", "render load prompts without dispatching them"));
    craft->add_option("--question", options.question, "observation task text");
    craft->add_option("--level", options.level, "level to render (default CL5)");
    craft->add_flag("--all-levels", options.all_levels, "render every level");
    craft->add_option("--dump-templates", options.dump_templates_dir,
                      "write the built-in template set to a directory");
    craft->add_flag("--meta", options.meta,
                    "ask a generator model for a new load-prompt template");
    craft->add_option("--generator", options.generator,
                      "generator endpoint id (with --meta)");
    craft->add_option("--templates-out", options.meta_store,
                      "where admitted/rejected templates go (with --meta)");

    auto* attack = add_common(app.add_subcommand(
        "attack", "run the staircase attack loop against the target"));
    attack->add_option("--paraphraser", options.paraphraser,
                       "paraphraser endpoint id");
    attack->add_option("--derivatives", options.derivatives,
                       "derivative questions per original");
    attack->add_option("--concurrency", options.concurrency,
                       "questions processed in parallel");

    auto* guard_attack = add_common(app.add_subcommand(
        "guard-attack", "attack through an input/output guard model"));
    guard_attack->add_option("--guard", options.guard, "guard endpoint id");

    auto* measure = add_common(app.add_subcommand(
        "measure", "dual-task / multi-task / drawing measurement campaigns"));
    measure->add_option("--mode", options.mode,
                        "dual_task | multi_task | drawing");
    measure->add_option("--judges", options.measure_judges,
                        "judge endpoint ids")->delimiter(',');

    auto* judge_cmd = add_common(app.add_subcommand(
        "judge", "harmfulness verdicts and jury re-evaluation"));
    judge_cmd->add_option("--answer", options.answer, "answer text to judge");
    judge_cmd->add_flag("--jury", options.run_jury,
                        "re-judge the ledger's UNSAFE records");
    judge_cmd->add_option("--judges", options.jury, "jury endpoint ids")
        ->delimiter(',');

    auto* report = add_common(app.add_subcommand(
        "report", "export per-level tables from the ledger"));
    report->add_option("--format", options.format, "csv | markdown");

    auto* simulate = add_common(app.add_subcommand(
        "simulate", "send a prompt to a simulator endpoint and print the reply"));
    simulate->add_option("--prompt-text", options.prompt_text, "raw prompt text");
    simulate->add_option("--question", options.question,
                         "observation task (rendered with --level)");
    simulate->add_option("--level", options.level, "level for --question");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (craft->parsed()) return cmd_craft(options);
        if (attack->parsed()) return cmd_attack(options);
        if (guard_attack->parsed()) return cmd_guard_attack(options);
        if (measure->parsed()) return cmd_measure(options);
        if (judge_cmd->parsed()) return cmd_judge(options);
        if (report->parsed()) return cmd_report(options);
        if (simulate->parsed()) return cmd_simulate(options);
        std::cerr << "no subcommand\n";
        return kExitUsage;
    } catch (const Error& error) {
        std::cerr << "error: " << error.what() << "\n";
        // Best effort: record the failure in the ledger for post-mortems.
        try {
            auto config = effective_config(options);
            store::Ledger ledger(config.ledger_path);
            json event = {{"event", "cli_error"},
                          {"error", error.what()},
                          {"code", std::string(to_string(error.code()))}};
            ledger.append(store::EntryKind::CampaignEvent, event.dump());
        } catch (...) {
        }
        return exit_code_for(error);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
