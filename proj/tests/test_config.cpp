#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cogload/config.hpp"
#include "cogload/errors.hpp"

using namespace cogload;
using namespace cogload::cli;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const std::string& body) {
    auto dir = fs::temp_directory_path() / "cogload_config_tests";
    fs::create_directories(dir);
    auto path = dir / name;
    std::ofstream out(path, std::ios::trunc);
    out << body;
    return path;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse_levels ranges and lists") {
    auto range = parse_levels("CL1..CL3");
    REQUIRE(range.size() == 3);
    CHECK(range[0] == prompt::LevelId::CL1);
    CHECK(range[2] == prompt::LevelId::CL3);

    auto list = parse_levels("CL0, CL7,CL11");
    REQUIRE(list.size() == 3);
    CHECK(list[2] == prompt::LevelId::CL11);

    CHECK_THROWS_AS((void)parse_levels("CL4..CL2"), Error);
    CHECK_THROWS_AS((void)parse_levels("CL99"), Error);
    CHECK_THROWS_AS((void)parse_levels(""), Error);
}

TEST_CASE("config file loads endpoints, datasets, and campaign settings") {
    auto path = write_config("full.json", R"({
      "scheme": {"open_tag": "[s]", "close_tag": "[/s]"},
      "endpoints": {
        "sim:overload": {"kind": "sim", "role": "target",
                          "refusal_until_level": 3,
                          "flagged_topics": ["volcano"]},
        "sim:judge": {"kind": "sim", "role": "judge",
                       "flagged_topics": ["volcano"]},
        "hosted:gpt": {"kind": "openai", "base_url": "https://x.test/v1",
                        "model": "gpt", "credential_env": "KEY"}
      },
      "datasets": {"benign": "does-not-matter.json"},
      "campaign": {"target": "sim:overload", "judge": "sim:judge",
                    "levels": "CL1..CL6", "derivatives_per_question": 2,
                    "concurrency": 3, "max_questions": 10,
                    "level_params": {"range_bound": "9"}},
      "output": {"ledger": "runs/test.jsonl"}
    })");

    auto config = load_config_file(path.string());
    CHECK(config.scheme.open_tag == "[s]");
    CHECK(config.endpoints.size() == 3);
    CHECK(config.endpoints.at("sim:overload").profile.refusal_until_level == 3);
    CHECK(config.endpoints.at("hosted:gpt").endpoint.hosted());
    CHECK(config.levels.size() == 6);
    CHECK(config.derivatives_per_question == 2);
    CHECK(config.concurrency == 3);
    CHECK(config.max_questions == 10);
    CHECK(config.level_params.at("range_bound") == "9");
    CHECK(config.ledger_path == "runs/test.jsonl");
    // Dataset paths resolve against the config file's directory.
    CHECK(config.datasets.at("benign").find("cogload_config_tests") !=
          std::string::npos);
}

TEST_CASE("hosted endpoints demand the risk acknowledgment") {
    RunConfig config;
    EndpointSpec hosted;
    hosted.endpoint.id = "hosted:gpt";
    hosted.endpoint.kind = gateway::ProviderKind::OpenAiChat;
    hosted.endpoint.base_url = "https://x.test/v1";
    hosted.endpoint.credential_env = "KEY";
    config.endpoints["hosted:gpt"] = hosted;

    CHECK_THROWS_WITH_AS(validate_run(config, {"hosted:gpt"}),
                         doctest::Contains("i-understand-risks"), Error);
    config.ack_risks = true;
    CHECK_NOTHROW(validate_run(config, {"hosted:gpt"}));

    // Sim-only runs never need the flag.
    RunConfig sim_only;
    EndpointSpec sim_spec;
    sim_spec.endpoint.id = "sim:x";
    sim_only.endpoints["sim:x"] = sim_spec;
    CHECK_NOTHROW(validate_run(sim_only, {"sim:x"}));
}

TEST_CASE("validation reports unknown endpoints and missing resources") {
    RunConfig config;
    CHECK_THROWS_WITH_AS(validate_run(config, {"missing:endpoint"}),
                         doctest::Contains("not configured"), Error);

    RunConfig missing_templates;
    missing_templates.templates_dir = "/no/such/dir";
    CHECK_THROWS_AS(validate_run(missing_templates, {}), Error);

    RunConfig missing_dataset;
    missing_dataset.datasets["d"] = "/no/such/manifest.json";
    CHECK_THROWS_AS(validate_run(missing_dataset, {}), Error);

    RunConfig bad_levels;
    bad_levels.levels = {prompt::LevelId::CL3, prompt::LevelId::CL1};
    CHECK_THROWS_AS(validate_run(bad_levels, {}), Error);
}

TEST_CASE("resolve_dataset prefers configured names, then paths") {
    RunConfig config;
    config.datasets["benign"] = "/tmp/benign.manifest.json";
    config.dataset_ref = "benign";
    CHECK(config.resolve_dataset() == "/tmp/benign.manifest.json");
    config.dataset_ref = "";
    CHECK_THROWS_AS((void)config.resolve_dataset(), Error);
    config.dataset_ref = "/definitely/not/here.json";
    CHECK_THROWS_AS((void)config.resolve_dataset(), Error);
}

TEST_CASE("build_engine wires sim roles into callable endpoints") {
    auto path = write_config("engine.json", R"({
      "endpoints": {
        "sim:echo": {"kind": "sim", "role": "echo"},
        "sim:judge": {"kind": "sim", "role": "judge"},
        "sim:para": {"kind": "sim", "role": "paraphraser"},
        "sim:model": {"kind": "sim", "role": "target", "flagged_topics": ["x"]}
      }
    })");
    auto config = load_config_file(path.string());
    auto engine = build_engine(config, /*open_ledger=*/false);
    auto response = engine.gateway->complete(
        "sim:echo", gateway::ChatRequest::user("hello there"));
    CHECK(response.text == "hello there");
    CHECK(engine.gateway->has_endpoint("sim:model"));
}

}  // TEST_SUITE
