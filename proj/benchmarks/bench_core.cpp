#include <benchmark/benchmark.h>

#include <random>

#include "cogload/obfuscation.hpp"
#include "cogload/prompt.hpp"
#include "cogload/response.hpp"
#include "cogload/simlab.hpp"
#include "cogload/stats.hpp"
#include "cogload/tasks.hpp"
#include "cogload/tokenize.hpp"

using namespace cogload;

namespace {

std::string sample_text(std::size_t words) {
    static const char* pool[] = {"bread", "flour", "water", "yeast", "knead",
                                 "proof", "shape", "bake",  "crust", "crumb"};
    std::string out;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) out += ' ';
        out += pool[i % 10];
    }
    return out;
}

const std::string kQuestion = "How to bake fresh bread at home with simple ingredients?";

void BM_Obfuscate(benchmark::State& state) {
    auto scheme = prompt::default_scheme();
    std::string text = sample_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(prompt::obfuscate(text, scheme));
    }
}
BENCHMARK(BM_Obfuscate)->Arg(16)->Arg(128);

void BM_Deobfuscate(benchmark::State& state) {
    auto scheme = prompt::default_scheme();
    std::string encoded =
        prompt::obfuscate(sample_text(static_cast<std::size_t>(state.range(0))), scheme);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prompt::deobfuscate(encoded, scheme));
    }
}
BENCHMARK(BM_Deobfuscate)->Arg(16)->Arg(128);

void BM_RenderPromptCL6(benchmark::State& state) {
    auto level = prompt::compose_level(prompt::LevelId::CL6);
    auto scheme = prompt::default_scheme();
    for (auto _ : state) {
        benchmark::DoNotOptimize(prompt::render_prompt(level, kQuestion, scheme));
    }
}
BENCHMARK(BM_RenderPromptCL6);

void BM_SimulateCL6(benchmark::State& state) {
    sim::MockModelProfile profile;
    sim::MockModel model(profile);
    auto rendered = prompt::render_prompt(prompt::compose_level(prompt::LevelId::CL6),
                                          kQuestion, prompt::default_scheme());
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.respond(rendered.rendered_text));
    }
}
BENCHMARK(BM_SimulateCL6);

void BM_ParseResponse(benchmark::State& state) {
    sim::MockModelProfile profile;
    sim::MockModel model(profile);
    auto level = prompt::compose_level(prompt::LevelId::CL6);
    auto rendered = prompt::render_prompt(level, kQuestion, prompt::default_scheme());
    std::string raw = model.respond(rendered.rendered_text).text;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prompt::parse_response(raw, level));
    }
}
BENCHMARK(BM_ParseResponse);

void BM_BpeCount(benchmark::State& state) {
    auto tokenizer = metrics::BpeTokenizer::load(
        std::string(COGLOAD_SOURCE_DIR) + "/data/tokenizers/default_bpe.txt");
    std::string text = sample_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tokenizer.count(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(text.size()));
}
BENCHMARK(BM_BpeCount)->Arg(64)->Arg(1024);

void BM_PairedTTest(benchmark::State& state) {
    std::mt19937 rng(1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> before(n), after(n);
    for (std::size_t i = 0; i < n; ++i) {
        before[i] = noise(rng) + 0.3;
        after[i] = noise(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(metrics::paired_t_test(before, after));
    }
}
BENCHMARK(BM_PairedTTest)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
