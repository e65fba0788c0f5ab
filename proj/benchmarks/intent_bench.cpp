#include "carebot/bundle.hpp"
#include "carebot/intent.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

std::vector<carebot::intent::IntentDef> synthetic_intents(int count) {
    std::vector<carebot::intent::IntentDef> out;
    for (int i = 0; i < count; ++i) {
        const auto n = std::to_string(i);
        out.push_back(carebot::intent::make_intent("intent_" + n, {"word" + n + " alpha", "please word" + n}));
    }
    return out;
}

void BM_MatchHit(benchmark::State& state) {
    const carebot::intent::Registry registry(synthetic_intents(static_cast<int>(state.range(0))));
    const std::string utterance = "could you please word" + std::to_string(state.range(0) / 2) + " right now";
    for (auto _ : state) {
        benchmark::DoNotOptimize(registry.match(utterance, "main:home"));
    }
}
BENCHMARK(BM_MatchHit)->Range(8, 4096);

void BM_MatchMiss(benchmark::State& state) {
    const carebot::intent::Registry registry(synthetic_intents(static_cast<int>(state.range(0))));
    const std::string utterance = "nothing here matches any of the phrases at all";
    for (auto _ : state) {
        benchmark::DoNotOptimize(registry.match(utterance, "main:home"));
    }
}
BENCHMARK(BM_MatchMiss)->Range(8, 4096);

void BM_NormalizeUtterance(benchmark::State& state) {
    const std::string text = "Well, I'm REALLY worried about my family... and my health!";
    for (auto _ : state) {
        benchmark::DoNotOptimize(carebot::normalize(text));
    }
}
BENCHMARK(BM_NormalizeUtterance);

} // namespace
