#include "carebot/metrics.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace carebot::metrics;

void BM_SusScore(benchmark::State& state) {
    const std::vector<int> answers{4, 2, 5, 1, 4, 2, 5, 1, 4, 2};
    for (auto _ : state) {
        benchmark::DoNotOptimize(sus_score(answers));
    }
}
BENCHMARK(BM_SusScore);

void BM_UeqScore(benchmark::State& state) {
    std::vector<int> answers(26);
    for (std::size_t i = 0; i < answers.size(); ++i) {
        answers[i] = static_cast<int>(i % 7) + 1;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ueq_score(answers));
    }
}
BENCHMARK(BM_UeqScore);

} // namespace
