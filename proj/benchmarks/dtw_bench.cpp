#include <audiobook/temporal/dtw.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

// Envelope-sized inputs: 40 steps per second of narration.
void BM_DtwAlign(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n), y(n + n / 4);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * static_cast<double>(i));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::sin(0.08 * static_cast<double>(i));
  for (auto _ : state) benchmark::DoNotOptimize(audiobook::dtw_align(x, y));
}
BENCHMARK(BM_DtwAlign)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace
