// Hot paths: one reasoning step, a full reasoning run, similarity scoring,
// SLIC segmentation and model training on synthetic data.
#include <benchmark/benchmark.h>

#include <random>

#include "ifcm/features.hpp"
#include "ifcm/inference.hpp"
#include "ifcm/reasoning.hpp"
#include "ifcm/training.hpp"

using namespace ifcm;

namespace {

IfValue random_value(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0, 1);
  const double mu = u(rng);
  return IfValue(mu, u(rng) * (1 - mu));
}

// m inputs fully linked, each feeding f outputs.
IfWeightMatrix model_weights(std::mt19937_64 &rng, std::size_t m, std::size_t f) {
  IfWeightMatrix w(m + f);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t o = 0; o < f; ++o) w.set(i, m + o, random_value(rng));
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) w.set(i, j, random_value(rng));
  }
  return w;
}

IfcmState random_state(std::mt19937_64 &rng, std::size_t m, std::size_t f) {
  IfcmState s;
  for (std::size_t k = 0; k < m; ++k) s.push_back(random_value(rng));
  for (std::size_t k = 0; k < f; ++k) s.emplace_back(0.0, 1.0);
  return s;
}

std::vector<Vector> random_vectors(std::mt19937_64 &rng, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> g(0, 1);
  std::vector<Vector> out(n, Vector(dim));
  for (auto &v : out)
    for (auto &x : v) x = g(rng);
  return out;
}

void BM_IfcmStep(benchmark::State &state) {
  std::mt19937_64 rng(1);
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto w = model_weights(rng, m, 10);
  const auto s = random_state(rng, m, 10);
  const ReasoningConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(ifcm_step(s, w, cfg));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(m + 10));
}
BENCHMARK(BM_IfcmStep)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNSquared);

void BM_RunReasoning(benchmark::State &state) {
  std::mt19937_64 rng(2);
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto w = model_weights(rng, m, 10);
  const auto s = random_state(rng, m, 10);
  ReasoningConfig cfg;
  cfg.sustained = m;
  for (auto _ : state) benchmark::DoNotOptimize(run_reasoning(s, w, cfg));
}
BENCHMARK(BM_RunReasoning)->Arg(20)->Arg(100);

void BM_Similarity(benchmark::State &state) {
  std::mt19937_64 rng(3);
  const auto medoids = random_vectors(rng, static_cast<std::size_t>(state.range(0)), 512);
  const auto regions = random_vectors(rng, 16, 512);
  for (auto _ : state) benchmark::DoNotOptimize(similarity(regions, medoids));
}
BENCHMARK(BM_Similarity)->Arg(10)->Arg(100)->Arg(500);

void BM_Slic(benchmark::State &state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> u(0, 1);
  const auto side = static_cast<std::size_t>(state.range(0));
  Raster r{side, side, 3, std::vector<float>(3 * side * side)};
  for (auto &v : r.data) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(slic_segment(r, 16));
}
BENCHMARK(BM_Slic)->Arg(64)->Arg(224);

void BM_Train(benchmark::State &state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 0.08);
  std::uniform_real_distribution<double> u(0, 1);
  const std::vector<ClassSpec> classes{{1, "a"}, {2, "b"}, {3, "c"}};
  std::vector<Vector> centers = random_vectors(rng, 3, 32);
  std::vector<LabeledRegions> samples;
  for (std::size_t k = 0; k < 120; ++k) {
    const auto c = k % 3;
    LabeledRegions s{"i" + std::to_string(k), static_cast<std::int32_t>(c + 1), {}};
    for (int p = 0; p < 12; ++p) {
      Vector v(32);
      for (std::size_t d = 0; d < 32; ++d) v[d] = p < 8 ? centers[c][d] + g(rng) : u(rng);
      s.regions.push_back(std::move(v));
    }
    samples.push_back(std::move(s));
  }
  TrainingConfig cfg;
  cfg.clusters_per_class = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(samples, classes, cfg));
}
BENCHMARK(BM_Train)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
