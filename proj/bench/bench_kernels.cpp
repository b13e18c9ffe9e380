// Parallel kernels against their ldnet::serial references.

#include <cmath>

#include <benchmark/benchmark.h>

#include "ldnet/graph_model.hpp"
#include "ldnet/rate_functions.hpp"
#include "ldnet/simulator.hpp"
#include "ldnet/social_learning.hpp"

using namespace ldnet;

namespace {

GraphDistribution sparseExplicit(int n) {
  // Chain, circulant and empty graph mixed, so J needs full cut enumeration.
  return GraphDistribution::explicitSupport({{Graph::chain(n), 0.6}, {Graph::circulant(n, 2), 0.3}, {Graph(n), 0.1}});
}

void BM_Enumeration(benchmark::State& state) {
  const auto d = sparseExplicit(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rateOfConsensusByEnumeration(d).rate);
}

void BM_EnumerationSerial(benchmark::State& state) {
  const auto d = sparseExplicit(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::rateOfConsensusByEnumeration(d).rate);
}

ScalarGridFunction envelopeSamples(int count) {
  const EnvelopeRate e(GaussianSource::standard(), 5, 2, 5.0);
  return sampleOnGrid([&](double x) { return e(Vector::Constant(1, x)); }, UniformGrid(-8.0, 8.0, count));
}

void BM_Conjugate(benchmark::State& state) {
  const auto f = envelopeSamples(static_cast<int>(state.range(0)));
  const UniformGrid dual(-20.0, 20.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(numericConjugate(f, dual)[0]);
}

void BM_ConjugateSerial(benchmark::State& state) {
  const auto f = envelopeSamples(static_cast<int>(state.range(0)));
  const UniformGrid dual(-20.0, 20.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::numericConjugate(f, dual)[0]);
}

SimulationConfig ensembleConfig(std::int64_t runs) {
  return SimulationConfig{.network = GraphDistribution::iidFailures(Graph::star(4), 0.3),
                          .weights = WeightRule::metropolis(),
                          .source = GaussianSource::standard(),
                          .horizon = 40,
                          .trajectories = runs,
                          .seed = 7,
                          .targets = {{1, TargetSet::ballComplement(Vector::Constant(1, 0.0), 0.3)}},
                          .recordTimes = {10, 20, 40},
                          .storeStates = false};
}

void BM_Ensemble(benchmark::State& state) {
  const auto cfg = ensembleConfig(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(runEnsemble(cfg).hits.size());
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto cfg = ensembleConfig(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::runEnsemble(cfg).hits.size());
}

SocialLearningConfig socialConfig(std::int64_t runs) {
  return SocialLearningConfig{.network = GraphDistribution::iidFailures(Graph::circulant(6, 2), 0.3),
                              .weights = WeightRule::metropolis(),
                              .model = HypothesisModel({0.0, 1.0, 2.0}, 1.0),
                              .horizon = 100,
                              .trajectories = runs,
                              .seed = 3,
                              .recordTimes = {50, 100}};
}

void BM_SocialLearning(benchmark::State& state) {
  const auto cfg = socialConfig(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(runSocialLearning(cfg).total);
}

void BM_SocialLearningSerial(benchmark::State& state) {
  const auto cfg = socialConfig(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(serial::runSocialLearning(cfg).total);
}

}  // namespace

BENCHMARK(BM_Enumeration)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnumerationSerial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Conjugate)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConjugateSerial)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ensemble)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleSerial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SocialLearning)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SocialLearningSerial)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
