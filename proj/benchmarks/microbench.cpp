#include <benchmark/benchmark.h>

#include "plcheck/engine.hpp"
#include "plcheck/normalizer.hpp"
#include "plcheck/workload.hpp"

namespace {

const plcheck::Workload& pilot1() {
  static const plcheck::Workload w = plcheck::generate_workload(plcheck::WorkloadProfile::pilot1());
  return w;
}

void BM_Normalize(benchmark::State& state) {
  const auto& w = pilot1();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plcheck::normalize_full(w.vocab, w.business[i++ % w.business.size()]));
  }
}
BENCHMARK(BM_Normalize);

void BM_Check(benchmark::State& state) {
  const auto& w = pilot1();
  std::vector<plcheck::NormalPolicy> bps, consents;
  for (const auto& p : w.business) bps.push_back(plcheck::normalize_full(w.vocab, p));
  for (const auto& p : w.consents) consents.push_back(plcheck::normalize_full(w.vocab, p));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = w.checks[i++ % w.checks.size()];
    benchmark::DoNotOptimize(plcheck::complies(w.vocab, bps[c.business], consents[c.consent]));
  }
}
BENCHMARK(BM_Check);

void BM_GenerateVocabulary(benchmark::State& state) {
  auto profile = plcheck::WorkloadProfile::pilot1();
  profile.bp_count = profile.consent_count = 1;
  profile.check_count = 0;
  for (auto _ : state) benchmark::DoNotOptimize(plcheck::generate_workload(profile));
}
BENCHMARK(BM_GenerateVocabulary);

}  // namespace

BENCHMARK_MAIN();
