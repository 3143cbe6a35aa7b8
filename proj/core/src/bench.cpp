#include "plcheck/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "plcheck/engine.hpp"
#include "plcheck/normalizer.hpp"

namespace plcheck {

std::string BenchResult::to_json() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fingerprint));
  nlohmann::ordered_json j{
      {"profile", profile},
      {"fingerprint", hex},
      {"parallelism", parallelism},
      {"warmup", warmup},
      {"checks", checks},
      {"phase1_seconds", phase1_seconds},
      {"wall_seconds", wall_seconds},
      {"mean_us", mean_us},
      {"median_us", median_us},
      {"p99_us", p99_us},
      {"checks_per_second", checks_per_second},
      {"compliant", compliant},
      {"agreeing", agreeing},
  };
  return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

BenchResult run_bench(const Workload& w, const BenchOptions& options) {
  BenchResult r;
  r.profile = w.profile.name;
  r.fingerprint = w.profile.fingerprint();
  r.parallelism = std::max<std::size_t>(1, options.parallelism);
  r.warmup = options.warmup;
  r.checks = w.checks.size();

  const auto phase1_start = Clock::now();
  std::vector<NormalPolicy> business, consents;
  business.reserve(w.business.size());
  consents.reserve(w.consents.size());
  for (const auto& p : w.business) business.push_back(normalize_full(w.vocab, p));
  for (const auto& p : w.consents) consents.push_back(normalize_full(w.vocab, p));
  r.phase1_seconds = seconds(Clock::now() - phase1_start);

  auto check = [&](const CheckPair& c) { return complies(w.vocab, business[c.business], consents[c.consent]); };

  for (std::size_t i = 0; i < options.warmup && !w.checks.empty(); ++i) {
    volatile bool sink = check(w.checks[i % w.checks.size()]);
    (void)sink;
  }

  std::vector<double> latency(w.checks.size());
  r.verdicts.assign(w.checks.size(), 0);
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto t0 = Clock::now();
      const bool ok = check(w.checks[i]);
      const auto t1 = Clock::now();
      latency[i] = std::chrono::duration<double, std::micro>(t1 - t0).count();
      r.verdicts[i] = ok ? 1 : 0;
    }
  };

  const auto wall_start = Clock::now();
  if (r.parallelism == 1) {
    worker(0, w.checks.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t n = w.checks.size();
    for (std::size_t k = 0; k < r.parallelism; ++k) {
      pool.emplace_back(worker, n * k / r.parallelism, n * (k + 1) / r.parallelism);
    }
  }
  r.wall_seconds = seconds(Clock::now() - wall_start);

  for (std::size_t i = 0; i < w.checks.size(); ++i) {
    r.compliant += r.verdicts[i];
    r.agreeing += (r.verdicts[i] != 0) == w.checks[i].compliant ? 1 : 0;
  }
  if (!latency.empty()) {
    double total = 0;
    for (double l : latency) total += l;
    r.mean_us = total / static_cast<double>(latency.size());
    std::sort(latency.begin(), latency.end());
    const std::size_t n = latency.size();
    r.median_us = n % 2 ? latency[n / 2] : (latency[n / 2 - 1] + latency[n / 2]) / 2;
    // Nearest-rank percentile.
    const std::size_t rank = (99 * n + 99) / 100;
    r.p99_us = latency[std::max<std::size_t>(rank, 1) - 1];
  }
  r.checks_per_second = r.wall_seconds > 0 ? static_cast<double>(r.checks) / r.wall_seconds : 0;
  return r;
}

}  // namespace plcheck
