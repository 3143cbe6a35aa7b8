#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "plcheck/workload.hpp"

namespace plcheck {

struct BenchOptions {
  /// Untimed checks run before the timed region (cycling through the
  /// pairing list).
  std::size_t warmup = 0;
  std::size_t parallelism = 1;
};

struct BenchResult {
  std::string profile;
  std::uint64_t fingerprint = 0;
  std::size_t parallelism = 1;
  std::size_t warmup = 0;
  std::size_t checks = 0;
  /// Normalization of every policy, outside the timed region.
  double phase1_seconds = 0;
  double wall_seconds = 0;
  double mean_us = 0;
  double median_us = 0;
  double p99_us = 0;
  double checks_per_second = 0;
  std::size_t compliant = 0;
  /// Checks whose verdict matches the generator's ground truth.
  std::size_t agreeing = 0;
  /// Verdict per check, in pairing order.
  std::vector<std::uint8_t> verdicts;

  /// One JSON object (without the verdict list).
  std::string to_json() const;
};

/// Normalizes all policies (phase 1), then times each check of the pairing
/// list. Workers take contiguous chunks of the list and share nothing
/// mutable.
BenchResult run_bench(const Workload& w, const BenchOptions& options = {});

}  // namespace plcheck
