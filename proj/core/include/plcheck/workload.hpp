#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "plcheck/policy.hpp"
#include "plcheck/vocab.hpp"

namespace plcheck {

/// Axiom counts the generated vocabulary must hit exactly.
struct OntologyShape {
  std::size_t inclusions = 186;
  std::size_t disjoint_axioms = 11;
  std::size_t range_axioms = 10;
  std::size_t functional_properties = 8;
  std::size_t height = 4;
};

struct WorkloadProfile {
  std::string name;
  OntologyShape ontology;
  std::size_t bp_count = 0;
  double bp_avg_disjuncts = 1.0;
  std::size_t consent_count = 0;
  double consent_avg_disjuncts = 1.0;
  std::size_t check_count = 0;
  std::uint64_t seed = 1;
  double target_compliant = 0.5;

  static WorkloadProfile pilot1();
  static WorkloadProfile pilot2();
  /// "pilot1" or "pilot2"; throws Error otherwise.
  static WorkloadProfile named(std::string_view name);

  /// Throws Error for inconsistent profiles.
  void validate() const;
  /// FNV-1a over every field, seed included.
  std::uint64_t fingerprint() const;
};

struct CheckPair {
  std::size_t business = 0;
  std::size_t consent = 0;
  /// Ground truth, known from the construction.
  bool compliant = false;
};

struct Workload {
  WorkloadProfile profile;
  VocabularyOntology vocab;
  std::vector<FullPolicy> business;
  std::vector<FullPolicy> consents;
  std::vector<CheckPair> checks;
};

struct WorkloadStats {
  VocabularyCensus census;
  std::size_t business = 0;
  std::size_t consents = 0;
  std::size_t checks = 0;
  double bp_avg_disjuncts = 0;
  double consent_avg_disjuncts = 0;
  double compliant_fraction = 0;
};

/// Deterministic for a given profile (seed included). The vocabulary is a
/// forest of the profile's height under the attribute tops; consents of
/// compliant pairs generalize every disjunct of the paired business policy,
/// consents of non-compliant pairs miss the data category of one disjunct.
Workload generate_workload(const WorkloadProfile& profile);

WorkloadStats workload_stats(const Workload& w);

/// Text form of a whole workload (vocabulary, policies, pairing), used to
/// compare generator runs.
std::string serialize_workload(const Workload& w);

/// Seeded generator with platform-independent bounded sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace plcheck
