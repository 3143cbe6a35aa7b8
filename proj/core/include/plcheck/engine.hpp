#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plcheck/normalizer.hpp"

namespace plcheck {

enum class Verdict { kCompliant, kNonCompliant, kVacuouslyCompliant };

/// "compliant", "non-compliant", "vacuously-compliant".
std::string_view to_string(Verdict v) noexcept;

struct CoverEntry {
  std::size_t business = 0;
  /// Usually a single consent disjunct (or rulebook branch). Several indices
  /// mean the disjuncts cover the business disjunct only jointly, by
  /// splitting one of its duration intervals.
  std::vector<std::size_t> by;

  bool operator==(const CoverEntry&) const = default;
};

struct FailureTrace {
  std::size_t business = 0;
  /// Consent disjunct that came closest to covering the business disjunct.
  std::optional<std::size_t> against;
  /// Property path for consent checks; definition path ending in the failing
  /// leaf for rulebook checks.
  std::vector<std::string> path;
  std::string found;
  std::string required;
  std::string reason;

  bool operator==(const FailureTrace&) const = default;
};

struct ComplianceReport {
  Verdict verdict = Verdict::kCompliant;
  std::vector<CoverEntry> cover;
  /// Business disjuncts that were skipped as unsatisfiable.
  std::vector<std::size_t> unsatisfiable;
  std::optional<FailureTrace> failure;

  bool compliant() const noexcept { return verdict != Verdict::kNonCompliant; }
  bool operator==(const ComplianceReport&) const = default;
};

/// d ⊑ c for a normalized filler d and an arbitrary filler expression c.
/// Complement(A) holds when d is empty, A is unsatisfiable, d is a data
/// value, or some name of d is disjoint from A.
bool subsumes_filler(const VocabularyOntology& voc, const NormalFiller& d, const ClassExpr& c);

/// d ⊑ c for two fillers normalized under the same property.
bool subsumes_filler(const VocabularyOntology& voc, const NormalFiller& d, const NormalFiller& c);

/// p ⊑ q. Throws Error if p and q were normalized under different
/// vocabularies.
bool subsumes_simple(const VocabularyOntology& voc, const NormalSimplePolicy& p,
                     const NormalSimplePolicy& q);

/// Business policy ⊑ union of consent disjuncts, decided per business
/// disjunct.
ComplianceReport check_compliance(const VocabularyOntology& voc, const NormalPolicy& business,
                                  const NormalPolicy& consent);
ComplianceReport check_compliance(const VocabularyOntology& voc, const FullPolicy& business,
                                  const FullPolicy& consent);

/// Verdict only; skips explanation work. Used on hot paths.
bool complies(const VocabularyOntology& voc, const NormalSimplePolicy& p, const NormalPolicy& consent);
bool complies(const VocabularyOntology& voc, const NormalPolicy& business, const NormalPolicy& consent);

/// Functional-syntax rendering of a normalized filler.
std::string render(const VocabularyOntology& voc, const NormalFiller& f);

}  // namespace plcheck
