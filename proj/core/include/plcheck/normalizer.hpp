#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "plcheck/policy.hpp"
#include "plcheck/vocab.hpp"

namespace plcheck {

struct NormalFiller;

/// All existential successors of one property. Functional properties have
/// exactly one (merged) filler; other properties keep a sorted set.
struct NormalSlot {
  PropertyId property = 0;
  std::vector<NormalFiller> fillers;
};

/// A filler closed under the vocabulary axioms.
///
///  - `names` holds equivalence-class representatives with redundant
///    superclasses removed (the range class of the enclosing property is
///    added before the reduction).
///  - a filler with an `interval` is a data value; data values carry no
///    names and no slots.
///  - `satisfiable` is false if this filler or any nested filler is empty.
struct NormalFiller {
  std::vector<ClassId> names;
  std::vector<NormalSlot> slots;
  std::optional<Interval> interval;
  bool satisfiable = true;

  const NormalSlot* slot(PropertyId p) const noexcept;
};

bool operator==(const NormalSlot& a, const NormalSlot& b);
bool operator<(const NormalSlot& a, const NormalSlot& b);
bool operator==(const NormalFiller& a, const NormalFiller& b);
bool operator<(const NormalFiller& a, const NormalFiller& b);

struct NormalSimplePolicy {
  NormalFiller root;
  /// Index of the source disjunct within its full policy.
  std::size_t provenance = 0;
  /// Identity of the vocabulary the policy was closed under.
  std::uint64_t vocabulary = 0;

  bool satisfiable() const noexcept { return root.satisfiable; }
  bool operator==(const NormalSimplePolicy&) const = default;
};

using NormalPolicy = std::vector<NormalSimplePolicy>;

/// Normalizes a filler that occurs under `context` (whose range axiom then
/// applies), or a top-level expression when `context` is empty. Throws
/// VocabularyError for undeclared classes or properties and Error for
/// complement/union constructs.
NormalFiller normalize_filler(const VocabularyOntology& voc, const ClassExpr& e,
                              std::optional<PropertyId> context = std::nullopt);

NormalSimplePolicy normalize_simple(const VocabularyOntology& voc, const SimplePolicy& p,
                                    std::size_t provenance = 0);

/// Every disjunct is normalized independently; unsatisfiable disjuncts are
/// kept and flagged.
NormalPolicy normalize_full(const VocabularyOntology& voc, const FullPolicy& fp);

/// True when no disjunct is satisfiable.
bool vacuous(const NormalPolicy& p) noexcept;

/// Back-translation into the policy AST; normalizing the result gives the
/// same normal form again.
ClassExpr to_class_expr(const VocabularyOntology& voc, const NormalFiller& f);
SimplePolicy to_simple_policy(const VocabularyOntology& voc, const NormalSimplePolicy& p);
FullPolicy to_full_policy(const VocabularyOntology& voc, const NormalPolicy& p, PolicyKind kind);

}  // namespace plcheck
