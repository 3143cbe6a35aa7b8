#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "plcheck/class_expr.hpp"

namespace plcheck {

enum class PolicyKind { kConsent, kBusiness };

/// Storage slot. Either "not stored" (`spl:Null`), a plain class filler
/// (e.g. `spl:AnyStorage`), or a block with a location and a retention
/// period given as a day interval or a duration class.
struct StorageExpr {
  enum class Form { kNull, kClass, kBlock };

  Form form = Form::kNull;
  ClassExpr filler;                                // kClass
  ClassExpr location;                              // kBlock
  std::variant<Interval, ClassExpr> duration = Interval::all();  // kBlock

  static StorageExpr null() { return {}; }
  static StorageExpr of_class(ClassExpr c);
  static StorageExpr block(ClassExpr location, std::variant<Interval, ClassExpr> duration = Interval::all());

  bool operator==(const StorageExpr&) const = default;
};

/// One conjunctive usage or business record.
struct SimplePolicy {
  ClassExpr data;
  ClassExpr purpose;
  ClassExpr processing;
  ClassExpr recipient;
  StorageExpr storage;
  std::vector<ClassExpr> duties;          // business policies only
  std::optional<ClassExpr> legal_basis;   // business policies only

  bool operator==(const SimplePolicy&) const = default;
};

/// A union of simple policies. Disjunct order is significant: reports
/// refer to disjuncts by index.
struct FullPolicy {
  PolicyKind kind = PolicyKind::kConsent;
  std::vector<SimplePolicy> disjuncts;

  bool operator==(const FullPolicy&) const = default;
};

/// The simple policy as one class expression: an intersection of
/// existential restrictions over the slot properties.
ClassExpr to_class_expr(const SimplePolicy& p);

/// Drops duties and legal basis.
SimplePolicy usage_projection(const SimplePolicy& p);

}  // namespace plcheck
