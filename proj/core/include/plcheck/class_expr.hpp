#pragma once

#include <string>
#include <vector>

#include "plcheck/interval.hpp"

namespace plcheck {

/// Filler expression of a policy slot or a rulebook requirement.
///
/// Policies only use kNamed, kIntersection, kExists and kInterval;
/// kComplement and kUnion appear in regulatory rulebooks.
class ClassExpr {
 public:
  enum class Kind { kNamed, kIntersection, kExists, kInterval, kComplement, kUnion };

  static ClassExpr named(std::string id);
  static ClassExpr intersection(std::vector<ClassExpr> members);
  static ClassExpr exists(std::string property, ClassExpr filler);
  static ClassExpr interval(Interval iv);
  static ClassExpr complement(std::string id);
  static ClassExpr union_of(std::vector<ClassExpr> branches);
  /// The empty intersection.
  static ClassExpr top() { return intersection({}); }

  Kind kind() const noexcept { return kind_; }
  bool is(Kind k) const noexcept { return kind_ == k; }

  /// Class id for kNamed / kComplement, property id for kExists.
  const std::string& id() const noexcept { return id_; }
  /// Members, branches, or the single filler of kExists.
  const std::vector<ClassExpr>& children() const noexcept { return children_; }
  const ClassExpr& filler() const { return children_.at(0); }
  const Interval& bounds() const noexcept { return interval_; }

  /// True when the expression contains a complement or union anywhere.
  bool uses_rulebook_constructs() const;
  /// Maximum nesting of kExists.
  std::size_t exists_depth() const;

  bool operator==(const ClassExpr&) const = default;

 private:
  Kind kind_ = Kind::kIntersection;
  std::string id_;
  std::vector<ClassExpr> children_;
  Interval interval_{};
};

/// Functional-syntax rendering, e.g.
/// `ObjectIntersectionOf(A ObjectSomeValuesFrom(contact SMS))`; used in
/// explanations.
std::string to_string(const ClassExpr& e);

}  // namespace plcheck
