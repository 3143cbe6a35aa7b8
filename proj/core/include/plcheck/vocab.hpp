#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "plcheck/bitset.hpp"

namespace plcheck {

using ClassId = std::uint32_t;
using PropertyId = std::uint32_t;

enum class RangeKind { kNone, kClass, kInterval };

struct PropertyDecl {
  std::string id;
  bool functional = false;
  RangeKind range = RangeKind::kNone;
  std::string range_class;  // set when range == kClass

  bool operator==(const PropertyDecl&) const = default;
};

/// The five usage attributes of a simple policy.
enum class UsageAttribute { kData, kPurpose, kProcessing, kRecipient, kStorage };
inline constexpr std::array<UsageAttribute, 5> kUsageAttributes = {
    UsageAttribute::kData, UsageAttribute::kPurpose, UsageAttribute::kProcessing,
    UsageAttribute::kRecipient, UsageAttribute::kStorage};

std::string_view attribute_property(UsageAttribute a) noexcept;
std::string_view attribute_top(UsageAttribute a) noexcept;

/// Axiom counts in the shape of the ontology rows of the pilot workloads.
struct VocabularyCensus {
  std::size_t classes = 0;
  std::size_t inclusions = 0;
  std::size_t disjoint_axioms = 0;
  std::size_t range_axioms = 0;
  std::size_t functional_properties = 0;
  std::size_t height = 0;

  bool operator==(const VocabularyCensus&) const = default;
};

/// Classes, properties and the four axiom kinds (inclusion, disjointness,
/// range, functionality), together with their closure:
///
///  - `ancestors(a)` is the reflexive-transitive subclass relation; cycles
///    collapse into equivalence groups with a single representative.
///  - `disjoint_with(a)` holds every b such that some asserted disjoint pair
///    (A, B) has a ⊑ A and b ⊑ B.
///  - a class is unsatisfiable iff its ancestors contain an asserted
///    disjoint pair.
///
/// Immutable once built; every query is const and thread-safe.
class VocabularyOntology {
 public:
  class Builder;

  std::size_t class_count() const noexcept { return classes_.size(); }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<PropertyDecl>& properties() const noexcept { return properties_; }
  const std::vector<std::pair<std::string, std::string>>& subclass_axioms() const noexcept {
    return subclass_axioms_;
  }
  const std::vector<std::vector<std::string>>& disjointness_axioms() const noexcept {
    return disjointness_axioms_;
  }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::optional<ClassId> find_class(std::string_view id) const;
  /// Throws VocabularyError for undeclared ids.
  ClassId class_id(std::string_view id) const;
  const std::string& class_name(ClassId c) const { return classes_.at(c); }

  std::optional<PropertyId> find_property(std::string_view id) const;
  PropertyId property_id(std::string_view id) const;
  const PropertyDecl& property(PropertyId p) const { return properties_.at(p); }
  /// Range class of an object property, if it declares one.
  std::optional<ClassId> range_class(PropertyId p) const { return range_ids_.at(p); }

  bool is_subclass(ClassId sub, ClassId super) const noexcept { return ancestors_[sub].test(super); }
  bool is_subclass(std::string_view sub, std::string_view super) const;
  bool are_disjoint(ClassId a, ClassId b) const noexcept { return disjoint_[a].test(b); }
  bool are_disjoint(std::string_view a, std::string_view b) const;
  bool satisfiable(ClassId c) const noexcept { return !disjoint_[c].test(c); }
  ClassId representative(ClassId c) const noexcept { return representative_[c]; }

  const DynamicBitset& ancestors(ClassId c) const noexcept { return ancestors_[c]; }
  const DynamicBitset& descendants(ClassId c) const noexcept { return descendants_[c]; }
  const DynamicBitset& disjoint_with(ClassId c) const noexcept { return disjoint_[c]; }

  /// Length (in edges) of the longest strict subclass chain.
  std::size_t height() const noexcept { return height_; }
  VocabularyCensus census() const;

  std::optional<ClassId> top(UsageAttribute a) const { return find_class(attribute_top(a)); }

  /// FNV-1a of the serialized declarations; normalized policies remember it
  /// so that policies closed under different vocabularies are never compared.
  std::uint64_t identity() const noexcept { return identity_; }

 private:
  void close();

  std::vector<std::string> classes_;
  std::unordered_map<std::string, ClassId> class_index_;
  std::vector<PropertyDecl> properties_;
  std::unordered_map<std::string, PropertyId> property_index_;
  std::vector<std::optional<ClassId>> range_ids_;
  std::vector<std::pair<std::string, std::string>> subclass_axioms_;
  std::vector<std::vector<std::string>> disjointness_axioms_;
  std::vector<std::string> warnings_;

  std::vector<DynamicBitset> ancestors_;
  std::vector<DynamicBitset> descendants_;
  std::vector<DynamicBitset> disjoint_;
  std::vector<ClassId> representative_;
  std::size_t height_ = 0;
  std::uint64_t identity_ = 0;
};

/// Programmatic construction; `build()` validates references and computes
/// the closure.
class VocabularyOntology::Builder {
 public:
  Builder& add_class(std::string id);
  Builder& add_subclass(std::string sub, std::string super);
  Builder& add_disjoint(std::vector<std::string> group);
  /// Identical redeclaration is accepted; a conflicting one throws.
  Builder& add_property(PropertyDecl decl);

  VocabularyOntology build() &&;

 private:
  VocabularyOntology voc_;
};

/// Parses the line-oriented vocabulary format:
///
///   # comment
///   class <id>
///   subclass <sub> <super>
///   disjoint <id> <id> [<id> ...]
///   property <id> functional|multi [range=<class-id>|range=interval]
VocabularyOntology load_vocabulary(std::string_view source);
VocabularyOntology load_vocabulary_file(const std::filesystem::path& path);

/// Inverse of load_vocabulary (declaration order preserved).
std::string serialize_vocabulary(const VocabularyOntology& voc);

}  // namespace plcheck
