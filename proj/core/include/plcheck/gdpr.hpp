#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "plcheck/engine.hpp"

namespace plcheck {

/// Node of a rulebook definition body.
struct RuleNode {
  enum class Kind { kUnion, kIntersection, kRequires, kRef, kComplementTest, kUnmodeled };

  Kind kind = Kind::kUnmodeled;
  std::vector<RuleNode> children;  // union, intersection
  std::string property;            // requires, complement-test
  ClassExpr filler;                // requires
  /// Ref target, tested class of a complement-test, or the note of an
  /// unmodeled stub.
  std::string target;
  bool complemented = true;        // complement-test

  static RuleNode union_of(std::vector<RuleNode> branches);
  static RuleNode intersection(std::vector<RuleNode> members);
  static RuleNode requires_(std::string property, ClassExpr filler);
  static RuleNode ref(std::string name);
  static RuleNode complement_test(std::string property, std::string class_id, bool complemented = true);
  static RuleNode unmodeled(std::string note);

  bool operator==(const RuleNode&) const = default;
};

struct RegulatoryRulebook {
  std::map<std::string, RuleNode, std::less<>> definitions;
  std::string root = "GDPR_Compliance";

  const RuleNode& definition(std::string_view name) const;
  /// Throws RulebookError on a dangling or cyclic Ref, or a missing root.
  void validate() const;

  bool operator==(const RegulatoryRulebook&) const = default;
};

/// The partial GDPR axiomatization (lawfulness, sensitive data, subject
/// rights and security duties, transfers), with unprinted article bodies as
/// unmodeled stubs.
RegulatoryRulebook builtin_gdpr_rulebook();

/// JSON document {"root": name, "definitions": {name: node}}. Nodes:
///   {"union": [..]}  {"intersection": [..]}  {"ref": name}
///   {"requires": {"property": p, "filler": expr}}
///   {"complement-test": {"property": p, "class": c, "complemented": bool}}
///   {"unmodeled": note}
/// Filler expressions: "Class", {"and": [..]}, {"or": [..]}, {"not": "Class"},
/// {"some": {"property": p, "filler": expr}}, {"interval": [lo, hi | "*"]}.
RegulatoryRulebook load_rulebook(std::string_view source);
RegulatoryRulebook load_rulebook_file(const std::filesystem::path& path);
std::string serialize_rulebook(const RegulatoryRulebook& rb);

/// Evaluates every satisfiable business disjunct against the root
/// definition. A cover entry names the root branch that held; a failure
/// carries the definition path down to the failing leaf.
ComplianceReport check_regulatory(const VocabularyOntology& voc, const NormalPolicy& business,
                                  const RegulatoryRulebook& rb);
ComplianceReport check_regulatory(const VocabularyOntology& voc, const FullPolicy& business,
                                  const RegulatoryRulebook& rb);

/// A definition with all Refs expanded, as one filler expression over the
/// whole policy (unmodeled stubs become the empty union).
ClassExpr inline_definition(const RegulatoryRulebook& rb, std::string_view name);

}  // namespace plcheck
