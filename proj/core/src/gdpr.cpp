#include "plcheck/gdpr.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "plcheck/error.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

using Json = nlohmann::ordered_json;

RuleNode RuleNode::union_of(std::vector<RuleNode> branches) {
  RuleNode n;
  n.kind = Kind::kUnion;
  n.children = std::move(branches);
  return n;
}

RuleNode RuleNode::intersection(std::vector<RuleNode> members) {
  RuleNode n;
  n.kind = Kind::kIntersection;
  n.children = std::move(members);
  return n;
}

RuleNode RuleNode::requires_(std::string property, ClassExpr filler) {
  RuleNode n;
  n.kind = Kind::kRequires;
  n.property = std::move(property);
  n.filler = std::move(filler);
  return n;
}

RuleNode RuleNode::ref(std::string name) {
  RuleNode n;
  n.kind = Kind::kRef;
  n.target = std::move(name);
  return n;
}

RuleNode RuleNode::complement_test(std::string property, std::string class_id, bool complemented) {
  RuleNode n;
  n.kind = Kind::kComplementTest;
  n.property = std::move(property);
  n.target = std::move(class_id);
  n.complemented = complemented;
  return n;
}

RuleNode RuleNode::unmodeled(std::string note) {
  RuleNode n;
  n.kind = Kind::kUnmodeled;
  n.target = std::move(note);
  return n;
}

const RuleNode& RegulatoryRulebook::definition(std::string_view name) const {
  auto it = definitions.find(name);
  if (it == definitions.end()) throw RulebookError("undefined rule '" + std::string(name) + "'");
  return it->second;
}

namespace {

void collect_refs(const RuleNode& n, std::vector<std::string>& out) {
  if (n.kind == RuleNode::Kind::kRef) out.push_back(n.target);
  for (const auto& c : n.children) collect_refs(c, out);
}

}  // namespace

void RegulatoryRulebook::validate() const {
  if (!definitions.contains(root)) throw RulebookError("root '" + root + "' is not defined");
  std::map<std::string, std::vector<std::string>, std::less<>> edges;
  for (const auto& [name, body] : definitions) {
    auto& targets = edges[name];
    collect_refs(body, targets);
    for (const auto& t : targets) {
      if (!definitions.contains(t)) throw RulebookError("'" + name + "' refers to undefined rule '" + t + "'");
    }
  }
  // 0 = unvisited, 1 = on stack, 2 = done
  std::map<std::string, int, std::less<>> state;
  std::vector<std::string> stack;
  auto visit = [&](auto&& self, const std::string& name) -> void {
    state[name] = 1;
    stack.push_back(name);
    for (const auto& t : edges[name]) {
      if (state[t] == 1) {
        std::string cycle;
        auto from = std::find(stack.begin(), stack.end(), t);
        for (auto it = from; it != stack.end(); ++it) cycle += *it + " -> ";
        throw RulebookError("cyclic rule references: " + cycle + t);
      }
      if (state[t] == 0) self(self, t);
    }
    stack.pop_back();
    state[name] = 2;
  };
  for (const auto& [name, body] : definitions) {
    if (state[name] == 0) visit(visit, name);
  }
}

RegulatoryRulebook builtin_gdpr_rulebook() {
  using N = RuleNode;
  const std::string data(terms::kHasData);
  const std::string basis(terms::kHasLegalBasis);
  const std::string duty(terms::kHasDuty);
  auto any_of = [](std::initializer_list<const char*> ids) {
    std::vector<ClassExpr> branches;
    for (const char* id : ids) branches.push_back(ClassExpr::named(id));
    return ClassExpr::union_of(std::move(branches));
  };

  RegulatoryRulebook rb;
  auto& d = rb.definitions;
  d["GDPR_Compliance"] = N::union_of({
      N::intersection({N::ref("Chap2_LawfulProcessing"), N::ref("Chap3_RightsOfDataSubjects"),
                       N::ref("Chap4_ControllerAndProcessorObligations"), N::ref("Chap5_DataTransfer")}),
      N::ref("Chap9_Derogations"),
  });
  d["Chap2_LawfulProcessing"] = N::union_of(
      {N::ref("Art6_LawfulProcessing"), N::ref("Art9_SensitiveData"), N::ref("Art10_CriminalData")});
  // The data-category complements guard the Art. 6 bases: those bases only
  // apply to data that is neither sensitive nor criminal.
  d["Art6_LawfulProcessing"] = N::intersection({
      N::complement_test(data, "SensitiveData_as_per_Art9"),
      N::complement_test(data, "CriminalConvictionData_as_per_Art10"),
      N::union_of({N::ref("Art6_1_LegalBasis"), N::ref("Art6_4_CompatiblePurpose")}),
  });
  d["Art6_1_LegalBasis"] = N::requires_(
      basis, any_of({"Art6_1_a_Consent", "Art6_1_b_Contract", "Art6_1_c_LegalObligation",
                     "Art6_1_d_VitalInterest", "Art6_1_e_PublicInterest", "Art6_1_f_LegitimateInterest"}));
  d["Art6_4_CompatiblePurpose"] = N::unmodeled("Art. 6(4) compatible further processing");
  d["Art9_SensitiveData"] = N::union_of({
      N::complement_test(data, "SensitiveData_as_per_Art9"),
      N::requires_(basis, any_of({"Art9_2_a_Consent", "Art9_2_b_EmploymentAndSocialSecurity",
                                  "Art9_2_c_VitalInterest", "Art9_2_d_LegitimateActivitiesOfAssociations",
                                  "Art9_2_e_PublicData", "Art9_2_f_Juducial", "Art9_2_g_PublicInteres",
                                  "Art9_2_h_PreventiveOrOccupationalMedicine", "Art9_2_i_PublicHealth",
                                  "Art9_2_j_ArchivingResearchStatistics"})),
  });
  d["Art10_CriminalData"] = N::unmodeled("Art. 10 criminal conviction data");
  d["Chap3_RightsOfDataSubjects"] = N::requires_(duty, ClassExpr::named("Art12-22_SubjectRights"));
  d["Chap4_ControllerAndProcessorObligations"] = N::requires_(duty, ClassExpr::named("Art32-37_Obligations"));
  d["Chap5_DataTransfer"] = N::union_of({
      N::requires_(std::string(terms::kHasStorage),
                   ClassExpr::exists(std::string(terms::kHasLocation), ClassExpr::named("EU"))),
      N::ref("Chap5_TransferSafeguards"),
  });
  d["Chap5_TransferSafeguards"] = N::unmodeled("adequacy decisions and appropriate safeguards");
  d["Chap9_Derogations"] = N::unmodeled("Chapter 9 derogations");
  return rb;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

Json expr_to_json(const ClassExpr& e) {
  switch (e.kind()) {
    case ClassExpr::Kind::kNamed:
      return e.id();
    case ClassExpr::Kind::kIntersection:
    case ClassExpr::Kind::kUnion: {
      Json items = Json::array();
      for (const auto& c : e.children()) items.push_back(expr_to_json(c));
      return Json{{e.is(ClassExpr::Kind::kUnion) ? "or" : "and", items}};
    }
    case ClassExpr::Kind::kExists:
      return Json{{"some", Json{{"property", e.id()}, {"filler", expr_to_json(e.filler())}}}};
    case ClassExpr::Kind::kInterval: {
      Json hi = e.bounds().unbounded() ? Json("*") : Json(e.bounds().hi);
      return Json{{"interval", Json::array({e.bounds().lo, hi})}};
    }
    case ClassExpr::Kind::kComplement:
      return Json{{"not", e.id()}};
  }
  return nullptr;
}

Json node_to_json(const RuleNode& n) {
  switch (n.kind) {
    case RuleNode::Kind::kUnion:
    case RuleNode::Kind::kIntersection: {
      Json items = Json::array();
      for (const auto& c : n.children) items.push_back(node_to_json(c));
      return Json{{n.kind == RuleNode::Kind::kUnion ? "union" : "intersection", items}};
    }
    case RuleNode::Kind::kRequires:
      return Json{{"requires", Json{{"property", n.property}, {"filler", expr_to_json(n.filler)}}}};
    case RuleNode::Kind::kRef:
      return Json{{"ref", n.target}};
    case RuleNode::Kind::kComplementTest:
      return Json{{"complement-test",
                   Json{{"property", n.property}, {"class", n.target}, {"complemented", n.complemented}}}};
    case RuleNode::Kind::kUnmodeled:
      return Json{{"unmodeled", n.target}};
  }
  return nullptr;
}

[[noreturn]] void malformed(const std::string& what, const Json& at) {
  throw RulebookError(what + ": " + at.dump());
}

const Json& single_member(const Json& j, std::string& key) {
  if (!j.is_object() || j.size() != 1) malformed("expected an object with exactly one key", j);
  key = j.begin().key();
  return j.begin().value();
}

const std::string& string_field(const Json& obj, const char* field) {
  if (!obj.is_object() || !obj.contains(field) || !obj.at(field).is_string()) {
    malformed(std::string("missing string field '") + field + "'", obj);
  }
  return obj.at(field).get_ref<const std::string&>();
}

ClassExpr expr_from_json(const Json& j) {
  if (j.is_string()) return ClassExpr::named(j.get<std::string>());
  std::string key;
  const Json& v = single_member(j, key);
  if (key == "and" || key == "or") {
    if (!v.is_array()) malformed("'" + key + "' expects an array", j);
    std::vector<ClassExpr> items;
    for (const auto& item : v) items.push_back(expr_from_json(item));
    return key == "and" ? ClassExpr::intersection(std::move(items)) : ClassExpr::union_of(std::move(items));
  }
  if (key == "not") {
    if (!v.is_string()) malformed("'not' expects a class id", j);
    return ClassExpr::complement(v.get<std::string>());
  }
  if (key == "some") {
    if (!v.contains("filler")) malformed("'some' needs a filler", j);
    return ClassExpr::exists(string_field(v, "property"), expr_from_json(v.at("filler")));
  }
  if (key == "interval") {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !(v[1].is_number_integer() || v[1] == "*")) {
      malformed("'interval' expects [lo, hi] with hi an integer or \"*\"", j);
    }
    const auto hi = v[1].is_string() ? Interval::kInfinity : v[1].get<std::int64_t>();
    return ClassExpr::interval({v[0].get<std::int64_t>(), hi});
  }
  malformed("unknown expression kind '" + key + "'", j);
}

RuleNode node_from_json(const Json& j) {
  std::string key;
  const Json& v = single_member(j, key);
  if (key == "union" || key == "intersection") {
    if (!v.is_array()) malformed("'" + key + "' expects an array", j);
    std::vector<RuleNode> items;
    for (const auto& item : v) items.push_back(node_from_json(item));
    return key == "union" ? RuleNode::union_of(std::move(items)) : RuleNode::intersection(std::move(items));
  }
  if (key == "requires") {
    if (!v.contains("filler")) malformed("'requires' needs a filler", j);
    return RuleNode::requires_(string_field(v, "property"), expr_from_json(v.at("filler")));
  }
  if (key == "ref") {
    if (!v.is_string()) malformed("'ref' expects a rule name", j);
    return RuleNode::ref(v.get<std::string>());
  }
  if (key == "complement-test") {
    bool complemented = true;
    if (v.contains("complemented")) {
      if (!v.at("complemented").is_boolean()) malformed("'complemented' must be a boolean", j);
      complemented = v.at("complemented").get<bool>();
    }
    return RuleNode::complement_test(string_field(v, "property"), string_field(v, "class"), complemented);
  }
  if (key == "unmodeled") {
    if (!v.is_string()) malformed("'unmodeled' expects a note", j);
    return RuleNode::unmodeled(v.get<std::string>());
  }
  malformed("unknown rule kind '" + key + "'", j);
}

}  // namespace

std::string serialize_rulebook(const RegulatoryRulebook& rb) {
  Json defs = Json::object();
  for (const auto& [name, body] : rb.definitions) defs[name] = node_to_json(body);
  Json doc{{"root", rb.root}, {"definitions", defs}};
  return doc.dump(2) + "\n";
}

RegulatoryRulebook load_rulebook(std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw RulebookError(std::string("rulebook is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("definitions") || !doc.at("definitions").is_object()) {
    throw RulebookError("rulebook needs a \"definitions\" object");
  }
  RegulatoryRulebook rb;
  if (doc.contains("root")) rb.root = string_field(doc, "root");
  for (const auto& [name, body] : doc.at("definitions").items()) {
    rb.definitions[name] = node_from_json(body);
  }
  rb.validate();
  return rb;
}

RegulatoryRulebook load_rulebook_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return load_rulebook(text.str());
}

// ---------------------------------------------------------------------------
// Evaluation.

namespace {

// How informative a failure is; a failing union reports its most
// informative branch.
enum class Strength { kUnmodeled, kGuard, kSubstantive };

struct Outcome {
  bool holds = true;
  Strength strength = Strength::kUnmodeled;
  std::vector<std::string> path;
  std::string found;
  std::string required;
  std::string reason;
};

class Evaluator {
 public:
  Evaluator(const VocabularyOntology& voc, const RegulatoryRulebook& rb, const NormalFiller& p)
      : voc_(voc), rb_(rb), p_(p) {}

  Outcome eval(const RuleNode& n, std::vector<std::string>& path) const {
    switch (n.kind) {
      case RuleNode::Kind::kRef: {
        path.push_back(n.target);
        Outcome o = eval(rb_.definition(n.target), path);
        path.pop_back();
        return o;
      }
      case RuleNode::Kind::kUnion: {
        std::optional<Outcome> best;
        for (const auto& c : n.children) {
          Outcome o = eval(c, path);
          if (o.holds) return o;
          if (!best || o.strength > best->strength) best = std::move(o);
        }
        if (!best) return leaf_failure(path, "empty union", Strength::kUnmodeled, "(none)", "owl:Nothing");
        return *best;
      }
      case RuleNode::Kind::kIntersection:
        for (const auto& c : n.children) {
          Outcome o = eval(c, path);
          if (!o.holds) return o;
        }
        return {};
      case RuleNode::Kind::kRequires:
        return test(n.property, n.filler, Strength::kSubstantive, path);
      case RuleNode::Kind::kComplementTest: {
        auto filler = n.complemented ? ClassExpr::complement(n.target) : ClassExpr::named(n.target);
        return test(n.property, filler, Strength::kGuard, path);
      }
      case RuleNode::Kind::kUnmodeled:
        return leaf_failure(path, "unmodeled", Strength::kUnmodeled, "(not evaluated)", n.target);
    }
    return {};
  }

  std::size_t root_branch() const {
    const RuleNode& body = rb_.definition(rb_.root);
    if (body.kind != RuleNode::Kind::kUnion) return 0;
    std::vector<std::string> path{rb_.root};
    for (std::size_t i = 0; i < body.children.size(); ++i) {
      if (eval(body.children[i], path).holds) return i;
    }
    return 0;
  }

 private:
  Outcome test(const std::string& property, const ClassExpr& filler, Strength strength,
               const std::vector<std::string>& path) const {
    const ClassExpr required = ClassExpr::exists(property, filler);
    if (subsumes_filler(voc_, p_, required)) return {};
    const NormalSlot* s = p_.slot(voc_.property_id(property));
    std::string found;
    if (s == nullptr) {
      found = "(absent)";
    } else {
      for (const auto& f : s->fillers) found += (found.empty() ? "" : " | ") + render(voc_, f);
    }
    std::string reason;
    if (property == terms::kHasLegalBasis) {
      reason = "legal basis is not among the required list";
    } else if (filler.is(ClassExpr::Kind::kComplement)) {
      reason = "filler is not disjoint from " + filler.id();
    } else {
      reason = "no filler is subsumed by the required class";
    }
    Outcome o = leaf_failure(path, std::string(strength == Strength::kGuard ? "complement-test " : "requires ") + property,
                             strength, found, to_string(filler));
    o.reason = std::move(reason);
    return o;
  }

  static Outcome leaf_failure(const std::vector<std::string>& path, std::string leaf, Strength strength,
                              std::string found, std::string required) {
    Outcome o;
    o.holds = false;
    o.strength = strength;
    o.path = path;
    o.path.push_back(std::move(leaf));
    o.found = std::move(found);
    o.required = std::move(required);
    o.reason = "rule is not modeled";
    return o;
  }

  const VocabularyOntology& voc_;
  const RegulatoryRulebook& rb_;
  const NormalFiller& p_;
};

ClassExpr inline_node(const RegulatoryRulebook& rb, const RuleNode& n) {
  std::vector<ClassExpr> items;
  switch (n.kind) {
    case RuleNode::Kind::kUnion:
    case RuleNode::Kind::kIntersection:
      for (const auto& c : n.children) items.push_back(inline_node(rb, c));
      return n.kind == RuleNode::Kind::kUnion ? ClassExpr::union_of(std::move(items))
                                              : ClassExpr::intersection(std::move(items));
    case RuleNode::Kind::kRequires:
      return ClassExpr::exists(n.property, n.filler);
    case RuleNode::Kind::kRef:
      return inline_node(rb, rb.definition(n.target));
    case RuleNode::Kind::kComplementTest:
      return ClassExpr::exists(n.property, n.complemented ? ClassExpr::complement(n.target)
                                                          : ClassExpr::named(n.target));
    case RuleNode::Kind::kUnmodeled:
      return ClassExpr::union_of({});
  }
  return ClassExpr::union_of({});
}

}  // namespace

ClassExpr inline_definition(const RegulatoryRulebook& rb, std::string_view name) {
  rb.validate();
  return inline_node(rb, rb.definition(name));
}

ComplianceReport check_regulatory(const VocabularyOntology& voc, const NormalPolicy& business,
                                  const RegulatoryRulebook& rb) {
  ComplianceReport report;
  bool any_satisfiable = false;
  const RuleNode root = RuleNode::ref(rb.root);
  for (std::size_t i = 0; i < business.size(); ++i) {
    const auto& p = business[i];
    if (!p.satisfiable()) {
      report.unsatisfiable.push_back(i);
      continue;
    }
    any_satisfiable = true;
    if (report.failure) continue;
    Evaluator ev(voc, rb, p.root);
    std::vector<std::string> path;
    Outcome o = ev.eval(root, path);
    if (o.holds) {
      report.cover.push_back({i, {ev.root_branch()}});
    } else {
      FailureTrace f;
      f.business = i;
      f.path = std::move(o.path);
      f.found = std::move(o.found);
      f.required = std::move(o.required);
      f.reason = std::move(o.reason);
      report.failure = std::move(f);
    }
  }
  if (report.failure) {
    report.verdict = Verdict::kNonCompliant;
    report.cover.clear();
  } else {
    report.verdict = any_satisfiable ? Verdict::kCompliant : Verdict::kVacuouslyCompliant;
  }
  return report;
}

ComplianceReport check_regulatory(const VocabularyOntology& voc, const FullPolicy& business,
                                  const RegulatoryRulebook& rb) {
  rb.validate();
  return check_regulatory(voc, normalize_full(voc, business), rb);
}

}  // namespace plcheck
