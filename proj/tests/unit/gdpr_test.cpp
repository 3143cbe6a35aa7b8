#include "doctest.h"

#include "fixtures.hpp"
#include "plcheck/error.hpp"
#include "plcheck/gdpr.hpp"
#include "plcheck/normalizer.hpp"
#include "plcheck/policy_io.hpp"

using namespace plcheck;
using namespace plcheck::testing;

namespace {

FullPolicy religion() { return policy_fixture("religion-bp.policy", PolicyKind::kBusiness); }

FullPolicy with_data(FullPolicy p, const char* data) {
  for (auto& d : p.disjuncts) d.data = ClassExpr::named(data);
  return p;
}

}  // namespace

TEST_CASE("builtin rulebook lookups") {
  const auto rb = builtin_gdpr_rulebook();
  CHECK(rb.root == "GDPR_Compliance");
  const auto& art6_1 = rb.definition("Art6_1_LegalBasis");
  REQUIRE(art6_1.kind == RuleNode::Kind::kRequires);
  CHECK(art6_1.property == "sbpl:hasLegalBasis");
  REQUIRE(art6_1.filler.kind() == ClassExpr::Kind::kUnion);
  std::vector<std::string> bases;
  for (const auto& b : art6_1.filler.children()) bases.push_back(b.id());
  CHECK(bases == std::vector<std::string>{"Art6_1_a_Consent", "Art6_1_b_Contract", "Art6_1_c_LegalObligation",
                                          "Art6_1_d_VitalInterest", "Art6_1_e_PublicInterest",
                                          "Art6_1_f_LegitimateInterest"});

  const auto& chap2 = rb.definition("Chap2_LawfulProcessing");
  CHECK(chap2 == RuleNode::union_of({RuleNode::ref("Art6_LawfulProcessing"), RuleNode::ref("Art9_SensitiveData"),
                                     RuleNode::ref("Art10_CriminalData")}));
  CHECK(rb.definition("Art10_CriminalData").kind == RuleNode::Kind::kUnmodeled);
  CHECK(rb.definition("Chap9_Derogations").kind == RuleNode::Kind::kUnmodeled);
  CHECK_THROWS_AS(rb.definition("Art99"), RulebookError);
  CHECK_NOTHROW(rb.validate());
}

TEST_CASE("Religion business policy fails through Art9") {
  const auto& voc = gdpr_vocab();
  const auto report = check_regulatory(voc, religion(), builtin_gdpr_rulebook());
  CHECK(report.verdict == Verdict::kNonCompliant);
  REQUIRE(report.failure.has_value());
  CHECK(report.failure->path == std::vector<std::string>{"GDPR_Compliance", "Chap2_LawfulProcessing",
                                                         "Art9_SensitiveData", "requires sbpl:hasLegalBasis"});
  CHECK(report.failure->reason == "legal basis is not among the required list");
  CHECK(report.failure->found == "Art6_1_a_Consent");
}

TEST_CASE("Location variant is compliant") {
  const auto& voc = gdpr_vocab();
  const auto rb = builtin_gdpr_rulebook();
  const auto report = check_regulatory(voc, with_data(religion(), "Location"), rb);
  CHECK(report.verdict == Verdict::kCompliant);
  CHECK(report.cover == std::vector<CoverEntry>{{0, {0}}});
  CHECK(check_regulatory(voc, policy_fixture("location-bp.policy", PolicyKind::kBusiness), rb).compliant());
}

TEST_CASE("demographic collection policy is compliant") {
  const auto& voc = gdpr_vocab();
  const auto bp = policy_fixture("demographic-bp.policy", PolicyKind::kBusiness);
  CHECK(check_regulatory(voc, bp, builtin_gdpr_rulebook()).verdict == Verdict::kCompliant);
}

TEST_CASE("duty and legal basis requirements") {
  const auto& voc = gdpr_vocab();
  const auto rb = builtin_gdpr_rulebook();
  auto bp = with_data(religion(), "Location");

  SUBCASE("no legal basis") {
    bp.disjuncts[0].legal_basis.reset();
    // non-sensitive data still passes the Art9 branch through its complement test
    CHECK(check_regulatory(voc, bp, rb).compliant());
    auto sensitive = religion();
    sensitive.disjuncts[0].legal_basis.reset();
    const auto report = check_regulatory(voc, sensitive, rb);
    CHECK_FALSE(report.compliant());
    REQUIRE(report.failure.has_value());
    CHECK(report.failure->found == "(absent)");
  }
  SUBCASE("an Art9 basis makes sensitive data lawful") {
    auto sensitive = religion();
    sensitive.disjuncts[0].legal_basis = ClassExpr::named("Art9_2_a_Consent");
    CHECK(check_regulatory(voc, sensitive, rb).compliant());
  }
  SUBCASE("missing security duty fails") {
    bp.disjuncts[0].duties = {ClassExpr::named("Art12-22_SubjectRights")};
    const auto report = check_regulatory(voc, bp, rb);
    CHECK_FALSE(report.compliant());
    REQUIRE(report.failure.has_value());
    CHECK(report.failure->path.back() == "requires sbpl:hasDuty");
  }
  SUBCASE("an extra duty keeps it compliant") {
    bp.disjuncts[0].duties.push_back(ClassExpr::named("getValidConsent"));
    CHECK(check_regulatory(voc, bp, rb).compliant());
  }
}

TEST_CASE("unsatisfiable business policies are vacuous") {
  const auto& voc = gdpr_vocab();
  auto bp = with_data(religion(), "Location");
  bp.disjuncts[0].data = ClassExpr::intersection({ClassExpr::named("Religion"), ClassExpr::named("Location")});
  CHECK(check_regulatory(voc, bp, builtin_gdpr_rulebook()).verdict == Verdict::kVacuouslyCompliant);
}

TEST_CASE("rulebook validation") {
  RegulatoryRulebook rb;
  rb.root = "A";
  rb.definitions["A"] = RuleNode::ref("B");
  rb.definitions["B"] = RuleNode::union_of({RuleNode::ref("A")});
  CHECK_THROWS_AS(rb.validate(), RulebookError);

  rb.definitions["B"] = RuleNode::ref("C");
  CHECK_THROWS_AS(rb.validate(), RulebookError);

  rb.definitions["B"] = RuleNode::unmodeled("stub");
  CHECK_NOTHROW(rb.validate());
  rb.root = "Z";
  CHECK_THROWS_AS(rb.validate(), RulebookError);
}

TEST_CASE("rulebook files") {
  CHECK_THROWS_AS(load_rulebook(R"({"root": "A", "definitions": {"A": {"ref": "B"}, "B": {"ref": "A"}}})"),
                  RulebookError);
  CHECK_THROWS_AS(load_rulebook(R"({"root": "A", "definitions": {"A": {"ref": "B"}}})"), RulebookError);
  CHECK_THROWS_AS(load_rulebook(R"({"root": "A", "definitions": {"A": {"maybe": 1}}})"), RulebookError);
  CHECK_THROWS_AS(load_rulebook("not json"), RulebookError);

  const auto single = load_rulebook(R"({"root": "Basis", "definitions": {
      "Basis": {"requires": {"property": "sbpl:hasLegalBasis", "filler": "Art6_1_a_Consent"}}}})");
  CHECK(single.definition("Basis") == RuleNode::requires_("sbpl:hasLegalBasis", ClassExpr::named("Art6_1_a_Consent")));
  CHECK(check_regulatory(gdpr_vocab(), religion(), single).verdict == Verdict::kCompliant);
}

TEST_CASE("builtin rulebook round trip and shipped copy") {
  const auto rb = builtin_gdpr_rulebook();
  const auto text = serialize_rulebook(rb);
  CHECK(load_rulebook(text) == rb);
  CHECK(read_text(source_path("rules/gdpr-partial.rules")) == text);
  CHECK(load_rulebook_file(source_path("rules/gdpr-partial.rules")) == rb);
}

TEST_CASE("rulebook evaluation agrees with the inlined definition") {
  const auto& voc = gdpr_vocab();
  const auto rb = builtin_gdpr_rulebook();
  const auto body = inline_definition(rb, rb.root);
  for (const auto& bp : {religion(), with_data(religion(), "Location"),
                         policy_fixture("demographic-bp.policy", PolicyKind::kBusiness)}) {
    const auto n = normalize_full(voc, bp);
    CHECK(subsumes_filler(voc, n[0].root, body) == check_regulatory(voc, n, rb).compliant());
  }
}
