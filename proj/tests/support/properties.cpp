#include "properties.hpp"

#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracle.hpp"
#include "plcheck/engine.hpp"
#include "plcheck/gdpr.hpp"
#include "plcheck/normalizer.hpp"
#include "plcheck/policy_io.hpp"
#include "plcheck/terms.hpp"

namespace plcheck::testing {

namespace {

std::string render(const RandomVocab& rv, std::initializer_list<const FullPolicy*> policies) {
  std::ostringstream out;
  out << serialize_vocabulary(rv.voc);
  for (const FullPolicy* p : policies) out << "---\n" << serialize_policy(*p) << "\n";
  return out.str();
}

FullPolicy single(const SimplePolicy& p, PolicyKind kind) { return {kind, {p}}; }

bool complies(const VocabularyOntology& voc, const FullPolicy& b, const FullPolicy& c) {
  return check_compliance(voc, b, c).compliant();
}

// Runs `body` until `cases` inputs qualified or the attempt budget is spent.
// `body` returns nullopt for an input that does not qualify, else whether
// the property held; `describe` is consulted on the first failure.
template <typename Body>
PropertyOutcome drive(std::string name, std::uint64_t seed, std::size_t cases, Body body) {
  PropertyOutcome out;
  out.name = std::move(name);
  Rng rng(seed);
  const std::size_t budget = cases * 50;
  for (std::size_t attempt = 0; attempt < budget && out.cases < cases; ++attempt) {
    std::string counterexample;
    const std::optional<bool> held = body(rng, counterexample);
    if (!held) continue;
    ++out.cases;
    if (!*held) {
      if (out.failures == 0) out.counterexample = counterexample;
      ++out.failures;
    }
  }
  return out;
}

const PolicyShape kBusiness{3, 1, true};
const PolicyShape kConsent{3, 1, false};

PropertyOutcome reflexivity(std::uint64_t seed, std::size_t cases) {
  return drive("reflexivity", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto p = random_simple(rng, rv, kBusiness);
    const auto n = normalize_simple(rv.voc, p);
    if (!n.satisfiable()) return std::nullopt;
    const auto full = single(p, PolicyKind::kBusiness);
    const bool held = subsumes_simple(rv.voc, n, n) && complies(rv.voc, full, full);
    if (!held) ce = render(rv, {&full});
    return held;
  });
}

PropertyOutcome transitivity(std::uint64_t seed, std::size_t cases) {
  return drive("transitivity", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    FullPolicy p, q, r;
    if (rng.chance(0.5)) {
      p = random_policy(rng, rv, kBusiness);
      q = mutate(rng, rv, p, PolicyKind::kBusiness);
      r = mutate(rng, rv, q, PolicyKind::kBusiness);
    } else {
      r = random_policy(rng, rv, kBusiness);
      q.kind = p.kind = PolicyKind::kBusiness;
      for (const auto& d : r.disjuncts) {
        if (rng.chance(0.8)) q.disjuncts.push_back(narrow(rng, rv, d));
      }
      for (const auto& d : q.disjuncts) {
        if (rng.chance(0.8)) p.disjuncts.push_back(narrow(rng, rv, d));
      }
    }
    if (!complies(rv.voc, p, q) || !complies(rv.voc, q, r)) return std::nullopt;
    const bool held = complies(rv.voc, p, r);
    if (!held) ce = render(rv, {&p, &q, &r});
    return held;
  });
}

PropertyOutcome union_decomposition(std::uint64_t seed, std::size_t cases) {
  return drive("union left-decomposition", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto b = random_policy(rng, rv, {4, 1, true});
    const auto c = mutate(rng, rv, b, PolicyKind::kConsent);
    bool each = true;
    for (const auto& d : b.disjuncts) {
      if (!normalize_simple(rv.voc, d).satisfiable()) continue;
      each = each && complies(rv.voc, single(d, PolicyKind::kBusiness), c);
    }
    const bool held = complies(rv.voc, b, c) == each;
    if (!held) ce = render(rv, {&b, &c});
    return held;
  });
}

PropertyOutcome self_inclusion(std::uint64_t seed, std::size_t cases) {
  return drive("disjunct self-inclusion", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto u = random_policy(rng, rv, {4, 1, false});
    const auto& d = u.disjuncts[rng.below(u.disjuncts.size())];
    const auto b = single(d, PolicyKind::kBusiness);
    const bool held = complies(rv.voc, b, u);
    if (!held) ce = render(rv, {&b, &u});
    return held;
  });
}

PropertyOutcome narrowing_monotonicity(std::uint64_t seed, std::size_t cases) {
  return drive("narrowing monotonicity", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto b = random_policy(rng, rv, kBusiness);
    const auto c = mutate(rng, rv, b, PolicyKind::kConsent);
    if (!complies(rv.voc, b, c)) return std::nullopt;
    FullPolicy narrowed = b;
    auto& d = narrowed.disjuncts[rng.below(narrowed.disjuncts.size())];
    d = narrow_one_name(rng, rv, d);
    const bool held = complies(rv.voc, narrowed, c);
    if (!held) ce = render(rv, {&b, &narrowed, &c});
    return held;
  });
}

PropertyOutcome idempotence(std::uint64_t seed, std::size_t cases) {
  return drive("normalization idempotence", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto p = rng.chance(0.5) ? random_policy(rng, rv, {3, 2, true})
                                   : mutate(rng, rv, random_policy(rng, rv, kBusiness), PolicyKind::kBusiness);
    const auto once = normalize_full(rv.voc, p);
    const auto back = to_full_policy(rv.voc, once, p.kind);
    const bool held = normalize_full(rv.voc, back) == once;
    if (!held) ce = render(rv, {&p, &back});
    return held;
  });
}

PropertyOutcome semantic_preservation(std::uint64_t seed, std::size_t cases) {
  return drive("normalization semantic preservation", seed, cases,
               [](Rng& rng, std::string& ce) -> std::optional<bool> {
                 const auto rv = random_vocabulary(rng);
                 const auto p = random_simple(rng, rv, {1, 2, true});
                 const auto n = normalize_simple(rv.voc, p);
                 const bool sat = oracle_satisfiable(rv.voc, p);
                 bool held = n.satisfiable() == sat;
                 if (held && sat) {
                   const auto back = oracle_expr(to_simple_policy(rv.voc, n));
                   const auto orig = oracle_expr(p);
                   held = oracle_subsumes(rv.voc, orig, back) && oracle_subsumes(rv.voc, back, orig);
                 }
                 if (!held) {
                   const auto full = single(p, PolicyKind::kBusiness);
                   ce = render(rv, {&full});
                 }
                 return held;
               });
}

Interval sample_interval(Rng& rng) {
  auto point = [&]() -> std::int64_t {
    const auto u = rng.below(10);
    if (u == 0) return Interval::kInfinity;
    if (u == 1) return -static_cast<std::int64_t>(rng.below(5));
    return static_cast<std::int64_t>(rng.below(30));
  };
  const auto a = point();
  return {a == Interval::kInfinity ? static_cast<std::int64_t>(rng.below(30)) : a, point()};
}

// Containment of the day counts (non-negative integers) of a in b, by
// checking the points where a witness would have to lie.
bool days_within(const Interval& a, const Interval& b) {
  std::vector<std::int64_t> points{0, a.lo, a.hi};
  if (b.lo > std::numeric_limits<std::int64_t>::min()) points.push_back(b.lo - 1);
  if (b.hi != Interval::kInfinity) points.push_back(b.hi + 1);
  for (auto v : points) {
    if (v >= 0 && a.lo <= v && v <= a.hi && !(b.lo <= v && v <= b.hi)) return false;
  }
  return true;
}

PropertyOutcome interval_containment(std::uint64_t seed, std::size_t cases) {
  const auto& voc = befit_vocab();
  const auto days = voc.property_id(terms::kDurationInDays);
  return drive("interval containment", seed, cases, [&](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto a = sample_interval(rng);
    const auto b = sample_interval(rng);
    const auto na = normalize_filler(voc, ClassExpr::interval(a), days);
    const auto nb = normalize_filler(voc, ClassExpr::interval(b), days);
    const bool expected = days_within(a, b);
    bool held = subsumes_filler(voc, na, nb) == expected;
    // within() on raw intervals: integer containment including negatives
    const bool raw = a.lo > a.hi || (b.lo <= a.lo && a.hi <= b.hi);
    held = held && a.within(b) == raw;
    const auto meet = intersect_intervals(a, b);
    for (std::int64_t v : {a.lo, a.hi, b.lo, b.hi, std::int64_t{0}}) {
      held = held && meet.contains(v) == (a.contains(v) && b.contains(v));
    }
    if (!held) ce = to_string(a) + " vs " + to_string(b);
    return held;
  });
}

PropertyOutcome round_trip(std::uint64_t seed, std::size_t cases) {
  return drive("parse/serialize round trip", seed, cases, [](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    const auto p = random_policy(rng, rv, {3, 2, rng.chance(0.5)});
    const auto text = serialize_policy(p);
    bool held = false;
    try {
      // intersection braces denote sets, so compare modulo member order
      // and repetition: the text is a fixed point and the meaning is kept
      const auto back = parse_policy(text, p.kind);
      held = serialize_policy(back) == text && normalize_full(rv.voc, back) == normalize_full(rv.voc, p);
    } catch (const std::exception& e) {
      ce = e.what();
    }
    if (!held) ce += "\n" + text;
    return held;
  });
}

PropertyOutcome closure_matches_paths(std::uint64_t seed, std::size_t cases) {
  return drive("subclass closure matches path search", seed, cases,
               [](Rng& rng, std::string& ce) -> std::optional<bool> {
                 const auto rv = random_vocabulary(rng);
                 const auto& voc = rv.voc;
                 const auto& names = voc.classes();
                 std::map<std::string, std::vector<std::string>> up;
                 for (const auto& [sub, super] : voc.subclass_axioms()) up[sub].push_back(super);
                 bool held = true;
                 for (const auto& a : names) {
                   std::set<std::string> seen{a};
                   std::deque<std::string> todo{a};
                   while (!todo.empty()) {
                     auto x = todo.front();
                     todo.pop_front();
                     for (const auto& y : up[x]) {
                       if (seen.insert(y).second) todo.push_back(y);
                     }
                   }
                   for (const auto& b : names) held = held && voc.is_subclass(a, b) == (seen.count(b) > 0);
                 }
                 if (!held) ce = serialize_vocabulary(voc);
                 return held;
               });
}

PropertyOutcome disjointness_laws(std::uint64_t seed, std::size_t cases) {
  return drive("disjointness symmetric and downward closed", seed, cases,
               [](Rng& rng, std::string& ce) -> std::optional<bool> {
                 const auto rv = random_vocabulary(rng);
                 const auto& voc = rv.voc;
                 const auto n = static_cast<ClassId>(voc.class_count());
                 bool held = true;
                 for (ClassId a = 0; a < n; ++a) {
                   for (ClassId b = 0; b < n; ++b) {
                     if (!voc.are_disjoint(a, b)) continue;
                     held = held && voc.are_disjoint(b, a);
                     for (ClassId a2 = 0; a2 < n; ++a2) {
                       for (ClassId b2 = 0; b2 < n; ++b2) {
                         if (voc.is_subclass(a2, a) && voc.is_subclass(b2, b)) held = held && voc.are_disjoint(a2, b2);
                       }
                     }
                   }
                 }
                 if (!held) ce = serialize_vocabulary(voc);
                 return held;
               });
}

// Business policies over the shipped GDPR vocabulary.
class GdprPolicies {
 public:
  GdprPolicies() : voc_(gdpr_vocab()) {
    for (auto top : {"spl:AnyData", "spl:AnyPurpose", "spl:AnyProcessing", "spl:AnyRecipient", "spl:AnyLocation",
                     "sbpl:AnyDuty", "sbpl:AnyLegalBasis"}) {
      std::vector<std::string> below;
      voc_.descendants(voc_.class_id(top)).for_each(
          [&](std::size_t c) { below.push_back(voc_.class_name(static_cast<ClassId>(c))); });
      pools_.push_back(std::move(below));
    }
  }

  const VocabularyOntology& voc() const { return voc_; }

  ClassExpr from(Rng& rng, std::size_t pool) const {
    const auto& v = pools_[pool];
    return ClassExpr::named(v[rng.below(v.size())]);
  }

  SimplePolicy disjunct(Rng& rng) const {
    SimplePolicy p;
    p.data = from(rng, 0);
    p.purpose = from(rng, 1);
    p.processing = from(rng, 2);
    p.recipient = from(rng, 3);
    p.storage = rng.chance(0.2) ? StorageExpr::null()
                                : StorageExpr::block(from(rng, 4), Interval{0, static_cast<std::int64_t>(rng.below(400))});
    const auto duties = rng.below(4);
    for (std::size_t i = 0; i < duties; ++i) p.duties.push_back(from(rng, 5));
    if (rng.chance(0.85)) p.legal_basis = from(rng, 6);
    return p;
  }

  FullPolicy policy(Rng& rng) const {
    FullPolicy p;
    p.kind = PolicyKind::kBusiness;
    const auto n = 1 + rng.below(3);
    for (std::size_t i = 0; i < n; ++i) p.disjuncts.push_back(disjunct(rng));
    return p;
  }

 private:
  const VocabularyOntology& voc_;
  std::vector<std::vector<std::string>> pools_;
};

PropertyOutcome duty_monotonicity(std::uint64_t seed, std::size_t cases) {
  const GdprPolicies gen;
  const auto rb = builtin_gdpr_rulebook();
  return drive("rulebook: adding a duty never breaks compliance", seed, cases,
               [&](Rng& rng, std::string& ce) -> std::optional<bool> {
                 auto p = gen.policy(rng);
                 const bool before = check_regulatory(gen.voc(), p, rb).compliant();
                 auto& d = p.disjuncts[rng.below(p.disjuncts.size())];
                 d.duties.push_back(gen.from(rng, 5));
                 const bool held = !before || check_regulatory(gen.voc(), p, rb).compliant();
                 if (!held) ce = serialize_policy(p);
                 return held;
               });
}

PropertyOutcome rulebook_inlining(std::uint64_t seed, std::size_t cases) {
  const GdprPolicies gen;
  const auto rb = builtin_gdpr_rulebook();
  const auto body = inline_definition(rb, rb.root);
  return drive("rulebook evaluation equals inlined subsumption", seed, cases,
               [&](Rng& rng, std::string& ce) -> std::optional<bool> {
                 const auto p = gen.policy(rng);
                 const auto n = normalize_full(gen.voc(), p);
                 bool inlined = true;
                 for (const auto& d : n) inlined = inlined && subsumes_filler(gen.voc(), d.root, body);
                 const bool held = check_regulatory(gen.voc(), n, rb).compliant() == inlined;
                 if (!held) ce = serialize_policy(p);
                 return held;
               });
}

}  // namespace

std::vector<NamedProperty> core_properties() {
  return {
      {"reflexivity", reflexivity},
      {"transitivity", transitivity},
      {"union left-decomposition", union_decomposition},
      {"disjunct self-inclusion", self_inclusion},
      {"narrowing monotonicity", narrowing_monotonicity},
      {"normalization idempotence", idempotence},
      {"normalization semantic preservation", semantic_preservation},
      {"interval containment", interval_containment},
      {"parse/serialize round trip", round_trip},
  };
}

std::vector<NamedProperty> auxiliary_properties() {
  return {
      {"subclass closure", closure_matches_paths},
      {"disjointness laws", disjointness_laws},
      {"duty monotonicity", duty_monotonicity},
      {"rulebook inlining", rulebook_inlining},
  };
}

EquivalenceOutcome oracle_equivalence(std::uint64_t seed, std::size_t cases) {
  EquivalenceOutcome eq;
  eq.outcome = drive("oracle equivalence", seed, cases, [&](Rng& rng, std::string& ce) -> std::optional<bool> {
    const auto rv = random_vocabulary(rng);
    FullPolicy b, c;
    const double u = rng.unit();
    if (u < 0.4) {
      b = random_policy(rng, rv, kBusiness);
      c = mutate(rng, rv, b, PolicyKind::kConsent);
    } else if (u < 0.5) {
      b = random_policy(rng, rv, kBusiness);
      c = split_durations(rng, rng.chance(0.5) ? b : mutate(rng, rv, b, PolicyKind::kConsent), PolicyKind::kConsent);
    } else if (u < 0.8) {
      c = random_policy(rng, rv, kConsent);
      b.kind = PolicyKind::kBusiness;
      for (const auto& d : c.disjuncts) {
        if (rng.chance(0.7)) b.disjuncts.push_back(narrow(rng, rv, d));
      }
      if (b.disjuncts.empty() || rng.chance(0.3)) b = mutate(rng, rv, rng.chance(0.5) ? b : c, PolicyKind::kBusiness);
      if (b.disjuncts.empty()) b = random_policy(rng, rv, kBusiness);
    } else {
      b = random_policy(rng, rv, kBusiness);
      c = random_policy(rng, rv, kConsent);
    }
    const auto report = check_compliance(rv.voc, b, c);
    const bool expected = oracle_subsumes(rv.voc, b, c);
    switch (report.verdict) {
      case Verdict::kCompliant: ++eq.compliant; break;
      case Verdict::kVacuouslyCompliant: ++eq.vacuous; break;
      case Verdict::kNonCompliant: ++eq.non_compliant; break;
    }
    for (const auto& entry : report.cover) eq.joint_covers += entry.by.size() > 1;
    const bool held = report.compliant() == expected;
    if (!held) ce = render(rv, {&b, &c}) + "oracle: " + (expected ? "compliant" : "non-compliant");
    return held;
  });
  return eq;
}

}  // namespace plcheck::testing
