#include "plcheck/engine.hpp"

#include <algorithm>
#include <unordered_map>

#include "plcheck/error.hpp"

namespace plcheck {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::kCompliant:
      return "compliant";
    case Verdict::kNonCompliant:
      return "non-compliant";
    case Verdict::kVacuouslyCompliant:
      return "vacuously-compliant";
  }
  return "?";
}

std::string render(const VocabularyOntology& voc, const NormalFiller& f) {
  return to_string(to_class_expr(voc, f));
}

namespace {

bool has_name_below(const VocabularyOntology& voc, const NormalFiller& d, ClassId c) {
  return std::any_of(d.names.begin(), d.names.end(), [&](ClassId n) { return voc.is_subclass(n, c); });
}

// Names and interval of c hold at the node d (slots not inspected).
bool node_subsumed(const VocabularyOntology& voc, const NormalFiller& d, const NormalFiller& c) {
  for (ClassId n : c.names) {
    if (!has_name_below(voc, d, n)) return false;
  }
  if (c.interval) return d.interval && d.interval->within(*c.interval);
  return true;
}

bool slot_subsumed(const VocabularyOntology& voc, const NormalSlot* ds, const NormalSlot& cs) {
  if (ds == nullptr) return false;
  if (voc.property(cs.property).functional) {
    return subsumes_filler(voc, ds->fillers.front(), cs.fillers.front());
  }
  return std::all_of(cs.fillers.begin(), cs.fillers.end(), [&](const NormalFiller& cf) {
    return std::any_of(ds->fillers.begin(), ds->fillers.end(),
                       [&](const NormalFiller& df) { return subsumes_filler(voc, df, cf); });
  });
}

}  // namespace

bool subsumes_filler(const VocabularyOntology& voc, const NormalFiller& d, const NormalFiller& c) {
  if (!d.satisfiable) return true;
  if (!c.satisfiable) return false;
  if (!node_subsumed(voc, d, c)) return false;
  return std::all_of(c.slots.begin(), c.slots.end(),
                     [&](const NormalSlot& cs) { return slot_subsumed(voc, d.slot(cs.property), cs); });
}

bool subsumes_filler(const VocabularyOntology& voc, const NormalFiller& d, const ClassExpr& c) {
  if (!d.satisfiable) return true;
  switch (c.kind()) {
    case ClassExpr::Kind::kNamed:
      return has_name_below(voc, d, voc.class_id(c.id()));
    case ClassExpr::Kind::kIntersection:
      return std::all_of(c.children().begin(), c.children().end(),
                         [&](const ClassExpr& m) { return subsumes_filler(voc, d, m); });
    case ClassExpr::Kind::kExists: {
      const PropertyId p = voc.property_id(c.id());
      const NormalSlot* s = d.slot(p);
      if (s == nullptr) return false;
      if (voc.property(p).functional) return subsumes_filler(voc, s->fillers.front(), c.filler());
      return std::any_of(s->fillers.begin(), s->fillers.end(),
                         [&](const NormalFiller& f) { return subsumes_filler(voc, f, c.filler()); });
    }
    case ClassExpr::Kind::kInterval:
      return d.interval && d.interval->within(c.bounds());
    case ClassExpr::Kind::kComplement: {
      const ClassId a = voc.class_id(c.id());
      if (!voc.satisfiable(a) || d.interval) return true;
      return std::any_of(d.names.begin(), d.names.end(), [&](ClassId n) { return voc.are_disjoint(n, a); });
    }
    case ClassExpr::Kind::kUnion:
      return std::any_of(c.children().begin(), c.children().end(),
                         [&](const ClassExpr& b) { return subsumes_filler(voc, d, b); });
  }
  return false;
}

bool subsumes_simple(const VocabularyOntology& voc, const NormalSimplePolicy& p,
                     const NormalSimplePolicy& q) {
  if (p.vocabulary != q.vocabulary || p.vocabulary != voc.identity()) {
    throw Error("policies were normalized under different vocabularies");
  }
  return subsumes_filler(voc, p.root, q.root);
}

namespace {

// ---------------------------------------------------------------------------
// Joint covering. A business disjunct whose duration intervals are split
// across several consent disjuncts (say [0,10] against [0,5] and [6,10]) is
// covered by none of them alone. Each consent disjunct is matched against
// the business disjunct with the duration values left open, producing the
// boxes of duration values it accepts; the disjunct is covered iff the boxes
// jointly contain every admissible combination of values.

using Box = std::vector<Interval>;

class BoxMatcher {
 public:
  BoxMatcher(const VocabularyOntology& voc, const NormalFiller& p) : voc_(voc) { index(p); }

  std::size_t dimensions() const noexcept { return ranges_.size(); }
  const Box& ranges() const noexcept { return ranges_; }

  std::vector<Box> match(const NormalFiller& p, const NormalFiller& q) const {
    std::vector<Box> result{Box(ranges_.size(), Interval::all())};
    if (!q.satisfiable) return {};
    for (ClassId n : q.names) {
      if (!has_name_below(voc_, p, n)) return {};
    }
    if (q.interval) {
      if (!p.interval) return {};
      result.front()[positions_.at(&p)] = *q.interval;
      prune(result);
    }
    for (const auto& qs : q.slots) {
      const NormalSlot* ps = p.slot(qs.property);
      if (ps == nullptr) return {};
      for (const auto& qf : qs.fillers) {
        std::vector<Box> alternatives;
        for (const auto& pf : ps->fillers) {
          auto boxes = match(pf, qf);
          alternatives.insert(alternatives.end(), boxes.begin(), boxes.end());
        }
        result = product(result, alternatives);
        if (result.empty()) return {};
      }
    }
    return result;
  }

 private:
  void index(const NormalFiller& f) {
    if (f.interval) {
      positions_.emplace(&f, ranges_.size());
      ranges_.push_back(*f.interval);
    }
    for (const auto& s : f.slots) {
      for (const auto& child : s.fillers) index(child);
    }
  }

  void prune(std::vector<Box>& boxes) const {
    std::erase_if(boxes, [&](const Box& b) {
      for (std::size_t k = 0; k < b.size(); ++k) {
        if (intersect_intervals(b[k], ranges_[k]).empty()) return true;
      }
      return false;
    });
  }

  std::vector<Box> product(const std::vector<Box>& a, const std::vector<Box>& b) const {
    std::vector<Box> out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Box z(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) z[k] = intersect_intervals(x[k], y[k]);
        out.push_back(std::move(z));
      }
    }
    prune(out);
    return out;
  }

  const VocabularyOntology& voc_;
  std::unordered_map<const NormalFiller*, std::size_t> positions_;
  Box ranges_;
};

// Sweep over dimension d: every elementary segment of region[d] must be
// covered by the boxes spanning it, recursively in the remaining dimensions.
bool covers(const std::vector<const Box*>& boxes, const Box& region, std::size_t d) {
  if (boxes.empty()) return false;
  if (d == region.size()) return true;
  const Interval r = region[d];
  std::vector<std::int64_t> cuts{r.lo};
  for (const Box* b : boxes) {
    const Interval& iv = (*b)[d];
    if (iv.lo > r.lo && iv.lo <= r.hi) cuts.push_back(iv.lo);
    if (iv.hi < r.hi && iv.hi >= r.lo) cuts.push_back(iv.hi + 1);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const std::int64_t lo = cuts[i];
    const std::int64_t hi = i + 1 < cuts.size() ? cuts[i + 1] - 1 : r.hi;
    std::vector<const Box*> spanning;
    for (const Box* b : boxes) {
      if ((*b)[d].lo <= lo && hi <= (*b)[d].hi) spanning.push_back(b);
    }
    if (!covers(spanning, region, d + 1)) return false;
  }
  return true;
}

std::optional<std::vector<std::size_t>> joint_cover(const VocabularyOntology& voc,
                                                    const NormalSimplePolicy& p,
                                                    const NormalPolicy& consent) {
  BoxMatcher matcher(voc, p.root);
  if (matcher.dimensions() == 0) return std::nullopt;
  std::vector<Box> boxes;
  std::vector<std::size_t> owners;
  for (std::size_t j = 0; j < consent.size(); ++j) {
    for (auto& b : matcher.match(p.root, consent[j].root)) {
      boxes.push_back(std::move(b));
      owners.push_back(j);
    }
  }
  std::vector<const Box*> refs;
  for (const auto& b : boxes) refs.push_back(&b);
  if (!covers(refs, matcher.ranges(), 0)) return std::nullopt;
  owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
  return owners;
}

std::optional<std::vector<std::size_t>> find_cover(const VocabularyOntology& voc,
                                                   const NormalSimplePolicy& p,
                                                   const NormalPolicy& consent) {
  std::size_t candidates = 0;
  for (std::size_t j = 0; j < consent.size(); ++j) {
    if (!consent[j].satisfiable()) continue;
    ++candidates;
    if (subsumes_simple(voc, p, consent[j])) return std::vector<std::size_t>{j};
  }
  if (candidates < 2) return std::nullopt;
  return joint_cover(voc, p, consent);
}

// ---------------------------------------------------------------------------
// Explanations.

struct Mismatch {
  std::vector<std::string> path;
  std::string found;
  std::string required;
};

Mismatch first_mismatch(const VocabularyOntology& voc, const NormalFiller& d, const NormalFiller& c,
                        std::vector<std::string> path) {
  if (!node_subsumed(voc, d, c)) return {std::move(path), render(voc, d), render(voc, c)};
  for (const auto& cs : c.slots) {
    const NormalSlot* ds = d.slot(cs.property);
    if (slot_subsumed(voc, ds, cs)) continue;
    path.push_back(voc.property(cs.property).id);
    if (ds == nullptr) return {std::move(path), "(absent)", render(voc, cs.fillers.front())};
    for (const auto& cf : cs.fillers) {
      const bool ok = std::any_of(ds->fillers.begin(), ds->fillers.end(),
                                  [&](const NormalFiller& df) { return subsumes_filler(voc, df, cf); });
      if (ok) continue;
      if (ds->fillers.size() == 1) return first_mismatch(voc, ds->fillers.front(), cf, std::move(path));
      std::string found;
      for (const auto& df : ds->fillers) found += (found.empty() ? "" : " | ") + render(voc, df);
      return {std::move(path), found, render(voc, cf)};
    }
  }
  return {std::move(path), render(voc, d), render(voc, c)};
}

FailureTrace explain(const VocabularyOntology& voc, const NormalSimplePolicy& p, std::size_t index,
                     const NormalPolicy& consent) {
  FailureTrace trace;
  trace.business = index;
  std::size_t best_failures = 0;
  for (std::size_t j = 0; j < consent.size(); ++j) {
    if (!consent[j].satisfiable()) continue;
    const auto& slots = consent[j].root.slots;
    const auto failures = static_cast<std::size_t>(std::count_if(slots.begin(), slots.end(), [&](const NormalSlot& cs) {
      return !slot_subsumed(voc, p.root.slot(cs.property), cs);
    }));
    if (!trace.against || failures < best_failures) {
      trace.against = j;
      best_failures = failures;
    }
  }
  if (!trace.against) {
    trace.reason = "consent has no satisfiable disjunct";
    return trace;
  }
  auto m = first_mismatch(voc, p.root, consent[*trace.against].root, {});
  trace.path = std::move(m.path);
  trace.found = std::move(m.found);
  trace.required = std::move(m.required);
  trace.reason = best_failures > 0 ? "filler is not subsumed by the consented filler"
                                   : "duration values are not covered by any consent disjunct";
  return trace;
}

}  // namespace

ComplianceReport check_compliance(const VocabularyOntology& voc, const NormalPolicy& business,
                                  const NormalPolicy& consent) {
  ComplianceReport report;
  bool any_satisfiable = false;
  for (std::size_t i = 0; i < business.size(); ++i) {
    const auto& p = business[i];
    if (!p.satisfiable()) {
      report.unsatisfiable.push_back(i);
      continue;
    }
    any_satisfiable = true;
    if (report.failure) continue;
    if (auto by = find_cover(voc, p, consent)) {
      report.cover.push_back({i, std::move(*by)});
    } else {
      report.failure = explain(voc, p, i, consent);
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

ComplianceReport check_compliance(const VocabularyOntology& voc, const FullPolicy& business,
                                  const FullPolicy& consent) {
  return check_compliance(voc, normalize_full(voc, business), normalize_full(voc, consent));
}

bool complies(const VocabularyOntology& voc, const NormalSimplePolicy& p, const NormalPolicy& consent) {
  return !p.satisfiable() || find_cover(voc, p, consent).has_value();
}

bool complies(const VocabularyOntology& voc, const NormalPolicy& business, const NormalPolicy& consent) {
  return std::all_of(business.begin(), business.end(),
                     [&](const NormalSimplePolicy& p) { return complies(voc, p, consent); });
}

}  // namespace plcheck
