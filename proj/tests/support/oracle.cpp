#include "oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace plcheck::testing {

namespace {

using Mask = std::uint64_t;
using Term = std::vector<ClassExpr>;  // conjunction of atoms

constexpr std::string_view kHasData = "spl:hasData";
constexpr std::string_view kHasPurpose = "spl:hasPurpose";
constexpr std::string_view kHasProcessing = "spl:hasProcessing";
constexpr std::string_view kHasRecipient = "spl:hasRecipient";
constexpr std::string_view kHasStorage = "spl:hasStorage";
constexpr std::string_view kHasLocation = "spl:hasLocation";
constexpr std::string_view kHasDuration = "spl:hasDuration";
constexpr std::string_view kDurationInDays = "spl:durationInDays";
constexpr std::string_view kHasDuty = "sbpl:hasDuty";
constexpr std::string_view kHasLegalBasis = "sbpl:hasLegalBasis";

// The vocabulary as asserted, closed here with a plain graph search.
class Axioms {
 public:
  explicit Axioms(const VocabularyOntology& voc) {
    const auto& classes = voc.classes();
    for (std::size_t i = 0; i < classes.size(); ++i) index_.emplace(classes[i], static_cast<int>(i));
    std::vector<std::vector<int>> direct(classes.size());
    for (const auto& [sub, super] : voc.subclass_axioms()) direct[id(sub)].push_back(id(super));
    up_.resize(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<char> seen(classes.size(), 0);
      std::deque<int> todo{static_cast<int>(c)};
      seen[c] = 1;
      while (!todo.empty()) {
        const int x = todo.front();
        todo.pop_front();
        up_[c].push_back(x);
        for (int y : direct[x]) {
          if (!seen[y]) {
            seen[y] = 1;
            todo.push_back(y);
          }
        }
      }
    }
    for (const auto& group : voc.disjointness_axioms()) {
      for (std::size_t i = 0; i < group.size(); ++i) {
        for (std::size_t j = i + 1; j < group.size(); ++j) disjoint_.emplace_back(id(group[i]), id(group[j]));
      }
    }
    for (const auto& p : voc.properties()) properties_.emplace(p.id, p);
  }

  int id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("oracle: undeclared class " + name);
    return it->second;
  }

  const PropertyDecl& property(const std::string& name) const {
    auto it = properties_.find(name);
    if (it == properties_.end()) throw std::invalid_argument("oracle: undeclared property " + name);
    return it->second;
  }

  std::size_t size() const { return up_.size(); }

  // Subclass closure of `seed`, or nullopt if it violates a disjointness axiom.
  std::optional<std::vector<char>> closure(const std::vector<int>& seed) const {
    std::vector<char> in(up_.size(), 0);
    for (int s : seed) {
      for (int a : up_[s]) in[a] = 1;
    }
    for (auto [a, b] : disjoint_) {
      if (in[a] && in[b]) return std::nullopt;
    }
    return in;
  }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> up_;
  std::vector<std::pair<int, int>> disjoint_;
  std::unordered_map<std::string, PropertyDecl> properties_;
};

// --- disjunctive normal form ------------------------------------------------

void flatten(const ClassExpr& e, Term& out) {
  if (e.is(ClassExpr::Kind::kIntersection)) {
    for (const auto& c : e.children()) flatten(c, out);
  } else {
    out.push_back(e);
  }
}

ClassExpr conj(const Term& t) { return t.size() == 1 ? t.front() : ClassExpr::intersection(t); }

std::vector<Term> dnf(const ClassExpr& e) {
  switch (e.kind()) {
    case ClassExpr::Kind::kNamed:
    case ClassExpr::Kind::kComplement:
    case ClassExpr::Kind::kInterval:
      return {{e}};
    case ClassExpr::Kind::kIntersection: {
      std::vector<Term> acc{{}};
      for (const auto& c : e.children()) {
        std::vector<Term> next;
        for (const auto& left : acc) {
          for (const auto& right : dnf(c)) {
            Term t = left;
            t.insert(t.end(), right.begin(), right.end());
            next.push_back(std::move(t));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    case ClassExpr::Kind::kUnion: {
      std::vector<Term> out;
      for (const auto& c : e.children()) {
        auto terms = dnf(c);
        out.insert(out.end(), terms.begin(), terms.end());
      }
      return out;
    }
    case ClassExpr::Kind::kExists: {
      std::vector<Term> out;
      for (const auto& t : dnf(e.filler())) out.push_back({ClassExpr::exists(e.id(), conj(t))});
      return out;
    }
  }
  return {};
}

// --- realizable truth assignments ---------------------------------------------

struct Range {
  RangeKind kind = RangeKind::kNone;
  int cls = -1;
};

struct Formula {
  std::vector<int> names;
  std::vector<int> negated;
  std::vector<Interval> intervals;
  std::vector<std::pair<std::string, Term>> successors;
};

class Enumerator {
 public:
  explicit Enumerator(const Axioms& ax) : ax_(ax) {}

  Range range_of(const std::string& property) const {
    const auto& d = ax_.property(property);
    Range r;
    r.kind = d.range;
    if (d.range == RangeKind::kClass) r.cls = ax_.id(d.range_class);
    return r;
  }

  // All sets of formulas of F that hold together at some element allowed
  // by `range`.
  std::vector<Mask> realizable(const std::vector<Term>& F, const Range& range) {
    if (F.size() > 62) throw OracleBoundsError("too many formulas in one context");
    std::vector<Formula> fs;
    for (const auto& t : F) fs.push_back(parse(t));

    // Successor contexts, one per property.
    std::map<std::string, std::vector<Term>> fillers;
    for (const auto& f : fs) {
      for (const auto& [r, g] : f.successors) {
        auto& list = fillers[r];
        if (std::find(list.begin(), list.end(), g) == list.end()) list.push_back(g);
      }
    }
    std::vector<std::vector<Mask>> property_options;
    for (const auto& [r, G] : fillers) {
      std::vector<Mask> need(fs.size(), 0);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        for (const auto& [r2, g] : fs[i].successors) {
          if (r2 != r) continue;
          const auto k = static_cast<std::size_t>(std::find(G.begin(), G.end(), g) - G.begin());
          need[i] |= Mask{1} << k;
        }
      }
      const auto child = realizable(G, range_of(r));
      std::vector<Mask> summaries{0};
      if (ax_.property(r).functional) {
        summaries.insert(summaries.end(), child.begin(), child.end());
      } else {
        std::unordered_set<Mask> closed{0};
        std::vector<Mask> frontier{0};
        while (!frontier.empty()) {
          std::vector<Mask> next;
          for (Mask a : frontier) {
            for (Mask c : child) {
              if (closed.insert(a | c).second) next.push_back(a | c);
            }
          }
          frontier = std::move(next);
        }
        summaries.assign(closed.begin(), closed.end());
      }
      std::unordered_set<Mask> options;
      for (Mask s : summaries) {
        Mask b = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
          if ((need[i] & ~s) == 0) b |= Mask{1} << i;
        }
        options.insert(b);
      }
      property_options.emplace_back(options.begin(), options.end());
    }

    std::unordered_set<Mask> out;
    if (range.kind != RangeKind::kInterval) objects(fs, range, property_options, out);
    if (range.kind != RangeKind::kClass) values(fs, out);
    return {out.begin(), out.end()};
  }

 private:
  Formula parse(const Term& t) const {
    Formula f;
    for (const auto& a : t) {
      switch (a.kind()) {
        case ClassExpr::Kind::kNamed:
          f.names.push_back(ax_.id(a.id()));
          break;
        case ClassExpr::Kind::kComplement:
          f.negated.push_back(ax_.id(a.id()));
          break;
        case ClassExpr::Kind::kInterval:
          f.intervals.push_back(a.bounds());
          break;
        case ClassExpr::Kind::kExists: {
          Term g;
          flatten(a.filler(), g);
          f.successors.emplace_back(a.id(), std::move(g));
          break;
        }
        default:
          throw std::logic_error("oracle: term is not in normal form");
      }
    }
    return f;
  }

  void objects(const std::vector<Formula>& fs, const Range& range,
               const std::vector<std::vector<Mask>>& property_options, std::unordered_set<Mask>& out) const {
    std::vector<int> rel;
    for (const auto& f : fs) {
      rel.insert(rel.end(), f.names.begin(), f.names.end());
      rel.insert(rel.end(), f.negated.begin(), f.negated.end());
    }
    if (range.cls >= 0) rel.push_back(range.cls);
    std::sort(rel.begin(), rel.end());
    rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
    if (rel.size() > 20) throw OracleBoundsError("too many classes in one context");

    for (Mask x = 0; x < (Mask{1} << rel.size()); ++x) {
      std::vector<int> seed;
      for (std::size_t k = 0; k < rel.size(); ++k) {
        if (x >> k & 1) seed.push_back(rel[k]);
      }
      if (range.cls >= 0 && std::find(seed.begin(), seed.end(), range.cls) == seed.end()) continue;
      const auto labels = ax_.closure(seed);
      if (!labels) continue;
      // Every label set is reached from its trace on `rel`; skip the seeds
      // that are not such a trace.
      bool exact = true;
      for (std::size_t k = 0; k < rel.size(); ++k) exact = exact && ((*labels)[rel[k]] != 0) == ((x >> k & 1) != 0);
      if (!exact) continue;

      Mask a = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto& f = fs[i];
        const bool holds = f.intervals.empty() &&
                           std::all_of(f.names.begin(), f.names.end(), [&](int c) { return (*labels)[c]; }) &&
                           std::none_of(f.negated.begin(), f.negated.end(), [&](int c) { return (*labels)[c]; });
        if (holds) a |= Mask{1} << i;
      }
      std::unordered_set<Mask> current{a};
      for (const auto& options : property_options) {
        std::unordered_set<Mask> next;
        for (Mask c : current) {
          for (Mask b : options) next.insert(c & b);
        }
        current = std::move(next);
      }
      out.insert(current.begin(), current.end());
    }
  }

  static void values(const std::vector<Formula>& fs, std::unordered_set<Mask>& out) {
    std::set<std::int64_t> samples{0};
    for (const auto& f : fs) {
      for (const auto& iv : f.intervals) {
        for (std::int64_t v : {iv.lo - 1, iv.lo}) {
          if (v >= 0) samples.insert(v);
        }
        if (iv.hi != Interval::kInfinity) {
          samples.insert(iv.hi);
          samples.insert(iv.hi + 1);
        }
      }
    }
    for (std::int64_t v : samples) {
      Mask a = 0;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto& f = fs[i];
        const bool holds = f.names.empty() && f.successors.empty() &&
                           std::all_of(f.intervals.begin(), f.intervals.end(),
                                       [&](const Interval& iv) { return iv.lo <= v && v <= iv.hi; });
        if (holds) a |= Mask{1} << i;
      }
      out.insert(a);
    }
  }

  const Axioms& ax_;
};

bool decide(const VocabularyOntology& voc, const ClassExpr& p, const ClassExpr& q, const Range* range,
            const std::optional<std::string>& property) {
  Axioms ax(voc);
  Enumerator en(ax);
  std::vector<Term> F;
  Mask pmask = 0, qmask = 0;
  auto add = [&](const Term& t) {
    auto it = std::find(F.begin(), F.end(), t);
    const auto k = static_cast<std::size_t>(it - F.begin());
    if (it == F.end()) F.push_back(t);
    if (k > 62) throw OracleBoundsError("too many disjuncts");
    return Mask{1} << k;
  };
  for (const auto& t : dnf(p)) pmask |= add(t);
  for (const auto& t : dnf(q)) qmask |= add(t);
  const Range r = property ? en.range_of(*property) : (range ? *range : Range{});
  for (Mask m : en.realizable(F, r)) {
    if ((m & pmask) != 0 && (m & qmask) == 0) return false;
  }
  return true;
}

}  // namespace

ClassExpr oracle_expr(const SimplePolicy& p) {
  auto some = [](std::string_view r, ClassExpr f) { return ClassExpr::exists(std::string(r), std::move(f)); };
  std::vector<ClassExpr> parts{some(kHasData, p.data), some(kHasPurpose, p.purpose),
                               some(kHasProcessing, p.processing), some(kHasRecipient, p.recipient)};
  switch (p.storage.form) {
    case StorageExpr::Form::kNull:
      parts.push_back(some(kHasStorage, ClassExpr::named("spl:Null")));
      break;
    case StorageExpr::Form::kClass:
      parts.push_back(some(kHasStorage, p.storage.filler));
      break;
    case StorageExpr::Form::kBlock: {
      ClassExpr duration = std::holds_alternative<Interval>(p.storage.duration)
                               ? some(kDurationInDays, ClassExpr::interval(std::get<Interval>(p.storage.duration)))
                               : some(kHasDuration, std::get<ClassExpr>(p.storage.duration));
      parts.push_back(some(kHasStorage, ClassExpr::intersection({some(kHasLocation, p.storage.location), duration})));
      break;
    }
  }
  for (const auto& d : p.duties) parts.push_back(some(kHasDuty, d));
  if (p.legal_basis) parts.push_back(some(kHasLegalBasis, *p.legal_basis));
  return ClassExpr::intersection(std::move(parts));
}

ClassExpr oracle_expr(const FullPolicy& p) {
  std::vector<ClassExpr> branches;
  for (const auto& d : p.disjuncts) branches.push_back(oracle_expr(d));
  return ClassExpr::union_of(std::move(branches));
}

bool oracle_subsumes(const VocabularyOntology& voc, const ClassExpr& p, const ClassExpr& q) {
  return decide(voc, p, q, nullptr, std::nullopt);
}

bool oracle_subsumes(const VocabularyOntology& voc, const FullPolicy& p, const FullPolicy& q) {
  return oracle_subsumes(voc, oracle_expr(p), oracle_expr(q));
}

bool oracle_subsumes_filler(const VocabularyOntology& voc, const ClassExpr& d, const ClassExpr& c,
                            const std::optional<std::string>& property) {
  return decide(voc, d, c, nullptr, property);
}

bool oracle_satisfiable(const VocabularyOntology& voc, const ClassExpr& c) {
  return !oracle_subsumes(voc, c, ClassExpr::union_of({}));
}

bool oracle_satisfiable(const VocabularyOntology& voc, const SimplePolicy& p) {
  return oracle_satisfiable(voc, oracle_expr(p));
}

}  // namespace plcheck::testing
