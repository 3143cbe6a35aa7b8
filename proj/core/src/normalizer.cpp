#include "plcheck/normalizer.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "plcheck/error.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

bool operator==(const NormalSlot& a, const NormalSlot& b) {
  return a.property == b.property && a.fillers == b.fillers;
}

bool operator<(const NormalSlot& a, const NormalSlot& b) {
  if (a.property != b.property) return a.property < b.property;
  return std::lexicographical_compare(a.fillers.begin(), a.fillers.end(), b.fillers.begin(),
                                      b.fillers.end());
}

bool operator==(const NormalFiller& a, const NormalFiller& b) {
  return a.satisfiable == b.satisfiable && a.names == b.names && a.interval == b.interval &&
         a.slots == b.slots;
}

bool operator<(const NormalFiller& a, const NormalFiller& b) {
  if (a.names != b.names) return a.names < b.names;
  if (a.interval != b.interval) return a.interval < b.interval;
  if (a.satisfiable != b.satisfiable) return a.satisfiable < b.satisfiable;
  return std::lexicographical_compare(a.slots.begin(), a.slots.end(), b.slots.begin(), b.slots.end());
}

const NormalSlot* NormalFiller::slot(PropertyId p) const noexcept {
  auto it = std::lower_bound(slots.begin(), slots.end(), p,
                             [](const NormalSlot& s, PropertyId id) { return s.property < id; });
  return it != slots.end() && it->property == p ? &*it : nullptr;
}

namespace {

// Conjuncts gathered for one node before closing it.
struct Pending {
  std::vector<ClassId> names;
  std::optional<Interval> interval;
  std::map<PropertyId, std::vector<const ClassExpr*>> successors;
};

void collect(const VocabularyOntology& voc, const ClassExpr& e, Pending& out) {
  switch (e.kind()) {
    case ClassExpr::Kind::kNamed:
      out.names.push_back(voc.class_id(e.id()));
      return;
    case ClassExpr::Kind::kIntersection:
      for (const auto& m : e.children()) collect(voc, m, out);
      return;
    case ClassExpr::Kind::kExists:
      out.successors[voc.property_id(e.id())].push_back(&e.filler());
      return;
    case ClassExpr::Kind::kInterval:
      out.interval = out.interval ? intersect_intervals(*out.interval, e.bounds()) : e.bounds();
      return;
    case ClassExpr::Kind::kComplement:
    case ClassExpr::Kind::kUnion:
      throw Error("complement and union cannot occur in a policy filler");
  }
}

NormalFiller close(const VocabularyOntology& voc, Pending pending, std::optional<PropertyId> context) {
  NormalFiller f;
  const PropertyDecl* decl = context ? &voc.property(*context) : nullptr;
  const bool data_range = decl && decl->range == RangeKind::kInterval;
  bool sat = true;

  if (pending.interval || data_range) {
    // Durations are whole, non-negative day counts.
    f.interval = intersect_intervals(pending.interval.value_or(Interval::all()), Interval::all());
    if (f.interval->empty()) sat = false;
    if (!pending.names.empty() || !pending.successors.empty()) sat = false;
    // a day count is never an instance of a range class
    if (decl && decl->range == RangeKind::kClass) sat = false;
  } else if (context) {
    if (auto range = voc.range_class(*context)) pending.names.push_back(*range);
  }

  auto& names = pending.names;
  for (auto& n : names) n = voc.representative(n);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  for (std::size_t i = 0; i < names.size() && sat; ++i) {
    for (std::size_t j = i; j < names.size(); ++j) {
      if (voc.are_disjoint(names[i], names[j])) {
        sat = false;
        break;
      }
    }
  }
  for (ClassId n : names) {
    const bool redundant = std::any_of(names.begin(), names.end(), [&](ClassId m) {
      return m != n && voc.is_subclass(m, n);
    });
    if (!redundant) f.names.push_back(n);
  }

  for (auto& [property, exprs] : pending.successors) {
    NormalSlot s;
    s.property = property;
    if (voc.property(property).functional) {
      Pending merged;
      for (const ClassExpr* e : exprs) collect(voc, *e, merged);
      s.fillers.push_back(close(voc, std::move(merged), property));
    } else {
      for (const ClassExpr* e : exprs) {
        Pending one;
        collect(voc, *e, one);
        s.fillers.push_back(close(voc, std::move(one), property));
      }
      std::sort(s.fillers.begin(), s.fillers.end());
      s.fillers.erase(std::unique(s.fillers.begin(), s.fillers.end()), s.fillers.end());
    }
    for (const auto& child : s.fillers) sat = sat && child.satisfiable;
    f.slots.push_back(std::move(s));
  }
  f.satisfiable = sat;
  return f;
}

}  // namespace

NormalFiller normalize_filler(const VocabularyOntology& voc, const ClassExpr& e,
                              std::optional<PropertyId> context) {
  Pending pending;
  collect(voc, e, pending);
  return close(voc, std::move(pending), context);
}

NormalSimplePolicy normalize_simple(const VocabularyOntology& voc, const SimplePolicy& p,
                                    std::size_t provenance) {
  NormalSimplePolicy n;
  n.root = normalize_filler(voc, to_class_expr(p));
  n.provenance = provenance;
  n.vocabulary = voc.identity();
  return n;
}

NormalPolicy normalize_full(const VocabularyOntology& voc, const FullPolicy& fp) {
  NormalPolicy out;
  out.reserve(fp.disjuncts.size());
  for (std::size_t i = 0; i < fp.disjuncts.size(); ++i) {
    out.push_back(normalize_simple(voc, fp.disjuncts[i], i));
  }
  return out;
}

bool vacuous(const NormalPolicy& p) noexcept {
  return std::none_of(p.begin(), p.end(), [](const NormalSimplePolicy& s) { return s.satisfiable(); });
}

ClassExpr to_class_expr(const VocabularyOntology& voc, const NormalFiller& f) {
  std::vector<ClassExpr> members;
  for (ClassId n : f.names) members.push_back(ClassExpr::named(voc.class_name(n)));
  if (f.interval) members.push_back(ClassExpr::interval(*f.interval));
  for (const auto& s : f.slots) {
    for (const auto& child : s.fillers) {
      members.push_back(ClassExpr::exists(voc.property(s.property).id, to_class_expr(voc, child)));
    }
  }
  if (members.size() == 1) return std::move(members.front());
  return ClassExpr::intersection(std::move(members));
}

namespace {

StorageExpr storage_from(const VocabularyOntology& voc, const NormalFiller& f) {
  const auto null_id = voc.find_class(terms::kNull);
  if (null_id && f.slots.empty() && !f.interval && f.names.size() == 1 &&
      f.names.front() == voc.representative(*null_id)) {
    return StorageExpr::null();
  }

  const auto storage_prop = voc.find_property(terms::kHasStorage);
  const auto range = storage_prop ? voc.range_class(*storage_prop) : std::nullopt;
  const bool names_implied = f.names.empty() ||
                             (f.names.size() == 1 && range && f.names.front() == voc.representative(*range));
  const auto loc = voc.find_property(terms::kHasLocation);
  const auto days = voc.find_property(terms::kDurationInDays);
  const auto dur = voc.find_property(terms::kHasDuration);
  const NormalSlot* loc_slot = loc ? f.slot(*loc) : nullptr;
  const NormalSlot* days_slot = days ? f.slot(*days) : nullptr;
  const NormalSlot* dur_slot = dur ? f.slot(*dur) : nullptr;

  const bool block_shape = names_implied && !f.interval && loc_slot && loc_slot->fillers.size() == 1 &&
                           f.slots.size() == 2 && ((days_slot != nullptr) != (dur_slot != nullptr));
  if (block_shape) {
    if (days_slot && days_slot->fillers.size() == 1) {
      const auto& d = days_slot->fillers.front();
      if (d.interval && d.names.empty() && d.slots.empty()) {
        return StorageExpr::block(to_class_expr(voc, loc_slot->fillers.front()), *d.interval);
      }
    } else if (dur_slot && dur_slot->fillers.size() == 1) {
      return StorageExpr::block(to_class_expr(voc, loc_slot->fillers.front()),
                                to_class_expr(voc, dur_slot->fillers.front()));
    }
  }
  return StorageExpr::of_class(to_class_expr(voc, f));
}

}  // namespace

SimplePolicy to_simple_policy(const VocabularyOntology& voc, const NormalSimplePolicy& p) {
  SimplePolicy out;
  out.data = out.purpose = out.processing = out.recipient = ClassExpr::top();
  out.storage = StorageExpr::of_class(ClassExpr::top());
  for (const auto& s : p.root.slots) {
    const std::string& id = voc.property(s.property).id;
    const NormalFiller& first = s.fillers.front();
    if (id == terms::kHasData) {
      out.data = to_class_expr(voc, first);
    } else if (id == terms::kHasPurpose) {
      out.purpose = to_class_expr(voc, first);
    } else if (id == terms::kHasProcessing) {
      out.processing = to_class_expr(voc, first);
    } else if (id == terms::kHasRecipient) {
      out.recipient = to_class_expr(voc, first);
    } else if (id == terms::kHasStorage) {
      out.storage = storage_from(voc, first);
    } else if (id == terms::kHasDuty) {
      for (const auto& d : s.fillers) out.duties.push_back(to_class_expr(voc, d));
    } else if (id == terms::kHasLegalBasis) {
      out.legal_basis = to_class_expr(voc, first);
    }
  }
  return out;
}

FullPolicy to_full_policy(const VocabularyOntology& voc, const NormalPolicy& p, PolicyKind kind) {
  FullPolicy out;
  out.kind = kind;
  for (const auto& s : p) out.disjuncts.push_back(to_simple_policy(voc, s));
  return out;
}

}  // namespace plcheck
