#include "plcheck/workload.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "plcheck/error.hpp"
#include "plcheck/policy_io.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % n;
}

double Rng::unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

WorkloadProfile WorkloadProfile::pilot1() {
  WorkloadProfile p;
  p.name = "pilot1";
  p.bp_count = 120;
  p.bp_avg_disjuncts = 2.71;
  p.consent_count = 12000;
  p.consent_avg_disjuncts = 3.77;
  p.check_count = 12000;
  return p;
}

WorkloadProfile WorkloadProfile::pilot2() {
  WorkloadProfile p;
  p.name = "pilot2";
  p.bp_count = 100;
  p.bp_avg_disjuncts = 2.39;
  p.consent_count = 10000;
  p.consent_avg_disjuncts = 3.42;
  p.check_count = 10000;
  return p;
}

WorkloadProfile WorkloadProfile::named(std::string_view name) {
  if (name == "pilot1") return pilot1();
  if (name == "pilot2") return pilot2();
  throw Error("unknown workload profile '" + std::string(name) + "' (expected pilot1 or pilot2)");
}

namespace {

// Five usage trees carry the class inclusions; spl:Null adds two more.
constexpr std::size_t kTrees = 5;
constexpr std::size_t kNullInclusions = 2;

}  // namespace

void WorkloadProfile::validate() const {
  const auto& o = ontology;
  if (o.range_axioms != 10 || o.functional_properties != 8) {
    throw Error("the generator's property set has exactly 10 range axioms and 8 functional properties");
  }
  if (o.height == 0 && o.inclusions > kNullInclusions) {
    throw Error("a hierarchy of height 0 cannot hold " + std::to_string(o.inclusions) + " inclusions");
  }
  if (o.inclusions < kNullInclusions + kTrees * o.height) {
    throw Error("too few inclusions for a hierarchy of height " + std::to_string(o.height));
  }
  if (bp_count == 0 || consent_count == 0 || check_count == 0) throw Error("profile counts must be positive");
  if (check_count > consent_count) throw Error("every check needs its own consent policy");
  if (bp_avg_disjuncts < 1 || consent_avg_disjuncts < 1) throw Error("averages must be at least 1");
  if (!(target_compliant >= 0 && target_compliant <= 1)) throw Error("target compliant fraction must lie in [0, 1]");
}

std::uint64_t WorkloadProfile::fingerprint() const {
  std::ostringstream s;
  s << name << '|' << ontology.inclusions << '|' << ontology.disjoint_axioms << '|' << ontology.range_axioms << '|'
    << ontology.functional_properties << '|' << ontology.height << '|' << bp_count << '|' << bp_avg_disjuncts << '|'
    << consent_count << '|' << consent_avg_disjuncts << '|' << check_count << '|' << seed << '|'
    << target_compliant;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s.str()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Node {
  std::string name;
  int parent = -1;
  std::size_t depth = 0;
  bool leaf = true;
};

struct Tree {
  std::vector<Node> nodes;  // nodes[0] is the top

  bool is_ancestor(int anc, int n) const {
    for (; n >= 0; n = nodes[n].parent) {
      if (n == anc) return true;
    }
    return false;
  }

  int lca(int a, int b) const {
    while (!is_ancestor(a, b)) a = nodes[a].parent;
    return a;
  }

  int climb(int n, std::size_t steps) const {
    for (; steps > 0 && nodes[n].parent >= 0; --steps) n = nodes[n].parent;
    return n;
  }
};

enum Slot { kData, kPurpose, kProcessing, kRecipient, kLocation };

// Generation-time simple policy: one node per tree plus a retention period.
struct Draft {
  std::array<int, kTrees> node{};
  Interval duration;
};

class Generator {
 public:
  explicit Generator(const WorkloadProfile& p) : profile_(p), rng_(p.seed) {}

  Workload run() {
    build_trees();
    Workload w{profile_, build_vocab(), {}, {}, {}};

    for (std::size_t count : split(profile_.bp_count, profile_.bp_avg_disjuncts)) {
      std::vector<Draft> drafts;
      for (std::size_t k = 0; k < count; ++k) drafts.push_back(sample());
      bp_drafts_.push_back(std::move(drafts));
    }
    for (const auto& drafts : bp_drafts_) w.business.push_back(to_policy(drafts, PolicyKind::kBusiness));

    const auto sizes = split(profile_.consent_count, profile_.consent_avg_disjuncts);
    const auto compliant = static_cast<std::size_t>(std::llround(profile_.target_compliant * profile_.check_count));
    std::vector<char> labels(profile_.check_count, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(compliant), 1);
    rng_.shuffle(labels);

    for (std::size_t i = 0; i < profile_.consent_count; ++i) {
      std::vector<Draft> drafts;
      if (i < profile_.check_count) {
        const std::size_t bp = rng_.below(profile_.bp_count);
        drafts = labels[i] ? cover(bp_drafts_[bp], sizes[i]) : miss(bp_drafts_[bp], sizes[i]);
        w.checks.push_back({bp, i, labels[i] != 0});
      } else {
        for (std::size_t k = 0; k < sizes[i]; ++k) drafts.push_back(sample());
      }
      w.consents.push_back(to_policy(drafts, PolicyKind::kConsent));
    }
    return w;
  }

 private:
  // Exact total round(n * avg), spread as evenly as possible in random order.
  std::vector<std::size_t> split(std::size_t n, double avg) {
    const auto total = static_cast<std::size_t>(std::llround(avg * static_cast<double>(n)));
    std::vector<std::size_t> sizes(n, total / n);
    for (std::size_t i = 0; i < total % n; ++i) ++sizes[i];
    rng_.shuffle(sizes);
    return sizes;
  }

  void build_trees() {
    static constexpr std::array<std::string_view, kTrees> tops = {terms::kAnyData, terms::kAnyPurpose,
                                                                  terms::kAnyProcessing, terms::kAnyRecipient,
                                                                  "spl:AnyLocation"};
    static constexpr std::array<std::string_view, kTrees> stems = {"Data", "Purpose", "Processing", "Recipient",
                                                                   "Location"};
    const std::size_t height = profile_.ontology.height;
    const std::size_t classes = profile_.ontology.inclusions - kNullInclusions;
    for (std::size_t t = 0; t < kTrees; ++t) {
      Tree& tree = trees_[t];
      tree.nodes.push_back({std::string(tops[t]), -1, 0, true});
      const std::size_t size = classes / kTrees + (t < classes % kTrees ? 1 : 0);
      for (std::size_t i = 1; i <= size; ++i) {
        int parent;
        if (i <= height) {
          parent = static_cast<int>(i - 1);  // a chain fixes the height
        } else {
          do {
            parent = static_cast<int>(rng_.below(tree.nodes.size()));
          } while (tree.nodes[parent].depth >= height);
        }
        tree.nodes[parent].leaf = false;
        tree.nodes.push_back({"gen:" + std::string(stems[t]) + std::to_string(i), parent,
                              tree.nodes[parent].depth + 1, true});
      }
    }
  }

  VocabularyOntology build_vocab() {
    VocabularyOntology::Builder b;
    for (const auto& tree : trees_) {
      for (const auto& n : tree.nodes) b.add_class(n.name);
    }
    for (const char* extra : {"spl:AnyStorage", "spl:AnyDuration", "sbpl:AnyDuty", "sbpl:AnyLegalBasis"}) {
      b.add_class(extra);
    }
    b.add_class(std::string(terms::kNull));
    b.add_subclass(std::string(terms::kNull), std::string(terms::kAnyRecipient));
    b.add_subclass(std::string(terms::kNull), std::string(terms::kAnyStorage));
    for (const auto& tree : trees_) {
      for (const auto& n : tree.nodes) {
        if (n.parent >= 0) b.add_subclass(n.name, tree.nodes[n.parent].name);
      }
    }

    std::vector<std::pair<std::string, std::string>> siblings;
    for (const auto& tree : trees_) {
      for (std::size_t i = 1; i < tree.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < tree.nodes.size(); ++j) {
          if (tree.nodes[i].parent == tree.nodes[j].parent) siblings.emplace_back(tree.nodes[i].name, tree.nodes[j].name);
        }
      }
    }
    if (siblings.size() < profile_.ontology.disjoint_axioms) throw Error("not enough sibling pairs for the disjointness axioms");
    rng_.shuffle(siblings);
    siblings.resize(profile_.ontology.disjoint_axioms);
    std::sort(siblings.begin(), siblings.end());
    for (auto& [a, c] : siblings) b.add_disjoint({a, c});

    auto prop = [&](std::string_view id, bool functional, RangeKind range, std::string range_class = {}) {
      b.add_property({std::string(id), functional, range, std::move(range_class)});
    };
    prop(terms::kHasData, true, RangeKind::kClass, std::string(terms::kAnyData));
    prop(terms::kHasPurpose, true, RangeKind::kClass, std::string(terms::kAnyPurpose));
    prop(terms::kHasProcessing, true, RangeKind::kClass, std::string(terms::kAnyProcessing));
    prop(terms::kHasRecipient, true, RangeKind::kClass, std::string(terms::kAnyRecipient));
    prop(terms::kHasStorage, true, RangeKind::kClass, std::string(terms::kAnyStorage));
    prop(terms::kHasLocation, true, RangeKind::kClass, "spl:AnyLocation");
    prop(terms::kHasDuration, true, RangeKind::kClass, "spl:AnyDuration");
    prop(terms::kDurationInDays, true, RangeKind::kInterval);
    prop(terms::kHasDuty, false, RangeKind::kClass, "sbpl:AnyDuty");
    prop(terms::kHasLegalBasis, false, RangeKind::kClass, "sbpl:AnyLegalBasis");
    return std::move(b).build();
  }

  // Leaf-biased class from one tree (never the top).
  int sample_node(std::size_t t) {
    const Tree& tree = trees_[t];
    const bool want_leaf = rng_.chance(0.75);
    while (true) {
      const int n = 1 + static_cast<int>(rng_.below(tree.nodes.size() - 1));
      if (!want_leaf || tree.nodes[n].leaf) return n;
    }
  }

  Interval sample_duration() {
    static constexpr std::array<std::int64_t, 6> starts = {0, 7, 30, 90, 180, 365};
    static constexpr std::array<std::int64_t, 5> spans = {30, 90, 365, 730, 1825};
    const std::int64_t lo = starts[rng_.below(starts.size())];
    if (rng_.chance(0.2)) return {lo, Interval::kInfinity};
    return {lo, lo + spans[rng_.below(spans.size())]};
  }

  Draft sample() {
    Draft d;
    for (std::size_t t = 0; t < kTrees; ++t) d.node[t] = sample_node(t);
    d.duration = sample_duration();
    return d;
  }

  // A draft whose instances include all instances of d.
  Draft generalize(const Draft& d) {
    Draft g = d;
    for (std::size_t t = 0; t < kTrees; ++t) {
      const std::size_t depth = trees_[t].nodes[d.node[t]].depth;
      if (depth > 0 && rng_.chance(0.5)) g.node[t] = trees_[t].climb(d.node[t], 1 + rng_.below(depth));
    }
    if (rng_.chance(0.5)) g.duration.lo = static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(d.duration.lo) + 1));
    if (rng_.chance(0.3)) g.duration.hi = Interval::kInfinity;
    return g;
  }

  Draft merge(const Draft& a, const Draft& b) const {
    Draft m;
    for (std::size_t t = 0; t < kTrees; ++t) m.node[t] = trees_[t].lca(a.node[t], b.node[t]);
    m.duration = {std::min(a.duration.lo, b.duration.lo), std::max(a.duration.hi, b.duration.hi)};
    return m;
  }

  // k consent disjuncts jointly covering every disjunct of bp.
  std::vector<Draft> cover(const std::vector<Draft>& bp, std::size_t k) {
    std::vector<Draft> out;
    if (k >= bp.size()) {
      for (const auto& d : bp) out.push_back(generalize(d));
      while (out.size() < k) out.push_back(sample());
    } else {
      std::vector<std::size_t> order(bp.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng_.shuffle(order);
      std::vector<std::optional<Draft>> groups(k);
      for (std::size_t i = 0; i < order.size(); ++i) {
        auto& g = groups[i % k];
        g = g ? merge(*g, bp[order[i]]) : bp[order[i]];
      }
      for (auto& g : groups) out.push_back(generalize(*g));
    }
    rng_.shuffle(out);
    return out;
  }

  // k consent disjuncts none of which admits the data category of one bp
  // disjunct, so that disjunct stays uncovered.
  std::vector<Draft> miss(const std::vector<Draft>& bp, std::size_t k) {
    std::vector<Draft> out = cover(bp, k);
    const int target = bp[rng_.below(bp.size())].node[kData];
    const Tree& data = trees_[kData];
    for (auto& d : out) {
      while (data.is_ancestor(d.node[kData], target)) d.node[kData] = sample_node(kData);
    }
    return out;
  }

  FullPolicy to_policy(const std::vector<Draft>& drafts, PolicyKind kind) const {
    FullPolicy p;
    p.kind = kind;
    for (const auto& d : drafts) {
      SimplePolicy s;
      s.data = ClassExpr::named(trees_[kData].nodes[d.node[kData]].name);
      s.purpose = ClassExpr::named(trees_[kPurpose].nodes[d.node[kPurpose]].name);
      s.processing = ClassExpr::named(trees_[kProcessing].nodes[d.node[kProcessing]].name);
      s.recipient = ClassExpr::named(trees_[kRecipient].nodes[d.node[kRecipient]].name);
      s.storage = StorageExpr::block(ClassExpr::named(trees_[kLocation].nodes[d.node[kLocation]].name), d.duration);
      p.disjuncts.push_back(std::move(s));
    }
    return p;
  }

  WorkloadProfile profile_;
  Rng rng_;
  std::array<Tree, kTrees> trees_;
  std::vector<std::vector<Draft>> bp_drafts_;
};

}  // namespace

Workload generate_workload(const WorkloadProfile& profile) {
  profile.validate();
  return Generator(profile).run();
}

WorkloadStats workload_stats(const Workload& w) {
  WorkloadStats s;
  s.census = w.vocab.census();
  s.business = w.business.size();
  s.consents = w.consents.size();
  s.checks = w.checks.size();
  auto avg = [](const std::vector<FullPolicy>& ps) {
    double total = 0;
    for (const auto& p : ps) total += static_cast<double>(p.disjuncts.size());
    return ps.empty() ? 0.0 : total / static_cast<double>(ps.size());
  };
  s.bp_avg_disjuncts = avg(w.business);
  s.consent_avg_disjuncts = avg(w.consents);
  const auto compliant = std::count_if(w.checks.begin(), w.checks.end(), [](const CheckPair& c) { return c.compliant; });
  s.compliant_fraction = w.checks.empty() ? 0.0 : static_cast<double>(compliant) / static_cast<double>(w.checks.size());
  return s;
}

std::string serialize_workload(const Workload& w) {
  std::ostringstream out;
  out << serialize_vocabulary(w.vocab);
  for (std::size_t i = 0; i < w.business.size(); ++i) out << "# business " << i << '\n' << serialize_policy(w.business[i]);
  for (std::size_t i = 0; i < w.consents.size(); ++i) out << "# consent " << i << '\n' << serialize_policy(w.consents[i]);
  for (const auto& c : w.checks) out << "# check " << c.business << ' ' << c.consent << ' ' << c.compliant << '\n';
  return out.str();
}

}  // namespace plcheck
