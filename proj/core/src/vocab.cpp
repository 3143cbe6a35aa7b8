#include "plcheck/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "plcheck/error.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

}  // namespace

std::string_view attribute_property(UsageAttribute a) noexcept {
  switch (a) {
    case UsageAttribute::kData: return terms::kHasData;
    case UsageAttribute::kPurpose: return terms::kHasPurpose;
    case UsageAttribute::kProcessing: return terms::kHasProcessing;
    case UsageAttribute::kRecipient: return terms::kHasRecipient;
    case UsageAttribute::kStorage: return terms::kHasStorage;
  }
  return {};
}

std::string_view attribute_top(UsageAttribute a) noexcept {
  switch (a) {
    case UsageAttribute::kData: return terms::kAnyData;
    case UsageAttribute::kPurpose: return terms::kAnyPurpose;
    case UsageAttribute::kProcessing: return terms::kAnyProcessing;
    case UsageAttribute::kRecipient: return terms::kAnyRecipient;
    case UsageAttribute::kStorage: return terms::kAnyStorage;
  }
  return {};
}

std::optional<ClassId> VocabularyOntology::find_class(std::string_view id) const {
  auto it = class_index_.find(std::string(id));
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

ClassId VocabularyOntology::class_id(std::string_view id) const {
  if (auto c = find_class(id)) return *c;
  throw VocabularyError("undeclared class '" + std::string(id) + "'");
}

std::optional<PropertyId> VocabularyOntology::find_property(std::string_view id) const {
  auto it = property_index_.find(std::string(id));
  if (it == property_index_.end()) return std::nullopt;
  return it->second;
}

PropertyId VocabularyOntology::property_id(std::string_view id) const {
  if (auto p = find_property(id)) return *p;
  throw VocabularyError("undeclared property '" + std::string(id) + "'");
}

bool VocabularyOntology::is_subclass(std::string_view sub, std::string_view super) const {
  return is_subclass(class_id(sub), class_id(super));
}

bool VocabularyOntology::are_disjoint(std::string_view a, std::string_view b) const {
  return are_disjoint(class_id(a), class_id(b));
}

VocabularyCensus VocabularyOntology::census() const {
  VocabularyCensus c;
  c.classes = classes_.size();
  c.inclusions = subclass_axioms_.size();
  c.disjoint_axioms = disjointness_axioms_.size();
  for (const auto& p : properties_) {
    if (p.range != RangeKind::kNone) ++c.range_axioms;
    if (p.functional) ++c.functional_properties;
  }
  c.height = height_;
  return c;
}

// Tarjan SCC over the asserted subclass edges, then ancestor sets are
// accumulated in reverse topological order of the condensation (an SCC's
// supers are always finished before it).
void VocabularyOntology::close() {
  const std::size_t n = classes_.size();
  std::vector<std::vector<ClassId>> supers(n);
  for (const auto& [sub, super] : subclass_axioms_) {
    supers[class_index_.at(sub)].push_back(class_index_.at(super));
  }

  std::vector<int> index(n, -1), low(n, 0), component(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<ClassId> stack;
  std::vector<std::vector<ClassId>> components;  // in completion order
  int counter = 0;

  std::function<void(ClassId)> visit = [&](ClassId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (ClassId w : supers[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<ClassId> members;
      ClassId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = static_cast<int>(components.size());
        members.push_back(w);
      } while (w != v);
      components.push_back(std::move(members));
    }
  };
  for (ClassId v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }

  ancestors_.assign(n, DynamicBitset(n));
  descendants_.assign(n, DynamicBitset(n));
  representative_.assign(n, 0);
  std::vector<std::size_t> depth(components.size(), 0);

  // Tarjan completes an SCC only after every SCC reachable from it, so the
  // completion order already lists supers first.
  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    const auto& members = components[ci];
    DynamicBitset anc(n);
    for (ClassId m : members) anc.set(m);
    std::size_t d = 0;
    for (ClassId m : members) {
      for (ClassId s : supers[m]) {
        const auto sc = static_cast<std::size_t>(component[s]);
        if (sc == ci) continue;
        anc |= ancestors_[s];
        d = std::max(d, depth[sc] + 1);
      }
    }
    depth[ci] = d;
    const ClassId rep = *std::min_element(members.begin(), members.end());
    for (ClassId m : members) {
      ancestors_[m] = anc;
      representative_[m] = rep;
    }
  }
  height_ = depth.empty() ? 0 : *std::max_element(depth.begin(), depth.end());

  for (ClassId c = 0; c < n; ++c) {
    ancestors_[c].for_each([&](std::size_t a) { descendants_[a].set(c); });
  }

  disjoint_.assign(n, DynamicBitset(n));
  for (const auto& group : disjointness_axioms_) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const ClassId a = class_index_.at(group[i]);
        const ClassId b = class_index_.at(group[j]);
        descendants_[a].for_each([&](std::size_t x) { disjoint_[x] |= descendants_[b]; });
        descendants_[b].for_each([&](std::size_t x) { disjoint_[x] |= descendants_[a]; });
        if (ancestors_[a].test(b) || ancestors_[b].test(a)) {
          const bool a_below = ancestors_[a].test(b);
          const auto& low_class = a_below ? group[i] : group[j];
          const auto& high_class = a_below ? group[j] : group[i];
          warnings_.push_back("class '" + low_class + "' is declared disjoint with its ancestor '" +
                              high_class + "' and is unsatisfiable");
        }
      }
    }
  }
  for (ClassId c = 0; c < n; ++c) {
    if (!satisfiable(c)) {
      warnings_.push_back("class '" + classes_[c] + "' is unsatisfiable");
    }
  }
}

VocabularyOntology::Builder& VocabularyOntology::Builder::add_class(std::string id) {
  if (voc_.class_index_.count(id) == 0) {
    voc_.class_index_.emplace(id, static_cast<ClassId>(voc_.classes_.size()));
    voc_.classes_.push_back(std::move(id));
  }
  return *this;
}

VocabularyOntology::Builder& VocabularyOntology::Builder::add_subclass(std::string sub,
                                                                       std::string super) {
  voc_.subclass_axioms_.emplace_back(std::move(sub), std::move(super));
  return *this;
}

VocabularyOntology::Builder& VocabularyOntology::Builder::add_disjoint(
    std::vector<std::string> group) {
  if (group.size() < 2) throw VocabularyError("disjointness axiom needs at least two classes");
  voc_.disjointness_axioms_.push_back(std::move(group));
  return *this;
}

VocabularyOntology::Builder& VocabularyOntology::Builder::add_property(PropertyDecl decl) {
  auto it = voc_.property_index_.find(decl.id);
  if (it != voc_.property_index_.end()) {
    if (voc_.properties_[it->second] != decl) {
      throw VocabularyError("property '" + decl.id + "' redeclared with conflicting flags");
    }
    return *this;
  }
  voc_.property_index_.emplace(decl.id, static_cast<PropertyId>(voc_.properties_.size()));
  voc_.properties_.push_back(std::move(decl));
  return *this;
}

VocabularyOntology VocabularyOntology::Builder::build() && {
  auto require = [this](const std::string& id, const char* where) {
    if (voc_.class_index_.count(id) == 0) {
      throw VocabularyError(std::string(where) + " references undeclared class '" + id + "'");
    }
  };
  for (const auto& [sub, super] : voc_.subclass_axioms_) {
    require(sub, "subclass axiom");
    require(super, "subclass axiom");
  }
  for (const auto& group : voc_.disjointness_axioms_) {
    for (const auto& id : group) require(id, "disjointness axiom");
  }
  voc_.range_ids_.clear();
  for (const auto& p : voc_.properties_) {
    if (p.range == RangeKind::kClass) {
      require(p.range_class, "range axiom");
      voc_.range_ids_.push_back(voc_.class_index_.at(p.range_class));
    } else {
      voc_.range_ids_.push_back(std::nullopt);
    }
  }
  voc_.close();
  // Class ids follow declaration order, so the order is part of the identity.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_vocabulary(voc_)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  voc_.identity_ = h;
  return std::move(voc_);
}

VocabularyOntology load_vocabulary(std::string_view source) {
  struct Line {
    std::size_t number;
    std::vector<std::string_view> words;
  };
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    std::size_t end = source.find('\n', pos);
    if (end == std::string_view::npos) end = source.size();
    ++number;
    auto words = split_words(source.substr(pos, end - pos));
    // '#' starts a comment that runs to the end of the line.
    auto comment = std::find_if(words.begin(), words.end(),
                                [](std::string_view w) { return w.front() == '#'; });
    words.erase(comment, words.end());
    if (!words.empty()) lines.push_back({number, std::move(words)});
    pos = end + 1;
  }

  VocabularyOntology::Builder builder;
  std::unordered_map<std::string, std::size_t> declared;
  for (const auto& line : lines) {
    if (line.words[0] == "class") {
      if (line.words.size() != 2) throw ParseError("expected 'class <id>'", line.number, 1);
      builder.add_class(std::string(line.words[1]));
      declared.emplace(std::string(line.words[1]), line.number);
    }
  }

  auto require = [&](std::string_view id, const Line& line) {
    if (declared.count(std::string(id)) == 0) {
      throw VocabularyError("line " + std::to_string(line.number) + ": undeclared class '" +
                            std::string(id) + "'");
    }
  };

  for (const auto& line : lines) {
    const auto& w = line.words;
    if (w[0] == "class") continue;
    if (w[0] == "subclass") {
      if (w.size() != 3) throw ParseError("expected 'subclass <sub> <super>'", line.number, 1);
      require(w[1], line);
      require(w[2], line);
      builder.add_subclass(std::string(w[1]), std::string(w[2]));
    } else if (w[0] == "disjoint") {
      if (w.size() < 3) throw ParseError("expected 'disjoint <id> <id> [<id> ...]'", line.number, 1);
      std::vector<std::string> group;
      for (std::size_t i = 1; i < w.size(); ++i) {
        require(w[i], line);
        group.emplace_back(w[i]);
      }
      builder.add_disjoint(std::move(group));
    } else if (w[0] == "property") {
      if (w.size() < 3 || w.size() > 4) {
        throw ParseError("expected 'property <id> functional|multi [range=<class>|range=interval]'",
                         line.number, 1);
      }
      PropertyDecl decl;
      decl.id = std::string(w[1]);
      if (w[2] == "functional") {
        decl.functional = true;
      } else if (w[2] != "multi") {
        throw ParseError("property flag must be 'functional' or 'multi'", line.number, 1);
      }
      if (w.size() == 4) {
        constexpr std::string_view prefix = "range=";
        if (w[3].substr(0, prefix.size()) != prefix || w[3].size() == prefix.size()) {
          throw ParseError("expected range=<class-id> or range=interval", line.number, 1);
        }
        auto target = w[3].substr(prefix.size());
        if (target == "interval") {
          decl.range = RangeKind::kInterval;
        } else {
          require(target, line);
          decl.range = RangeKind::kClass;
          decl.range_class = std::string(target);
        }
      }
      try {
        builder.add_property(std::move(decl));
      } catch (const VocabularyError& e) {
        throw VocabularyError("line " + std::to_string(line.number) + ": " + e.what());
      }
    } else {
      throw ParseError("unknown declaration '" + std::string(w[0]) + "'", line.number, 1);
    }
  }
  return std::move(builder).build();
}

VocabularyOntology load_vocabulary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open vocabulary file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_vocabulary(buffer.str());
}

std::string serialize_vocabulary(const VocabularyOntology& voc) {
  std::ostringstream out;
  for (const auto& c : voc.classes()) out << "class " << c << '\n';
  for (const auto& [sub, super] : voc.subclass_axioms()) out << "subclass " << sub << ' ' << super << '\n';
  for (const auto& group : voc.disjointness_axioms()) {
    out << "disjoint";
    for (const auto& id : group) out << ' ' << id;
    out << '\n';
  }
  for (const auto& p : voc.properties()) {
    out << "property " << p.id << (p.functional ? " functional" : " multi");
    if (p.range == RangeKind::kClass) out << " range=" << p.range_class;
    if (p.range == RangeKind::kInterval) out << " range=interval";
    out << '\n';
  }
  return out.str();
}

}  // namespace plcheck
