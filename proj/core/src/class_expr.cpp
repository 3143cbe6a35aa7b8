#include "plcheck/class_expr.hpp"

#include <algorithm>
#include <sstream>

namespace plcheck {

ClassExpr ClassExpr::named(std::string id) {
  ClassExpr e;
  e.kind_ = Kind::kNamed;
  e.id_ = std::move(id);
  return e;
}

ClassExpr ClassExpr::intersection(std::vector<ClassExpr> members) {
  ClassExpr e;
  e.kind_ = Kind::kIntersection;
  e.children_ = std::move(members);
  return e;
}

ClassExpr ClassExpr::exists(std::string property, ClassExpr filler) {
  ClassExpr e;
  e.kind_ = Kind::kExists;
  e.id_ = std::move(property);
  e.children_.push_back(std::move(filler));
  return e;
}

ClassExpr ClassExpr::interval(Interval iv) {
  ClassExpr e;
  e.kind_ = Kind::kInterval;
  e.interval_ = iv;
  return e;
}

ClassExpr ClassExpr::complement(std::string id) {
  ClassExpr e;
  e.kind_ = Kind::kComplement;
  e.id_ = std::move(id);
  return e;
}

ClassExpr ClassExpr::union_of(std::vector<ClassExpr> branches) {
  ClassExpr e;
  e.kind_ = Kind::kUnion;
  e.children_ = std::move(branches);
  return e;
}

bool ClassExpr::uses_rulebook_constructs() const {
  if (kind_ == Kind::kComplement || kind_ == Kind::kUnion) return true;
  return std::any_of(children_.begin(), children_.end(),
                     [](const ClassExpr& c) { return c.uses_rulebook_constructs(); });
}

std::size_t ClassExpr::exists_depth() const {
  std::size_t d = 0;
  for (const auto& c : children_) d = std::max(d, c.exists_depth());
  return kind_ == Kind::kExists ? d + 1 : d;
}

std::string to_string(const Interval& iv) {
  std::string out = "[" + std::to_string(iv.lo) + "d, ";
  out += iv.unbounded() ? std::string("*") : std::to_string(iv.hi) + "d";
  return out + "]";
}

namespace {

void render(std::ostream& out, const ClassExpr& e) {
  auto list = [&](const char* op) {
    out << op << '(';
    for (std::size_t i = 0; i < e.children().size(); ++i) {
      if (i) out << ' ';
      render(out, e.children()[i]);
    }
    out << ')';
  };
  switch (e.kind()) {
    case ClassExpr::Kind::kNamed:
      out << e.id();
      break;
    case ClassExpr::Kind::kIntersection:
      if (e.children().empty()) {
        out << "owl:Thing";
      } else {
        list("ObjectIntersectionOf");
      }
      break;
    case ClassExpr::Kind::kUnion:
      if (e.children().empty()) {
        out << "owl:Nothing";
      } else {
        list("ObjectUnionOf");
      }
      break;
    case ClassExpr::Kind::kExists:
      out << "ObjectSomeValuesFrom(" << e.id() << ' ';
      render(out, e.filler());
      out << ')';
      break;
    case ClassExpr::Kind::kInterval:
      out << "DatatypeRestriction(xsd:integer xsd:minInclusive " << e.bounds().lo;
      if (!e.bounds().unbounded()) out << " xsd:maxInclusive " << e.bounds().hi;
      out << ')';
      break;
    case ClassExpr::Kind::kComplement:
      out << "ObjectComplementOf(" << e.id() << ')';
      break;
  }
}

}  // namespace

std::string to_string(const ClassExpr& e) {
  std::ostringstream out;
  render(out, e);
  return out.str();
}

}  // namespace plcheck
