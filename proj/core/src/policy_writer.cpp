#include <cctype>
#include <sstream>

#include "plcheck/policy_io.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

namespace {

bool plain_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

bool bare_safe(const std::string& id) {
  if (id.empty() || id == "Null" || id == "not" || id == "or") return false;
  for (std::size_t i = 0; i < id.size(); ++i) {
    if (plain_char(id[i])) continue;
    // An inner colon must be followed by an identifier character.
    if (id[i] == ':' && i > 0 && i + 1 < id.size() && plain_char(id[i + 1])) continue;
    return false;
  }
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

std::string name(const std::string& id) {
  if (id == terms::kNull) return "spl:Null";
  return bare_safe(id) ? id : quote(id);
}

std::string bound(std::int64_t v) {
  return v == Interval::kInfinity ? std::string("*") : std::to_string(v) + "d";
}

std::string key_for(const ClassExpr& exists) {
  const auto& p = exists.id();
  const bool interval = exists.filler().is(ClassExpr::Kind::kInterval);
  if (p == terms::kDurationInDays && interval) return "has_duration";
  if (p == terms::kHasDuration && !interval) return "has_duration";
  if (p == terms::kHasData) return "has_data";
  if (p == terms::kHasPurpose) return "has_purpose";
  if (p == terms::kHasProcessing) return "has_processing";
  if (p == terms::kHasRecipient) return "has_recipient";
  if (p == terms::kHasStorage) return "has_storage";
  if (p == terms::kHasLocation) return "has_location";
  if (p == terms::kHasDuty) return "has_duty";
  if (p == terms::kHasLegalBasis) return "has_legal_basis";
  return name(p);
}

void write(std::ostream& out, const ClassExpr& e) {
  auto list = [&](const std::vector<ClassExpr>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out << ", ";
      const auto& m = items[i];
      if (m.is(ClassExpr::Kind::kExists)) {
        out << key_for(m) << ": ";
        write(out, m.filler());
      } else {
        write(out, m);
      }
    }
  };
  switch (e.kind()) {
    case ClassExpr::Kind::kNamed:
      out << name(e.id());
      break;
    case ClassExpr::Kind::kIntersection:
      if (e.children().empty()) {
        out << "{}";
      } else {
        out << "{ ";
        list(e.children());
        out << " }";
      }
      break;
    case ClassExpr::Kind::kExists:
      out << "{ ";
      list({e});
      out << " }";
      break;
    case ClassExpr::Kind::kInterval:
      out << '[' << bound(e.bounds().lo) << ", " << bound(e.bounds().hi) << ']';
      break;
    case ClassExpr::Kind::kComplement:
      out << "not(" << name(e.id()) << ')';
      break;
    case ClassExpr::Kind::kUnion:
      out << "or(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) out << ", ";
        write(out, e.children()[i]);
      }
      out << ')';
      break;
  }
}

void write_storage(std::ostream& out, const StorageExpr& s) {
  switch (s.form) {
    case StorageExpr::Form::kNull:
      out << "spl:Null";
      return;
    case StorageExpr::Form::kClass:
      write(out, s.filler);
      return;
    case StorageExpr::Form::kBlock:
      break;
  }
  out << "{ has_duration: ";
  if (const auto* iv = std::get_if<Interval>(&s.duration)) {
    out << '[' << bound(iv->lo) << ", " << bound(iv->hi) << ']';
  } else {
    write(out, std::get<ClassExpr>(s.duration));
  }
  out << ", has_location: ";
  write(out, s.location);
  out << " }";
}

void write_simple(std::ostream& out, const SimplePolicy& p, const std::string& indent) {
  const std::string inner = indent + "  ";
  out << indent << "{\n";
  out << inner << "has_data: ";
  write(out, p.data);
  out << ",\n";
  if (!p.duties.empty()) {
    out << inner << "has_duty: [";
    for (std::size_t i = 0; i < p.duties.size(); ++i) {
      if (i) out << ", ";
      write(out, p.duties[i]);
    }
    out << "],\n";
  }
  if (p.legal_basis) {
    out << inner << "has_legal_basis: ";
    write(out, *p.legal_basis);
    out << ",\n";
  }
  out << inner << "has_processing: ";
  write(out, p.processing);
  out << ",\n" << inner << "has_purpose: ";
  write(out, p.purpose);
  out << ",\n" << inner << "has_recipient: ";
  write(out, p.recipient);
  out << ",\n" << inner << "has_storage: ";
  write_storage(out, p.storage);
  out << '\n' << indent << '}';
}

}  // namespace

std::string serialize_filler(const ClassExpr& e) {
  std::ostringstream out;
  write(out, e);
  return out.str();
}

std::string serialize_policy(const FullPolicy& p) {
  std::ostringstream out;
  if (p.disjuncts.size() == 1) {
    write_simple(out, p.disjuncts.front(), "");
  } else {
    out << "[\n";
    for (std::size_t i = 0; i < p.disjuncts.size(); ++i) {
      write_simple(out, p.disjuncts[i], "  ");
      out << (i + 1 < p.disjuncts.size() ? ",\n" : "\n");
    }
    out << ']';
  }
  out << '\n';
  return out.str();
}

}  // namespace plcheck
