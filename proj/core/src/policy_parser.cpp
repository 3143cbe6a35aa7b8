#include <array>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>

#include "plcheck/error.hpp"
#include "plcheck/policy_io.hpp"
#include "plcheck/terms.hpp"

namespace plcheck {

namespace {

enum class Tok { kLBrace, kRBrace, kLBracket, kRBracket, kLParen, kRParen, kComma, kColon, kStar,
                 kIdent, kString, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::kLBrace: return "'{'";
    case Tok::kRBrace: return "'}'";
    case Tok::kLBracket: return "'['";
    case Tok::kRBracket: return "']'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kComma: return "','";
    case Tok::kColon: return "':'";
    case Tok::kStar: return "'*'";
    case Tok::kIdent: return "identifier";
    case Tok::kString: return "string";
    case Tok::kEnd: return "end of input";
  }
  return "token";
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      advance();
      return t;
    };
    switch (c) {
      case '{': return single(Tok::kLBrace);
      case '}': return single(Tok::kRBrace);
      case '[': return single(Tok::kLBracket);
      case ']': return single(Tok::kRBracket);
      case '(': return single(Tok::kLParen);
      case ')': return single(Tok::kRParen);
      case ',': return single(Tok::kComma);
      case ':': return single(Tok::kColon);
      case '*': return single(Tok::kStar);
      case '"': return string_token(t);
      default: break;
    }
    if (!ident_char(c)) {
      throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }
    t.kind = Tok::kIdent;
    // A colon directly followed by an identifier character continues a
    // prefixed name such as `spl:AnyData`.
    while (pos_ < src_.size()) {
      const char d = src_[pos_];
      if (ident_char(d) || (d == ':' && pos_ + 1 < src_.size() && ident_char(src_[pos_ + 1]))) {
        t.text.push_back(d);
        advance();
      } else {
        break;
      }
    }
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token string_token(Token& t) {
    t.kind = Tok::kString;
    advance();
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw ParseError("unterminated string", t.line, t.column);
      }
      const char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated string", t.line, t.column);
        const char e = src_[pos_];
        if (e != '"' && e != '\\' && e != '/') {
          throw ParseError(std::string("unsupported escape '\\") + e + "'", line_, column_);
        }
        t.text.push_back(e);
        advance();
        continue;
      }
      t.text.push_back(c);
      advance();
    }
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

struct KeyMapping {
  std::string_view key;
  std::string_view property;
};

// Concrete-syntax keys and the property ids they stand for. has_duration is
// resolved by the kind of its value (interval vs. class).
constexpr std::array<KeyMapping, 8> kKeyTable = {{
    {"has_data", terms::kHasData},
    {"has_purpose", terms::kHasPurpose},
    {"has_processing", terms::kHasProcessing},
    {"has_recipient", terms::kHasRecipient},
    {"has_storage", terms::kHasStorage},
    {"has_location", terms::kHasLocation},
    {"has_duty", terms::kHasDuty},
    {"has_legal_basis", terms::kHasLegalBasis},
}};

class Parser {
 public:
  Parser(std::string_view src, bool allow_rulebook)
      : lexer_(src), allow_rulebook_(allow_rulebook) {
    tok_ = lexer_.next();
    ahead_ = lexer_.next();
  }

  FullPolicy document(PolicyKind kind) {
    FullPolicy fp;
    fp.kind = kind;
    if (tok_.kind == Tok::kLBracket) {
      const Token open = take();
      while (tok_.kind != Tok::kRBracket) {
        fp.disjuncts.push_back(policy(kind));
        if (tok_.kind == Tok::kComma) {
          take();
        } else {
          break;
        }
      }
      expect(Tok::kRBracket);
      if (fp.disjuncts.empty()) {
        throw ParseError("a full policy needs at least one simple policy", open.line, open.column);
      }
    } else {
      fp.disjuncts.push_back(policy(kind));
    }
    expect(Tok::kEnd);
    return fp;
  }

  ClassExpr standalone_filler() {
    ClassExpr e = filler();
    expect(Tok::kEnd);
    return e;
  }

 private:
  Token take() {
    Token t = std::move(tok_);
    tok_ = std::move(ahead_);
    ahead_ = lexer_.next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg, const Token& at) const {
    throw ParseError(msg, at.line, at.column);
  }

  Token expect(Tok k) {
    if (tok_.kind != k) {
      fail(std::string("expected ") + describe(k) + ", found " + describe(tok_.kind) +
               (tok_.text.empty() ? "" : " '" + tok_.text + "'"),
           tok_);
    }
    return take();
  }

  bool at_key() const {
    return (tok_.kind == Tok::kIdent || tok_.kind == Tok::kString) && ahead_.kind == Tok::kColon;
  }

  static std::string name_of(const Token& t) {
    if (t.kind == Tok::kIdent && t.text == "Null") return std::string(terms::kNull);
    return t.text;
  }

  SimplePolicy policy(PolicyKind kind) {
    const Token open = expect(Tok::kLBrace);
    std::optional<ClassExpr> data, purpose, processing, recipient, legal;
    std::optional<StorageExpr> storage;
    std::optional<std::vector<ClassExpr>> duties;

    auto once = [this](auto& slot, const Token& key) {
      if (slot) fail("duplicate attribute '" + key.text + "'", key);
    };
    auto business_only = [&](const Token& key) {
      if (kind == PolicyKind::kConsent) {
        fail("attribute '" + key.text + "' is only allowed in business policies", key);
      }
    };

    while (tok_.kind != Tok::kRBrace) {
      if (!at_key()) fail("expected an attribute key", tok_);
      const Token key = take();
      expect(Tok::kColon);
      const std::string& k = key.text;
      if (k == "has_data" || k == terms::kHasData) {
        once(data, key);
        data = slot_filler();
      } else if (k == "has_purpose" || k == terms::kHasPurpose) {
        once(purpose, key);
        purpose = slot_filler();
      } else if (k == "has_processing" || k == terms::kHasProcessing) {
        once(processing, key);
        processing = slot_filler();
      } else if (k == "has_recipient" || k == terms::kHasRecipient) {
        once(recipient, key);
        recipient = slot_filler();
      } else if (k == "has_storage" || k == terms::kHasStorage) {
        once(storage, key);
        storage = storage_value();
      } else if (k == "has_duty" || k == terms::kHasDuty) {
        business_only(key);
        once(duties, key);
        duties = duty_list();
      } else if (k == "has_legal_basis" || k == terms::kHasLegalBasis) {
        business_only(key);
        once(legal, key);
        legal = slot_filler();
      } else {
        fail("unknown attribute key '" + k + "'", key);
      }
      if (tok_.kind == Tok::kComma) {
        take();
      } else {
        break;
      }
    }
    expect(Tok::kRBrace);

    auto missing = [&](const char* name) {
      fail(std::string("missing mandatory attribute '") + name + "'", open);
    };
    if (!data) missing("has_data");
    if (!purpose) missing("has_purpose");
    if (!processing) missing("has_processing");
    if (!recipient) missing("has_recipient");
    if (!storage) missing("has_storage");

    SimplePolicy p;
    p.data = std::move(*data);
    p.purpose = std::move(*purpose);
    p.processing = std::move(*processing);
    p.recipient = std::move(*recipient);
    p.storage = std::move(*storage);
    if (duties) p.duties = std::move(*duties);
    p.legal_basis = std::move(legal);
    return p;
  }

  // Slot values may not be bare intervals.
  ClassExpr slot_filler() {
    const Token at = tok_;
    ClassExpr e = filler();
    if (e.is(ClassExpr::Kind::kInterval)) fail("an interval is not a valid value here", at);
    return e;
  }

  std::vector<ClassExpr> duty_list() {
    std::vector<ClassExpr> out;
    if (tok_.kind != Tok::kLBracket) {
      out.push_back(slot_filler());
      return out;
    }
    take();
    while (tok_.kind != Tok::kRBracket) {
      out.push_back(slot_filler());
      if (tok_.kind == Tok::kComma) {
        take();
      } else {
        break;
      }
    }
    expect(Tok::kRBracket);
    return out;
  }

  StorageExpr storage_value() {
    const Token at = tok_;
    ClassExpr e = filler();
    if (e.is(ClassExpr::Kind::kNamed) && e.id() == terms::kNull) return StorageExpr::null();
    if (e.is(ClassExpr::Kind::kInterval)) fail("an interval is not a valid storage value", at);
    if (at.kind != Tok::kLBrace) return StorageExpr::of_class(std::move(e));

    // A brace block holding exactly has_location and optionally one
    // duration is a storage block; anything else is kept as a class filler.
    std::vector<ClassExpr> members;
    if (e.is(ClassExpr::Kind::kIntersection)) {
      members = e.children();
    } else {
      members.push_back(e);
    }
    const ClassExpr* location = nullptr;
    const ClassExpr* duration = nullptr;
    for (const auto& m : members) {
      if (!m.is(ClassExpr::Kind::kExists)) return StorageExpr::of_class(std::move(e));
      if (m.id() == terms::kHasLocation && !location) {
        location = &m.filler();
      } else if ((m.id() == terms::kDurationInDays || m.id() == terms::kHasDuration) && !duration) {
        duration = &m;
      } else {
        return StorageExpr::of_class(std::move(e));
      }
    }
    if (!location) return StorageExpr::of_class(std::move(e));
    if (!duration) return StorageExpr::block(*location);
    if (duration->id() == terms::kDurationInDays) {
      if (!duration->filler().is(ClassExpr::Kind::kInterval)) return StorageExpr::of_class(std::move(e));
      return StorageExpr::block(*location, duration->filler().bounds());
    }
    return StorageExpr::block(*location, duration->filler());
  }

  ClassExpr filler() {
    switch (tok_.kind) {
      case Tok::kIdent:
      case Tok::kString: {
        if (tok_.kind == Tok::kIdent && ahead_.kind == Tok::kLParen &&
            (tok_.text == "not" || tok_.text == "or")) {
          return rulebook_construct();
        }
        return ClassExpr::named(name_of(take()));
      }
      case Tok::kLBrace:
        return braced();
      case Tok::kLBracket:
        return ClassExpr::interval(interval());
      default:
        fail(std::string("expected a class expression, found ") + describe(tok_.kind), tok_);
    }
  }

  ClassExpr rulebook_construct() {
    const Token head = take();
    if (!allow_rulebook_) {
      fail("'" + head.text + "(...)' (complement/union) is only allowed in rulebooks, not in policies",
           head);
    }
    expect(Tok::kLParen);
    if (head.text == "not") {
      const Token name = tok_;
      if (name.kind != Tok::kIdent && name.kind != Tok::kString) fail("expected a class name", name);
      take();
      expect(Tok::kRParen);
      return ClassExpr::complement(name_of(name));
    }
    std::vector<ClassExpr> branches;
    while (tok_.kind != Tok::kRParen) {
      branches.push_back(filler());
      if (tok_.kind == Tok::kComma) {
        take();
      } else {
        break;
      }
    }
    expect(Tok::kRParen);
    return ClassExpr::union_of(std::move(branches));
  }

  ClassExpr braced() {
    expect(Tok::kLBrace);
    std::vector<ClassExpr> members;
    while (tok_.kind != Tok::kRBrace) {
      if (at_key()) {
        const Token key = take();
        expect(Tok::kColon);
        ClassExpr value = filler();
        members.push_back(ClassExpr::exists(property_for(key.text, value), std::move(value)));
      } else {
        members.push_back(filler());
      }
      if (tok_.kind == Tok::kComma) {
        take();
      } else {
        break;
      }
    }
    expect(Tok::kRBrace);
    if (members.size() == 1) return std::move(members.front());
    return ClassExpr::intersection(std::move(members));
  }

  static std::string property_for(const std::string& key, const ClassExpr& value) {
    if (key == "has_duration") {
      return std::string(value.is(ClassExpr::Kind::kInterval) ? terms::kDurationInDays
                                                                : terms::kHasDuration);
    }
    for (const auto& m : kKeyTable) {
      if (m.key == key) return std::string(m.property);
    }
    return key;
  }

  Interval interval() {
    expect(Tok::kLBracket);
    Interval iv;
    iv.lo = bound(false);
    expect(Tok::kComma);
    iv.hi = bound(true);
    expect(Tok::kRBracket);
    return iv;
  }

  std::int64_t bound(bool upper) {
    const Token t = tok_;
    if (t.kind == Tok::kStar) {
      if (!upper) fail("the lower bound of an interval must be finite", t);
      take();
      return Interval::kInfinity;
    }
    if (t.kind != Tok::kIdent && t.kind != Tok::kString) fail("expected an interval bound", t);
    take();
    try {
      const auto v = parse_duration_bound(t.text);
      if (!upper && v == Interval::kInfinity) fail("the lower bound of an interval must be finite", t);
      return v;
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      fail(e.message(), t);
    }
  }

  Lexer lexer_;
  bool allow_rulebook_;
  Token tok_;
  Token ahead_;
};

}  // namespace

ParseError::ParseError(std::string message, std::size_t line, std::size_t column)
    : Error(line == 0 ? message
                      : std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      message_(std::move(message)),
      line_(line),
      column_(column) {}

std::int64_t parse_duration_bound(std::string_view text) {
  if (text == "*") return Interval::kInfinity;
  std::size_t i = 0;
  std::int64_t value = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    const int digit = text[i] - '0';
    if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) {
      throw ParseError("interval bound '" + std::string(text) + "' is out of range");
    }
    value = value * 10 + digit;
    ++i;
  }
  if (i == 0) throw ParseError("malformed interval bound '" + std::string(text) + "'");
  const std::string_view unit = text.substr(i);
  std::int64_t factor = 0;
  if (unit.empty() || unit == "d" || unit == "day" || unit == "days") {
    factor = 1;
  } else if (unit == "w" || unit == "week" || unit == "weeks") {
    factor = 7;
  } else if (unit == "month" || unit == "months") {
    factor = 30;
  } else if (unit == "y" || unit == "year" || unit == "years") {
    factor = 365;
  } else {
    throw ParseError("malformed interval bound '" + std::string(text) + "' (unknown unit '" +
                     std::string(unit) + "')");
  }
  // Infinity is reserved for '*'.
  if (value >= (std::numeric_limits<std::int64_t>::max() - 1) / factor) {
    throw ParseError("interval bound '" + std::string(text) + "' is out of range");
  }
  return value * factor;
}

FullPolicy parse_policy(std::string_view text, PolicyKind kind) {
  return Parser(text, false).document(kind);
}

FullPolicy parse_policy_file(const std::filesystem::path& path, PolicyKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open policy file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_policy(buffer.str(), kind);
}

ClassExpr parse_filler(std::string_view text) {
  return Parser(text, true).standalone_filler();
}

}  // namespace plcheck
