#include "plcheck/ledger.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "plcheck/engine.hpp"
#include "plcheck/error.hpp"
#include "plcheck/normalizer.hpp"
#include "plcheck/policy_io.hpp"

namespace plcheck {

using Json = nlohmann::ordered_json;

std::string_view to_string(AuditEntry::Status s) noexcept {
  switch (s) {
    case AuditEntry::Status::kJustified:
      return "justified";
    case AuditEntry::Status::kUnjustified:
      return "unjustified";
    case AuditEntry::Status::kError:
      return "error";
  }
  return "?";
}

std::string AuditReport::to_json_lines() const {
  std::string out;
  for (const auto& e : entries) {
    Json j{{"event", e.event},
           {"subject", e.subject},
           {"bp", e.business_policy},
           {"occurred_at", e.occurred_at},
           {"verdict", to_string(e.status)}};
    if (e.record) j["record"] = *e.record;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump() + "\n";
  }
  Json summary{{"summary", Json{{"events", entries.size()},
                                {"justified", justified},
                                {"unjustified", unjustified},
                                {"errors", errors}}}};
  return out + summary.dump() + "\n";
}

// ---------------------------------------------------------------------------
// Line encoding.

namespace {

std::string encode(const LedgerEntry& e) {
  Json j{{"seq", e.seq}, {"ts", e.ts}};
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BusinessRegistration>) {
          j["type"] = "bp-register";
          j["id"] = b.id;
          j["policy"] = serialize_policy(b.policy);
        } else if constexpr (std::is_same_v<T, ConsentGrant>) {
          j["type"] = "consent";
          j["id"] = b.id;
          j["subject"] = b.subject;
          j["policy"] = serialize_policy(b.policy);
        } else if constexpr (std::is_same_v<T, Withdrawal>) {
          j["type"] = "withdraw";
          j["record"] = b.record;
        } else {
          j["type"] = "event";
          j["id"] = b.id;
          j["subject"] = b.subject;
          j["bp"] = b.business_policy;
        }
      },
      e.body);
  return j.dump();
}

std::string field(const Json& j, const char* name, std::size_t line) {
  if (!j.contains(name) || !j.at(name).is_string()) {
    throw LedgerError("line " + std::to_string(line) + ": missing string field '" + name + "'");
  }
  return j.at(name).get<std::string>();
}

FullPolicy embedded_policy(const Json& j, PolicyKind kind, std::size_t line) {
  try {
    return parse_policy(field(j, "policy", line), kind);
  } catch (const ParseError& e) {
    throw LedgerError("line " + std::to_string(line) + ": embedded policy: " + e.what());
  }
}

LedgerEntry decode(std::string_view text, std::size_t line) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LedgerError("line " + std::to_string(line) + ": not a JSON object: " + e.what());
  }
  if (!j.is_object()) throw LedgerError("line " + std::to_string(line) + ": not a JSON object");
  for (const char* key : {"seq", "ts"}) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
      throw LedgerError("line " + std::to_string(line) + ": missing integer field '" + key + "'");
    }
  }
  LedgerEntry e;
  e.seq = j.at("seq").get<std::uint64_t>();
  e.ts = j.at("ts").get<Timestamp>();
  const std::string type = field(j, "type", line);
  if (type == "bp-register") {
    e.body = BusinessRegistration{field(j, "id", line), embedded_policy(j, PolicyKind::kBusiness, line)};
  } else if (type == "consent") {
    e.body = ConsentGrant{field(j, "id", line), field(j, "subject", line),
                          embedded_policy(j, PolicyKind::kConsent, line)};
  } else if (type == "withdraw") {
    e.body = Withdrawal{field(j, "record", line)};
  } else if (type == "event") {
    e.body = ProcessingEvent{field(j, "id", line), field(j, "subject", line), field(j, "bp", line)};
  } else {
    throw LedgerError("line " + std::to_string(line) + ": unknown type '" + type + "'");
  }
  return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ledger.

TransparencyLedger::TransparencyLedger(TransparencyLedger&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  entries_ = std::move(other.entries_);
  lines_ = std::move(other.lines_);
  file_ = std::move(other.file_);
  business_ids_ = std::move(other.business_ids_);
  event_ids_ = std::move(other.event_ids_);
  withdrawn_ = std::move(other.withdrawn_);
  consent_count_ = other.consent_count_;
  event_count_ = other.event_count_;
}

TransparencyLedger TransparencyLedger::from_text(std::string_view text) {
  TransparencyLedger ledger;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        ledger.append(decode(line, line_no), true);
      } catch (const LedgerError& e) {
        const std::string msg = e.what();
        throw LedgerError(msg.rfind("line ", 0) == 0 ? msg : "line " + std::to_string(line_no) + ": " + msg);
      }
    }
    start = end + 1;
  }
  return ledger;
}

TransparencyLedger TransparencyLedger::open(const std::filesystem::path& path) {
  std::string text;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  TransparencyLedger ledger = from_text(text);
  ledger.file_.emplace(path, std::ios::binary | std::ios::app);
  if (!*ledger.file_) throw Error("cannot open " + path.string() + " for appending");
  if (!text.empty() && text.back() != '\n') *ledger.file_ << '\n';
  return ledger;
}

void TransparencyLedger::append(LedgerEntry entry, bool replay) {
  const std::uint64_t expected = entries_.size() + 1;
  if (replay && entry.seq != expected) {
    throw LedgerError("sequence number " + std::to_string(entry.seq) + " where " + std::to_string(expected) +
                      " was expected");
  }
  entry.seq = expected;
  if (!entries_.empty() && entry.ts < entries_.back()->ts) {
    throw LedgerError("timestamp " + std::to_string(entry.ts) + " precedes the last entry (" +
                      std::to_string(entries_.back()->ts) + ")");
  }
  std::visit(
      [&](auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BusinessRegistration>) {
          if (b.policy.kind != PolicyKind::kBusiness) throw LedgerError("registered policy is not a business policy");
          if (business_ids_.contains(b.id)) throw LedgerError("business policy '" + b.id + "' already registered");
        } else if constexpr (std::is_same_v<T, ConsentGrant>) {
          if (b.policy.kind != PolicyKind::kConsent) throw LedgerError("recorded policy is not a consent policy");
          if (b.policy.disjuncts.empty()) throw LedgerError("consent policy has no disjunct");
          if (withdrawn_.contains(b.id)) throw LedgerError("consent record '" + b.id + "' already exists");
        } else if constexpr (std::is_same_v<T, Withdrawal>) {
          auto it = withdrawn_.find(b.record);
          if (it == withdrawn_.end()) throw LedgerError("unknown consent record '" + b.record + "'");
          if (it->second) throw LedgerError("consent record '" + b.record + "' is already withdrawn");
        } else {
          if (event_ids_.contains(b.id)) throw LedgerError("event '" + b.id + "' already recorded");
          if (!replay && !business_ids_.contains(b.business_policy)) {
            throw LedgerError("business policy '" + b.business_policy + "' is not registered");
          }
        }
      },
      entry.body);

  std::string line = encode(entry);
  if (file_) {
    *file_ << line << '\n';
    file_->flush();
    if (!*file_) throw Error("write to ledger file failed");
  }
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, BusinessRegistration>) {
          business_ids_.insert(b.id);
        } else if constexpr (std::is_same_v<T, ConsentGrant>) {
          withdrawn_.emplace(b.id, false);
          ++consent_count_;
        } else if constexpr (std::is_same_v<T, Withdrawal>) {
          withdrawn_[b.record] = true;
        } else {
          event_ids_.insert(b.id);
          ++event_count_;
        }
      },
      entry.body);
  lines_.push_back(std::move(line));
  entries_.push_back(std::make_shared<const LedgerEntry>(std::move(entry)));
}

void TransparencyLedger::register_business_policy(std::string id, FullPolicy policy, Timestamp at) {
  std::unique_lock lock(mutex_);
  append({0, at, BusinessRegistration{std::move(id), std::move(policy)}}, false);
}

std::string TransparencyLedger::record_consent(const VocabularyOntology& voc, std::string subject,
                                               FullPolicy policy, Timestamp given_at) {
  if (policy.disjuncts.empty()) throw LedgerError("consent policy has no disjunct");
  if (vacuous(normalize_full(voc, policy))) throw LedgerError("consent policy has no satisfiable disjunct");
  std::unique_lock lock(mutex_);
  std::string id = "c" + std::to_string(consent_count_ + 1);
  append({0, given_at, ConsentGrant{id, std::move(subject), std::move(policy)}}, false);
  return id;
}

void TransparencyLedger::withdraw_consent(const std::string& record, Timestamp at) {
  std::unique_lock lock(mutex_);
  append({0, at, Withdrawal{record}}, false);
}

std::string TransparencyLedger::record_event(std::string subject, std::string business_policy, Timestamp at) {
  std::unique_lock lock(mutex_);
  std::string id = "e" + std::to_string(event_count_ + 1);
  append({0, at, ProcessingEvent{id, std::move(subject), std::move(business_policy)}}, false);
  return id;
}

LedgerSnapshot TransparencyLedger::snapshot() const {
  std::shared_lock lock(mutex_);
  return LedgerSnapshot(entries_);
}

std::size_t TransparencyLedger::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::string TransparencyLedger::text() const {
  std::shared_lock lock(mutex_);
  std::string out;
  for (const auto& l : lines_) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Snapshot queries.

LedgerSnapshot::LedgerSnapshot(std::vector<std::shared_ptr<const LedgerEntry>> entries)
    : entries_(std::move(entries)) {
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& e : entries_) {
    if (const auto* c = std::get_if<ConsentGrant>(&e->body)) {
      index.emplace(c->id, consents_.size());
      consents_.push_back({c->id, c->subject, &c->policy, e->ts, std::nullopt});
    } else if (const auto* w = std::get_if<Withdrawal>(&e->body)) {
      consents_[index.at(w->record)].withdrawn_at = e->ts;
    }
  }
}

const FullPolicy* LedgerSnapshot::business_policy(std::string_view id) const {
  for (const auto& e : entries_) {
    if (const auto* b = std::get_if<BusinessRegistration>(&e->body); b && b->id == id) return &b->policy;
  }
  return nullptr;
}

const LedgerEntry* LedgerSnapshot::event(std::string_view id) const {
  for (const auto& e : entries_) {
    if (const auto* ev = std::get_if<ProcessingEvent>(&e->body); ev && ev->id == id) return e.get();
  }
  return nullptr;
}

namespace {

// Normalizes each business policy and consent at most once per query.
class Justifier {
 public:
  Justifier(const VocabularyOntology& voc, const LedgerSnapshot& snap)
      : voc_(voc), snap_(snap), consents_(snap.consents().size()) {}

  // Throws LedgerError for a dangling business policy reference.
  std::vector<std::string> justify(const ProcessingEvent& ev, Timestamp at, bool first_only) {
    const NormalPolicy& bp = business(ev.business_policy);
    std::vector<std::string> out;
    const auto& records = snap_.consents();
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.subject != ev.subject || !r.valid_at(at)) continue;
      if (!consents_[i]) consents_[i] = normalize_full(voc_, *r.policy);
      if (check_compliance(voc_, bp, *consents_[i]).compliant()) {
        out.push_back(r.id);
        if (first_only) break;
      }
    }
    return out;
  }

 private:
  const NormalPolicy& business(const std::string& id) {
    auto it = business_.find(id);
    if (it != business_.end()) return it->second;
    const FullPolicy* bp = snap_.business_policy(id);
    if (bp == nullptr) throw LedgerError("business policy '" + id + "' is not registered");
    FullPolicy usage = *bp;
    usage.kind = PolicyKind::kConsent;
    for (auto& d : usage.disjuncts) d = usage_projection(d);
    return business_.emplace(id, normalize_full(voc_, usage)).first->second;
  }

  const VocabularyOntology& voc_;
  const LedgerSnapshot& snap_;
  std::vector<std::optional<NormalPolicy>> consents_;
  std::unordered_map<std::string, NormalPolicy> business_;
};

}  // namespace

AuditReport LedgerSnapshot::audit(const VocabularyOntology& voc, Timestamp from, Timestamp to) const {
  AuditReport report;
  Justifier justifier(voc, *this);
  for (const auto& e : entries_) {
    const auto* ev = std::get_if<ProcessingEvent>(&e->body);
    if (ev == nullptr || e->ts < from || e->ts > to) continue;
    AuditEntry entry{ev->id, ev->subject, ev->business_policy, e->ts, AuditEntry::Status::kUnjustified, {}, {}};
    try {
      auto records = justifier.justify(*ev, e->ts, true);
      if (!records.empty()) {
        entry.status = AuditEntry::Status::kJustified;
        entry.record = records.front();
      }
    } catch (const Error& err) {
      entry.status = AuditEntry::Status::kError;
      entry.detail = err.what();
    }
    switch (entry.status) {
      case AuditEntry::Status::kJustified:
        ++report.justified;
        break;
      case AuditEntry::Status::kUnjustified:
        ++report.unjustified;
        break;
      case AuditEntry::Status::kError:
        ++report.errors;
        break;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

std::vector<std::string> LedgerSnapshot::find_justification(const VocabularyOntology& voc,
                                                            std::string_view event_id) const {
  const LedgerEntry* e = event(event_id);
  if (e == nullptr) throw LedgerError("unknown event '" + std::string(event_id) + "'");
  Justifier justifier(voc, *this);
  return justifier.justify(std::get<ProcessingEvent>(e->body), e->ts, false);
}

}  // namespace plcheck
