#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "plcheck/policy.hpp"
#include "plcheck/vocab.hpp"

namespace plcheck {

/// UTC seconds.
using Timestamp = std::int64_t;

struct BusinessRegistration {
  std::string id;
  FullPolicy policy;
};

struct ConsentGrant {
  std::string id;
  std::string subject;
  FullPolicy policy;
};

struct Withdrawal {
  std::string record;
};

struct ProcessingEvent {
  std::string id;
  std::string subject;
  std::string business_policy;
};

/// One ledger line.
struct LedgerEntry {
  std::uint64_t seq = 0;
  Timestamp ts = 0;
  std::variant<BusinessRegistration, ConsentGrant, Withdrawal, ProcessingEvent> body;
};

/// A consent grant together with its (optional) withdrawal.
struct ConsentRecord {
  std::string id;
  std::string subject;
  const FullPolicy* policy = nullptr;
  Timestamp given_at = 0;
  std::optional<Timestamp> withdrawn_at;

  /// Half-open validity [given_at, withdrawn_at).
  bool valid_at(Timestamp t) const noexcept {
    return given_at <= t && (!withdrawn_at || t < *withdrawn_at);
  }
};

struct AuditEntry {
  enum class Status { kJustified, kUnjustified, kError };

  std::string event;
  std::string subject;
  std::string business_policy;
  Timestamp occurred_at = 0;
  Status status = Status::kUnjustified;
  std::optional<std::string> record;  // earliest justifying record
  std::string detail;                 // error message

  bool operator==(const AuditEntry&) const = default;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  std::size_t justified = 0;
  std::size_t unjustified = 0;
  std::size_t errors = 0;

  /// One JSON object per event, then a summary line.
  std::string to_json_lines() const;
  bool operator==(const AuditReport&) const = default;
};

/// Immutable view of a ledger prefix.
class LedgerSnapshot {
 public:
  explicit LedgerSnapshot(std::vector<std::shared_ptr<const LedgerEntry>> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<ConsentRecord>& consents() const noexcept { return consents_; }
  const FullPolicy* business_policy(std::string_view id) const;
  const LedgerEntry* event(std::string_view id) const;

  /// Events with occurred_at in [from, to], in ledger order.
  AuditReport audit(const VocabularyOntology& voc, Timestamp from, Timestamp to) const;
  /// All records justifying the event, in ledger order. Throws LedgerError
  /// for an unknown event.
  std::vector<std::string> find_justification(const VocabularyOntology& voc, std::string_view event) const;

 private:
  std::vector<std::shared_ptr<const LedgerEntry>> entries_;
  std::vector<ConsentRecord> consents_;
};

/// Append-only, time-ordered ledger of consent and processing lines.
///
/// File format: one JSON object per line with mandatory "seq" (1, 2, ...)
/// and "ts" fields and a "type" of bp-register, consent, withdraw or event.
/// Policies are embedded as their serialized text.
///
/// One writer at a time; readers take snapshots and never block appends for
/// longer than the copy of the entry list.
class TransparencyLedger {
 public:
  /// In-memory ledger.
  TransparencyLedger() = default;

  /// Replays an existing file (creating it if absent); later appends are
  /// written through to it.
  static TransparencyLedger open(const std::filesystem::path& path);
  /// Replays ledger text without attaching a file.
  static TransparencyLedger from_text(std::string_view text);

  TransparencyLedger(TransparencyLedger&& other) noexcept;
  TransparencyLedger& operator=(TransparencyLedger&&) = delete;

  void register_business_policy(std::string id, FullPolicy policy, Timestamp at);
  /// Rejects consents without a satisfiable disjunct. Returns "c<n>".
  std::string record_consent(const VocabularyOntology& voc, std::string subject, FullPolicy policy,
                             Timestamp given_at);
  void withdraw_consent(const std::string& record, Timestamp at);
  /// The business policy must be registered. Returns "e<n>".
  std::string record_event(std::string subject, std::string business_policy, Timestamp at);

  LedgerSnapshot snapshot() const;
  std::size_t size() const;
  /// Full ledger text, byte-identical to the file contents.
  std::string text() const;

  AuditReport audit(const VocabularyOntology& voc, Timestamp from, Timestamp to) const {
    return snapshot().audit(voc, from, to);
  }
  std::vector<std::string> find_justification(const VocabularyOntology& voc, std::string_view event) const {
    return snapshot().find_justification(voc, event);
  }

 private:
  // Validates against the current state and appends; `replay` skips the
  // reference checks that a hand-written file may violate (reported by
  // audits instead).
  void append(LedgerEntry entry, bool replay);

  mutable std::shared_mutex mutex_;
  std::vector<std::shared_ptr<const LedgerEntry>> entries_;
  std::vector<std::string> lines_;
  std::optional<std::ofstream> file_;
  std::set<std::string, std::less<>> business_ids_;
  std::set<std::string, std::less<>> event_ids_;
  std::map<std::string, bool, std::less<>> withdrawn_;  // consent id -> withdrawn
  std::size_t consent_count_ = 0;
  std::size_t event_count_ = 0;
};

std::string_view to_string(AuditEntry::Status s) noexcept;

}  // namespace plcheck
