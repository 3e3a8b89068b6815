#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ricsim/types.hpp"

namespace ricsim {

// Insertion-ordered JSON keeps serialized key order stable for byte-exact
// replay comparison.
using Json = nlohmann::ordered_json;

enum class EventKind {
  kScenarioLoaded,
  kKpiSynthesized,
  kAlertRaised,
  kAlertCleared,
  kPipelineMode,
  kConstraintIssued,
  kConstraintDelivered,
  kPolicyIssued,
  kPolicyDelivered,
  kPolicyUpdated,
  kDecisionSubmitted,
  kDecisionGated,
  kDecisionRejected,
  kDecisionActuated,
  kConflictDetected,
  kResolutionApplied,
  kReportPublished,
  kReportDelivered,
  kOutcomeRecorded,
};

std::string_view to_string(EventKind k);
EventKind event_kind_from_string(std::string_view s);

struct EventLogEntry {
  Tick tick = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kKpiSynthesized;
  Json payload;

  bool operator==(const EventLogEntry&) const = default;
};

// Append-only log ordered by (tick, seq).
class EventLog {
 public:
  const EventLogEntry& append(Tick tick, EventKind kind, Json payload);

  std::span<const EventLogEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::uint64_t next_seq() const { return next_seq_; }

  // Entries with seq >= from_seq.
  std::span<const EventLogEntry> since(std::uint64_t from_seq) const;

  void write_jsonl(std::ostream& out) const;
  void write_jsonl(std::ostream& out, std::span<const EventLogEntry> subset) const;
  static EventLog read_jsonl(std::istream& in);

  bool operator==(const EventLog&) const = default;

 private:
  std::vector<EventLogEntry> entries_;
  std::uint64_t next_seq_ = 0;
};

// 64-bit FNV-1a as 16 hex digits.
std::string digest_hex(std::string_view bytes);

Json to_json(const EventLogEntry& e);
std::string to_jsonl_line(const EventLogEntry& e);

}  // namespace ricsim
