#include "ricsim/event_log.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

namespace ricsim {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 19> kKindNames{{
    {EventKind::kScenarioLoaded, "scenario-loaded"},
    {EventKind::kKpiSynthesized, "kpi-synthesized"},
    {EventKind::kAlertRaised, "alert-raised"},
    {EventKind::kAlertCleared, "alert-cleared"},
    {EventKind::kPipelineMode, "pipeline-mode"},
    {EventKind::kConstraintIssued, "constraint-issued"},
    {EventKind::kConstraintDelivered, "constraint-delivered"},
    {EventKind::kPolicyIssued, "policy-issued"},
    {EventKind::kPolicyDelivered, "policy-delivered"},
    {EventKind::kPolicyUpdated, "policy-updated"},
    {EventKind::kDecisionSubmitted, "decision-submitted"},
    {EventKind::kDecisionGated, "decision-gated"},
    {EventKind::kDecisionRejected, "decision-rejected"},
    {EventKind::kDecisionActuated, "decision-actuated"},
    {EventKind::kConflictDetected, "conflict-detected"},
    {EventKind::kResolutionApplied, "resolution-applied"},
    {EventKind::kReportPublished, "report-published"},
    {EventKind::kReportDelivered, "report-delivered"},
    {EventKind::kOutcomeRecorded, "outcome-recorded"},
}};

}  // namespace

std::string_view to_string(EventKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

EventKind event_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  throw ValidationError("unknown event kind '" + std::string(s) + "'");
}

const EventLogEntry& EventLog::append(Tick tick, EventKind kind, Json payload) {
  if (!entries_.empty() && tick < entries_.back().tick) {
    throw std::logic_error("event log: tick went backwards");
  }
  entries_.push_back({tick, next_seq_++, kind, std::move(payload)});
  return entries_.back();
}

std::span<const EventLogEntry> EventLog::since(std::uint64_t from_seq) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), from_seq,
                             [](const EventLogEntry& e, std::uint64_t s) { return e.seq < s; });
  return {it, entries_.end()};
}

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

Json to_json(const EventLogEntry& e) {
  Json j;
  j["tick"] = e.tick;
  j["seq"] = e.seq;
  j["kind"] = to_string(e.kind);
  j["payload"] = e.payload.is_null() ? Json::object() : e.payload;
  return j;
}

std::string to_jsonl_line(const EventLogEntry& e) { return to_json(e).dump(); }

void EventLog::write_jsonl(std::ostream& out) const { write_jsonl(out, entries_); }

void EventLog::write_jsonl(std::ostream& out, std::span<const EventLogEntry> subset) const {
  for (const auto& e : subset) out << to_jsonl_line(e) << '\n';
}

EventLog EventLog::read_jsonl(std::istream& in) {
  EventLog log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError("events.jsonl line " + std::to_string(lineno) + ": " + ex.what());
    }
    EventLogEntry e;
    e.tick = j.at("tick").get<Tick>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.payload = j.at("payload");
    if (!log.entries_.empty()) {
      const auto& prev = log.entries_.back();
      if (e.seq <= prev.seq || e.tick < prev.tick) {
        throw ValidationError("events.jsonl line " + std::to_string(lineno) +
                              ": entries out of (tick, seq) order");
      }
    }
    log.next_seq_ = e.seq + 1;
    log.entries_.push_back(std::move(e));
  }
  return log;
}

}  // namespace ricsim
