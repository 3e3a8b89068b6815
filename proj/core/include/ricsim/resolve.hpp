#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ricsim/apps.hpp"
#include "ricsim/detect.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/fabric.hpp"
#include "ricsim/ran_model.hpp"

namespace ricsim {

enum class Strategy { kPrioritization, kLimitation, kCooldown, kProjection, kRollback, kNone };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct LimitationRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const LimitationRange&) const = default;
};

struct KpiWeights {
  double load = 1.0;
  double pingpong = 1.0;
  double hof = 1.0;
  double energy = 1.0;

  double get(KpiKind k) const;
  double& at(KpiKind k);
  bool operator==(const KpiWeights&) const = default;
};

// MNO-set CM configuration of one Near-RT RIC.
struct CmPolicy {
  static constexpr Tick kDefaultCooldown = 20;

  std::map<std::string, int> priorities;  // higher wins
  std::map<std::pair<std::string, ParamKind>, LimitationRange> limitations;
  std::map<ConflictClass, Tick> cooldown;
  std::map<ConflictClass, Strategy> strategies;
  bool conflict_avoidance = true;
  std::vector<std::string> pipeline_order;
  KpiWeights weights;
  bool dynamic_priorities = false;

  int rank(const std::string& app) const;
  Tick cooldown_for(ConflictClass c) const;
  Strategy strategy_for(ConflictClass c) const;
  // Explicit range, or the full parameter domain.
  LimitationRange range_for(const std::string& app, ParamKind p) const;

  bool operator==(const CmPolicy&) const = default;
};

// C1 -> prioritization, C2 -> cooldown, C4 -> prioritization, C3 -> rollback,
// C5 -> projection, cooldown 20 ticks for every class.
CmPolicy default_policy();

// Throws ValidationError naming the offending field.
void validate(const CmPolicy& p);

Json to_json(const CmPolicy& p);
// Replaces the fields present in `update`; unknown fields are rejected. The
// result is validated.
CmPolicy apply_policy_update(const CmPolicy& base, const Json& update);
std::string policy_digest(const CmPolicy& p);

enum class Verdict { kAccepted, kModified, kRejected };
std::string_view to_string(Verdict v);

struct DecisionVerdict {
  DecisionId decision = 0;
  std::string app;
  Verdict verdict = Verdict::kAccepted;
  std::optional<double> value;

  bool operator==(const DecisionVerdict&) const = default;
};

struct CooldownEntry {
  std::string app;
  Target target;
  Tick created = 0;
  Tick expiry = 0;  // exclusive end of blocking

  bool covers(const std::string& a, const Target& t, Tick now) const {
    return a == app && t == target && now >= created + 1 && now < expiry;
  }
  bool operator==(const CooldownEntry&) const = default;
};

struct RangeTightening {
  std::string app;
  ParamKind param = ParamKind::kCio;
  LimitationRange range;

  bool operator==(const RangeTightening&) const = default;
};

struct ResolutionAction {
  std::string conflict_id;
  ConflictClass cls = ConflictClass::kC1;
  Strategy strategy = Strategy::kNone;
  std::vector<DecisionVerdict> verdicts;
  std::vector<CooldownEntry> cooldowns;
  std::vector<RangeTightening> tightenings;
  Tick tick = 0;
  bool post_hoc = false;

  const DecisionVerdict* verdict_for(DecisionId id) const;
  bool operator==(const ResolutionAction&) const = default;
};

// Strict total order used by every winner selection: higher rank, then
// earlier tick, then smaller app id, then smaller decision id.
bool outranks(const ControlDecision& a, const ControlDecision& b, const CmPolicy& policy);
const ControlDecision& select_winner(std::span<const ControlDecision> implicated,
                                     const CmPolicy& policy);

ResolutionAction apply_prioritization(const ConflictRecord& conflict,
                                      std::span<const ControlDecision> implicated,
                                      const CmPolicy& policy, Tick now);

ResolutionAction apply_cooldown(const ConflictRecord& conflict,
                                std::span<const ControlDecision> implicated,
                                const CmPolicy& policy, Tick now);

// Winner as in prioritization; each local loser's (app, param) range is cut
// on the side it was pushing toward: at the winner's value when both write
// the same target, at the current value otherwise.
ResolutionAction apply_limitation_tightening(const ConflictRecord& conflict,
                                             std::span<const ControlDecision> implicated,
                                             const CmPolicy& policy, Tick now);

struct LimitationResult {
  double value = 0.0;
  Verdict verdict = Verdict::kAccepted;
};

// Clamp to the (app, param) range, then snap to the nearest grid point inside
// it.
LimitationResult apply_limitation(const ControlDecision& decision, const CmPolicy& policy);

// Non-RT policy dominates: project onto the violated bounds. Rejects when no
// admissible value remains.
ResolutionAction resolve_cross_loop(const ConflictRecord& conflict,
                                    const ControlDecision& decision,
                                    std::span<const PolicyConstraint> constraints,
                                    const CmPolicy& policy, Tick now);

// Dispatch by the policy's strategy for the conflict class.
ResolutionAction resolve(const ConflictRecord& conflict,
                         std::span<const ControlDecision> implicated, const CmPolicy& policy,
                         Tick now);

class CooldownTable {
 public:
  void add(const CooldownEntry& e) { entries_.push_back(e); }
  bool blocks(const std::string& app, const Target& t, Tick now) const;
  // Entries are removed exactly at their expiry tick.
  void purge(Tick now);
  std::span<const CooldownEntry> entries() const { return entries_; }

  bool operator==(const CooldownTable&) const = default;

 private:
  std::vector<CooldownEntry> entries_;
};

// Critical-pipeline mode: while active, one app per tick may submit, walking
// the configured order from the tick the mode was entered.
class CriticalPipeline {
 public:
  // Returns true when the mode switched on or off.
  bool update(bool critical_alert_active, Tick now);
  bool active() const { return active_; }
  Tick entered() const { return entered_; }
  std::optional<std::string> head(const std::vector<std::string>& order, Tick now) const;

  bool operator==(const CriticalPipeline&) const = default;

 private:
  bool active_ = false;
  Tick entered_ = 0;
};

// Apps allowed to submit this tick.
std::vector<std::string> pipeline_step(const CriticalPipeline& pipeline, const CmPolicy& policy,
                                       std::span<const AppDescriptor> apps, Tick now);

enum class GateVerdict {
  kAccepted,
  kModified,
  kUngated,
  kRejectedConflict,
  kRejectedCooldown,
  kRejectedPipeline,
  kRejectedPolicy,
  kRejectedScope,
  kRejectedDomain,
};

std::string_view to_string(GateVerdict v);
GateVerdict gate_verdict_from_string(std::string_view s);
inline bool is_rejection(GateVerdict v) {
  return v != GateVerdict::kAccepted && v != GateVerdict::kModified && v != GateVerdict::kUngated;
}

struct GatedDecision {
  ControlDecision decision;  // as submitted, with prior filled in
  GateVerdict verdict = GateVerdict::kAccepted;
  double value = 0.0;  // value to actuate
  std::vector<std::string> conflicts;
};

struct GateInput {
  std::span<const ControlDecision> pending;     // this tick's local batch, sorted by id
  std::span<const ControlDecision> incumbents;  // local actuations earlier in the current window
  std::span<const ControlDecision> virtuals;    // delivered remote actuations
  const CmPolicy* policy = nullptr;
  std::span<const PolicyConstraint> constraints;  // delivered to this RIC
  const RanParameters* params = nullptr;
  const Topology* topo = nullptr;
  const DependencyGraph* graph = nullptr;
  const RicTopology* rics = nullptr;
  std::string ric;
  std::optional<std::string> pipeline_head;
  DetectionConfig detection;
  Tick now = 0;
};

struct GateResult {
  std::vector<GatedDecision> decisions;  // one per pending decision, same order
  std::vector<ConflictRecord> conflicts;
  std::vector<ResolutionAction> actions;
};

using PairSet = std::set<std::pair<DecisionId, DecisionId>>;

// Conflict-avoidance gate: scope and pipeline checks, limitation pre-filter,
// cooldown filtering, C5 projection, then C1/C2/C4 detection and per-conflict
// resolution. Every pending decision receives exactly one verdict.
GateResult gate(const GateInput& in, CooldownTable& cooldowns, PairSet& seen_inter_ric,
                std::uint64_t& next_conflict);

}  // namespace ricsim
