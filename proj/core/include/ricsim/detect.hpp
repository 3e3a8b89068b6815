#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ricsim/apps.hpp"
#include "ricsim/fabric.hpp"
#include "ricsim/ran_model.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

struct DetectionConfig {
  Tick window = 1;         // C1/C2 collision window (aligned buckets of this many ticks)
  Tick inter_window = 10;  // C4: max tick distance between a local and a remote decision
  double alpha = 0.2;      // EWMA smoothing
  double delta = 0.1;      // absolute degradation threshold
  int persistence = 3;     // consecutive degraded ticks before C3
  Tick lookback = 10;      // C3 attribution lookback

  void validate() const;
  bool operator==(const DetectionConfig&) const = default;
};

struct KpiEffect {
  CellIndex cell = 0;
  KpiKind kpi = KpiKind::kLoad;
  int sign_a = 0;
  int sign_b = 0;

  bool operator==(const KpiEffect&) const = default;
};

struct ConflictEvidence {
  std::vector<KpiEffect> opposing;  // C2, indirect C4
  std::string pattern;              // C4: "direct" or "indirect"
  // C3
  std::optional<CellIndex> cell;
  std::optional<KpiKind> kpi;
  double observed = 0.0;
  double baseline = 0.0;
  Tick lookback_from = 0;
  bool low_confidence = false;
  // C5
  std::vector<std::string> violated;

  double degradation() const { return observed - baseline; }
  bool operator==(const ConflictEvidence&) const = default;
};

struct ConflictRecord {
  std::string id;
  ConflictClass cls = ConflictClass::kC1;
  std::vector<DecisionId> implicated;  // ascending
  std::vector<CellIndex> scope;        // ascending
  ConflictEvidence evidence;
  Tick tick = 0;
  std::string ric;

  bool operator==(const ConflictRecord&) const = default;
};

// Aligned window index of a tick.
inline Tick window_bucket(Tick t, Tick window) { return t / window; }

// Two decisions from different apps writing different values to one target in
// the same window.
bool direct_pair(const ControlDecision& a, const ControlDecision& b, Tick window);

// +1/-1 effect of a decision on the KPI of an edge; 0 when the decision does
// not move its parameter (or has no prior value).
int effect_sign(const ControlDecision& d, const DependencyEdge& e);

// Shared (cell, kpi) nodes that two decisions push in opposite directions.
// Empty for same-target or same-app pairs.
std::vector<KpiEffect> opposing_effects(const ControlDecision& a, const ControlDecision& b,
                                        const DependencyGraph& graph);

// C1. `pending` must be sorted by (tick, id).
std::vector<ConflictRecord> detect_direct(std::span<const ControlDecision> pending, Tick window);

// C2. Decisions must carry `prior`.
std::vector<ConflictRecord> detect_indirect(std::span<const ControlDecision> pending,
                                            const DependencyGraph& graph, Tick window);

struct BaselineCell {
  double ewma = 0.0;
  bool initialized = false;
  int streak = 0;        // consecutive ticks with observed - prior baseline > delta
  bool latched = false;  // C3 already emitted for the current degradation
  double last_observed = 0.0;
  double last_prior = 0.0;

  bool operator==(const BaselineCell&) const = default;
};

// Per (cell, kpi) EWMA baselines, shared by performance monitoring and the
// implicit-conflict detector of one RIC.
class KpiBaselineStore {
 public:
  KpiBaselineStore() = default;
  KpiBaselineStore(std::size_t cells, double alpha, double delta);

  // Degradation is judged against the baseline before this observation.
  void observe(const KpiFrame& frame, std::span<const CellIndex> cells);

  const BaselineCell& at(CellIndex c, KpiKind k) const { return cells_.at(slot(c, k)); }
  BaselineCell& at(CellIndex c, KpiKind k) { return cells_.at(slot(c, k)); }
  double alpha() const { return alpha_; }
  double delta() const { return delta_; }

  bool operator==(const KpiBaselineStore&) const = default;

 private:
  static std::size_t slot(CellIndex c, KpiKind k) {
    return static_cast<std::size_t>(c) * kAllKpis.size() + static_cast<std::size_t>(k);
  }

  std::vector<BaselineCell> cells_;
  double alpha_ = 0.2;
  double delta_ = 0.1;
};

// C3. Emits once per (cell, kpi) degradation episode, implicating actuated
// decisions from the last `lookback` ticks whose dependency edges reach the
// degraded KPI.
std::vector<ConflictRecord> detect_implicit(std::span<const KpiFrame> history,
                                            KpiBaselineStore& baselines,
                                            std::span<const ControlDecision> actuated,
                                            const DependencyGraph& graph,
                                            std::span<const CellIndex> cells, Tick now,
                                            const DetectionConfig& cfg);

// C5. Constraints are those delivered to the deciding RIC.
std::optional<ConflictRecord> detect_cross_loop(const ControlDecision& decision,
                                                std::span<const PolicyConstraint> constraints,
                                                Tick now);

// Remote actuations touching this RIC's boundary cells, as decisions.
std::vector<ControlDecision> materialize_virtual(const CmActivityReport& report,
                                                 const RicSpec& self);

// C4 over local decisions and already materialized remote ones: pairs within
// `window` ticks that match the C1 or C2 pattern.
std::vector<ConflictRecord> detect_inter_ric(std::span<const ControlDecision> local,
                                             std::span<const ControlDecision> virtuals,
                                             const DependencyGraph& graph, Tick window);

// Convenience overload over delivered reports.
std::vector<ConflictRecord> detect_inter_ric(std::span<const ControlDecision> local,
                                             std::span<const CmActivityReport> delivered,
                                             const RicSpec& self, const DependencyGraph& graph,
                                             Tick window);

std::vector<CellIndex> target_cells(const Target& t);

}  // namespace ricsim
