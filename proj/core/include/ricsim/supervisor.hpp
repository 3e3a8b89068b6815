#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ricsim/event_log.hpp"
#include "ricsim/ran_model.hpp"
#include "ricsim/resolve.hpp"

namespace ricsim {

struct SupervisorConfig {
  Tick horizon = 10;  // H: outcome window on each side of a resolution
  Tick period = 50;   // P: adaptation period
  int min_trials = 10;
  double min_success_rate = 0.5;

  void validate() const;
  bool operator==(const SupervisorConfig&) const = default;
};

// Normalized "badness" in [0, ~1] of one KPI value.
double bad_kpi(KpiKind k, double value);
// Weighted utility of one cell: sum_k w_k * (1 - bad_k).
double utility(const CellKpis& kpis, const KpiWeights& w);
// Mean cell utility over `cells`; all cells when `cells` is empty.
double utility(const KpiFrame& frame, std::span<const CellIndex> cells, const KpiWeights& w);

struct ResolutionOutcome {
  std::string conflict_id;
  std::string ric;
  ConflictClass cls = ConflictClass::kC1;
  Strategy strategy = Strategy::kNone;
  Tick resolved = 0;
  Tick recorded = 0;
  double u_before = 0.0;
  double u_after = 0.0;
  double delta = 0.0;
  bool success = true;
  std::optional<std::string> winner;

  bool operator==(const ResolutionOutcome&) const = default;
};

// Before window [t-H+1, t], after window [t+1, t+H] around resolution tick t.
// Frames outside both windows are ignored; an empty window counts as U = 0.
ResolutionOutcome record_outcome(const ResolutionAction& action,
                                 std::span<const CellIndex> scope,
                                 std::span<const KpiFrame> frames, const KpiWeights& w,
                                 Tick horizon);

struct TrialCount {
  int trials = 0;
  int successes = 0;

  double rate() const { return trials > 0 ? static_cast<double>(successes) / trials : 0.0; }
  bool operator==(const TrialCount&) const = default;
};

class StrategyStats {
 public:
  void record(ConflictClass c, Strategy s, bool success);
  TrialCount get(ConflictClass c, Strategy s) const;
  const std::map<std::pair<ConflictClass, Strategy>, TrialCount>& all() const { return counts_; }

  bool operator==(const StrategyStats&) const = default;

 private:
  std::map<std::pair<ConflictClass, Strategy>, TrialCount> counts_;
};

// prioritization -> cooldown -> limitation -> prioritization.
Strategy next_strategy(Strategy s);

struct Reassignment {
  ConflictClass cls = ConflictClass::kC1;
  Strategy from = Strategy::kNone;
  Strategy to = Strategy::kNone;
  TrialCount stats;

  bool operator==(const Reassignment&) const = default;
};

struct AppUtility {
  double sum = 0.0;
  int count = 0;

  double mean() const { return count > 0 ? sum / count : 0.0; }
  bool operator==(const AppUtility&) const = default;
};

struct Adaptation {
  CmPolicy policy;
  std::vector<Reassignment> reassignments;
  bool ranks_changed = false;
};

// Rotates under-performing strategies; with dynamic priorities on, ranks
// become the rank order (1..n) of each app's mean utility delta as a winner.
Adaptation adapt(const CmPolicy& policy, const StrategyStats& stats,
                 const std::map<std::string, AppUtility>& app_utility,
                 const SupervisorConfig& cfg);

// MNO policy update: the validated replacement, or ValidationError.
CmPolicy align_with_policy(const CmPolicy& current, const Json& update);

// Per-RIC S&A loop state.
class Supervisor {
 public:
  Supervisor() = default;
  explicit Supervisor(SupervisorConfig cfg) : cfg_(cfg) {}

  void track(const ResolutionAction& action, std::vector<CellIndex> scope, std::string ric);
  // Outcomes whose horizon ends at `now`, in tracking order.
  std::vector<ResolutionOutcome> collect(Tick now, std::span<const KpiFrame> frames,
                                         const KpiWeights& w);
  bool adaptation_due(Tick now) const { return now > 0 && now % cfg_.period == 0; }

  const StrategyStats& stats() const { return stats_; }
  const std::map<std::string, AppUtility>& app_utility() const { return app_utility_; }
  const SupervisorConfig& config() const { return cfg_; }
  std::size_t pending() const { return pending_.size(); }

  bool operator==(const Supervisor&) const = default;

 private:
  struct Pending {
    ResolutionAction action;
    std::vector<CellIndex> scope;
    std::string ric;
    bool operator==(const Pending&) const = default;
  };

  SupervisorConfig cfg_;
  std::vector<Pending> pending_;
  StrategyStats stats_;
  std::map<std::string, AppUtility> app_utility_;
};

struct AppViability {
  int wins = 0;
  double mean_delta = 0.0;
  std::string note;

  bool operator==(const AppViability&) const = default;
};

// MNO-facing summary of CM activity over [from, to), derived from the log.
struct CmReport {
  Tick from = 0;
  Tick to = 0;
  std::map<ConflictClass, int> conflicts;
  std::map<std::string, int> verdicts;
  StrategyStats stats;
  std::vector<std::pair<Tick, double>> utility;
  std::map<std::string, std::string> policy_digest;  // per RIC, as of `to`
  std::map<std::string, AppViability> viability;
  std::vector<Reassignment> reassignments;

  bool operator==(const CmReport&) const = default;
};

CmReport report(const EventLog& log, Tick from, Tick to);
Json to_json(const CmReport& r);

}  // namespace ricsim
