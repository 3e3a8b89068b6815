#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ricsim/ran_model.hpp"
#include "ricsim/types.hpp"

namespace ricsim {

enum class AppKind { kMlb, kMro, kEnergySaving, kCoverage, kInert };
enum class LoopKind { kNearRt, kNonRt };

std::string_view to_string(AppKind k);
AppKind app_kind_from_string(std::string_view s);
std::string_view to_string(LoopKind k);

struct AppThresholds {
  double mlb_overload = 0.8;   // MLB acts on cells above this load
  double mlb_underload = 0.5;  // ... toward a neighbor below this load
  double mro_pingpong = 0.15;
  double mro_hof = 0.1;
  double es_low_load = 0.3;
  double coverage_floor = 36.0;  // dBm
  Tick coverage_from = 0;
  std::optional<Tick> coverage_until;

  bool operator==(const AppThresholds&) const = default;
};

struct AppDescriptor {
  std::string id;
  AppKind kind = AppKind::kInert;
  std::string ric;  // hosting RIC id
  std::vector<ParamKind> writable;
  std::vector<KpiKind> interests;
  int rank = 0;  // static criticality
  AppThresholds thresholds;

  LoopKind loop() const { return kind == AppKind::kCoverage ? LoopKind::kNonRt : LoopKind::kNearRt; }
  bool can_write(ParamKind p) const;
  bool operator==(const AppDescriptor&) const = default;
};

// Descriptor with the writable set and KPI interests implied by the kind.
AppDescriptor make_app(std::string id, AppKind kind, std::string ric, int rank);

struct ControlDecision {
  DecisionId id = 0;
  std::string app;
  std::string ric;
  Target target;
  double value = 0.0;
  Tick tick = 0;
  LoopKind origin = LoopKind::kNearRt;
  std::string tag;  // ground-truth label of scripted injections
  // Parameter value the request departs from. Filled in at gate time for
  // local decisions and from the activity report for remote ones.
  std::optional<double> prior;
  bool remote = false;

  bool operator==(const ControlDecision&) const = default;
};

enum class BoundKind { kMin, kMax, kFixed };

std::string_view to_string(BoundKind b);
BoundKind bound_from_string(std::string_view s);

struct PolicyConstraint {
  std::string id;
  std::string issuer;
  std::vector<CellIndex> scope;
  ParamKind param = ParamKind::kTxPower;
  BoundKind bound = BoundKind::kMin;
  double value = 0.0;
  Tick from = 0;
  std::optional<Tick> until;  // exclusive

  bool active_at(Tick t) const { return t >= from && (!until || t < *until); }
  bool applies_to(const Target& t) const;
  bool satisfied_by(double v) const;
  double project(double v) const;
  // Same restriction, ignoring id, issuer and activity interval.
  bool same_rule(const PolicyConstraint& o) const {
    return scope == o.scope && param == o.param && bound == o.bound && value == o.value;
  }
  bool operator==(const PolicyConstraint&) const = default;
};

// Throws ValidationError when the bound lies outside the parameter domain or
// the scope references unknown cells.
void validate(const PolicyConstraint& c, const Topology& topo);

// What one app is allowed to observe: the frame and parameters of the cells
// its RIC owns.
struct AppView {
  const Topology* topo = nullptr;
  const RanParameters* params = nullptr;
  const KpiFrame* frame = nullptr;
  std::vector<bool> visible;  // per cell

  bool sees(CellIndex c) const { return visible.at(static_cast<std::size_t>(c)); }
};

// Rule-based agent logic. Pure: same view and tick give the same decisions.
// Returned decisions carry id 0; the engine assigns ids.
std::vector<ControlDecision> decide(const AppDescriptor& app, const AppView& view, Tick tick);

// Coverage rApp: one tx_power floor per coverage-critical cell, skipping any
// rule already present among `existing`.
std::vector<PolicyConstraint> issue_policy(const AppDescriptor& rapp, const Topology& topo,
                                           const KpiFrame& frame, Tick tick,
                                           std::span<const PolicyConstraint> existing);

}  // namespace ricsim
