#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ricsim/apps.hpp"
#include "ricsim/detect.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/fabric.hpp"
#include "ricsim/pmon.hpp"
#include "ricsim/ran_model.hpp"
#include "ricsim/resolve.hpp"
#include "ricsim/supervisor.hpp"

namespace ricsim {

inline constexpr int kSchemaVersion = 1;

struct TrafficEvent {
  CellIndex cell = 0;
  Tick from = 0;
  Tick until = 0;  // exclusive
  double add = 0.0;
};

struct TrafficConfig {
  std::vector<double> base;  // per cell, fraction of capacity
  double noise = 0.0;        // uniform +-noise per cell and tick
  std::vector<TrafficEvent> events;

  // Offered traffic before noise, clamped to [0, 1.5].
  double offered(CellIndex c, Tick t) const;
};

// Additive offset on a synthesized KPI (a seeded degradation).
struct KpiInjection {
  CellIndex cell = 0;
  KpiKind kpi = KpiKind::kPingpong;
  Tick from = 0;
  Tick until = 0;  // exclusive
  double add = 0.0;
};

// Scripted decision submitted on behalf of an app at a fixed tick.
struct ScriptedDecision {
  Tick tick = 0;
  std::string app;
  Target target;
  double value = 0.0;
  std::string tag;
};

struct GroundTruthConflict {
  std::string id;
  ConflictClass cls = ConflictClass::kC1;
  Tick from = 0;  // detection window, inclusive
  Tick to = 0;
  std::vector<std::string> tags;  // scripted decisions a matching record must implicate
};

struct ScriptedPolicyUpdate {
  std::string id;
  Tick tick = 0;
  Json body;
};

struct AssessmentConfig {
  double reject_below = -0.05;
  double deploy_from = 0.01;
  Tick ticks = 200;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Tick ticks = 500;
  Topology topo;
  RicTopology rics;
  TrafficConfig traffic;
  ModelCoefficients coeffs;
  RanParameters initial;
  std::vector<AppDescriptor> apps;
  std::vector<AppDescriptor> candidates;
  CmPolicy policy;
  DetectionConfig detection;
  PmonConfig pmon;
  SupervisorConfig supervisor;
  AssessmentConfig assessment;
  std::vector<KpiInjection> kpi_injections;
  std::vector<ScriptedDecision> injections;
  std::vector<GroundTruthConflict> ground_truth;
  std::vector<ScriptedPolicyUpdate> policy_updates;
  std::optional<Target> contested_target;
  std::optional<CellIndex> contested_cell;
  bool count_implicit_as_fp = false;

  const AppDescriptor* find_app(std::string_view id) const;
};

// Strict parse: unknown fields, unresolved ids and out-of-domain values throw
// ValidationError naming the field.
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::filesystem::path& path);

// Normalized form with every default filled in; parse_scenario(to_json(s))
// reproduces s.
Json to_json(const Scenario& s);

Json to_json(const Target& t, const Topology& topo);
Target parse_target(const Json& j, const Topology& topo, const std::string& where);

// FNV-1a of the normalized document without its seed.
std::string scenario_hash(const Scenario& s);

}  // namespace ricsim
