#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ricsim/apps.hpp"
#include "ricsim/detect.hpp"
#include "ricsim/event_log.hpp"
#include "ricsim/fabric.hpp"
#include "ricsim/pmon.hpp"
#include "ricsim/ran_model.hpp"
#include "ricsim/resolve.hpp"
#include "ricsim/scenario.hpp"
#include "ricsim/supervisor.hpp"

namespace ricsim {

// Immutable run configuration, shared between a state and its snapshots.
struct SimConfig {
  Scenario scenario;
  DependencyGraph graph;
  bool cm_enabled = true;

  SimConfig(Scenario s, bool cm);
};

// CM components of one Near-RT RIC.
struct RicState {
  std::string id;
  CmPolicy policy;
  Pmon pmon;
  CooldownTable cooldowns;
  CriticalPipeline pipeline;
  Supervisor supervisor;
  std::vector<PolicyConstraint> constraints;  // delivered
  std::vector<ControlDecision> virtuals;      // delivered remote actuations
  std::vector<ControlDecision> actuated;      // recent local actuations (value, prior)
  PairSet seen_inter_ric;
  std::vector<PolicyUpdate> pending_updates;  // applied at the next tick boundary
  std::vector<RangeTightening> pending_tightenings;
  // Activity accumulated for this tick's report.
  std::vector<ActuationRecord> tick_actuations;
  std::vector<std::pair<std::string, ConflictClass>> tick_conflicts;
};

struct SimState {
  std::shared_ptr<const SimConfig> config;
  Tick clock = 0;
  RanParameters params;
  std::vector<AppDescriptor> apps;  // app registry, sorted by id
  std::vector<RicState> rics;
  Fabric fabric;
  std::vector<PolicyConstraint> issued;  // by the Non-RT RIC
  std::vector<KpiFrame> frames;          // recent ground-truth frames
  std::mt19937_64 rng;
  DecisionId next_decision = 1;
  std::uint64_t next_conflict = 0;
  EventLog log;

  RicState& ric(std::string_view id);
  const RicState& ric(std::string_view id) const;
};

// Fresh state at tick 0; logs the normalized scenario.
SimState make_state(std::shared_ptr<const SimConfig> config);
SimState make_state(const Scenario& scenario, bool cm_enabled);

// Processes the current tick through the seven phases, then advances the
// clock by one.
void step(SimState& state);

// Steps until the clock reaches `until`. Throws std::invalid_argument when
// `until` is in the past.
void run(SimState& state, Tick until);

// Independent deep copy (the shared config is immutable).
SimState snapshot(const SimState& state);

// Adds an app to the registry; throws ValidationError on duplicate ids.
void install_app(SimState& state, const AppDescriptor& app);

}  // namespace ricsim
