#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ricsim/metrics.hpp"
#include "ricsim/scenario.hpp"
#include "ricsim/simulation.hpp"
#include "ricsim/supervisor.hpp"

namespace ricsim {

struct RunResult {
  EventLog log;
  MetricsReport metrics;
  CmReport cm_report;
};

// Runs the scenario for its configured length.
RunResult run_experiment(const Scenario& scenario, bool cm_enabled);

// events.jsonl, metrics.csv, metrics.json, cm_report.json and run.json.
void write_run(const RunResult& run, const std::filesystem::path& dir);

struct RunInfo {
  std::string scenario;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  bool cm = false;
  Tick ticks = 0;
};

RunInfo run_info(const EventLog& log);
EventLog read_events(const std::filesystem::path& dir);

struct CandidateConflict {
  std::string id;
  ConflictClass cls = ConflictClass::kC1;
  Tick tick = 0;
  std::vector<std::string> counterparties;  // other apps, or violated constraint ids
};

enum class Recommendation { kDeploy, kReconfigure, kReject };
std::string_view to_string(Recommendation r);

struct AssessmentReport {
  std::string candidate;
  Tick from = 0;
  Tick ticks = 0;
  std::vector<CandidateConflict> conflicts;
  std::map<ConflictClass, int> by_class;
  double u_baseline = 0.0;
  double u_trial = 0.0;
  double delta_u = 0.0;
  Recommendation recommendation = Recommendation::kDeploy;
  std::string rule;
};

// Three-way decision on the utility delta and the conflict count.
Recommendation recommend(double delta_u, std::size_t conflicts, const AssessmentConfig& cfg,
                         std::string* rule = nullptr);

// Sandbox pair run from snapshots of `live`: a baseline, and a trial with the
// candidate installed. `live` is never modified.
AssessmentReport assess_app(const SimState& live, const AppDescriptor& candidate,
                            const AssessmentConfig& cfg);
// Assessment from tick 0 of the scenario with CM on; the candidate is looked
// up among the scenario's candidates (then its apps, which is an error).
AssessmentReport assess_app(const Scenario& scenario, const std::string& candidate_id);

Json to_json(const AssessmentReport& r);

struct TradeOffRow {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;  // b - a
  std::string outcome;  // improved | deteriorated | unchanged
};

struct Comparison {
  RunInfo a;
  RunInfo b;
  std::vector<std::pair<std::string, double>> deltas;  // every shared scalar metric
  std::vector<TradeOffRow> trade_off;
  std::vector<std::string> improved;
  std::vector<std::string> deteriorated;
};

// Paired runs must share scenario and seed; throws ValidationError otherwise.
Comparison compare(const RunInfo& a, const MetricsReport& ma, const RunInfo& b,
                   const MetricsReport& mb);
Comparison compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b);
Json to_json(const Comparison& c);

}  // namespace ricsim
