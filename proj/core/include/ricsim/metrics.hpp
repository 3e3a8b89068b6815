#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ricsim/event_log.hpp"
#include "ricsim/scenario.hpp"

namespace ricsim {

struct DetectionCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double fp_rate = 0.0;  // FP / (FP + TP), 0 when empty
  double fn_rate = 0.0;  // FN / (FN + TP), 0 when empty
  double mean_latency = 0.0;

  bool operator==(const DetectionCounts&) const = default;
};

// Fills in the two rates from the counts.
DetectionCounts with_rates(int tp, int fp, int fn, double mean_latency = 0.0);

struct GroundTruthMatch {
  std::string id;
  ConflictClass cls = ConflictClass::kC1;
  bool elapsed = false;
  std::optional<std::string> detected_by;  // earliest matching record
  std::optional<Tick> latency;

  bool operator==(const GroundTruthMatch&) const = default;
};

struct DetectionMetrics {
  std::map<ConflictClass, DetectionCounts> by_class;  // every class present
  DetectionCounts total;
  int implicit_records = 0;          // C3, listed separately
  int implicit_excluded = 0;         // C3 records kept out of FP
  bool empty_ground_truth = false;   // rates are 0 by convention
  std::vector<GroundTruthMatch> matches;

  bool operator==(const DetectionMetrics&) const = default;
};

struct ResolutionMetrics {
  int resolutions = 0;
  double mean_time_to_resolve = 0.0;  // ticks from detection to resolution
  std::map<std::string, int> verdicts;

  bool operator==(const ResolutionMetrics&) const = default;
};

struct NetworkMetrics {
  std::vector<double> utility;            // per tick, all cells
  double mean_utility = 0.0;
  std::map<KpiKind, double> kpi_means;    // over cells and ticks
  double load_spread = 0.0;               // mean per-tick max - min cell load
  int actuations = 0;
  std::map<std::string, int> flips;       // per actuated target
  double oscillation = 0.0;               // flips per target per 100 ticks
  std::optional<double> contested_flips;  // per 100 ticks
  std::optional<double> contested_pingpong;

  bool operator==(const NetworkMetrics&) const = default;
};

struct MetricsReport {
  Tick ticks = 0;
  DetectionMetrics detection;
  ResolutionMetrics resolution;
  NetworkMetrics network;

  bool operator==(const MetricsReport&) const = default;
};

// Matches conflict-detected entries against the ground truth. A record
// matches when its class is equal, its tick lies in the window and its
// implicated decisions include every tagged decision.
DetectionMetrics compute_detection_metrics(const EventLog& log,
                                           std::span<const GroundTruthConflict> truth,
                                           Tick ticks_run, bool count_implicit_as_fp);

// Everything from the log alone; the scenario is read from its first entry.
MetricsReport compute_metrics(const EventLog& log);

// "cio:A->B" / "tx_power:A".
std::string target_key(const Target& t, const Topology& topo);

Json to_json(const MetricsReport& m);
MetricsReport metrics_from_json(const Json& j);

// Flat "metric,value" CSV: one row per scalar, keys joined with '.'.
std::vector<std::pair<std::string, double>> flatten_metrics(const MetricsReport& m);
void write_metrics_csv(std::ostream& out, const MetricsReport& m);
std::vector<std::pair<std::string, double>> read_metrics_csv(std::istream& in);

}  // namespace ricsim
