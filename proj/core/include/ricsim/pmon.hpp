#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ricsim/detect.hpp"
#include "ricsim/ran_model.hpp"

namespace ricsim {

enum class Severity { kDegraded, kCritical };

std::string_view to_string(Severity s);

struct PmonConfig {
  std::map<KpiKind, double> degraded{
      {KpiKind::kPingpong, 0.2}, {KpiKind::kHof, 0.15}, {KpiKind::kLoad, 0.95}};
  std::map<KpiKind, double> critical{{KpiKind::kPingpong, 0.35}, {KpiKind::kHof, 0.3}};
  double hysteresis = 0.02;
  int clear_ticks = 3;
  std::size_t history = 64;

  // Critical thresholds must not undercut degraded ones.
  void validate() const;
  bool operator==(const PmonConfig&) const = default;
};

struct KpiAlert {
  std::string id;
  CellIndex cell = 0;
  KpiKind kpi = KpiKind::kLoad;
  Severity severity = Severity::kDegraded;
  Tick raised = 0;
  std::optional<Tick> cleared;
  double trigger = 0.0;

  bool operator==(const KpiAlert&) const = default;
};

struct AlertChange {
  KpiAlert alert;
  bool raised = true;  // false: cleared
};

// Performance monitoring of one RIC's cells. Owns the EWMA baseline store the
// RIC's detector reads.
class Pmon {
 public:
  Pmon() = default;
  Pmon(std::string ric, std::vector<CellIndex> cells, std::size_t total_cells, PmonConfig cfg,
       double alpha, double delta);

  void ingest(const KpiFrame& frame);
  // Raises and clears alerts against the most recent frame.
  std::vector<AlertChange> evaluate_alerts(Tick now);

  bool critical_active() const;
  std::vector<KpiAlert> active() const;
  std::span<const KpiFrame> history() const { return history_; }
  const KpiBaselineStore& baselines() const { return baselines_; }
  KpiBaselineStore& baselines() { return baselines_; }
  std::span<const CellIndex> cells() const { return cells_; }
  const PmonConfig& config() const { return cfg_; }

  bool operator==(const Pmon&) const = default;

 private:
  struct Track {
    std::optional<KpiAlert> alert;
    int recovered = 0;
    bool operator==(const Track&) const = default;
  };
  using Key = std::tuple<CellIndex, KpiKind, Severity>;

  std::string ric_;
  std::vector<CellIndex> cells_;
  PmonConfig cfg_;
  KpiBaselineStore baselines_;
  std::vector<KpiFrame> history_;
  std::map<Key, Track> tracks_;
  std::uint64_t next_alert_ = 0;
};

}  // namespace ricsim
