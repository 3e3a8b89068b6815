#include "ricsim/pmon.hpp"

#include <algorithm>
#include <tuple>

namespace ricsim {

namespace {
constexpr double kEps = 1e-9;
}

std::string_view to_string(Severity s) {
  return s == Severity::kCritical ? "critical" : "degraded";
}

void PmonConfig::validate() const {
  for (const auto& [k, thr] : critical) {
    auto it = degraded.find(k);
    if (it != degraded.end() && thr < it->second) {
      throw ValidationError("pmon.critical." + std::string(to_string(k)) +
                            ": must be >= the degraded threshold");
    }
  }
  if (hysteresis < 0.0) throw ValidationError("pmon.hysteresis: must be >= 0");
  if (clear_ticks < 1) throw ValidationError("pmon.clear_ticks: must be >= 1");
  if (history < 1) throw ValidationError("pmon.history: must be >= 1");
}

Pmon::Pmon(std::string ric, std::vector<CellIndex> cells, std::size_t total_cells,
           PmonConfig cfg, double alpha, double delta)
    : ric_(std::move(ric)),
      cells_(std::move(cells)),
      cfg_(std::move(cfg)),
      baselines_(total_cells, alpha, delta) {}

void Pmon::ingest(const KpiFrame& frame) {
  baselines_.observe(frame, cells_);
  history_.push_back(frame);
  if (history_.size() > cfg_.history) {
    history_.erase(history_.begin(),
                   history_.begin() + static_cast<std::ptrdiff_t>(history_.size() - cfg_.history));
  }
}

std::vector<AlertChange> Pmon::evaluate_alerts(Tick now) {
  std::vector<AlertChange> out;
  if (history_.empty()) return out;
  const KpiFrame& frame = history_.back();
  auto visit = [&](Severity sev, const std::map<KpiKind, double>& thresholds) {
    for (CellIndex c : cells_) {
      for (const auto& [k, thr] : thresholds) {
        const double obs = frame.value(c, k);
        auto& tr = tracks_[Key{c, k, sev}];
        if (!tr.alert) {
          if (obs > thr) {
            KpiAlert a{ric_ + "/a" + std::to_string(++next_alert_), c, k, sev, now, std::nullopt,
                       obs};
            tr.alert = a;
            tr.recovered = 0;
            out.push_back({a, true});
          }
          continue;
        }
        if (obs <= thr - cfg_.hysteresis + kEps) {
          if (++tr.recovered >= cfg_.clear_ticks) {
            KpiAlert a = *tr.alert;
            a.cleared = now;
            tr.alert.reset();
            tr.recovered = 0;
            out.push_back({a, false});
          }
        } else {
          tr.recovered = 0;
        }
      }
    }
  };
  visit(Severity::kCritical, cfg_.critical);
  visit(Severity::kDegraded, cfg_.degraded);
  return out;
}

bool Pmon::critical_active() const {
  return std::any_of(tracks_.begin(), tracks_.end(), [](const auto& kv) {
    return kv.second.alert && kv.second.alert->severity == Severity::kCritical;
  });
}

std::vector<KpiAlert> Pmon::active() const {
  std::vector<KpiAlert> out;
  for (const auto& [key, tr] : tracks_) {
    if (tr.alert) out.push_back(*tr.alert);
  }
  return out;
}

}  // namespace ricsim
