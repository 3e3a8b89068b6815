#include "ricsim/detect.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace ricsim {

namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<CellIndex> union_scope(std::initializer_list<const ControlDecision*> ds) {
  std::vector<CellIndex> out;
  for (const auto* d : ds) {
    for (CellIndex c : target_cells(d->target)) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConflictRecord pair_record(ConflictClass cls, const ControlDecision& a, const ControlDecision& b) {
  ConflictRecord r;
  r.cls = cls;
  r.implicated = {std::min(a.id, b.id), std::max(a.id, b.id)};
  r.scope = union_scope({&a, &b});
  r.tick = std::max(a.tick, b.tick);
  return r;
}

}  // namespace

void DetectionConfig::validate() const {
  if (window < 1) throw ValidationError("detection.window: must be >= 1");
  if (inter_window < 1) throw ValidationError("detection.inter_window: must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("detection.alpha: must be in (0, 1]");
  if (!(delta > 0.0)) throw ValidationError("detection.delta: must be > 0");
  if (persistence < 1) throw ValidationError("detection.persistence: must be >= 1");
  if (lookback < 1) throw ValidationError("detection.lookback: must be >= 1");
}

std::vector<CellIndex> target_cells(const Target& t) {
  if (t.param == ParamKind::kCio) return {t.cell, t.neighbor};
  return {t.cell};
}

bool direct_pair(const ControlDecision& a, const ControlDecision& b, Tick window) {
  return a.target == b.target && a.app != b.app && a.value != b.value &&
         window_bucket(a.tick, window) == window_bucket(b.tick, window);
}

int effect_sign(const ControlDecision& d, const DependencyEdge& e) {
  if (!d.prior) return 0;
  return e.sign * sgn(d.value - *d.prior);
}

std::vector<KpiEffect> opposing_effects(const ControlDecision& a, const ControlDecision& b,
                                        const DependencyGraph& graph) {
  std::vector<KpiEffect> out;
  if (a.target == b.target || a.app == b.app) return out;
  const auto ea = graph.effects(a.target);
  const auto eb = graph.effects(b.target);
  for (const auto& x : ea) {
    const int sa = effect_sign(a, x);
    if (sa == 0) continue;
    for (const auto& y : eb) {
      if (x.cell != y.cell || x.kpi != y.kpi) continue;
      const int sb = effect_sign(b, y);
      if (sb != 0 && sa == -sb) out.push_back({x.cell, x.kpi, sa, sb});
    }
  }
  std::sort(out.begin(), out.end(), [](const KpiEffect& p, const KpiEffect& q) {
    return std::pair(p.cell, p.kpi) < std::pair(q.cell, q.kpi);
  });
  return out;
}

std::vector<ConflictRecord> detect_direct(std::span<const ControlDecision> pending, Tick window) {
  // Groups keyed by (target, window bucket), kept in first-appearance order.
  std::map<std::pair<Target, Tick>, std::size_t> slot;
  std::vector<std::vector<const ControlDecision*>> groups;
  for (const auto& d : pending) {
    auto key = std::pair(d.target, window_bucket(d.tick, window));
    auto [it, fresh] = slot.emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&d);
  }

  std::vector<ConflictRecord> out;
  for (const auto& g : groups) {
    bool conflicting = false;
    for (std::size_t i = 0; i < g.size() && !conflicting; ++i) {
      for (std::size_t j = i + 1; j < g.size() && !conflicting; ++j) {
        conflicting = direct_pair(*g[i], *g[j], window);
      }
    }
    if (!conflicting) continue;
    ConflictRecord r;
    r.cls = ConflictClass::kC1;
    for (const auto* d : g) {
      r.implicated.push_back(d->id);
      r.tick = std::max(r.tick, d->tick);
    }
    std::sort(r.implicated.begin(), r.implicated.end());
    r.scope = target_cells(g.front()->target);
    std::sort(r.scope.begin(), r.scope.end());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ConflictRecord> detect_indirect(std::span<const ControlDecision> pending,
                                            const DependencyGraph& graph, Tick window) {
  std::vector<ConflictRecord> out;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    for (std::size_t j = i + 1; j < pending.size(); ++j) {
      const auto& a = pending[i];
      const auto& b = pending[j];
      if (window_bucket(a.tick, window) != window_bucket(b.tick, window)) continue;
      auto effects = opposing_effects(a, b, graph);
      if (effects.empty()) continue;
      auto r = pair_record(ConflictClass::kC2, a, b);
      r.evidence.opposing = std::move(effects);
      out.push_back(std::move(r));
    }
  }
  return out;
}

KpiBaselineStore::KpiBaselineStore(std::size_t cells, double alpha, double delta)
    : cells_(cells * kAllKpis.size()), alpha_(alpha), delta_(delta) {}

void KpiBaselineStore::observe(const KpiFrame& frame, std::span<const CellIndex> cells) {
  for (CellIndex c : cells) {
    for (KpiKind k : kAllKpis) {
      auto& b = at(c, k);
      const double obs = frame.value(c, k);
      b.last_observed = obs;
      if (!b.initialized) {
        b.ewma = obs;
        b.initialized = true;
        b.last_prior = obs;
        continue;
      }
      const double prior = b.ewma;
      b.last_prior = prior;
      if (obs - prior > delta_) {
        ++b.streak;
      } else {
        b.streak = 0;
        b.latched = false;
      }
      b.ewma = alpha_ * obs + (1.0 - alpha_) * prior;
    }
  }
}

std::vector<ConflictRecord> detect_implicit(std::span<const KpiFrame> history,
                                            KpiBaselineStore& baselines,
                                            std::span<const ControlDecision> actuated,
                                            const DependencyGraph& graph,
                                            std::span<const CellIndex> cells, Tick now,
                                            const DetectionConfig& cfg) {
  std::vector<ConflictRecord> out;
  if (history.size() < static_cast<std::size_t>(cfg.persistence)) return out;
  const Tick from = now - cfg.lookback;
  for (CellIndex c : cells) {
    for (KpiKind k : kAllKpis) {
      auto& b = baselines.at(c, k);
      if (b.streak < cfg.persistence || b.latched) continue;
      b.latched = true;
      ConflictRecord r;
      r.cls = ConflictClass::kC3;
      r.tick = now;
      for (const auto& d : actuated) {
        if (d.tick >= from && d.tick < now && graph.touches(d.target, c, k)) {
          r.implicated.push_back(d.id);
        }
      }
      std::sort(r.implicated.begin(), r.implicated.end());
      r.scope = {c};
      r.evidence.cell = c;
      r.evidence.kpi = k;
      r.evidence.observed = b.last_observed;
      r.evidence.baseline = b.last_prior;
      r.evidence.lookback_from = from;
      r.evidence.low_confidence = r.implicated.empty();
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::optional<ConflictRecord> detect_cross_loop(const ControlDecision& decision,
                                                std::span<const PolicyConstraint> constraints,
                                                Tick now) {
  ConflictRecord r;
  for (const auto& c : constraints) {
    if (c.active_at(now) && c.applies_to(decision.target) && !c.satisfied_by(decision.value)) {
      r.evidence.violated.push_back(c.id);
    }
  }
  if (r.evidence.violated.empty()) return std::nullopt;
  r.cls = ConflictClass::kC5;
  r.implicated = {decision.id};
  r.scope = target_cells(decision.target);
  std::sort(r.scope.begin(), r.scope.end());
  r.tick = now;
  return r;
}

std::vector<ControlDecision> materialize_virtual(const CmActivityReport& report,
                                                 const RicSpec& self) {
  std::vector<ControlDecision> out;
  for (const auto& a : report.actuations) {
    const auto cells = target_cells(a.target);
    const bool relevant =
        std::any_of(cells.begin(), cells.end(), [&](CellIndex c) { return self.on_boundary(c); });
    if (!relevant) continue;
    ControlDecision d;
    d.id = a.decision;
    d.app = a.app;
    d.ric = report.origin;
    d.target = a.target;
    d.value = a.value;
    d.prior = a.previous;
    d.tick = a.tick;
    d.remote = true;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<ConflictRecord> detect_inter_ric(std::span<const ControlDecision> local,
                                             std::span<const ControlDecision> virtuals,
                                             const DependencyGraph& graph, Tick window) {
  std::vector<ConflictRecord> out;
  for (const auto& l : local) {
    for (const auto& v : virtuals) {
      const Tick gap = l.tick > v.tick ? l.tick - v.tick : v.tick - l.tick;
      if (gap >= window || l.app == v.app) continue;
      if (l.target == v.target) {
        if (l.value == v.value) continue;
        auto r = pair_record(ConflictClass::kC4, l, v);
        r.evidence.pattern = "direct";
        out.push_back(std::move(r));
        continue;
      }
      auto effects = opposing_effects(l, v, graph);
      if (effects.empty()) continue;
      auto r = pair_record(ConflictClass::kC4, l, v);
      r.evidence.pattern = "indirect";
      r.evidence.opposing = std::move(effects);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ConflictRecord> detect_inter_ric(std::span<const ControlDecision> local,
                                             std::span<const CmActivityReport> delivered,
                                             const RicSpec& self, const DependencyGraph& graph,
                                             Tick window) {
  std::vector<ControlDecision> virtuals;
  for (const auto& rep : delivered) {
    if (rep.origin == self.id) continue;
    auto v = materialize_virtual(rep, self);
    virtuals.insert(virtuals.end(), v.begin(), v.end());
  }
  return detect_inter_ric(local, virtuals, graph, window);
}

}  // namespace ricsim
