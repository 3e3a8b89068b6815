#include "ricsim/apps.hpp"

#include <algorithm>
#include <cmath>

namespace ricsim {

std::string_view to_string(AppKind k) {
  switch (k) {
    case AppKind::kMlb:
      return "mlb";
    case AppKind::kMro:
      return "mro";
    case AppKind::kEnergySaving:
      return "es";
    case AppKind::kCoverage:
      return "coverage";
    case AppKind::kInert:
      return "inert";
  }
  return "?";
}

AppKind app_kind_from_string(std::string_view s) {
  for (AppKind k : {AppKind::kMlb, AppKind::kMro, AppKind::kEnergySaving, AppKind::kCoverage,
                    AppKind::kInert}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown app kind '" + std::string(s) + "'");
}

std::string_view to_string(LoopKind k) { return k == LoopKind::kNearRt ? "near-rt" : "non-rt"; }

std::string_view to_string(BoundKind b) {
  switch (b) {
    case BoundKind::kMin:
      return "min";
    case BoundKind::kMax:
      return "max";
    case BoundKind::kFixed:
      return "fixed";
  }
  return "?";
}

BoundKind bound_from_string(std::string_view s) {
  for (BoundKind b : {BoundKind::kMin, BoundKind::kMax, BoundKind::kFixed}) {
    if (to_string(b) == s) return b;
  }
  throw ValidationError("unknown bound kind '" + std::string(s) + "'");
}

bool AppDescriptor::can_write(ParamKind p) const {
  return std::find(writable.begin(), writable.end(), p) != writable.end();
}

AppDescriptor make_app(std::string id, AppKind kind, std::string ric, int rank) {
  AppDescriptor app;
  app.id = std::move(id);
  app.kind = kind;
  app.ric = std::move(ric);
  app.rank = rank;
  switch (kind) {
    case AppKind::kMlb:
      app.writable = {ParamKind::kCio};
      app.interests = {KpiKind::kLoad};
      break;
    case AppKind::kMro:
      app.writable = {ParamKind::kCio, ParamKind::kTtt};
      app.interests = {KpiKind::kPingpong, KpiKind::kHof};
      break;
    case AppKind::kEnergySaving:
      app.writable = {ParamKind::kTxPower};
      app.interests = {KpiKind::kLoad, KpiKind::kEnergy};
      break;
    case AppKind::kCoverage:
      app.interests = {KpiKind::kLoad};
      break;
    case AppKind::kInert:
      break;
  }
  return app;
}

bool PolicyConstraint::applies_to(const Target& t) const {
  return t.param == param && std::find(scope.begin(), scope.end(), t.cell) != scope.end();
}

bool PolicyConstraint::satisfied_by(double v) const {
  switch (bound) {
    case BoundKind::kMin:
      return v >= value;
    case BoundKind::kMax:
      return v <= value;
    case BoundKind::kFixed:
      return v == value;
  }
  return false;
}

double PolicyConstraint::project(double v) const {
  switch (bound) {
    case BoundKind::kMin:
      return std::max(v, value);
    case BoundKind::kMax:
      return std::min(v, value);
    case BoundKind::kFixed:
      return value;
  }
  return v;
}

void validate(const PolicyConstraint& c, const Topology& topo) {
  if (c.id.empty()) throw ValidationError("constraint: empty id");
  if (c.scope.empty()) throw ValidationError("constraint " + c.id + ": empty scope");
  for (CellIndex cell : c.scope) {
    if (cell < 0 || static_cast<std::size_t>(cell) >= topo.size()) {
      throw ValidationError("constraint " + c.id + ": scope references unknown cell");
    }
  }
  const auto& dom = domain_of(c.param);
  if (!std::isfinite(c.value) || !dom.contains(c.value)) {
    throw ValidationError("constraint " + c.id + ": bound " + std::to_string(c.value) +
                          " outside " + std::string(to_string(c.param)) + " domain");
  }
  if (c.until && *c.until <= c.from) {
    throw ValidationError("constraint " + c.id + ": empty activity interval");
  }
}

namespace {

void push(std::vector<ControlDecision>& out, const AppDescriptor& app, const Target& t, double v,
          Tick tick) {
  ControlDecision d;
  d.app = app.id;
  d.ric = app.ric;
  d.target = t;
  d.value = v;
  d.tick = tick;
  d.origin = app.loop();
  out.push_back(std::move(d));
}

std::vector<CellIndex> owned_cells(const AppView& view) {
  std::vector<CellIndex> cells;
  for (std::size_t i = 0; i < view.visible.size(); ++i) {
    if (view.visible[i]) cells.push_back(static_cast<CellIndex>(i));
  }
  return cells;
}

void decide_mlb(const AppDescriptor& app, const AppView& view, Tick tick,
                std::vector<ControlDecision>& out) {
  const auto& th = app.thresholds;
  const auto& dom = domain_of(ParamKind::kCio);
  for (CellIndex i : owned_cells(view)) {
    if (view.frame->value(i, KpiKind::kLoad) <= th.mlb_overload) continue;
    std::optional<CellIndex> best;
    double best_load = 0.0;
    for (CellIndex j : view.topo->neighbors(i)) {
      if (!view.sees(j)) continue;
      const double l = view.frame->value(j, KpiKind::kLoad);
      if (!best || l < best_load) {
        best = j;
        best_load = l;
      }
    }
    if (!best || best_load >= th.mlb_underload) continue;
    const Target t{ParamKind::kCio, i, *best};
    if (auto next = dom.above(view.params->get(t))) push(out, app, t, *next, tick);
  }
}

void decide_mro(const AppDescriptor& app, const AppView& view, Tick tick,
                std::vector<ControlDecision>& out) {
  const auto& th = app.thresholds;
  for (CellIndex i : owned_cells(view)) {
    if (view.frame->value(i, KpiKind::kPingpong) > th.mro_pingpong) {
      std::optional<CellIndex> best;
      double best_sum = 0.0;
      for (CellIndex j : view.topo->neighbors(i)) {
        const double back =
            view.sees(j) && view.topo->is_neighbor(j, i) ? view.params->cio(j, i) : 0.0;
        const double sum = view.params->cio(i, j) + back;
        if (!best || sum > best_sum) {
          best = j;
          best_sum = sum;
        }
      }
      if (best) {
        const Target t{ParamKind::kCio, i, *best};
        if (auto lower = domain_of(ParamKind::kCio).below(view.params->get(t))) {
          push(out, app, t, *lower, tick);
        }
      }
    }
    if (view.frame->value(i, KpiKind::kHof) > th.mro_hof) {
      const Target t{ParamKind::kTtt, i, kNoCell};
      if (auto lower = domain_of(ParamKind::kTtt).below(view.params->get(t))) {
        push(out, app, t, *lower, tick);
      }
    }
  }
}

void decide_es(const AppDescriptor& app, const AppView& view, Tick tick,
               std::vector<ControlDecision>& out) {
  for (CellIndex i : owned_cells(view)) {
    if (view.frame->value(i, KpiKind::kLoad) >= app.thresholds.es_low_load) continue;
    const Target t{ParamKind::kTxPower, i, kNoCell};
    if (auto lower = domain_of(ParamKind::kTxPower).below(view.params->get(t))) {
      push(out, app, t, *lower, tick);
    }
  }
}

}  // namespace

std::vector<ControlDecision> decide(const AppDescriptor& app, const AppView& view, Tick tick) {
  std::vector<ControlDecision> out;
  switch (app.kind) {
    case AppKind::kMlb:
      decide_mlb(app, view, tick, out);
      break;
    case AppKind::kMro:
      decide_mro(app, view, tick, out);
      break;
    case AppKind::kEnergySaving:
      decide_es(app, view, tick, out);
      break;
    case AppKind::kCoverage:
    case AppKind::kInert:
      break;
  }
  return out;
}

std::vector<PolicyConstraint> issue_policy(const AppDescriptor& rapp, const Topology& topo,
                                           const KpiFrame& /*frame*/, Tick tick,
                                           std::span<const PolicyConstraint> existing) {
  std::vector<PolicyConstraint> out;
  if (rapp.kind != AppKind::kCoverage) return out;
  const auto& th = rapp.thresholds;
  if (tick < th.coverage_from) return out;
  if (th.coverage_until && tick >= *th.coverage_until) return out;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto cell = static_cast<CellIndex>(i);
    if (!topo.coverage_critical(cell)) continue;
    PolicyConstraint c;
    c.id = rapp.id + "/" + topo.name(cell) + "/tx_power-min";
    c.issuer = rapp.id;
    c.scope = {cell};
    c.param = ParamKind::kTxPower;
    c.bound = BoundKind::kMin;
    c.value = th.coverage_floor;
    c.from = tick;
    c.until = th.coverage_until;
    const bool present =
        std::any_of(existing.begin(), existing.end(), [&](const PolicyConstraint& e) {
          return e.same_rule(c) && (!e.until || tick < *e.until);
        });
    if (!present) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace ricsim
