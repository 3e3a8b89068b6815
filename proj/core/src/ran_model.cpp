#include "ricsim/ran_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ricsim {

namespace {

constexpr double kGridEps = 1e-9;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

ParameterDomain make_uniform(double lo, double hi, double step) {
  ParameterDomain d;
  d.lo = lo;
  d.hi = hi;
  d.step = step;
  const int n = static_cast<int>(std::lround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) d.values.push_back(lo + step * k);
  return d;
}

ParameterDomain make_discrete(std::vector<double> values) {
  ParameterDomain d;
  d.lo = values.front();
  d.hi = values.back();
  d.values = std::move(values);
  return d;
}

}  // namespace

Topology::Topology(const std::vector<CellSpec>& cells) {
  if (cells.empty()) throw ValidationError("topology.cells: at least one cell required");
  for (const auto& c : cells) {
    if (c.id.empty()) throw ValidationError("topology.cells: empty cell id");
    if (find(c.id)) throw ValidationError("topology.cells: duplicate cell id '" + c.id + "'");
    names_.push_back(c.id);
    critical_.push_back(c.coverage_critical);
  }
  neighbors_.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const auto& n : cells[i].neighbors) {
      auto j = find(n);
      if (!j) {
        throw ValidationError("topology.cells[" + cells[i].id + "].neighbors: unknown cell '" + n +
                              "'");
      }
      if (*j == static_cast<CellIndex>(i)) {
        throw ValidationError("topology.cells[" + cells[i].id + "].neighbors: self-loop");
      }
      auto& list = neighbors_[i];
      if (std::find(list.begin(), list.end(), *j) != list.end()) {
        throw ValidationError("topology.cells[" + cells[i].id + "].neighbors: duplicate '" + n +
                              "'");
      }
      list.push_back(*j);
    }
    std::sort(neighbors_[i].begin(), neighbors_[i].end());
  }
}

Topology Topology::hexagonal7() {
  const std::vector<std::string> ring{"B", "C", "D", "E", "F", "G"};
  std::vector<CellSpec> cells;
  cells.push_back({"A", ring, false});
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const auto& prev = ring[(k + ring.size() - 1) % ring.size()];
    const auto& next = ring[(k + 1) % ring.size()];
    cells.push_back({ring[k], {"A", prev, next}, false});
  }
  return Topology(cells);
}

std::optional<CellIndex> Topology::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<CellIndex>(i);
  }
  return std::nullopt;
}

CellIndex Topology::index(std::string_view name) const {
  auto i = find(name);
  if (!i) throw ValidationError("unknown cell '" + std::string(name) + "'");
  return *i;
}

bool Topology::is_neighbor(CellIndex from, CellIndex to) const {
  if (from < 0 || static_cast<std::size_t>(from) >= size()) return false;
  const auto& n = neighbors_[static_cast<std::size_t>(from)];
  return std::binary_search(n.begin(), n.end(), to);
}

bool Topology::is_valid(const Target& t) const {
  if (t.cell < 0 || static_cast<std::size_t>(t.cell) >= size()) return false;
  if (t.param == ParamKind::kCio) return is_neighbor(t.cell, t.neighbor);
  return t.neighbor == kNoCell;
}

std::vector<Target> Topology::all_targets() const {
  std::vector<Target> out;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto c = static_cast<CellIndex>(i);
    for (CellIndex j : neighbors(c)) out.push_back({ParamKind::kCio, c, j});
    out.push_back({ParamKind::kTxPower, c, kNoCell});
    out.push_back({ParamKind::kTtt, c, kNoCell});
  }
  return out;
}

std::vector<CellIndex> Topology::scope(const Target& t) const {
  if (t.param == ParamKind::kCio) return {t.cell, t.neighbor};
  return {t.cell};
}

bool ParameterDomain::on_grid(double v) const {
  return std::any_of(values.begin(), values.end(),
                     [v](double g) { return std::abs(g - v) <= kGridEps; });
}

std::optional<double> ParameterDomain::snap(double v, double range_lo, double range_hi) const {
  std::optional<double> best;
  double best_dist = 0.0;
  for (double g : values) {
    if (g < range_lo - kGridEps || g > range_hi + kGridEps) continue;
    const double dist = std::abs(g - v);
    if (!best || dist < best_dist - kGridEps) {
      best = g;
      best_dist = dist;
    }
  }
  return best;
}

std::optional<double> ParameterDomain::below(double v) const {
  std::optional<double> out;
  for (double g : values) {
    if (g < v - kGridEps) out = g;
  }
  return out;
}

std::optional<double> ParameterDomain::above(double v) const {
  for (double g : values) {
    if (g > v + kGridEps) return g;
  }
  return std::nullopt;
}

const ParameterDomain& domain_of(ParamKind p) {
  static const ParameterDomain cio = make_uniform(-6.0, 6.0, 0.5);
  static const ParameterDomain tx = make_uniform(30.0, 46.0, 1.0);
  static const ParameterDomain ttt = make_discrete({40.0, 80.0, 128.0, 256.0, 512.0});
  switch (p) {
    case ParamKind::kCio:
      return cio;
    case ParamKind::kTxPower:
      return tx;
    case ParamKind::kTtt:
      return ttt;
  }
  return cio;
}

RanParameters::RanParameters(std::size_t cells, double cio, double tx_power, double ttt)
    : n_(cells), cio_(cells * cells, cio), tx_(cells, tx_power), ttt_(cells, ttt) {}

double RanParameters::get(const Target& t) const {
  switch (t.param) {
    case ParamKind::kCio:
      return cio_[idx(t.cell, t.neighbor)];
    case ParamKind::kTxPower:
      return tx_[static_cast<std::size_t>(t.cell)];
    case ParamKind::kTtt:
      return ttt_[static_cast<std::size_t>(t.cell)];
  }
  return 0.0;
}

void RanParameters::set(const Target& t, double value) {
  switch (t.param) {
    case ParamKind::kCio:
      cio_[idx(t.cell, t.neighbor)] = value;
      break;
    case ParamKind::kTxPower:
      tx_[static_cast<std::size_t>(t.cell)] = value;
      break;
    case ParamKind::kTtt:
      ttt_[static_cast<std::size_t>(t.cell)] = value;
      break;
  }
}

double apply_parameter(RanParameters& params, const Topology& topo, const Target& target,
                       double value) {
  if (!topo.is_valid(target)) throw DomainError("domain violation: unknown parameter target");
  const auto& dom = domain_of(target.param);
  if (!std::isfinite(value) || !dom.contains(value) || !dom.on_grid(value)) {
    std::ostringstream msg;
    msg << "domain violation: " << to_string(target.param) << " = " << value
        << " outside allowed values";
    throw DomainError(msg.str());
  }
  // Store the exact grid value so later equality checks are exact.
  const double stored = *dom.snap(value, dom.lo, dom.hi);
  params.set(target, stored);
  return stored;
}

double CellKpis::get(KpiKind k) const {
  switch (k) {
    case KpiKind::kLoad:
      return load;
    case KpiKind::kPingpong:
      return pingpong;
    case KpiKind::kHof:
      return hof;
    case KpiKind::kEnergy:
      return energy;
  }
  return 0.0;
}

double& CellKpis::at(KpiKind k) {
  switch (k) {
    case KpiKind::kLoad:
      return load;
    case KpiKind::kPingpong:
      return pingpong;
    case KpiKind::kHof:
      return hof;
    case KpiKind::kEnergy:
      return energy;
  }
  return load;
}

LoadBreakdown compute_load(const Topology& topo, const RanParameters& params,
                           std::span<const double> offered, const ModelCoefficients& coeffs) {
  const std::size_t n = topo.size();
  LoadBreakdown b;
  b.shift.assign(n, std::vector<double>(n, 0.0));
  b.tx_term.assign(n, 0.0);
  b.pre_clamp.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = static_cast<CellIndex>(i);
    for (CellIndex j : topo.neighbors(ci)) {
      b.shift[i][static_cast<std::size_t>(j)] = coeffs.kappa * params.cio(ci, j) * offered[i];
    }
    double tx_sum = 0.0;
    for (CellIndex j : topo.neighbors(ci)) tx_sum += (params.tx_power(ci) - params.tx_power(j)) / 16.0;
    b.tx_term[i] = coeffs.mu * tx_sum * offered[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    double in = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out += b.shift[i][j];
      in += b.shift[j][i];
    }
    b.pre_clamp[i] = offered[i] - out + in + b.tx_term[i];
  }
  return b;
}

KpiFrame step_kpis(const Topology& topo, const RanParameters& params,
                   std::span<const double> offered, const ModelCoefficients& coeffs, Tick tick,
                   std::vector<CellIndex>* clamped) {
  const auto breakdown = compute_load(topo, params, offered, coeffs);
  KpiFrame frame;
  frame.tick = tick;
  frame.cells.resize(topo.size());
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto ci = static_cast<CellIndex>(i);
    auto& k = frame.cells[i];
    const double raw = breakdown.pre_clamp[i];
    k.load = clamp01(raw);
    if (clamped && k.load != raw) clamped->push_back(ci);

    const auto nbrs = topo.neighbors(ci);
    double pair_sum = 0.0;
    for (CellIndex j : nbrs) {
      const double back = topo.is_neighbor(j, ci) ? params.cio(j, ci) : 0.0;
      pair_sum += std::max(0.0, params.cio(ci, j) + back);
    }
    const double pair_mean = nbrs.empty() ? 0.0 : pair_sum / static_cast<double>(nbrs.size());
    const double ttt_frac = params.ttt(ci) / 512.0;
    k.pingpong = clamp01(coeffs.pp0 + coeffs.pp1 * pair_mean - coeffs.pp2 * ttt_frac);
    k.hof = clamp01(coeffs.hof0 + coeffs.hof1 * std::max(0.0, k.load - coeffs.overload_knee) +
                    coeffs.hof2 * ttt_frac);
    k.energy = coeffs.energy0 + coeffs.energy1 * (params.tx_power(ci) - 30.0);
  }
  return frame;
}

DependencyGraph::DependencyGraph(std::vector<DependencyEdge> edges) : edges_(std::move(edges)) {}

std::vector<DependencyEdge> DependencyGraph::effects(const Target& t) const {
  std::vector<DependencyEdge> out;
  for (const auto& e : edges_) {
    if (e.param == t) out.push_back(e);
  }
  return out;
}

std::optional<int> DependencyGraph::sign(const Target& t, CellIndex cell, KpiKind kpi) const {
  for (const auto& e : edges_) {
    if (e.param == t && e.cell == cell && e.kpi == kpi) return e.sign;
  }
  return std::nullopt;
}

DependencyGraph dependency_graph(const Topology& topo) {
  std::vector<DependencyEdge> edges;
  auto add = [&](const Target& t, CellIndex c, KpiKind k, int s, bool via_load = false) {
    edges.push_back({t, c, k, s, via_load});
  };
  for (const Target& t : topo.all_targets()) {
    const CellIndex i = t.cell;
    switch (t.param) {
      case ParamKind::kCio: {
        const CellIndex j = t.neighbor;
        add(t, i, KpiKind::kLoad, -1);
        add(t, j, KpiKind::kLoad, +1);
        add(t, i, KpiKind::kPingpong, +1);
        if (topo.is_neighbor(j, i)) add(t, j, KpiKind::kPingpong, +1);
        add(t, i, KpiKind::kHof, -1, true);
        add(t, j, KpiKind::kHof, +1, true);
        break;
      }
      case ParamKind::kTtt:
        add(t, i, KpiKind::kPingpong, -1);
        add(t, i, KpiKind::kHof, +1);
        break;
      case ParamKind::kTxPower: {
        add(t, i, KpiKind::kEnergy, +1);
        if (!topo.neighbors(i).empty()) {
          add(t, i, KpiKind::kLoad, +1);
          add(t, i, KpiKind::kHof, +1, true);
        }
        for (std::size_t jj = 0; jj < topo.size(); ++jj) {
          const auto j = static_cast<CellIndex>(jj);
          if (j != i && topo.is_neighbor(j, i)) {
            add(t, j, KpiKind::kLoad, -1);
            add(t, j, KpiKind::kHof, -1, true);
          }
        }
        break;
      }
    }
  }
  return DependencyGraph(std::move(edges));
}

}  // namespace ricsim
