#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ricsim/types.hpp"

namespace ricsim {

struct CellSpec {
  std::string id;
  std::vector<std::string> neighbors;
  bool coverage_critical = false;
};

// Cell graph with directed neighbor relations. Fixed for the lifetime of a run.
class Topology {
 public:
  Topology() = default;
  explicit Topology(const std::vector<CellSpec>& cells);

  // Center cell "A" surrounded by a ring "B".."G"; every adjacent pair are
  // mutual neighbors.
  static Topology hexagonal7();

  std::size_t size() const { return names_.size(); }
  const std::string& name(CellIndex c) const { return names_.at(static_cast<std::size_t>(c)); }
  CellIndex index(std::string_view name) const;
  std::optional<CellIndex> find(std::string_view name) const;
  std::span<const CellIndex> neighbors(CellIndex c) const {
    return neighbors_.at(static_cast<std::size_t>(c));
  }
  bool is_neighbor(CellIndex from, CellIndex to) const;
  bool coverage_critical(CellIndex c) const { return critical_.at(static_cast<std::size_t>(c)); }
  void set_coverage_critical(CellIndex c, bool v) { critical_.at(static_cast<std::size_t>(c)) = v; }

  bool is_valid(const Target& t) const;
  // Every parameter instance of the network, in a stable order.
  std::vector<Target> all_targets() const;
  // Cells whose KPIs a parameter instance is named after (source first).
  std::vector<CellIndex> scope(const Target& t) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<CellIndex>> neighbors_;
  std::vector<bool> critical_;
};

// Allowed values of one parameter kind. Continuous kinds use a uniform grid,
// ttt uses a discrete set.
struct ParameterDomain {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
  std::vector<double> values;  // ascending

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool on_grid(double v) const;
  // Nearest grid point inside [range_lo, range_hi]; ties go to the lower
  // point. Empty when the range holds no grid point.
  std::optional<double> snap(double v, double range_lo, double range_hi) const;
  // Next grid point strictly below / above v.
  std::optional<double> below(double v) const;
  std::optional<double> above(double v) const;
};

const ParameterDomain& domain_of(ParamKind p);

class RanParameters {
 public:
  RanParameters() = default;
  RanParameters(std::size_t cells, double cio, double tx_power, double ttt);

  double get(const Target& t) const;
  void set(const Target& t, double value);

  double cio(CellIndex from, CellIndex to) const { return cio_[idx(from, to)]; }
  double tx_power(CellIndex c) const { return tx_[static_cast<std::size_t>(c)]; }
  double ttt(CellIndex c) const { return ttt_[static_cast<std::size_t>(c)]; }
  std::size_t cells() const { return n_; }

  bool operator==(const RanParameters&) const = default;

 private:
  std::size_t idx(CellIndex a, CellIndex b) const {
    return static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b);
  }

  std::size_t n_ = 0;
  std::vector<double> cio_;
  std::vector<double> tx_;
  std::vector<double> ttt_;
};

// Stores value after checking the target exists and the value is in-domain and
// on-grid. Throws DomainError otherwise. Returns the stored value.
double apply_parameter(RanParameters& params, const Topology& topo, const Target& target,
                       double value);

struct CellKpis {
  double load = 0.0;
  double pingpong = 0.0;
  double hof = 0.0;
  double energy = 0.0;

  double get(KpiKind k) const;
  double& at(KpiKind k);
  bool operator==(const CellKpis&) const = default;
};

struct KpiFrame {
  Tick tick = 0;
  std::vector<CellKpis> cells;

  double value(CellIndex c, KpiKind k) const { return cells.at(static_cast<std::size_t>(c)).get(k); }
  bool operator==(const KpiFrame&) const = default;
};

struct ModelCoefficients {
  double kappa = 0.05;  // load shift per dB of cio
  double mu = 0.02;     // tx-power load coupling
  double pp0 = 0.02;
  double pp1 = 0.03;
  double pp2 = 0.05;
  double hof0 = 0.02;
  double hof1 = 0.5;
  double hof2 = 0.08;
  double energy0 = 1.0;
  double energy1 = 0.1;
  double overload_knee = 0.8;
};

// Intermediate load terms, exposed for the conservation property.
struct LoadBreakdown {
  // shift[i][j] = load moved from i to j by cio[i][j]; zero when j is not a
  // neighbor of i.
  std::vector<std::vector<double>> shift;
  std::vector<double> tx_term;
  std::vector<double> pre_clamp;
};

LoadBreakdown compute_load(const Topology& topo, const RanParameters& params,
                           std::span<const double> offered, const ModelCoefficients& coeffs);

// Closed-form KPI synthesis. Cells whose load was clamped are appended to
// `clamped` when given.
KpiFrame step_kpis(const Topology& topo, const RanParameters& params,
                   std::span<const double> offered, const ModelCoefficients& coeffs, Tick tick,
                   std::vector<CellIndex>* clamped = nullptr);

struct DependencyEdge {
  Target param;
  CellIndex cell = 0;
  KpiKind kpi = KpiKind::kLoad;
  int sign = 0;          // +1 or -1
  bool via_load = false;  // effect on hof carried through the overload term
};

// Static signed bipartite graph parameter instance -> (cell, kpi).
class DependencyGraph {
 public:
  DependencyGraph() = default;
  explicit DependencyGraph(std::vector<DependencyEdge> edges);

  std::span<const DependencyEdge> edges() const { return edges_; }
  std::vector<DependencyEdge> effects(const Target& t) const;
  std::optional<int> sign(const Target& t, CellIndex cell, KpiKind kpi) const;
  bool touches(const Target& t, CellIndex cell, KpiKind kpi) const {
    return sign(t, cell, kpi).has_value();
  }

 private:
  std::vector<DependencyEdge> edges_;
};

DependencyGraph dependency_graph(const Topology& topo);

}  // namespace ricsim
