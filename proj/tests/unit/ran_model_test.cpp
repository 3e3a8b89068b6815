#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

#include "ricsim/ran_model.hpp"
#include "test_support.hpp"

namespace ricsim {
namespace {

using namespace ricsim::testing;

Topology pair_topology() { return Topology({{"A", {"B"}, false}, {"B", {"A"}, false}}); }

TEST(RanModel, ApplyParameterStoresInDomainValue) {
  auto topo = Topology::hexagonal7();
  RanParameters p(7, 0.0, 30.0, 512.0);
  EXPECT_EQ(apply_parameter(p, topo, cio(A, B), 2.0), 2.0);
  EXPECT_EQ(p.cio(A, B), 2.0);
}

TEST(RanModel, ApplyParameterRejectsOutOfRange) {
  auto topo = Topology::hexagonal7();
  RanParameters p(7, 0.0, 30.0, 512.0);
  EXPECT_THROW(apply_parameter(p, topo, cio(A, B), 9.0), DomainError);
  EXPECT_EQ(p.cio(A, B), 0.0);
}

TEST(RanModel, ApplyParameterRejectsOffGrid) {
  auto topo = Topology::hexagonal7();
  RanParameters p(7, 0.0, 30.0, 512.0);
  EXPECT_THROW(apply_parameter(p, topo, ttt(A), 100.0), DomainError);
  EXPECT_THROW(apply_parameter(p, topo, cio(A, B), 0.25), DomainError);
  EXPECT_THROW(apply_parameter(p, topo, tx(A), 30.5), DomainError);
  // Not a neighbor relation.
  EXPECT_THROW(apply_parameter(p, topo, cio(B, E), 1.0), DomainError);
}

TEST(RanModel, LoadShiftExample) {
  // Only the A-B relation, equal tx power so the tx term vanishes.
  auto topo = pair_topology();
  RanParameters p(2, 0.0, 40.0, 512.0);
  p.set(cio(A, B), 2.0);
  const std::vector<double> offered{0.9, 0.3};
  const auto f = step_kpis(topo, p, offered, ModelCoefficients{}, 0);
  const double shift = 0.05 * 2.0 * 0.9;
  EXPECT_DOUBLE_EQ(f.cells[0].load, 0.9 - shift);
  EXPECT_DOUBLE_EQ(f.cells[1].load, 0.3 + shift);
  EXPECT_NEAR(f.cells[0].load, 0.81, 1e-12);
  EXPECT_NEAR(f.cells[1].load, 0.39, 1e-12);
}

TEST(RanModel, PingpongExample) {
  auto topo = pair_topology();
  RanParameters p(2, 0.0, 40.0, 512.0);
  p.set(cio(A, B), 3.0);
  p.set(cio(B, A), 3.0);
  p.set(ttt(A), 256.0);
  const std::vector<double> offered{0.5, 0.5};
  const auto f = step_kpis(topo, p, offered, ModelCoefficients{}, 0);
  const double expected = 0.02 + 0.03 * 6.0 - 0.05 * (256.0 / 512.0);
  EXPECT_DOUBLE_EQ(f.cells[0].pingpong, expected);
  EXPECT_NEAR(f.cells[0].pingpong, 0.175, 1e-12);
}

TEST(RanModel, NeutralParametersLeaveLoadUnchanged) {
  auto topo = Topology::hexagonal7();
  RanParameters p(7, 0.0, 30.0, 512.0);
  const std::vector<double> offered{0.9, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto f = step_kpis(topo, p, offered, ModelCoefficients{}, 4);
  EXPECT_EQ(f.tick, 4);
  for (std::size_t i = 0; i < offered.size(); ++i) {
    EXPECT_EQ(f.cells[i].load, offered[i]);
    EXPECT_EQ(f.cells[i].energy, 1.0);
  }
}

TEST(RanModel, ClampedCellsAreReported) {
  auto topo = pair_topology();
  RanParameters p(2, 0.0, 40.0, 512.0);
  p.set(cio(B, A), 6.0);
  std::vector<CellIndex> clamped;
  const std::vector<double> offered{0.95, 1.4};
  const auto f = step_kpis(topo, p, offered, ModelCoefficients{}, 0, &clamped);
  EXPECT_EQ(f.cells[0].load, 1.0);
  EXPECT_DOUBLE_EQ(f.cells[1].load, 1.4 - 0.05 * 6.0 * 1.4);
  EXPECT_EQ(clamped, (std::vector<CellIndex>{0}));
  for (const auto& c : f.cells) {
    EXPECT_GE(c.pingpong, 0.0);
    EXPECT_LE(c.pingpong, 1.0);
    EXPECT_GE(c.hof, 0.0);
    EXPECT_LE(c.hof, 1.0);
  }
}

TEST(RanModel, DependencyGraphSignExamples) {
  const auto g = dependency_graph(Topology::hexagonal7());
  EXPECT_EQ(g.sign(cio(A, B), B, KpiKind::kLoad), 1);
  EXPECT_EQ(g.sign(cio(A, B), A, KpiKind::kLoad), -1);
  EXPECT_EQ(g.sign(cio(A, B), A, KpiKind::kPingpong), 1);
  EXPECT_EQ(g.sign(cio(A, B), B, KpiKind::kPingpong), 1);
  EXPECT_EQ(g.sign(ttt(A), A, KpiKind::kPingpong), -1);
  EXPECT_EQ(g.sign(ttt(A), A, KpiKind::kHof), 1);
  EXPECT_FALSE(g.touches(ttt(A), A, KpiKind::kEnergy));
  EXPECT_EQ(g.sign(tx(A), A, KpiKind::kEnergy), 1);
  EXPECT_EQ(g.sign(tx(A), A, KpiKind::kLoad), 1);
  EXPECT_EQ(g.sign(tx(A), B, KpiKind::kLoad), -1);
  EXPECT_FALSE(g.touches(tx(A), A, KpiKind::kPingpong));
}

TEST(RanModel, ParameterDomainsAndSnapping) {
  const auto& c = domain_of(ParamKind::kCio);
  EXPECT_EQ(c.lo, -6.0);
  EXPECT_EQ(c.hi, 6.0);
  EXPECT_EQ(c.snap(3.25, -3.0, 3.0), 3.0);
  EXPECT_EQ(c.snap(1.3, -6.0, 6.0), 1.5);
  EXPECT_EQ(c.snap(1.25, -6.0, 6.0), 1.0);  // ties go low
  EXPECT_FALSE(c.snap(0.1, 0.2, 0.4).has_value());
  const auto& t = domain_of(ParamKind::kTtt);
  EXPECT_EQ(t.values, (std::vector<double>{40, 80, 128, 256, 512}));
  EXPECT_EQ(t.below(256.0), 128.0);
  EXPECT_EQ(t.above(256.0), 512.0);
  EXPECT_FALSE(t.above(512.0).has_value());
  EXPECT_EQ(domain_of(ParamKind::kTxPower).below(30.0), std::nullopt);
}

// Holding all else fixed, stepping one parameter instance to the next grid
// point moves each KPI either not at all or in the direction of its signed
// edge; every edge is confirmed by at least one probe.
TEST(RanModel, FiniteDifferenceProbesConfirmEveryEdge) {
  const auto topo = Topology::hexagonal7();
  const auto graph = dependency_graph(topo);
  const ModelCoefficients k;
  const std::vector<std::vector<double>> profiles{std::vector<double>(7, 0.5),
                                                  std::vector<double>(7, 0.9)};
  std::set<std::tuple<Target, CellIndex, KpiKind>> confirmed;
  int probes = 0;
  for (const auto& offered : profiles) {
    for (const Target& t : topo.all_targets()) {
      const auto& dom = domain_of(t.param);
      RanParameters p(7, 0.0, 38.0, 256.0);
      for (auto v = std::optional<double>(dom.lo); v; v = dom.above(*v)) {
        auto next = dom.above(*v);
        if (!next) break;
        p.set(t, *v);
        const auto before = step_kpis(topo, p, offered, k, 0);
        const auto lb = compute_load(topo, p, offered, k);
        p.set(t, *next);
        const auto after = step_kpis(topo, p, offered, k, 0);
        const auto la = compute_load(topo, p, offered, k);
        ++probes;
        for (std::size_t c = 0; c < 7; ++c) {
          const auto cell = static_cast<CellIndex>(c);
          for (KpiKind kpi : kAllKpis) {
            const double d = kpi == KpiKind::kLoad
                                 ? la.pre_clamp[c] - lb.pre_clamp[c]
                                 : after.cells[c].get(kpi) - before.cells[c].get(kpi);
            if (d == 0.0) continue;
            const auto s = graph.sign(t, cell, kpi);
            ASSERT_TRUE(s.has_value()) << to_string(t.param) << " moved " << to_string(kpi)
                                       << " of cell " << c << " without an edge";
            EXPECT_EQ(*s, d > 0 ? 1 : -1);
            confirmed.insert({t, cell, kpi});
          }
        }
      }
    }
  }
  EXPECT_GT(probes, 1000);
  for (const auto& e : graph.edges()) {
    EXPECT_TRUE(confirmed.contains({e.param, e.cell, e.kpi}))
        << "edge " << to_string(e.param.param) << " -> " << to_string(e.kpi) << " of cell "
        << e.cell << " never observed";
  }
}

TEST(RanModel, MonotonicityOverTheGrid) {
  const auto topo = Topology::hexagonal7();
  const ModelCoefficients k;
  const std::vector<double> offered(7, 0.7);
  RanParameters p(7, 0.0, 38.0, 256.0);
  const auto& cdom = domain_of(ParamKind::kCio);
  for (double v = cdom.lo; v < cdom.hi; v += cdom.step) {
    p.set(cio(A, B), v);
    const auto lo = compute_load(topo, p, offered, k);
    p.set(cio(A, B), v + cdom.step);
    const auto hi = compute_load(topo, p, offered, k);
    EXPECT_LE(hi.pre_clamp[A], lo.pre_clamp[A]);
    EXPECT_GE(hi.pre_clamp[B], lo.pre_clamp[B]);
  }
  for (double v : domain_of(ParamKind::kTtt).values) {
    auto next = domain_of(ParamKind::kTtt).above(v);
    if (!next) break;
    p.set(ttt(C), v);
    const auto lo = step_kpis(topo, p, offered, k, 0);
    p.set(ttt(C), *next);
    const auto hi = step_kpis(topo, p, offered, k, 0);
    EXPECT_LE(hi.cells[C].pingpong, lo.cells[C].pingpong);
    EXPECT_GE(hi.cells[C].hof, lo.cells[C].hof);
  }
  for (double v = 30; v < 46; v += 1) {
    p.set(tx(D), v);
    const auto lo = step_kpis(topo, p, offered, k, 0);
    p.set(tx(D), v + 1);
    const auto hi = step_kpis(topo, p, offered, k, 0);
    EXPECT_GT(hi.cells[D].energy, lo.cells[D].energy);
  }
}

// Dyadic coefficients and inputs keep every intermediate exact, so load
// moved out of a cell equals load received by its neighbors with no tolerance.
TEST(RanModel, ShiftedLoadIsConservedExactly) {
  const auto topo = Topology::hexagonal7();
  ModelCoefficients k;
  k.kappa = 0.0625;
  std::mt19937_64 rng(11);
  const auto& dom = domain_of(ParamKind::kCio);
  for (int round = 0; round < 200; ++round) {
    RanParameters p(7, 0.0, 40.0, 256.0);
    for (const Target& t : topo.all_targets()) {
      if (t.param != ParamKind::kCio) continue;
      p.set(t, dom.lo + dom.step * static_cast<double>(rng() % 25));
    }
    std::vector<double> offered(7);
    for (auto& o : offered) o = static_cast<double>(rng() % 24) / 16.0;
    const auto b = compute_load(topo, p, offered, k);
    double total_out = 0.0;
    double total_in = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      double out = 0.0;
      double received = 0.0;
      for (std::size_t j = 0; j < 7; ++j) {
        out += b.shift[i][j];
        if (topo.is_neighbor(static_cast<CellIndex>(i), static_cast<CellIndex>(j))) {
          received += b.shift[i][j];
        } else {
          EXPECT_EQ(b.shift[i][j], 0.0);
        }
      }
      EXPECT_EQ(out, received);
      total_out += out;
      for (std::size_t j = 0; j < 7; ++j) total_in += b.shift[j][i];
      EXPECT_EQ(b.tx_term[i], 0.0);
      double in = 0.0;
      for (std::size_t j = 0; j < 7; ++j) in += b.shift[j][i];
      EXPECT_EQ(b.pre_clamp[i], offered[i] - out + in);
    }
    EXPECT_EQ(total_out, total_in);
  }
}

}  // namespace
}  // namespace ricsim
