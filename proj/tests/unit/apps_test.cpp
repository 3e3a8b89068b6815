#include <gtest/gtest.h>

#include <algorithm>

#include "ricsim/apps.hpp"
#include "ricsim/json_io.hpp"
#include "test_support.hpp"

namespace ricsim {
namespace {

using namespace ricsim::testing;

struct ViewFixture {
  Topology topo = Topology::hexagonal7();
  RanParameters params{7, 0.0, 40.0, 256.0};
  KpiFrame frame;
  std::vector<bool> visible = std::vector<bool>(7, true);

  ViewFixture() {
    frame.cells.resize(7);
    for (auto& c : frame.cells) {
      c.load = 0.6;
      c.pingpong = 0.05;
      c.hof = 0.05;
      c.energy = 2.0;
    }
  }
  AppView view() const { return AppView{&topo, &params, &frame, visible}; }
};

TEST(Apps, MlbShiftsTowardLeastLoadedNeighbor) {
  ViewFixture f;
  f.frame.cells[A].load = 0.9;
  f.frame.cells[B].load = 0.2;
  const auto app = make_app("mlb", AppKind::kMlb, "ric-1", 1);
  const auto out = decide(app, f.view(), 7);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].target, cio(A, B));
  EXPECT_EQ(out[0].value, 0.5);
  EXPECT_EQ(out[0].tick, 7);
  EXPECT_EQ(out[0].app, "mlb");
}

TEST(Apps, MroLowersTheStrongestPair) {
  ViewFixture f;
  f.params.set(cio(A, B), 3.0);
  f.params.set(cio(B, A), 3.0);
  f.frame.cells[A].pingpong = 0.175;
  const auto app = make_app("mro", AppKind::kMro, "ric-1", 2);
  const auto out = decide(app, f.view(), 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].target, cio(A, B));
  EXPECT_EQ(out[0].value, 2.5);
}

TEST(Apps, MroLowersTttOnHandoverFailures) {
  ViewFixture f;
  f.frame.cells[C].hof = 0.2;
  const auto out = decide(make_app("mro", AppKind::kMro, "ric-1", 2), f.view(), 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].target, ttt(C));
  EXPECT_EQ(out[0].value, 128.0);
}

TEST(Apps, EnergySavingIdleAboveThreshold) {
  ViewFixture f;
  const auto app = make_app("es", AppKind::kEnergySaving, "ric-2", 1);
  EXPECT_TRUE(decide(app, f.view(), 0).empty());
  f.frame.cells[F].load = 0.2;
  const auto out = decide(app, f.view(), 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].target, tx(F));
  EXPECT_EQ(out[0].value, 39.0);
}

TEST(Apps, AppsSeeOnlyTheirRicsCells) {
  ViewFixture f;
  f.frame.cells[A].load = 0.9;
  f.frame.cells[E].load = 0.1;  // owned by the other RIC
  f.frame.cells[B].load = 0.4;
  f.visible = {true, true, true, true, false, false, false};
  const auto out = decide(make_app("mlb", AppKind::kMlb, "ric-1", 1), f.view(), 0);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].target, cio(A, B));
  // Overloaded cells outside the view are not acted on.
  f.frame.cells[A].load = 0.5;
  f.frame.cells[F].load = 0.95;
  EXPECT_TRUE(decide(make_app("mlb", AppKind::kMlb, "ric-1", 1), f.view(), 0).empty());
}

TEST(Apps, DecideIsPure) {
  ViewFixture f;
  f.frame.cells[A].load = 0.9;
  f.frame.cells[B].load = 0.2;
  f.frame.cells[A].pingpong = 0.3;
  f.frame.cells[D].hof = 0.3;
  for (auto kind : {AppKind::kMlb, AppKind::kMro, AppKind::kEnergySaving}) {
    const auto app = make_app("x", kind, "ric-1", 1);
    EXPECT_EQ(decide(app, f.view(), 5), decide(app, f.view(), 5));
  }
}

TEST(Apps, CoverageFloorForCriticalCell) {
  auto topo = Topology::hexagonal7();
  topo.set_coverage_critical(C, true);
  const auto app = make_app("coverage", AppKind::kCoverage, "non-rt", 0);
  const auto out = issue_policy(app, topo, KpiFrame{}, 3, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].scope, (std::vector<CellIndex>{C}));
  EXPECT_EQ(out[0].param, ParamKind::kTxPower);
  EXPECT_EQ(out[0].bound, BoundKind::kMin);
  EXPECT_EQ(out[0].value, 36.0);
  EXPECT_EQ(out[0].from, 3);
}

TEST(Apps, CoverageWithoutCriticalCellsIsSilent) {
  const auto app = make_app("coverage", AppKind::kCoverage, "non-rt", 0);
  EXPECT_TRUE(issue_policy(app, Topology::hexagonal7(), KpiFrame{}, 0, {}).empty());
}

TEST(Apps, CoverageDoesNotDuplicateActiveConstraint) {
  auto topo = Topology::hexagonal7();
  topo.set_coverage_critical(C, true);
  const auto app = make_app("coverage", AppKind::kCoverage, "non-rt", 0);
  const auto first = issue_policy(app, topo, KpiFrame{}, 0, {});
  EXPECT_TRUE(issue_policy(app, topo, KpiFrame{}, 1, first).empty());
}

TEST(Apps, ConstraintSemantics) {
  PolicyConstraint c{"k", "cov", {C}, ParamKind::kTxPower, BoundKind::kMin, 36.0, 20, 40};
  EXPECT_FALSE(c.active_at(19));
  EXPECT_TRUE(c.active_at(20));
  EXPECT_FALSE(c.active_at(40));
  EXPECT_TRUE(c.applies_to(tx(C)));
  EXPECT_FALSE(c.applies_to(tx(D)));
  EXPECT_FALSE(c.applies_to(ttt(C)));
  EXPECT_TRUE(c.satisfied_by(36.0));
  EXPECT_FALSE(c.satisfied_by(35.0));
  c.value = 50.0;
  EXPECT_THROW(validate(c, Topology::hexagonal7()), ValidationError);
}

TEST(Apps, DecisionsStayWithinWritableSets) {
  const auto sc = bundled("default.json");
  SimState s = make_state(sc, false);
  run(s, sc.ticks);
  int n = 0;
  for (const auto* e : entries_of(s.log, EventKind::kDecisionSubmitted)) {
    const auto d = decision_from_json(e->payload);
    const auto* app = sc.find_app(d.app);
    ASSERT_NE(app, nullptr);
    EXPECT_TRUE(app->can_write(d.target.param)) << d.app;
    ++n;
  }
  EXPECT_GT(n, 100);
}

// The seeded oscillation: with CM off, MLB and MRO push the contested cio in
// opposite directions within the first 200 ticks.
TEST(Apps, DefaultScenarioOscillatesWithoutCm) {
  const auto sc = bundled("default.json");
  SimState s = make_state(sc, false);
  run(s, 200);
  std::vector<double> values;
  for (const auto* e : entries_of(s.log, EventKind::kDecisionActuated)) {
    if (target_from_json(e->payload.at("target")) == cio(A, B)) {
      values.push_back(e->payload.at("value").get<double>() -
                       e->payload.at("previous").get<double>());
    }
  }
  bool up_then_down = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i - 1] > 0 && values[i] < 0) up_then_down = true;
  }
  EXPECT_TRUE(up_then_down);
}

}  // namespace
}  // namespace ricsim
