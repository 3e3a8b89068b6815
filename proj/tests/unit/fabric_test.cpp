#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ricsim/fabric.hpp"
#include "test_support.hpp"

namespace ricsim {
namespace {

using namespace ricsim::testing;

RicTopology two_rics(Tick delay) {
  RicTopology t;
  t.near_rt = {{"ric-1", {A, B, C, D}, {A, B, D}}, {"ric-2", {E, F, G}, {E, F, G}}};
  t.delay = delay;
  return t;
}

CmActivityReport report_at(std::string origin, Tick t) {
  CmActivityReport r;
  r.origin = std::move(origin);
  r.published = t;
  return r;
}

TEST(Fabric, DeliversExactlyDelayLater) {
  Fabric f(two_rics(5));
  f.publish(report_at("ric-1", 100));
  for (Tick t = 100; t < 105; ++t) EXPECT_TRUE(f.distribute(t).empty()) << t;
  const auto out = f.distribute(105);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, "ric-2");
  EXPECT_EQ(out[0].sent, 100);
  EXPECT_EQ(out[0].due, 105);
  EXPECT_EQ(std::get<CmActivityReport>(out[0].payload), report_at("ric-1", 100));
  EXPECT_EQ(f.in_flight(), 0u);
}

TEST(Fabric, ZeroDelayDeliversSameTick) {
  Fabric f(two_rics(0));
  f.publish(report_at("ric-2", 7));
  const auto out = f.distribute(7);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, "ric-1");
}

TEST(Fabric, ReportGoesToEveryPeerButOrigin) {
  RicTopology t;
  t.near_rt = {{"ric-1", {A, B}, {}}, {"ric-2", {C, D}, {}}, {"ric-3", {E, F, G}, {}}};
  t.delay = 1;
  Fabric f(t);
  f.publish(report_at("ric-2", 0));
  const auto out = f.distribute(1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].to, "ric-1");
  EXPECT_EQ(out[1].to, "ric-3");
}

TEST(Fabric, ConstraintGoesToOwnersOfItsScope) {
  Fabric f(two_rics(5));
  f.register_policy({"k", "cov", {F}, ParamKind::kTxPower, BoundKind::kMin, 36.0, 20, std::nullopt},
                    20);
  f.register_update({"u1", Json{{"cooldown", {{"C1", 30}}}}}, 20);
  const auto out = f.distribute(25);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].to, "ric-2");
  EXPECT_TRUE(std::holds_alternative<PolicyConstraint>(out[0].payload));
  EXPECT_TRUE(std::holds_alternative<PolicyUpdate>(out[1].payload));
  EXPECT_TRUE(std::holds_alternative<PolicyUpdate>(out[2].payload));
}

// A constraint issued at 20 binds only once delivered at 25: an infringing
// decision at 23 passes, one at 26 is projected.
TEST(Fabric, ConstraintEnforceableOnlyAfterDelivery) {
  Fabric f(two_rics(5));
  const PolicyConstraint floor{"k", "cov", {F}, ParamKind::kTxPower, BoundKind::kMin, 36.0, 20,
                               std::nullopt};
  f.register_policy(floor, 20);
  GateBench b;
  b.ric = "ric-2";
  DecisionId id = 1;
  for (Tick t = 20; t <= 26; ++t) {
    for (const auto& d : f.distribute(t)) b.constraints.push_back(std::get<PolicyConstraint>(d.payload));
    const auto r = b.run({decision(id++, "es", tx(F), 34.0, t, "ric-2")}, t);
    if (t < 25) {
      EXPECT_TRUE(r.conflicts.empty()) << t;
      EXPECT_EQ(r.decisions[0].value, 34.0) << t;
    } else {
      ASSERT_EQ(r.conflicts.size(), 1u) << t;
      EXPECT_EQ(r.conflicts[0].cls, ConflictClass::kC5);
      EXPECT_EQ(r.decisions[0].value, 36.0);
    }
  }
}

TEST(Fabric, DeliveryIsInOrderAcrossInterleavedSends) {
  std::mt19937_64 rng(8);
  Fabric f(two_rics(3));
  std::vector<std::uint64_t> seqs;
  for (Tick t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) f.publish(report_at(rng() % 2 ? "ric-1" : "ric-2", t));
    for (const auto& d : f.distribute(t)) {
      EXPECT_EQ(d.due, t);
      EXPECT_EQ(d.sent + 3, d.due);
      seqs.push_back(d.seq);
    }
  }
  EXPECT_TRUE(std::is_sorted(seqs.begin(), seqs.end()));
  EXPECT_GT(seqs.size(), 100u);
}

TEST(Fabric, RicsPartitionTheCells) {
  const auto topo = Topology::hexagonal7();
  EXPECT_NO_THROW(two_rics(5).validate(topo));
  auto overlap = two_rics(5);
  overlap.near_rt[1].owned.push_back(D);
  EXPECT_THROW(overlap.validate(topo), ValidationError);
  auto missing = two_rics(5);
  missing.near_rt[1].owned = {E, F};
  missing.near_rt[1].boundary = {E, F};
  EXPECT_THROW(missing.validate(topo), ValidationError);
  auto stray = two_rics(5);
  stray.near_rt[0].boundary.push_back(E);
  EXPECT_THROW(stray.validate(topo), ValidationError);
}

TEST(Fabric, EachTargetHasOneController) {
  const auto topo = Topology::hexagonal7();
  const auto rics = two_rics(5);
  for (CellIndex c = 0; c < 7; ++c) {
    int tx_owners = 0;
    for (const auto& r : rics.near_rt) tx_owners += rics.controls(r.id, tx(c)) ? 1 : 0;
    EXPECT_EQ(tx_owners, 1) << c;
    EXPECT_EQ(rics.owner(c), rics.controls("ric-1", tx(c)) ? "ric-1" : "ric-2");
  }
  EXPECT_TRUE(rics.controls("ric-1", cio(A, B)));
  EXPECT_FALSE(rics.controls("ric-2", cio(A, B)));
}

TEST(Fabric, DerivedBoundaryOfTheDefaultLayout) {
  const auto topo = Topology::hexagonal7();
  std::vector<RicSpec> rics{{"ric-1", {A, B, C, D}, {}}, {"ric-2", {E, F, G}, {}}};
  EXPECT_EQ(RicTopology::derive_boundary(topo, rics, 0), (std::vector<CellIndex>{A, B, D}));
  EXPECT_EQ(RicTopology::derive_boundary(topo, rics, 1), (std::vector<CellIndex>{E, F, G}));
}

// Log audit over a full two-RIC run: every published report reaches every
// peer exactly once, exactly D ticks later.
TEST(Fabric, GuaranteedDeliveryAudit) {
  const auto sc = bundled("inter_ric.json");
  SimState s = make_state(sc, true);
  run(s, sc.ticks);
  const Tick d = s.fabric.topology().delay;
  std::map<std::pair<std::string, Tick>, std::map<std::string, Tick>> delivered;
  int deliveries = 0;
  for (const auto* e : entries_of(s.log, EventKind::kReportDelivered)) {
    const auto& rep = e->payload.at("report");
    auto& peers = delivered[{rep.at("origin").get<std::string>(), rep.at("published").get<Tick>()}];
    EXPECT_TRUE(peers.emplace(e->payload.at("to").get<std::string>(), e->tick).second);
    ++deliveries;
  }
  int published = 0;
  for (const auto* e : entries_of(s.log, EventKind::kReportPublished)) {
    const auto origin = e->payload.at("origin").get<std::string>();
    const auto key = std::make_pair(origin, e->tick);
    if (e->tick + d >= sc.ticks) {
      EXPECT_FALSE(delivered.contains(key));
      continue;
    }
    ++published;
    const auto& peers = delivered.at(key);
    EXPECT_EQ(peers.size(), s.rics.size() - 1);
    for (const auto& [to, tick] : peers) {
      EXPECT_NE(to, origin);
      EXPECT_EQ(tick, e->tick + d);
    }
  }
  EXPECT_EQ(deliveries, published * static_cast<int>(s.rics.size() - 1));
  EXPECT_GT(published, 0);
}

}  // namespace
}  // namespace ricsim
