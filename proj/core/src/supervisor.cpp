#include "ricsim/supervisor.hpp"

#include <algorithm>
#include <cmath>

#include "ricsim/json_io.hpp"

namespace ricsim {

void SupervisorConfig::validate() const {
  if (horizon < 1) throw ValidationError("supervisor.horizon: must be >= 1");
  if (period < 1) throw ValidationError("supervisor.period: must be >= 1");
  if (min_trials < 1) throw ValidationError("supervisor.min_trials: must be >= 1");
  if (!(min_success_rate >= 0.0 && min_success_rate <= 1.0)) {
    throw ValidationError("supervisor.min_success_rate: must be in [0, 1]");
  }
}

double bad_kpi(KpiKind k, double value) {
  switch (k) {
    case KpiKind::kLoad:
      return std::max(0.0, value - 0.8) / 0.2;
    case KpiKind::kPingpong:
    case KpiKind::kHof:
      return value;
    case KpiKind::kEnergy:
      return (value - 1.0) / 1.6;
  }
  return 0.0;
}

double utility(const CellKpis& kpis, const KpiWeights& w) {
  double u = 0.0;
  for (KpiKind k : kAllKpis) u += w.get(k) * (1.0 - bad_kpi(k, kpis.get(k)));
  return u;
}

double utility(const KpiFrame& frame, std::span<const CellIndex> cells, const KpiWeights& w) {
  double sum = 0.0;
  if (cells.empty()) {
    for (const auto& c : frame.cells) sum += utility(c, w);
    return frame.cells.empty() ? 0.0 : sum / static_cast<double>(frame.cells.size());
  }
  for (CellIndex c : cells) sum += utility(frame.cells.at(static_cast<std::size_t>(c)), w);
  return sum / static_cast<double>(cells.size());
}

ResolutionOutcome record_outcome(const ResolutionAction& action,
                                 std::span<const CellIndex> scope,
                                 std::span<const KpiFrame> frames, const KpiWeights& w,
                                 Tick horizon) {
  const Tick t = action.tick;
  double before = 0.0;
  double after = 0.0;
  int nb = 0;
  int na = 0;
  for (const auto& f : frames) {
    if (f.tick > t - horizon && f.tick <= t) {
      before += utility(f, scope, w);
      ++nb;
    } else if (f.tick > t && f.tick <= t + horizon) {
      after += utility(f, scope, w);
      ++na;
    }
  }
  ResolutionOutcome o;
  o.conflict_id = action.conflict_id;
  o.cls = action.cls;
  o.strategy = action.strategy;
  o.resolved = t;
  o.recorded = t + horizon;
  o.u_before = nb > 0 ? before / nb : 0.0;
  o.u_after = na > 0 ? after / na : 0.0;
  o.delta = o.u_after - o.u_before;
  o.success = o.delta >= 0.0;
  for (const auto& v : action.verdicts) {
    if (v.verdict != Verdict::kRejected) {
      o.winner = v.app;
      break;
    }
  }
  return o;
}

void StrategyStats::record(ConflictClass c, Strategy s, bool success) {
  auto& t = counts_[{c, s}];
  ++t.trials;
  if (success) ++t.successes;
}

TrialCount StrategyStats::get(ConflictClass c, Strategy s) const {
  auto it = counts_.find({c, s});
  return it == counts_.end() ? TrialCount{} : it->second;
}

Strategy next_strategy(Strategy s) {
  switch (s) {
    case Strategy::kPrioritization:
      return Strategy::kCooldown;
    case Strategy::kCooldown:
      return Strategy::kLimitation;
    case Strategy::kLimitation:
      return Strategy::kPrioritization;
    default:
      return s;
  }
}

Adaptation adapt(const CmPolicy& policy, const StrategyStats& stats,
                 const std::map<std::string, AppUtility>& app_utility,
                 const SupervisorConfig& cfg) {
  Adaptation out{policy, {}, false};
  for (ConflictClass c : {ConflictClass::kC1, ConflictClass::kC2, ConflictClass::kC4}) {
    const Strategy cur = policy.strategy_for(c);
    const auto t = stats.get(c, cur);
    if (t.trials < cfg.min_trials || t.rate() >= cfg.min_success_rate) continue;
    const Strategy next = next_strategy(cur);
    out.policy.strategies[c] = next;
    out.reassignments.push_back({c, cur, next, t});
  }
  if (policy.dynamic_priorities) {
    std::vector<std::string> apps;
    for (const auto& [app, r] : policy.priorities) apps.push_back(app);
    for (const auto& [app, u] : app_utility) {
      if (!policy.priorities.contains(app)) apps.push_back(app);
    }
    auto mean = [&](const std::string& a) {
      auto it = app_utility.find(a);
      return it == app_utility.end() ? 0.0 : it->second.mean();
    };
    std::stable_sort(apps.begin(), apps.end(), [&](const auto& a, const auto& b) {
      const double ma = mean(a);
      const double mb = mean(b);
      if (ma != mb) return ma < mb;
      const int ra = policy.rank(a);
      const int rb = policy.rank(b);
      if (ra != rb) return ra < rb;
      return a > b;
    });
    out.policy.priorities.clear();
    for (std::size_t i = 0; i < apps.size(); ++i) {
      out.policy.priorities[apps[i]] = static_cast<int>(i) + 1;
    }
    out.ranks_changed = out.policy.priorities != policy.priorities;
  }
  return out;
}

CmPolicy align_with_policy(const CmPolicy& current, const Json& update) {
  return apply_policy_update(current, update);
}

void Supervisor::track(const ResolutionAction& action, std::vector<CellIndex> scope,
                       std::string ric) {
  pending_.push_back({action, std::move(scope), std::move(ric)});
}

std::vector<ResolutionOutcome> Supervisor::collect(Tick now, std::span<const KpiFrame> frames,
                                                   const KpiWeights& w) {
  std::vector<ResolutionOutcome> out;
  std::vector<Pending> keep;
  for (auto& p : pending_) {
    if (p.action.tick + cfg_.horizon != now) {
      keep.push_back(std::move(p));
      continue;
    }
    auto o = record_outcome(p.action, p.scope, frames, w, cfg_.horizon);
    o.ric = p.ric;
    stats_.record(o.cls, o.strategy, o.success);
    if (o.winner) {
      auto& u = app_utility_[*o.winner];
      u.sum += o.delta;
      ++u.count;
    }
    out.push_back(std::move(o));
  }
  pending_ = std::move(keep);
  return out;
}

CmReport report(const EventLog& log, Tick from, Tick to) {
  CmReport r;
  r.from = from;
  r.to = to;
  for (ConflictClass c : kAllClasses) r.conflicts[c] = 0;
  KpiWeights weights;
  std::map<std::string, AppUtility> wins;

  for (const auto& e : log.entries()) {
    if (e.tick >= to) break;
    const auto& p = e.payload;
    // Policy state is tracked from the start of the log.
    if (e.kind == EventKind::kScenarioLoaded) {
      for (const auto& ric : p.at("rics")) {
        r.policy_digest[ric.get<std::string>()] = p.at("policy_digest").get<std::string>();
      }
      weights = apply_policy_update(default_policy(), p.at("policy")).weights;
    } else if (e.kind == EventKind::kPolicyUpdated && p.at("accepted").get<bool>()) {
      r.policy_digest[p.at("ric").get<std::string>()] = p.at("digest").get<std::string>();
      weights = apply_policy_update(default_policy(), p.at("policy")).weights;
    }
    if (e.tick < from) continue;
    switch (e.kind) {
      case EventKind::kConflictDetected:
        ++r.conflicts[class_from_string(p.at("class").get<std::string>())];
        break;
      case EventKind::kDecisionGated:
        ++r.verdicts[p.at("verdict").get<std::string>()];
        break;
      case EventKind::kDecisionRejected:
        ++r.verdicts["rejected-" + p.at("reason").get<std::string>()];
        break;
      case EventKind::kOutcomeRecorded: {
        const auto o = outcome_from_json(p);
        r.stats.record(o.cls, o.strategy, o.success);
        if (o.winner) {
          auto& u = wins[*o.winner];
          u.sum += o.delta;
          ++u.count;
        }
        break;
      }
      case EventKind::kKpiSynthesized: {
        const auto f = frame_from_json(e.tick, p.at("cells"));
        r.utility.emplace_back(e.tick, utility(f, {}, weights));
        break;
      }
      case EventKind::kPolicyUpdated:
        if (p.at("trigger") == "adaptation") {
          for (const auto& x : p.at("reassignments")) {
            Reassignment ra;
            ra.cls = class_from_string(x.at("class").get<std::string>());
            ra.from = strategy_from_string(x.at("from").get<std::string>());
            ra.to = strategy_from_string(x.at("to").get<std::string>());
            ra.stats = {x.at("trials").get<int>(), x.at("successes").get<int>()};
            r.reassignments.push_back(ra);
          }
        }
        break;
      default:
        break;
    }
  }
  for (const auto& [app, u] : wins) {
    AppViability v;
    v.wins = u.count;
    v.mean_delta = u.mean();
    v.note = u.count < 3          ? "insufficient data"
             : u.mean() >= 0.0    ? "net positive utility as conflict winner"
                                  : "net negative utility as conflict winner; review configuration";
    r.viability[app] = v;
  }
  return r;
}

Json to_json(const CmReport& r) {
  Json j;
  j["interval"] = {{"from", r.from}, {"to", r.to}};
  j["conflicts"] = Json::object();
  for (const auto& [c, n] : r.conflicts) j["conflicts"][std::string(to_string(c))] = n;
  j["verdicts"] = Json::object();
  for (const auto& [v, n] : r.verdicts) j["verdicts"][v] = n;
  j["strategy_stats"] = Json::array();
  for (const auto& [key, t] : r.stats.all()) {
    j["strategy_stats"].push_back({{"class", to_string(key.first)},
                                   {"strategy", to_string(key.second)},
                                   {"trials", t.trials},
                                   {"successes", t.successes},
                                   {"success_rate", t.rate()}});
  }
  j["reassignments"] = Json::array();
  for (const auto& ra : r.reassignments) j["reassignments"].push_back(to_json(ra));
  j["policy_digest"] = Json::object();
  for (const auto& [ric, d] : r.policy_digest) j["policy_digest"][ric] = d;
  j["viability"] = Json::object();
  for (const auto& [app, v] : r.viability) {
    j["viability"][app] = {{"wins", v.wins}, {"mean_delta", v.mean_delta}, {"note", v.note}};
  }
  j["utility"] = Json::array();
  for (const auto& [t, u] : r.utility) j["utility"].push_back({t, u});
  return j;
}

}  // namespace ricsim
