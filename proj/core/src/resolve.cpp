#include "ricsim/resolve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ricsim {

namespace {

constexpr double kEps = 1e-9;

const std::map<Strategy, std::string_view>& strategy_names() {
  static const std::map<Strategy, std::string_view> names{
      {Strategy::kPrioritization, "prioritization"},
      {Strategy::kLimitation, "limitation"},
      {Strategy::kCooldown, "cooldown"},
      {Strategy::kProjection, "projection"},
      {Strategy::kRollback, "rollback"},
      {Strategy::kNone, "none"},
  };
  return names;
}

bool is_arbitration(Strategy s) {
  return s == Strategy::kPrioritization || s == Strategy::kCooldown ||
         s == Strategy::kLimitation;
}

std::optional<double> grid_ceil(const ParameterDomain& dom, double x) {
  return dom.on_grid(x) ? std::optional<double>(*dom.snap(x, x, x)) : dom.above(x);
}

std::optional<double> grid_floor(const ParameterDomain& dom, double x) {
  return dom.on_grid(x) ? std::optional<double>(*dom.snap(x, x, x)) : dom.below(x);
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ValidationError(where + ": unknown field '" + k + "'");
    }
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

Tick integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<Tick>();
}

template <typename F>
auto parse_enum(F f, const std::string& s, const std::string& where) {
  try {
    return f(s);
  } catch (const std::exception&) {
    throw ValidationError(where + ": unknown value '" + s + "'");
  }
}

ResolutionAction arbitrate(const ConflictRecord& conflict,
                           std::span<const ControlDecision> implicated, const CmPolicy& policy,
                           Tick now, Strategy strategy) {
  ResolutionAction a;
  a.conflict_id = conflict.id;
  a.cls = conflict.cls;
  a.strategy = strategy;
  a.tick = now;
  if (implicated.empty()) return a;
  const auto& winner = select_winner(implicated, policy);
  for (const auto& d : implicated) {
    const bool wins = d.id == winner.id;
    a.verdicts.push_back({d.id, d.app, wins ? Verdict::kAccepted : Verdict::kRejected,
                          wins ? std::optional<double>(d.value) : std::nullopt});
  }
  return a;
}

}  // namespace

std::string_view to_string(Strategy s) { return strategy_names().at(s); }

Strategy strategy_from_string(std::string_view s) {
  for (const auto& [k, v] : strategy_names()) {
    if (v == s) return k;
  }
  throw ValidationError("unknown strategy '" + std::string(s) + "'");
}

double KpiWeights::get(KpiKind k) const {
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

double& KpiWeights::at(KpiKind k) {
  switch (k) {
    case KpiKind::kLoad:
      return load;
    case KpiKind::kPingpong:
      return pingpong;
    case KpiKind::kHof:
      return hof;
    case KpiKind::kEnergy:
      break;
  }
  return energy;
}

int CmPolicy::rank(const std::string& app) const {
  auto it = priorities.find(app);
  return it == priorities.end() ? 0 : it->second;
}

Tick CmPolicy::cooldown_for(ConflictClass c) const {
  auto it = cooldown.find(c);
  return it == cooldown.end() ? kDefaultCooldown : it->second;
}

Strategy CmPolicy::strategy_for(ConflictClass c) const {
  auto it = strategies.find(c);
  if (it != strategies.end()) return it->second;
  return default_policy().strategies.at(c);
}

LimitationRange CmPolicy::range_for(const std::string& app, ParamKind p) const {
  auto it = limitations.find({app, p});
  if (it != limitations.end()) return it->second;
  const auto& dom = domain_of(p);
  return {dom.lo, dom.hi};
}

CmPolicy default_policy() {
  CmPolicy p;
  for (ConflictClass c : kAllClasses) p.cooldown[c] = CmPolicy::kDefaultCooldown;
  p.strategies = {
      {ConflictClass::kC1, Strategy::kPrioritization},
      {ConflictClass::kC2, Strategy::kCooldown},
      {ConflictClass::kC3, Strategy::kRollback},
      {ConflictClass::kC4, Strategy::kPrioritization},
      {ConflictClass::kC5, Strategy::kProjection},
  };
  return p;
}

void validate(const CmPolicy& p) {
  for (const auto& [key, r] : p.limitations) {
    const auto& dom = domain_of(key.second);
    const std::string where = "policy.limitations[" + key.first + "/" +
                              std::string(to_string(key.second)) + "]";
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
      throw ValidationError(where + ": lo must not exceed hi");
    }
    if (r.lo < dom.lo - kEps || r.hi > dom.hi + kEps) {
      throw ValidationError(where + ": range outside the parameter domain");
    }
    if (!dom.snap(r.lo, r.lo, r.hi)) throw ValidationError(where + ": range holds no grid value");
  }
  for (const auto& [c, t] : p.cooldown) {
    if (t < 1) {
      throw ValidationError("policy.cooldown[" + std::string(to_string(c)) + "]: must be >= 1");
    }
  }
  for (const auto& [c, s] : p.strategies) {
    const std::string where = "policy.strategies[" + std::string(to_string(c)) + "]";
    const bool ok = c == ConflictClass::kC3   ? s == Strategy::kRollback
                    : c == ConflictClass::kC5 ? s == Strategy::kProjection
                                              : is_arbitration(s);
    if (!ok) throw ValidationError(where + ": strategy '" + std::string(to_string(s)) +
                                   "' not applicable");
  }
  for (KpiKind k : kAllKpis) {
    const double w = p.weights.get(k);
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("policy.weights." + std::string(to_string(k)) + ": must be >= 0");
    }
  }
  std::set<std::string> seen;
  for (const auto& a : p.pipeline_order) {
    if (!seen.insert(a).second) {
      throw ValidationError("policy.pipeline_order: duplicate app '" + a + "'");
    }
  }
}

Json to_json(const CmPolicy& p) {
  Json j;
  j["conflict_avoidance"] = p.conflict_avoidance;
  j["dynamic_priorities"] = p.dynamic_priorities;
  j["priorities"] = Json::object();
  for (const auto& [app, r] : p.priorities) j["priorities"][app] = r;
  j["limitations"] = Json::array();
  for (const auto& [key, r] : p.limitations) {
    j["limitations"].push_back(
        {{"app", key.first}, {"param", to_string(key.second)}, {"lo", r.lo}, {"hi", r.hi}});
  }
  j["cooldown"] = Json::object();
  for (const auto& [c, t] : p.cooldown) j["cooldown"][std::string(to_string(c))] = t;
  j["strategies"] = Json::object();
  for (const auto& [c, s] : p.strategies) {
    j["strategies"][std::string(to_string(c))] = to_string(s);
  }
  j["pipeline_order"] = p.pipeline_order;
  j["weights"] = Json::object();
  for (KpiKind k : kAllKpis) j["weights"][std::string(to_string(k))] = p.weights.get(k);
  return j;
}

CmPolicy apply_policy_update(const CmPolicy& base, const Json& u) {
  check_keys(u,
             {"conflict_avoidance", "dynamic_priorities", "priorities", "limitations", "cooldown",
              "strategies", "pipeline_order", "weights"},
             "policy");
  CmPolicy p = base;
  if (u.contains("conflict_avoidance")) {
    if (!u["conflict_avoidance"].is_boolean()) {
      throw ValidationError("policy.conflict_avoidance: expected a boolean");
    }
    p.conflict_avoidance = u["conflict_avoidance"].get<bool>();
  }
  if (u.contains("dynamic_priorities")) {
    if (!u["dynamic_priorities"].is_boolean()) {
      throw ValidationError("policy.dynamic_priorities: expected a boolean");
    }
    p.dynamic_priorities = u["dynamic_priorities"].get<bool>();
  }
  if (u.contains("priorities")) {
    const auto& pr = u["priorities"];
    if (!pr.is_object()) throw ValidationError("policy.priorities: expected an object");
    for (const auto& [app, r] : pr.items()) {
      p.priorities[app] = static_cast<int>(integer(r, "policy.priorities." + app));
    }
  }
  if (u.contains("limitations")) {
    const auto& lims = u["limitations"];
    if (!lims.is_array()) throw ValidationError("policy.limitations: expected an array");
    p.limitations.clear();
    for (const auto& l : lims) {
      check_keys(l, {"app", "param", "lo", "hi"}, "policy.limitations[]");
      if (!l.contains("app") || !l.contains("param") || !l.contains("lo") || !l.contains("hi")) {
        throw ValidationError("policy.limitations[]: app, param, lo and hi are required");
      }
      const auto app = l["app"].get<std::string>();
      const auto param = parse_enum(param_from_string, l["param"].get<std::string>(),
                                    "policy.limitations[].param");
      p.limitations[{app, param}] = {number(l["lo"], "policy.limitations[].lo"),
                                     number(l["hi"], "policy.limitations[].hi")};
    }
  }
  if (u.contains("cooldown")) {
    const auto& cd = u["cooldown"];
    if (cd.is_number_integer()) {
      for (ConflictClass c : kAllClasses) p.cooldown[c] = cd.get<Tick>();
    } else if (cd.is_object()) {
      for (const auto& [k, v] : cd.items()) {
        p.cooldown[parse_enum(class_from_string, k, "policy.cooldown")] =
            integer(v, "policy.cooldown." + k);
      }
    } else {
      throw ValidationError("policy.cooldown: expected an integer or an object");
    }
  }
  if (u.contains("strategies")) {
    const auto& st = u["strategies"];
    if (!st.is_object()) throw ValidationError("policy.strategies: expected an object");
    for (const auto& [k, v] : st.items()) {
      if (!v.is_string()) throw ValidationError("policy.strategies." + k + ": expected a string");
      p.strategies[parse_enum(class_from_string, k, "policy.strategies")] =
          parse_enum(strategy_from_string, v.get<std::string>(), "policy.strategies." + k);
    }
  }
  if (u.contains("pipeline_order")) {
    const auto& po = u["pipeline_order"];
    if (!po.is_array()) throw ValidationError("policy.pipeline_order: expected an array");
    p.pipeline_order.clear();
    for (const auto& a : po) {
      if (!a.is_string()) throw ValidationError("policy.pipeline_order: expected app ids");
      p.pipeline_order.push_back(a.get<std::string>());
    }
  }
  if (u.contains("weights")) {
    const auto& w = u["weights"];
    if (!w.is_object()) throw ValidationError("policy.weights: expected an object");
    for (const auto& [k, v] : w.items()) {
      p.weights.at(parse_enum(kpi_from_string, k, "policy.weights")) =
          number(v, "policy.weights." + k);
    }
  }
  validate(p);
  return p;
}

std::string policy_digest(const CmPolicy& p) { return digest_hex(to_json(p).dump()); }

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kAccepted:
      return "accepted";
    case Verdict::kModified:
      return "modified";
    case Verdict::kRejected:
      return "rejected";
  }
  return "?";
}

const DecisionVerdict* ResolutionAction::verdict_for(DecisionId id) const {
  for (const auto& v : verdicts) {
    if (v.decision == id) return &v;
  }
  return nullptr;
}

bool outranks(const ControlDecision& a, const ControlDecision& b, const CmPolicy& policy) {
  const int ra = policy.rank(a.app);
  const int rb = policy.rank(b.app);
  if (ra != rb) return ra > rb;
  if (a.tick != b.tick) return a.tick < b.tick;
  if (a.app != b.app) return a.app < b.app;
  return a.id < b.id;
}

const ControlDecision& select_winner(std::span<const ControlDecision> implicated,
                                     const CmPolicy& policy) {
  const ControlDecision* best = &implicated.front();
  for (const auto& d : implicated) {
    if (outranks(d, *best, policy)) best = &d;
  }
  return *best;
}

ResolutionAction apply_prioritization(const ConflictRecord& conflict,
                                      std::span<const ControlDecision> implicated,
                                      const CmPolicy& policy, Tick now) {
  return arbitrate(conflict, implicated, policy, now, Strategy::kPrioritization);
}

ResolutionAction apply_cooldown(const ConflictRecord& conflict,
                                std::span<const ControlDecision> implicated,
                                const CmPolicy& policy, Tick now) {
  auto a = arbitrate(conflict, implicated, policy, now, Strategy::kCooldown);
  const Tick expiry = now + policy.cooldown_for(conflict.cls);
  for (const auto& d : implicated) {
    const auto* v = a.verdict_for(d.id);
    if (d.remote || v->verdict != Verdict::kRejected) continue;
    CooldownEntry e{d.app, d.target, now, expiry};
    if (std::find(a.cooldowns.begin(), a.cooldowns.end(), e) == a.cooldowns.end()) {
      a.cooldowns.push_back(e);
    }
  }
  return a;
}

ResolutionAction apply_limitation_tightening(const ConflictRecord& conflict,
                                             std::span<const ControlDecision> implicated,
                                             const CmPolicy& policy, Tick now) {
  auto a = arbitrate(conflict, implicated, policy, now, Strategy::kLimitation);
  const ControlDecision* winner = nullptr;
  for (const auto& d : implicated) {
    if (a.verdict_for(d.id)->verdict != Verdict::kRejected) {
      winner = &d;
      break;
    }
  }
  for (const auto& d : implicated) {
    const auto* v = a.verdict_for(d.id);
    if (d.remote || v->verdict != Verdict::kRejected) continue;
    const double current = d.prior.value_or(d.value);
    const int dir = d.value > current ? 1 : d.value < current ? -1 : 0;
    if (dir == 0) continue;
    // The loser may not push past the winner's value on a shared target, or
    // past the current value otherwise.
    const double bound = winner && winner->target == d.target ? winner->value : current;
    const auto& dom = domain_of(d.target.param);
    const auto base = policy.range_for(d.app, d.target.param);
    auto lo = std::optional<double>(base.lo);
    auto hi = std::optional<double>(base.hi);
    if (dir > 0) {
      hi = grid_floor(dom, std::min(base.hi, bound));
    } else {
      lo = grid_ceil(dom, std::max(base.lo, bound));
    }
    if (!lo || !hi || *lo > *hi + kEps) continue;
    const LimitationRange narrowed{*lo, *hi};
    if (narrowed == base) continue;
    const bool dup = std::any_of(a.tightenings.begin(), a.tightenings.end(), [&](const auto& t) {
      return t.app == d.app && t.param == d.target.param;
    });
    if (!dup) a.tightenings.push_back({d.app, d.target.param, narrowed});
  }
  return a;
}

LimitationResult apply_limitation(const ControlDecision& decision, const CmPolicy& policy) {
  const auto& dom = domain_of(decision.target.param);
  const auto r = policy.range_for(decision.app, decision.target.param);
  const double lo = std::max(r.lo, dom.lo);
  const double hi = std::min(r.hi, dom.hi);
  const double clamped = std::clamp(decision.value, lo, hi);
  const auto snapped = dom.snap(clamped, lo, hi);
  if (!snapped) return {decision.value, Verdict::kRejected};
  return {*snapped, *snapped == decision.value ? Verdict::kAccepted : Verdict::kModified};
}

ResolutionAction resolve_cross_loop(const ConflictRecord& conflict,
                                    const ControlDecision& decision,
                                    std::span<const PolicyConstraint> constraints,
                                    const CmPolicy& policy, Tick now) {
  ResolutionAction a;
  a.conflict_id = conflict.id;
  a.cls = ConflictClass::kC5;
  a.strategy = Strategy::kProjection;
  a.tick = now;

  const auto& dom = domain_of(decision.target.param);
  double v = decision.value;
  bool feasible = true;
  for (const auto& c : constraints) {
    if (!c.active_at(now) || !c.applies_to(decision.target) || c.satisfied_by(v)) continue;
    v = c.project(v);
  }
  // Off-grid bounds move to the nearest grid point on the admissible side.
  if (!dom.on_grid(v)) {
    std::optional<double> g;
    for (const auto& c : constraints) {
      if (!c.active_at(now) || !c.applies_to(decision.target)) continue;
      if (c.bound == BoundKind::kMin) g = grid_ceil(dom, v);
      if (c.bound == BoundKind::kMax) g = grid_floor(dom, v);
    }
    if (g) {
      v = *g;
    } else {
      feasible = false;
    }
  }
  for (const auto& c : constraints) {
    if (c.active_at(now) && c.applies_to(decision.target) && !c.satisfied_by(v)) feasible = false;
  }
  const auto range = policy.range_for(decision.app, decision.target.param);
  if (!dom.contains(v) || v < range.lo - kEps || v > range.hi + kEps) feasible = false;

  if (!feasible) {
    a.verdicts.push_back({decision.id, decision.app, Verdict::kRejected, std::nullopt});
  } else if (v == decision.value) {
    a.verdicts.push_back({decision.id, decision.app, Verdict::kAccepted, v});
  } else {
    a.verdicts.push_back({decision.id, decision.app, Verdict::kModified, v});
  }
  return a;
}

ResolutionAction resolve(const ConflictRecord& conflict,
                         std::span<const ControlDecision> implicated, const CmPolicy& policy,
                         Tick now) {
  const Strategy s = policy.strategy_for(conflict.cls);
  switch (s) {
    case Strategy::kPrioritization:
      return apply_prioritization(conflict, implicated, policy, now);
    case Strategy::kCooldown:
      return apply_cooldown(conflict, implicated, policy, now);
    case Strategy::kLimitation:
      return apply_limitation_tightening(conflict, implicated, policy, now);
    case Strategy::kRollback: {
      ResolutionAction a;
      a.conflict_id = conflict.id;
      a.cls = conflict.cls;
      a.strategy = s;
      a.tick = now;
      for (const auto& d : implicated) {
        a.verdicts.push_back({d.id, d.app, Verdict::kRejected, d.prior});
      }
      return a;
    }
    case Strategy::kProjection:
    case Strategy::kNone:
      break;
  }
  ResolutionAction a;
  a.conflict_id = conflict.id;
  a.cls = conflict.cls;
  a.strategy = Strategy::kNone;
  a.tick = now;
  return a;
}

bool CooldownTable::blocks(const std::string& app, const Target& t, Tick now) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const CooldownEntry& e) { return e.covers(app, t, now); });
}

void CooldownTable::purge(Tick now) {
  std::erase_if(entries_, [now](const CooldownEntry& e) { return e.expiry <= now; });
}

bool CriticalPipeline::update(bool critical_alert_active, Tick now) {
  if (critical_alert_active == active_) return false;
  active_ = critical_alert_active;
  if (active_) entered_ = now;
  return true;
}

std::optional<std::string> CriticalPipeline::head(const std::vector<std::string>& order,
                                                  Tick now) const {
  if (!active_ || order.empty()) return std::nullopt;
  const auto n = static_cast<Tick>(order.size());
  return order[static_cast<std::size_t>(((now - entered_) % n + n) % n)];
}

std::vector<std::string> pipeline_step(const CriticalPipeline& pipeline, const CmPolicy& policy,
                                       std::span<const AppDescriptor> apps, Tick now) {
  if (auto h = pipeline.head(policy.pipeline_order, now)) return {*h};
  std::vector<std::string> all;
  for (const auto& a : apps) all.push_back(a.id);
  return all;
}

std::string_view to_string(GateVerdict v) {
  switch (v) {
    case GateVerdict::kAccepted:
      return "accepted";
    case GateVerdict::kModified:
      return "modified";
    case GateVerdict::kUngated:
      return "ungated";
    case GateVerdict::kRejectedConflict:
      return "conflict";
    case GateVerdict::kRejectedCooldown:
      return "cooldown";
    case GateVerdict::kRejectedPipeline:
      return "pipeline";
    case GateVerdict::kRejectedPolicy:
      return "policy";
    case GateVerdict::kRejectedScope:
      return "scope";
    case GateVerdict::kRejectedDomain:
      return "domain";
  }
  return "?";
}

GateVerdict gate_verdict_from_string(std::string_view s) {
  for (auto v : {GateVerdict::kAccepted, GateVerdict::kModified, GateVerdict::kUngated,
                 GateVerdict::kRejectedConflict, GateVerdict::kRejectedCooldown,
                 GateVerdict::kRejectedPipeline, GateVerdict::kRejectedPolicy,
                 GateVerdict::kRejectedScope, GateVerdict::kRejectedDomain}) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown verdict '" + std::string(s) + "'");
}

GateResult gate(const GateInput& in, CooldownTable& cooldowns, PairSet& seen_inter_ric,
                std::uint64_t& next_conflict) {
  const CmPolicy& policy = *in.policy;
  GateResult res;
  const std::size_t n = in.pending.size();
  res.decisions.resize(n);
  std::vector<ControlDecision> work(in.pending.begin(), in.pending.end());
  std::vector<bool> alive(n, true);
  std::map<DecisionId, std::size_t> local_index;

  auto reject = [&](std::size_t i, GateVerdict v) {
    res.decisions[i].verdict = v;
    alive[i] = false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    auto& g = res.decisions[i];
    auto& d = work[i];
    local_index[d.id] = i;
    g.value = d.value;
    if (!in.topo->is_valid(d.target) || !in.rics->controls(in.ric, d.target)) {
      g.decision = d;
      reject(i, GateVerdict::kRejectedScope);
      continue;
    }
    d.prior = in.params->get(d.target);
    g.decision = d;
    if (!std::isfinite(d.value)) {
      reject(i, GateVerdict::kRejectedDomain);
      continue;
    }
    if (in.pipeline_head && *in.pipeline_head != d.app) {
      reject(i, GateVerdict::kRejectedPipeline);
      continue;
    }
    const auto lim = apply_limitation(d, policy);
    if (lim.verdict == Verdict::kRejected) {
      reject(i, GateVerdict::kRejectedPolicy);
      continue;
    }
    d.value = g.value = lim.value;
    if (cooldowns.blocks(d.app, d.target, in.now)) {
      reject(i, GateVerdict::kRejectedCooldown);
      continue;
    }
  }

  auto record = [&](ConflictRecord r) -> ConflictRecord& {
    r.id = "c" + std::to_string(++next_conflict);
    r.ric = in.ric;
    res.conflicts.push_back(std::move(r));
    return res.conflicts.back();
  };

  // C5: the Non-RT policy dominates before any intra-RIC arbitration.
  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    auto c5 = detect_cross_loop(work[i], in.constraints, in.now);
    if (!c5) continue;
    auto& r = record(std::move(*c5));
    auto action = resolve_cross_loop(r, work[i], in.constraints, policy, in.now);
    res.decisions[i].conflicts.push_back(r.id);
    const auto& v = action.verdicts.front();
    if (v.verdict == Verdict::kRejected) {
      reject(i, GateVerdict::kRejectedPolicy);
    } else {
      work[i].value = res.decisions[i].value = *v.value;
    }
    res.actions.push_back(std::move(action));
  }

  std::vector<ControlDecision> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) live.push_back(work[i]);
  }
  std::vector<ControlDecision> candidates = live;
  candidates.insert(candidates.end(), in.incumbents.begin(), in.incumbents.end());
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    return std::pair(a.tick, a.id) < std::pair(b.tick, b.id);
  });

  std::map<DecisionId, const ControlDecision*> by_id;
  for (const auto& d : candidates) by_id[d.id] = &d;
  for (const auto& d : in.virtuals) by_id.emplace(d.id, &d);

  auto touches_pending = [&](const ConflictRecord& r) {
    return std::any_of(r.implicated.begin(), r.implicated.end(), [&](DecisionId id) {
      auto it = local_index.find(id);
      return it != local_index.end() && alive[it->second];
    });
  };

  std::vector<ConflictRecord> found;
  for (auto& r : detect_direct(candidates, in.detection.window)) {
    if (touches_pending(r)) found.push_back(std::move(r));
  }
  for (auto& r : detect_indirect(candidates, *in.graph, in.detection.window)) {
    if (touches_pending(r)) found.push_back(std::move(r));
  }
  for (auto& r : detect_inter_ric(live, in.virtuals, *in.graph, in.detection.inter_window)) {
    const std::pair key(r.implicated.front(), r.implicated.back());
    if (seen_inter_ric.insert(key).second) found.push_back(std::move(r));
  }

  std::vector<bool> lost(n, false);
  for (auto& f : found) {
    auto& r = record(std::move(f));
    std::vector<ControlDecision> implicated;
    for (DecisionId id : r.implicated) implicated.push_back(*by_id.at(id));
    auto action = resolve(r, implicated, policy, in.now);
    for (const auto& v : action.verdicts) {
      auto it = local_index.find(v.decision);
      if (it == local_index.end()) continue;
      res.decisions[it->second].conflicts.push_back(r.id);
      if (v.verdict == Verdict::kRejected) lost[it->second] = true;
    }
    for (const auto& e : action.cooldowns) cooldowns.add(e);
    res.actions.push_back(std::move(action));
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    auto& g = res.decisions[i];
    if (lost[i]) {
      g.verdict = GateVerdict::kRejectedConflict;
    } else {
      g.verdict = g.value == g.decision.value ? GateVerdict::kAccepted : GateVerdict::kModified;
    }
  }
  return res;
}

}  // namespace ricsim
