#include "ricsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <variant>

#include "ricsim/json_io.hpp"

namespace ricsim {

namespace {

constexpr std::size_t kFrameHistory = 256;

void emit(SimState& s, EventKind kind, Json payload) {
  s.log.append(s.clock, kind, std::move(payload));
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

const RicSpec& spec_of(const SimState& s, const RicState& r) {
  return s.config->scenario.rics.ric(r.id);
}

Json with(Json base, std::initializer_list<std::pair<const char*, Json>> extra) {
  for (const auto& [k, v] : extra) base[k] = v;
  return base;
}

Json policy_event(const RicState& r, const char* trigger) {
  return Json{{"ric", r.id}, {"trigger", trigger}, {"accepted", true}};
}

void finish_policy_event(Json& j, const CmPolicy& p) {
  j["digest"] = policy_digest(p);
  j["policy"] = to_json(p);
}

void apply_mno_update(SimState& s, RicState& r, const PolicyUpdate& u) {
  Json j = policy_event(r, "mno");
  j["source"] = u.id;
  try {
    r.policy = align_with_policy(r.policy, u.body);
  } catch (const ValidationError& e) {
    j["accepted"] = false;
    j["error"] = e.what();
  }
  finish_policy_event(j, r.policy);
  emit(s, EventKind::kPolicyUpdated, std::move(j));
}

void log_conflict(SimState& s, RicState& r, const ConflictRecord& c, const char* mode) {
  emit(s, EventKind::kConflictDetected, with(to_json(c), {{"mode", mode}}));
  r.tick_conflicts.emplace_back(c.id, c.cls);
}

void log_action(SimState& s, RicState& r, const ResolutionAction& a,
                const ConflictRecord& conflict) {
  emit(s, EventKind::kResolutionApplied, with(to_json(a), {{"ric", r.id}}));
  r.supervisor.track(a, conflict.scope, r.id);
  for (const auto& e : a.cooldowns) r.cooldowns.add(e);
  r.pending_tightenings.insert(r.pending_tightenings.end(), a.tightenings.begin(),
                               a.tightenings.end());
}

void actuate(SimState& s, RicState& r, const ControlDecision& d, double value) {
  const auto& topo = s.config->scenario.topo;
  const double previous = s.params.get(d.target);
  const double stored = apply_parameter(s.params, topo, d.target, value);
  emit(s, EventKind::kDecisionActuated,
       Json{{"decision", d.id},
            {"app", d.app},
            {"ric", r.id},
            {"target", to_json(d.target)},
            {"value", stored},
            {"previous", previous}});
  ControlDecision done = d;
  done.value = stored;
  done.prior = previous;
  r.actuated.push_back(done);
  r.tick_actuations.push_back({d.id, d.app, d.target, stored, previous, s.clock});
}

// Checks every mode applies: the RIC controls the target and the value is a
// legal parameter value. Returns the rejection reason, if any.
std::optional<GateVerdict> platform_check(const SimState& s, const RicState& r,
                                          const ControlDecision& d, bool require_grid) {
  const auto& sc = s.config->scenario;
  if (!sc.topo.is_valid(d.target) || !sc.rics.controls(r.id, d.target)) {
    return GateVerdict::kRejectedScope;
  }
  const auto& dom = domain_of(d.target.param);
  if (!std::isfinite(d.value)) return GateVerdict::kRejectedDomain;
  if (require_grid && (!dom.contains(d.value) || !dom.on_grid(d.value))) {
    return GateVerdict::kRejectedDomain;
  }
  return std::nullopt;
}

void log_rejection(SimState& s, const RicState& r, const ControlDecision& d, GateVerdict v,
                   const std::vector<std::string>& conflicts) {
  emit(s, EventKind::kDecisionRejected,
       Json{{"decision", d.id},
            {"app", d.app},
            {"ric", r.id},
            {"reason", to_string(v)},
            {"conflicts", conflicts}});
}

void log_gated(SimState& s, const RicState& r, const ControlDecision& d, GateVerdict v,
               double value, const std::vector<std::string>& conflicts) {
  emit(s, EventKind::kDecisionGated,
       Json{{"decision", d.id},
            {"app", d.app},
            {"ric", r.id},
            {"verdict", to_string(v)},
            {"requested", d.value},
            {"value", value},
            {"conflicts", conflicts}});
}

ControlDecision find_decision(const RicState& r, std::span<const ControlDecision> extra,
                              DecisionId id) {
  for (const auto& d : r.actuated) {
    if (d.id == id) return d;
  }
  for (const auto& d : extra) {
    if (d.id == id) return d;
  }
  throw std::logic_error("implicated decision not found");
}

void handle_report(SimState& s, RicState& r, const Delivery& d, const CmActivityReport& rep) {
  const auto& cfg = *s.config;
  emit(s, EventKind::kReportDelivered,
       Json{{"to", r.id}, {"sent", d.sent}, {"report", to_json(rep)}});
  auto virt = materialize_virtual(rep, spec_of(s, r));
  if (cfg.cm_enabled) {
    // Remote activity reaching a RIC after its own actuation: detected and
    // resolved on record only; the local actuation stands.
    for (auto& rec : detect_inter_ric(r.actuated, virt, cfg.graph,
                                      cfg.scenario.detection.inter_window)) {
      const std::pair key(rec.implicated.front(), rec.implicated.back());
      if (!r.seen_inter_ric.insert(key).second) continue;
      rec.id = "c" + std::to_string(++s.next_conflict);
      rec.ric = r.id;
      rec.tick = s.clock;
      log_conflict(s, r, rec, "delivery");
      std::vector<ControlDecision> implicated;
      for (DecisionId id : rec.implicated) implicated.push_back(find_decision(r, virt, id));
      auto action = resolve(rec, implicated, r.policy, s.clock);
      action.post_hoc = true;
      log_action(s, r, action, rec);
    }
  }
  r.virtuals.insert(r.virtuals.end(), virt.begin(), virt.end());
}

void deliver(SimState& s) {
  for (auto& d : s.fabric.distribute(s.clock)) {
    RicState& r = s.ric(d.to);
    if (const auto* rep = std::get_if<CmActivityReport>(&d.payload)) {
      handle_report(s, r, d, *rep);
    } else if (const auto* c = std::get_if<PolicyConstraint>(&d.payload)) {
      r.constraints.push_back(*c);
      emit(s, EventKind::kConstraintDelivered,
           Json{{"to", r.id}, {"sent", d.sent}, {"constraint", to_json(*c)}});
    } else if (const auto* u = std::get_if<PolicyUpdate>(&d.payload)) {
      r.pending_updates.push_back(*u);
      emit(s, EventKind::kPolicyDelivered, Json{{"to", r.id}, {"sent", d.sent}, {"id", u->id}});
    }
  }
}

KpiFrame synthesize(SimState& s) {
  const auto& sc = s.config->scenario;
  const Tick t = s.clock;
  std::vector<double> offered(sc.topo.size());
  for (std::size_t i = 0; i < offered.size(); ++i) {
    double v = sc.traffic.offered(static_cast<CellIndex>(i), t);
    const double u = uniform01(s.rng);
    if (sc.traffic.noise > 0.0) v = std::clamp(v + sc.traffic.noise * (2.0 * u - 1.0), 0.0, 1.5);
    offered[i] = v;
  }
  std::vector<CellIndex> clamped;
  KpiFrame frame = step_kpis(sc.topo, s.params, offered, sc.coeffs, t, &clamped);
  for (const auto& inj : sc.kpi_injections) {
    if (t < inj.from || t >= inj.until) continue;
    double& v = frame.cells.at(static_cast<std::size_t>(inj.cell)).at(inj.kpi);
    v += inj.add;
    v = inj.kpi == KpiKind::kEnergy ? std::max(0.0, v) : std::clamp(v, 0.0, 1.0);
  }
  emit(s, EventKind::kKpiSynthesized, Json{{"cells", frame_to_json(frame)}, {"clamped", clamped}});
  s.frames.push_back(frame);
  if (s.frames.size() > kFrameHistory) s.frames.erase(s.frames.begin());
  return frame;
}

void monitor(SimState& s, const KpiFrame& frame) {
  for (auto& r : s.rics) {
    r.pmon.ingest(frame);
    for (const auto& ch : r.pmon.evaluate_alerts(s.clock)) {
      emit(s, ch.raised ? EventKind::kAlertRaised : EventKind::kAlertCleared,
           with(to_json(ch.alert), {{"ric", r.id}}));
    }
    if (s.config->cm_enabled && r.pipeline.update(r.pmon.critical_active(), s.clock)) {
      emit(s, EventKind::kPipelineMode,
           Json{{"ric", r.id},
                {"active", r.pipeline.active()},
                {"order", r.policy.pipeline_order}});
    }
  }
}

void non_rt(SimState& s, const KpiFrame& frame) {
  const auto& sc = s.config->scenario;
  for (const auto& u : sc.policy_updates) {
    if (u.tick != s.clock) continue;
    s.fabric.register_update({u.id, u.body}, s.clock);
    emit(s, EventKind::kPolicyIssued, Json{{"id", u.id}, {"body", u.body}});
  }
  for (const auto& app : s.apps) {
    if (app.kind != AppKind::kCoverage) continue;
    for (auto& c : issue_policy(app, sc.topo, frame, s.clock, s.issued)) {
      try {
        validate(c, sc.topo);
      } catch (const ValidationError& e) {
        emit(s, EventKind::kConstraintIssued,
             Json{{"constraint", to_json(c)}, {"accepted", false}, {"error", e.what()}});
        continue;
      }
      s.issued.push_back(c);
      s.fabric.register_policy(c, s.clock);
      emit(s, EventKind::kConstraintIssued, Json{{"constraint", to_json(c)}, {"accepted", true}});
    }
  }
  deliver(s);
}

std::vector<ControlDecision> collect_decisions(SimState& s, const RicState& r,
                                               const KpiFrame& frame) {
  const auto& sc = s.config->scenario;
  const auto& spec = spec_of(s, r);
  AppView view{&sc.topo, &s.params, &frame, std::vector<bool>(sc.topo.size(), false)};
  for (CellIndex c : spec.owned) view.visible[static_cast<std::size_t>(c)] = true;

  std::vector<ControlDecision> batch;
  for (const auto& app : s.apps) {
    if (app.ric != r.id || app.loop() != LoopKind::kNearRt) continue;
    auto mine = decide(app, view, s.clock);
    for (const auto& inj : sc.injections) {
      if (inj.tick != s.clock || inj.app != app.id) continue;
      std::erase_if(mine, [&](const ControlDecision& d) { return d.target == inj.target; });
      ControlDecision d;
      d.app = app.id;
      d.ric = app.ric;
      d.target = inj.target;
      d.value = inj.value;
      d.tick = s.clock;
      d.tag = inj.tag;
      mine.push_back(std::move(d));
    }
    for (auto& d : mine) {
      d.id = s.next_decision++;
      d.ric = r.id;
      emit(s, EventKind::kDecisionSubmitted, to_json(d));
      batch.push_back(std::move(d));
    }
  }
  return batch;
}

void detect_degradation(SimState& s, RicState& r) {
  const auto& cfg = *s.config;
  const auto& spec = spec_of(s, r);
  auto records = detect_implicit(r.pmon.history(), r.pmon.baselines(), r.actuated, cfg.graph,
                                 spec.owned, s.clock, cfg.scenario.detection);
  for (auto& rec : records) {
    rec.id = "c" + std::to_string(++s.next_conflict);
    rec.ric = r.id;
    log_conflict(s, r, rec, "monitor");
    if (r.policy.conflict_avoidance || rec.implicated.empty()) continue;
    // Post-hoc mode: restore each implicated parameter to its value before the
    // earliest implicated decision.
    std::vector<ControlDecision> implicated;
    for (DecisionId id : rec.implicated) implicated.push_back(find_decision(r, {}, id));
    auto action = resolve(rec, implicated, r.policy, s.clock);
    log_action(s, r, action, rec);
    std::map<Target, const ControlDecision*> earliest;
    for (const auto& d : implicated) {
      auto [it, fresh] = earliest.emplace(d.target, &d);
      if (!fresh && d.id < it->second->id) it->second = &d;
    }
    for (const auto& [target, d] : earliest) {
      const double previous = s.params.get(target);
      if (!d->prior || *d->prior == previous) continue;
      const double stored = apply_parameter(s.params, cfg.scenario.topo, target, *d->prior);
      emit(s, EventKind::kDecisionActuated,
           Json{{"decision", d->id},
                {"app", d->app},
                {"ric", r.id},
                {"target", to_json(target)},
                {"value", stored},
                {"previous", previous},
                {"rollback", rec.id}});
    }
  }
}

void ungated(SimState& s, RicState& r, const std::vector<ControlDecision>& batch) {
  for (const auto& d : batch) {
    if (auto v = platform_check(s, r, d, true)) {
      log_rejection(s, r, d, *v, {});
      continue;
    }
    log_gated(s, r, d, GateVerdict::kUngated, d.value, {});
    actuate(s, r, d, d.value);
  }
}

// Conflict-avoidance off: actuate first, detect afterwards on record.
void post_hoc(SimState& s, RicState& r, const std::vector<ControlDecision>& batch) {
  const auto& cfg = *s.config;
  const auto first = r.actuated.size();
  ungated(s, r, batch);
  std::vector<ControlDecision> fresh(r.actuated.begin() + static_cast<std::ptrdiff_t>(first),
                                     r.actuated.end());
  std::vector<ConflictRecord> found;
  const Tick w = cfg.scenario.detection.window;
  std::vector<ControlDecision> bucket;
  for (const auto& d : r.actuated) {
    if (window_bucket(d.tick, w) == window_bucket(s.clock, w)) bucket.push_back(d);
  }
  auto has_fresh = [&](const ConflictRecord& c) {
    return std::any_of(c.implicated.begin(), c.implicated.end(), [&](DecisionId id) {
      return std::any_of(fresh.begin(), fresh.end(),
                         [&](const ControlDecision& d) { return d.id == id; });
    });
  };
  for (auto& c : detect_direct(bucket, w)) {
    if (has_fresh(c)) found.push_back(std::move(c));
  }
  for (auto& c : detect_indirect(bucket, cfg.graph, w)) {
    if (has_fresh(c)) found.push_back(std::move(c));
  }
  for (auto& c : detect_inter_ric(fresh, r.virtuals, cfg.graph, cfg.scenario.detection.inter_window)) {
    if (r.seen_inter_ric.insert({c.implicated.front(), c.implicated.back()}).second) {
      found.push_back(std::move(c));
    }
  }
  for (const auto& d : fresh) {
    if (auto c = detect_cross_loop(d, r.constraints, s.clock)) found.push_back(std::move(*c));
  }
  for (auto& c : found) {
    c.id = "c" + std::to_string(++s.next_conflict);
    c.ric = r.id;
    c.tick = s.clock;
    log_conflict(s, r, c, "post-hoc");
  }
}

void gated(SimState& s, RicState& r, const std::vector<ControlDecision>& batch) {
  const auto& cfg = *s.config;
  const auto& sc = cfg.scenario;
  std::vector<ControlDecision> incumbents;
  for (const auto& d : r.actuated) {
    if (window_bucket(d.tick, sc.detection.window) == window_bucket(s.clock, sc.detection.window)) {
      incumbents.push_back(d);
    }
  }
  GateInput in;
  in.pending = batch;
  in.incumbents = incumbents;
  in.virtuals = r.virtuals;
  in.policy = &r.policy;
  in.constraints = r.constraints;
  in.params = &s.params;
  in.topo = &sc.topo;
  in.graph = &cfg.graph;
  in.rics = &sc.rics;
  in.ric = r.id;
  in.pipeline_head = r.pipeline.head(r.policy.pipeline_order, s.clock);
  in.detection = sc.detection;
  in.now = s.clock;

  auto res = gate(in, r.cooldowns, r.seen_inter_ric, s.next_conflict);
  for (std::size_t i = 0; i < res.conflicts.size(); ++i) {
    log_conflict(s, r, res.conflicts[i], "gate");
    log_action(s, r, res.actions[i], res.conflicts[i]);
  }
  for (const auto& g : res.decisions) {
    if (is_rejection(g.verdict)) {
      log_rejection(s, r, g.decision, g.verdict, g.conflicts);
    } else {
      log_gated(s, r, g.decision, g.verdict, g.value, g.conflicts);
    }
  }
  for (const auto& g : res.decisions) {
    if (!is_rejection(g.verdict)) actuate(s, r, g.decision, g.value);
  }
}

void publish(SimState& s) {
  const bool peers = s.rics.size() > 1;
  for (auto& r : s.rics) {
    CmActivityReport rep;
    rep.origin = r.id;
    rep.published = s.clock;
    rep.actuations = std::move(r.tick_actuations);
    rep.conflicts = std::move(r.tick_conflicts);
    for (const auto& a : r.pmon.active()) rep.alerts.push_back(a.id);
    rep.policy_digest = policy_digest(r.policy);
    r.tick_actuations.clear();
    r.tick_conflicts.clear();
    if (!peers) continue;
    s.fabric.publish(rep);
    emit(s, EventKind::kReportPublished, to_json(rep));
  }
}

void supervise(SimState& s) {
  const auto& sc = s.config->scenario;
  const Tick t = s.clock;
  for (auto& r : s.rics) {
    for (const auto& o : r.supervisor.collect(t, s.frames, r.policy.weights)) {
      emit(s, EventKind::kOutcomeRecorded, to_json(o));
    }
    if (!r.pending_tightenings.empty()) {
      Json tight = Json::array();
      for (const auto& x : r.pending_tightenings) {
        r.policy.limitations[{x.app, x.param}] = x.range;
        tight.push_back(
            {{"app", x.app}, {"param", to_string(x.param)}, {"lo", x.range.lo}, {"hi", x.range.hi}});
      }
      r.pending_tightenings.clear();
      Json j = policy_event(r, "tightening");
      j["tightenings"] = tight;
      finish_policy_event(j, r.policy);
      emit(s, EventKind::kPolicyUpdated, std::move(j));
    }
    if (s.config->cm_enabled && r.supervisor.adaptation_due(t)) {
      auto ad = adapt(r.policy, r.supervisor.stats(), r.supervisor.app_utility(),
                      r.supervisor.config());
      if (!ad.reassignments.empty() || ad.ranks_changed) {
        r.policy = ad.policy;
        Json j = policy_event(r, "adaptation");
        j["reassignments"] = Json::array();
        for (const auto& ra : ad.reassignments) j["reassignments"].push_back(to_json(ra));
        j["ranks_changed"] = ad.ranks_changed;
        finish_policy_event(j, r.policy);
        emit(s, EventKind::kPolicyUpdated, std::move(j));
      }
    }
    const auto& det = sc.detection;
    const Tick keep = std::max({det.lookback, det.inter_window, det.window});
    std::erase_if(r.actuated, [&](const ControlDecision& d) { return d.tick <= t - keep; });
    std::erase_if(r.virtuals,
                  [&](const ControlDecision& d) { return d.tick <= t + 1 - det.inter_window; });
  }
}

}  // namespace

SimConfig::SimConfig(Scenario s, bool cm)
    : scenario(std::move(s)), graph(dependency_graph(scenario.topo)), cm_enabled(cm) {}

RicState& SimState::ric(std::string_view id) {
  for (auto& r : rics) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("unknown RIC '" + std::string(id) + "'");
}

const RicState& SimState::ric(std::string_view id) const {
  for (const auto& r : rics) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("unknown RIC '" + std::string(id) + "'");
}

SimState make_state(std::shared_ptr<const SimConfig> config) {
  const auto& sc = config->scenario;
  SimState s;
  s.config = config;
  s.params = sc.initial;
  s.apps = sc.apps;
  std::sort(s.apps.begin(), s.apps.end(),
            [](const AppDescriptor& a, const AppDescriptor& b) { return a.id < b.id; });
  for (const auto& spec : sc.rics.near_rt) {
    RicState r;
    r.id = spec.id;
    r.policy = sc.policy;
    r.pmon = Pmon(spec.id, spec.owned, sc.topo.size(), sc.pmon, sc.detection.alpha,
                  sc.detection.delta);
    r.supervisor = Supervisor(sc.supervisor);
    s.rics.push_back(std::move(r));
  }
  s.fabric = Fabric(sc.rics);
  s.rng.seed(sc.seed);

  Json rics = Json::array();
  for (const auto& r : s.rics) rics.push_back(r.id);
  Json cells = Json::array();
  for (std::size_t i = 0; i < sc.topo.size(); ++i) cells.push_back(sc.topo.name(static_cast<CellIndex>(i)));
  emit(s, EventKind::kScenarioLoaded,
       Json{{"scenario", to_json(sc)},
            {"scenario_hash", scenario_hash(sc)},
            {"seed", sc.seed},
            {"cm", config->cm_enabled},
            {"cells", cells},
            {"rics", rics},
            {"policy", to_json(sc.policy)},
            {"policy_digest", policy_digest(sc.policy)}});
  return s;
}

SimState make_state(const Scenario& scenario, bool cm_enabled) {
  return make_state(std::make_shared<const SimConfig>(scenario, cm_enabled));
}

void step(SimState& s) {
  const bool cm = s.config->cm_enabled;
  for (auto& r : s.rics) {
    for (const auto& u : r.pending_updates) apply_mno_update(s, r, u);
    r.pending_updates.clear();
  }
  const KpiFrame frame = synthesize(s);
  monitor(s, frame);
  non_rt(s, frame);

  std::vector<std::vector<ControlDecision>> batches;
  for (const auto& r : s.rics) batches.push_back(collect_decisions(s, r, frame));

  for (std::size_t i = 0; i < s.rics.size(); ++i) {
    RicState& r = s.rics[i];
    r.cooldowns.purge(s.clock);
    if (!cm) {
      ungated(s, r, batches[i]);
      continue;
    }
    detect_degradation(s, r);
    if (r.policy.conflict_avoidance) {
      gated(s, r, batches[i]);
    } else {
      post_hoc(s, r, batches[i]);
    }
  }

  publish(s);
  deliver(s);
  supervise(s);
  ++s.clock;
}

void run(SimState& s, Tick until) {
  if (until < s.clock) {
    throw std::invalid_argument("run: until " + std::to_string(until) + " precedes current tick " +
                                std::to_string(s.clock));
  }
  while (s.clock < until) step(s);
}

SimState snapshot(const SimState& s) { return s; }

void install_app(SimState& s, const AppDescriptor& app) {
  const bool dup = std::any_of(s.apps.begin(), s.apps.end(),
                               [&](const AppDescriptor& a) { return a.id == app.id; });
  if (dup) throw ValidationError("app id '" + app.id + "' already installed");
  s.apps.push_back(app);
  std::sort(s.apps.begin(), s.apps.end(),
            [](const AppDescriptor& a, const AppDescriptor& b) { return a.id < b.id; });
  for (auto& r : s.rics) r.policy.priorities.emplace(app.id, app.rank);
}

}  // namespace ricsim
