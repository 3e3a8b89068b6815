#include "ricsim/json_io.hpp"

namespace ricsim {

Json to_json(const Target& t) {
  Json j{{"param", to_string(t.param)}, {"cell", t.cell}};
  if (t.neighbor != kNoCell) j["neighbor"] = t.neighbor;
  return j;
}

Target target_from_json(const Json& j) {
  Target t;
  t.param = param_from_string(j.at("param").get<std::string>());
  t.cell = j.at("cell").get<CellIndex>();
  t.neighbor = j.value("neighbor", kNoCell);
  return t;
}

Json to_json(const ControlDecision& d) {
  Json j{{"id", d.id},           {"app", d.app},     {"ric", d.ric},
         {"target", to_json(d.target)}, {"value", d.value}, {"tick", d.tick},
         {"origin", to_string(d.origin)}};
  if (!d.tag.empty()) j["tag"] = d.tag;
  if (d.prior) j["prior"] = *d.prior;
  if (d.remote) j["remote"] = true;
  return j;
}

ControlDecision decision_from_json(const Json& j) {
  ControlDecision d;
  d.id = j.at("id").get<DecisionId>();
  d.app = j.at("app").get<std::string>();
  d.ric = j.value("ric", std::string());
  d.target = target_from_json(j.at("target"));
  d.value = j.at("value").get<double>();
  d.tick = j.at("tick").get<Tick>();
  d.origin = j.value("origin", std::string("near-rt")) == "non-rt" ? LoopKind::kNonRt
                                                                   : LoopKind::kNearRt;
  d.tag = j.value("tag", std::string());
  if (j.contains("prior")) d.prior = j["prior"].get<double>();
  d.remote = j.value("remote", false);
  return d;
}

Json to_json(const PolicyConstraint& c) {
  Json j{{"id", c.id},          {"issuer", c.issuer}, {"scope", c.scope},
         {"param", to_string(c.param)}, {"bound", to_string(c.bound)}, {"value", c.value},
         {"from", c.from}};
  if (c.until) j["until"] = *c.until;
  return j;
}

PolicyConstraint constraint_from_json(const Json& j) {
  PolicyConstraint c;
  c.id = j.at("id").get<std::string>();
  c.issuer = j.value("issuer", std::string());
  c.scope = j.at("scope").get<std::vector<CellIndex>>();
  c.param = param_from_string(j.at("param").get<std::string>());
  c.bound = bound_from_string(j.at("bound").get<std::string>());
  c.value = j.at("value").get<double>();
  c.from = j.value("from", Tick{0});
  if (j.contains("until")) c.until = j["until"].get<Tick>();
  return c;
}

Json to_json(const ConflictRecord& r) {
  Json ev = Json::object();
  const auto& e = r.evidence;
  if (!e.opposing.empty()) {
    ev["opposing"] = Json::array();
    for (const auto& o : e.opposing) {
      ev["opposing"].push_back(
          {{"cell", o.cell}, {"kpi", to_string(o.kpi)}, {"sign_a", o.sign_a}, {"sign_b", o.sign_b}});
    }
  }
  if (!e.pattern.empty()) ev["pattern"] = e.pattern;
  if (e.cell) {
    ev["cell"] = *e.cell;
    ev["kpi"] = to_string(*e.kpi);
    ev["observed"] = e.observed;
    ev["baseline"] = e.baseline;
    ev["lookback_from"] = e.lookback_from;
    ev["low_confidence"] = e.low_confidence;
  }
  if (!e.violated.empty()) ev["violated"] = e.violated;
  return Json{{"id", r.id},       {"class", to_string(r.cls)}, {"ric", r.ric},
              {"tick", r.tick},   {"implicated", r.implicated}, {"scope", r.scope},
              {"evidence", ev}};
}

Json to_json(const ResolutionAction& a) {
  Json verdicts = Json::array();
  for (const auto& v : a.verdicts) {
    Json x{{"decision", v.decision}, {"app", v.app}, {"verdict", to_string(v.verdict)}};
    if (v.value) x["value"] = *v.value;
    verdicts.push_back(std::move(x));
  }
  Json cooldowns = Json::array();
  for (const auto& c : a.cooldowns) {
    cooldowns.push_back({{"app", c.app},
                         {"target", to_json(c.target)},
                         {"created", c.created},
                         {"expiry", c.expiry}});
  }
  Json tight = Json::array();
  for (const auto& t : a.tightenings) {
    tight.push_back(
        {{"app", t.app}, {"param", to_string(t.param)}, {"lo", t.range.lo}, {"hi", t.range.hi}});
  }
  return Json{{"conflict", a.conflict_id}, {"class", to_string(a.cls)},
              {"strategy", to_string(a.strategy)}, {"tick", a.tick},
              {"post_hoc", a.post_hoc},     {"verdicts", verdicts},
              {"cooldowns", cooldowns},     {"tightenings", tight}};
}

Json to_json(const ResolutionOutcome& o) {
  Json j{{"conflict", o.conflict_id}, {"ric", o.ric},         {"class", to_string(o.cls)},
         {"strategy", to_string(o.strategy)}, {"resolved", o.resolved},
         {"recorded", o.recorded},    {"u_before", o.u_before}, {"u_after", o.u_after},
         {"delta", o.delta},          {"success", o.success}};
  j["winner"] = o.winner ? Json(*o.winner) : Json(nullptr);
  return j;
}

ResolutionOutcome outcome_from_json(const Json& j) {
  ResolutionOutcome o;
  o.conflict_id = j.at("conflict").get<std::string>();
  o.ric = j.value("ric", std::string());
  o.cls = class_from_string(j.at("class").get<std::string>());
  o.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  o.resolved = j.at("resolved").get<Tick>();
  o.recorded = j.at("recorded").get<Tick>();
  o.u_before = j.at("u_before").get<double>();
  o.u_after = j.at("u_after").get<double>();
  o.delta = j.at("delta").get<double>();
  o.success = j.at("success").get<bool>();
  if (j.contains("winner") && !j["winner"].is_null()) o.winner = j["winner"].get<std::string>();
  return o;
}

Json to_json(const Reassignment& r) {
  return Json{{"class", to_string(r.cls)},
              {"from", to_string(r.from)},
              {"to", to_string(r.to)},
              {"trials", r.stats.trials},
              {"successes", r.stats.successes}};
}

Json to_json(const CmActivityReport& r) {
  Json acts = Json::array();
  for (const auto& a : r.actuations) {
    acts.push_back({{"decision", a.decision},
                    {"app", a.app},
                    {"target", to_json(a.target)},
                    {"value", a.value},
                    {"previous", a.previous},
                    {"tick", a.tick}});
  }
  Json conflicts = Json::array();
  for (const auto& [id, cls] : r.conflicts) {
    conflicts.push_back({{"id", id}, {"class", to_string(cls)}});
  }
  return Json{{"origin", r.origin},   {"published", r.published},
              {"actuations", acts},   {"conflicts", conflicts},
              {"alerts", r.alerts},   {"policy_digest", r.policy_digest}};
}

Json to_json(const KpiAlert& a) {
  Json j{{"id", a.id},       {"cell", a.cell},       {"kpi", to_string(a.kpi)},
         {"severity", to_string(a.severity)}, {"raised", a.raised}, {"trigger", a.trigger}};
  if (a.cleared) j["cleared"] = *a.cleared;
  return j;
}

Json to_json(const CellKpis& k) {
  return Json{{"load", k.load}, {"pingpong", k.pingpong}, {"hof", k.hof}, {"energy", k.energy}};
}

CellKpis cell_kpis_from_json(const Json& j) {
  return {j.at("load").get<double>(), j.at("pingpong").get<double>(), j.at("hof").get<double>(),
          j.at("energy").get<double>()};
}

Json frame_to_json(const KpiFrame& f) {
  Json cells = Json::array();
  for (const auto& c : f.cells) cells.push_back(to_json(c));
  return cells;
}

KpiFrame frame_from_json(Tick tick, const Json& cells) {
  KpiFrame f;
  f.tick = tick;
  for (const auto& c : cells) f.cells.push_back(cell_kpis_from_json(c));
  return f;
}

}  // namespace ricsim
