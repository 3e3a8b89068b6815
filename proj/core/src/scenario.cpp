#include "ricsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ricsim {

namespace {

// Strict object reader: every key must be consumed or declared, and type
// errors name the full path.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        throw ValidationError(at(k) + ": unknown field");
      }
    }
  }

  bool has(const std::string& k) const { return j_.contains(k); }
  const Json& raw(const std::string& k) const {
    if (!has(k)) throw ValidationError(at(k) + ": required field missing");
    return j_.at(k);
  }
  std::string at(const std::string& k) const { return path_ + "." + k; }

  double num(const std::string& k, double def) const {
    if (!has(k)) return def;
    return num(k);
  }
  double num(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ValidationError(at(k) + ": expected a finite number");
    }
    return v.get<double>();
  }
  std::int64_t integer(const std::string& k, std::int64_t def) const {
    if (!has(k)) return def;
    return integer(k);
  }
  std::int64_t integer(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_number_integer()) throw ValidationError(at(k) + ": expected an integer");
    return v.get<std::int64_t>();
  }
  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    const auto& v = raw(k);
    if (!v.is_boolean()) throw ValidationError(at(k) + ": expected a boolean");
    return v.get<bool>();
  }
  std::string str(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_string()) throw ValidationError(at(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& def) const {
    return has(k) ? str(k) : def;
  }
  const Json& array(const std::string& k) const {
    const auto& v = raw(k);
    if (!v.is_array()) throw ValidationError(at(k) + ": expected an array");
    return v;
  }

 private:
  const Json& j_;
  std::string path_;
};

CellIndex cell_ref(const Json& j, const Topology& topo, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + ": expected a cell id");
  auto c = topo.find(j.get<std::string>());
  if (!c) throw ValidationError(where + ": unknown cell '" + j.get<std::string>() + "'");
  return *c;
}

std::vector<CellIndex> cell_list(const Json& j, const Topology& topo, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of cell ids");
  std::vector<CellIndex> out;
  for (const auto& x : j) out.push_back(cell_ref(x, topo, where));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ValidationError(where + ": duplicate cell");
  }
  return out;
}

Json names(const std::vector<CellIndex>& cells, const Topology& topo) {
  Json out = Json::array();
  for (CellIndex c : cells) out.push_back(topo.name(c));
  return out;
}

template <typename F>
auto enum_field(F f, const std::string& s, const std::string& where) {
  try {
    return f(s);
  } catch (const std::exception&) {
    throw ValidationError(where + ": unknown value '" + s + "'");
  }
}

Topology parse_topology(const Json& j) {
  Fields f(j, "topology");
  f.allow({"preset", "cells", "coverage_critical"});
  Topology topo;
  if (f.has("cells")) {
    if (f.has("preset")) throw ValidationError("topology: give either preset or cells");
    std::vector<CellSpec> specs;
    for (const auto& c : f.array("cells")) {
      Fields cf(c, "topology.cells[]");
      cf.allow({"id", "neighbors", "coverage_critical"});
      CellSpec s;
      s.id = cf.str("id");
      for (const auto& n : cf.array("neighbors")) {
        if (!n.is_string()) throw ValidationError("topology.cells[].neighbors: expected cell ids");
        s.neighbors.push_back(n.get<std::string>());
      }
      s.coverage_critical = cf.boolean("coverage_critical", false);
      specs.push_back(std::move(s));
    }
    topo = Topology(specs);
  } else {
    const auto preset = f.str("preset", "hex7");
    if (preset != "hex7") throw ValidationError("topology.preset: unknown preset '" + preset + "'");
    topo = Topology::hexagonal7();
  }
  if (f.has("coverage_critical")) {
    for (CellIndex c : cell_list(f.raw("coverage_critical"), topo, f.at("coverage_critical"))) {
      topo.set_coverage_critical(c, true);
    }
  }
  return topo;
}

RicTopology parse_rics(const Json* j, const Topology& topo) {
  RicTopology rics;
  std::vector<bool> explicit_boundary;
  const Json* near_rt = nullptr;
  if (j) {
    Fields f(*j, "rics");
    f.allow({"near_rt", "non_rt", "propagation_delay"});
    rics.non_rt = f.str("non_rt", "non-rt");
    rics.delay = f.integer("propagation_delay", 5);
    if (rics.delay < 0) throw ValidationError("rics.propagation_delay: must be >= 0");
    if (f.has("near_rt")) near_rt = &f.array("near_rt");
  }
  if (!near_rt) {
    if (topo.size() != 7 || !topo.find("A") || !topo.find("G")) {
      throw ValidationError("rics.near_rt: required for non-default topologies");
    }
    rics.near_rt.push_back({"ric-1", {0, 1, 2, 3}, {}});
    rics.near_rt.push_back({"ric-2", {4, 5, 6}, {}});
    explicit_boundary = {false, false};
  } else {
    for (const auto& r : *near_rt) {
      Fields rf(r, "rics.near_rt[]");
      rf.allow({"id", "cells", "boundary"});
      RicSpec spec;
      spec.id = rf.str("id");
      spec.owned = cell_list(rf.raw("cells"), topo, "rics[" + spec.id + "].cells");
      if (rf.has("boundary")) {
        spec.boundary = cell_list(rf.raw("boundary"), topo, "rics[" + spec.id + "].boundary");
      }
      explicit_boundary.push_back(rf.has("boundary"));
      rics.near_rt.push_back(std::move(spec));
    }
  }
  for (std::size_t i = 0; i < rics.near_rt.size(); ++i) {
    if (!explicit_boundary[i]) {
      rics.near_rt[i].boundary = RicTopology::derive_boundary(topo, rics.near_rt, i);
    }
  }
  rics.validate(topo);
  return rics;
}

TrafficConfig parse_traffic(const Json* j, const Topology& topo) {
  TrafficConfig t;
  double def = 0.5;
  Json base = Json::object();
  if (j) {
    Fields f(*j, "traffic");
    f.allow({"base", "default", "noise", "events"});
    def = f.num("default", 0.5);
    t.noise = f.num("noise", 0.0);
    if (t.noise < 0.0) throw ValidationError("traffic.noise: must be >= 0");
    if (f.has("base")) {
      base = f.raw("base");
      if (!base.is_object()) throw ValidationError("traffic.base: expected an object");
    }
    if (f.has("events")) {
      for (const auto& e : f.array("events")) {
        Fields ef(e, "traffic.events[]");
        ef.allow({"cell", "from", "until", "add"});
        TrafficEvent ev;
        ev.cell = cell_ref(ef.raw("cell"), topo, "traffic.events[].cell");
        ev.from = ef.integer("from");
        ev.until = ef.integer("until");
        ev.add = ef.num("add");
        if (ev.until <= ev.from) throw ValidationError("traffic.events[]: until must exceed from");
        t.events.push_back(ev);
      }
    }
  }
  t.base.assign(topo.size(), def);
  for (const auto& [name, v] : base.items()) {
    const auto c = cell_ref(Json(name), topo, "traffic.base");
    if (!v.is_number()) throw ValidationError("traffic.base." + name + ": expected a number");
    t.base[static_cast<std::size_t>(c)] = v.get<double>();
  }
  for (std::size_t i = 0; i < t.base.size(); ++i) {
    if (!(t.base[i] >= 0.0 && t.base[i] <= 1.5)) {
      throw ValidationError("traffic.base." + topo.name(static_cast<CellIndex>(i)) +
                            ": offered traffic must lie in [0, 1.5]");
    }
  }
  return t;
}

ModelCoefficients parse_coefficients(const Json* j) {
  ModelCoefficients m;
  if (!j) return m;
  Fields f(*j, "coefficients");
  f.allow({"kappa", "mu", "pp0", "pp1", "pp2", "hof0", "hof1", "hof2", "energy0", "energy1",
           "overload_knee"});
  m.kappa = f.num("kappa", m.kappa);
  m.mu = f.num("mu", m.mu);
  m.pp0 = f.num("pp0", m.pp0);
  m.pp1 = f.num("pp1", m.pp1);
  m.pp2 = f.num("pp2", m.pp2);
  m.hof0 = f.num("hof0", m.hof0);
  m.hof1 = f.num("hof1", m.hof1);
  m.hof2 = f.num("hof2", m.hof2);
  m.energy0 = f.num("energy0", m.energy0);
  m.energy1 = f.num("energy1", m.energy1);
  m.overload_knee = f.num("overload_knee", m.overload_knee);
  return m;
}

double grid_value(ParamKind p, double v, const std::string& where) {
  const auto& dom = domain_of(p);
  if (!dom.contains(v) || !dom.on_grid(v)) {
    std::ostringstream msg;
    msg << where << ": " << v << " outside the " << to_string(p) << " domain";
    throw ValidationError(msg.str());
  }
  return *dom.snap(v, dom.lo, dom.hi);
}

RanParameters parse_initial(const Json* j, const Topology& topo) {
  double cio = 0.0;
  double tx = 40.0;
  double ttt = 256.0;
  const Json* overrides = nullptr;
  if (j) {
    Fields f(*j, "initial_parameters");
    f.allow({"cio", "tx_power", "ttt", "overrides"});
    cio = grid_value(ParamKind::kCio, f.num("cio", cio), f.at("cio"));
    tx = grid_value(ParamKind::kTxPower, f.num("tx_power", tx), f.at("tx_power"));
    ttt = grid_value(ParamKind::kTtt, f.num("ttt", ttt), f.at("ttt"));
    if (f.has("overrides")) overrides = &f.array("overrides");
  }
  RanParameters params(topo.size(), cio, tx, ttt);
  if (overrides) {
    for (const auto& o : *overrides) {
      Fields of(o, "initial_parameters.overrides[]");
      of.allow({"target", "value"});
      const auto t = parse_target(of.raw("target"), topo, of.at("target"));
      params.set(t, grid_value(t.param, of.num("value"), of.at("value")));
    }
  }
  return params;
}

AppDescriptor parse_app(const Json& j, const RicTopology& rics, const std::string& where) {
  Fields f(j, where);
  f.allow({"id", "kind", "ric", "rank", "writable", "thresholds"});
  const auto id = f.str("id");
  const auto kind = enum_field(app_kind_from_string, f.str("kind"), f.at("kind"));
  const std::string default_ric =
      kind == AppKind::kCoverage ? rics.non_rt : rics.near_rt.front().id;
  const auto ric = f.str("ric", default_ric);
  const auto rank = f.integer("rank", 0);
  if (rank < 0) throw ValidationError(f.at("rank") + ": must be >= 0");
  auto app = make_app(id, kind, ric, static_cast<int>(rank));
  if (kind == AppKind::kCoverage) {
    if (ric != rics.non_rt) throw ValidationError(f.at("ric") + ": rApps run on the Non-RT RIC");
  } else {
    const bool known = std::any_of(rics.near_rt.begin(), rics.near_rt.end(),
                                   [&](const RicSpec& r) { return r.id == ric; });
    if (!known) throw ValidationError(f.at("ric") + ": unknown Near-RT RIC '" + ric + "'");
  }
  if (f.has("writable")) {
    app.writable.clear();
    for (const auto& p : f.array("writable")) {
      if (!p.is_string()) throw ValidationError(f.at("writable") + ": expected parameter names");
      app.writable.push_back(enum_field(param_from_string, p.get<std::string>(), f.at("writable")));
    }
  }
  if (f.has("thresholds")) {
    Fields tf(f.raw("thresholds"), f.at("thresholds"));
    tf.allow({"mlb_overload", "mlb_underload", "mro_pingpong", "mro_hof", "es_low_load",
              "coverage_floor", "coverage_from", "coverage_until"});
    auto& th = app.thresholds;
    th.mlb_overload = tf.num("mlb_overload", th.mlb_overload);
    th.mlb_underload = tf.num("mlb_underload", th.mlb_underload);
    th.mro_pingpong = tf.num("mro_pingpong", th.mro_pingpong);
    th.mro_hof = tf.num("mro_hof", th.mro_hof);
    th.es_low_load = tf.num("es_low_load", th.es_low_load);
    th.coverage_floor = tf.num("coverage_floor", th.coverage_floor);
    th.coverage_from = tf.integer("coverage_from", th.coverage_from);
    if (tf.has("coverage_until")) th.coverage_until = tf.integer("coverage_until");
    if (!domain_of(ParamKind::kTxPower).contains(th.coverage_floor)) {
      throw ValidationError(tf.at("coverage_floor") + ": outside the tx_power domain");
    }
  }
  return app;
}

Json app_to_json(const AppDescriptor& a) {
  Json w = Json::array();
  for (ParamKind p : a.writable) w.push_back(to_string(p));
  const auto& th = a.thresholds;
  Json t{{"mlb_overload", th.mlb_overload}, {"mlb_underload", th.mlb_underload},
         {"mro_pingpong", th.mro_pingpong}, {"mro_hof", th.mro_hof},
         {"es_low_load", th.es_low_load},   {"coverage_floor", th.coverage_floor},
         {"coverage_from", th.coverage_from}};
  if (th.coverage_until) t["coverage_until"] = *th.coverage_until;
  return Json{{"id", a.id},     {"kind", to_string(a.kind)}, {"ric", a.ric},
              {"rank", a.rank}, {"writable", w},             {"thresholds", t}};
}

DetectionConfig parse_detection(const Json* j) {
  DetectionConfig d;
  if (j) {
    Fields f(*j, "detection");
    f.allow({"window", "inter_window", "alpha", "delta", "persistence", "lookback"});
    d.window = f.integer("window", d.window);
    d.inter_window = f.integer("inter_window", d.inter_window);
    d.alpha = f.num("alpha", d.alpha);
    d.delta = f.num("delta", d.delta);
    d.persistence = static_cast<int>(f.integer("persistence", d.persistence));
    d.lookback = f.integer("lookback", d.lookback);
  }
  d.validate();
  return d;
}

std::map<KpiKind, double> kpi_map(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  std::map<KpiKind, double> out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ValidationError(where + "." + k + ": expected a number");
    out[enum_field(kpi_from_string, k, where)] = v.get<double>();
  }
  return out;
}

Json kpi_map_json(const std::map<KpiKind, double>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[std::string(to_string(k))] = v;
  return j;
}

PmonConfig parse_pmon(const Json* j) {
  PmonConfig p;
  if (j) {
    Fields f(*j, "pmon");
    f.allow({"degraded", "critical", "hysteresis", "clear_ticks", "history"});
    if (f.has("degraded")) p.degraded = kpi_map(f.raw("degraded"), f.at("degraded"));
    if (f.has("critical")) p.critical = kpi_map(f.raw("critical"), f.at("critical"));
    p.hysteresis = f.num("hysteresis", p.hysteresis);
    p.clear_ticks = static_cast<int>(f.integer("clear_ticks", p.clear_ticks));
    p.history = static_cast<std::size_t>(
        f.integer("history", static_cast<std::int64_t>(p.history)));
  }
  p.validate();
  return p;
}

SupervisorConfig parse_supervisor(const Json* j) {
  SupervisorConfig s;
  if (j) {
    Fields f(*j, "supervisor");
    f.allow({"horizon", "period", "min_trials", "min_success_rate"});
    s.horizon = f.integer("horizon", s.horizon);
    s.period = f.integer("period", s.period);
    s.min_trials = static_cast<int>(f.integer("min_trials", s.min_trials));
    s.min_success_rate = f.num("min_success_rate", s.min_success_rate);
  }
  s.validate();
  return s;
}

AssessmentConfig parse_assessment(const Json* j) {
  AssessmentConfig a;
  if (j) {
    Fields f(*j, "assessment");
    f.allow({"reject_below", "deploy_from", "ticks"});
    a.reject_below = f.num("reject_below", a.reject_below);
    a.deploy_from = f.num("deploy_from", a.deploy_from);
    a.ticks = f.integer("ticks", a.ticks);
  }
  if (a.reject_below > a.deploy_from) {
    throw ValidationError("assessment: reject_below must not exceed deploy_from");
  }
  if (a.ticks < 1) throw ValidationError("assessment.ticks: must be >= 1");
  return a;
}

const Json* opt(const Json& j, const char* key) { return j.contains(key) ? &j.at(key) : nullptr; }

}  // namespace

double TrafficConfig::offered(CellIndex c, Tick t) const {
  double v = base.at(static_cast<std::size_t>(c));
  for (const auto& e : events) {
    if (e.cell == c && t >= e.from && t < e.until) v += e.add;
  }
  return std::clamp(v, 0.0, 1.5);
}

const AppDescriptor* Scenario::find_app(std::string_view id) const {
  for (const auto& a : apps) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

Json to_json(const Target& t, const Topology& topo) {
  Json j{{"param", to_string(t.param)}, {"cell", topo.name(t.cell)}};
  if (t.neighbor != kNoCell) j["neighbor"] = topo.name(t.neighbor);
  return j;
}

Target parse_target(const Json& j, const Topology& topo, const std::string& where) {
  Fields f(j, where);
  f.allow({"param", "cell", "neighbor"});
  Target t;
  t.param = enum_field(param_from_string, f.str("param"), f.at("param"));
  t.cell = cell_ref(f.raw("cell"), topo, f.at("cell"));
  if (f.has("neighbor")) t.neighbor = cell_ref(f.raw("neighbor"), topo, f.at("neighbor"));
  if (!topo.is_valid(t)) throw ValidationError(where + ": not a parameter of the topology");
  return t;
}

Scenario parse_scenario(const Json& j) {
  Fields f(j, "scenario");
  f.allow({"schema_version", "name", "seed", "ticks", "topology", "rics", "traffic",
           "coefficients", "initial_parameters", "apps", "candidates", "policy", "detection",
           "pmon", "supervisor", "assessment", "kpi_injections", "injections", "ground_truth",
           "policy_updates", "contested", "metrics"});
  const auto version = f.integer("schema_version");
  if (version != kSchemaVersion) {
    throw ValidationError("scenario.schema_version: unsupported version " +
                          std::to_string(version));
  }
  Scenario s;
  s.name = f.str("name", "unnamed");
  const auto seed = f.integer("seed", 1);
  if (seed < 0) throw ValidationError("scenario.seed: must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  s.ticks = f.integer("ticks", 500);
  if (s.ticks < 1) throw ValidationError("scenario.ticks: must be >= 1");

  s.topo = f.has("topology") ? parse_topology(f.raw("topology")) : Topology::hexagonal7();
  s.rics = parse_rics(opt(j, "rics"), s.topo);
  s.traffic = parse_traffic(opt(j, "traffic"), s.topo);
  s.coeffs = parse_coefficients(opt(j, "coefficients"));
  s.initial = parse_initial(opt(j, "initial_parameters"), s.topo);

  std::set<std::string> ids;
  auto add_apps = [&](const char* key, std::vector<AppDescriptor>& out) {
    if (!f.has(key)) return;
    for (const auto& a : f.array(key)) {
      auto app = parse_app(a, s.rics, std::string("scenario.") + key + "[]");
      if (!ids.insert(app.id).second) {
        throw ValidationError(std::string("scenario.") + key + ": duplicate app id '" + app.id +
                              "'");
      }
      out.push_back(std::move(app));
    }
  };
  add_apps("apps", s.apps);
  add_apps("candidates", s.candidates);

  s.policy = default_policy();
  if (f.has("policy")) s.policy = apply_policy_update(s.policy, f.raw("policy"));
  for (const auto* list : {&s.apps, &s.candidates}) {
    for (const auto& a : *list) s.policy.priorities.emplace(a.id, a.rank);
  }
  for (const auto& [app, r] : s.policy.priorities) {
    if (!ids.contains(app)) throw ValidationError("policy.priorities: unknown app '" + app + "'");
  }
  for (const auto& [key, r] : s.policy.limitations) {
    if (!ids.contains(key.first)) {
      throw ValidationError("policy.limitations: unknown app '" + key.first + "'");
    }
  }
  for (const auto& a : s.policy.pipeline_order) {
    if (!ids.contains(a)) throw ValidationError("policy.pipeline_order: unknown app '" + a + "'");
  }

  s.detection = parse_detection(opt(j, "detection"));
  s.pmon = parse_pmon(opt(j, "pmon"));
  s.supervisor = parse_supervisor(opt(j, "supervisor"));
  s.assessment = parse_assessment(opt(j, "assessment"));

  if (f.has("kpi_injections")) {
    for (const auto& k : f.array("kpi_injections")) {
      Fields kf(k, "scenario.kpi_injections[]");
      kf.allow({"cell", "kpi", "from", "until", "add"});
      KpiInjection inj;
      inj.cell = cell_ref(kf.raw("cell"), s.topo, kf.at("cell"));
      inj.kpi = enum_field(kpi_from_string, kf.str("kpi"), kf.at("kpi"));
      inj.from = kf.integer("from");
      inj.until = kf.integer("until");
      inj.add = kf.num("add");
      if (inj.until <= inj.from) throw ValidationError(kf.at("until") + ": must exceed from");
      s.kpi_injections.push_back(inj);
    }
  }

  std::set<std::string> tags;
  if (f.has("injections")) {
    for (const auto& d : f.array("injections")) {
      Fields df(d, "scenario.injections[]");
      df.allow({"tick", "app", "target", "value", "tag"});
      ScriptedDecision sd;
      sd.tick = df.integer("tick");
      sd.app = df.str("app");
      if (!s.find_app(sd.app)) {
        throw ValidationError(df.at("app") + ": unknown app '" + sd.app + "'");
      }
      sd.target = parse_target(df.raw("target"), s.topo, df.at("target"));
      sd.value = df.num("value");
      sd.tag = df.str("tag", "");
      if (sd.tick < 0 || sd.tick >= s.ticks) {
        throw ValidationError(df.at("tick") + ": outside the run");
      }
      if (!sd.tag.empty() && !tags.insert(sd.tag).second) {
        throw ValidationError(df.at("tag") + ": duplicate tag '" + sd.tag + "'");
      }
      s.injections.push_back(std::move(sd));
    }
    std::stable_sort(s.injections.begin(), s.injections.end(),
                     [](const auto& a, const auto& b) { return a.tick < b.tick; });
  }

  if (f.has("ground_truth")) {
    std::set<std::string> gt_ids;
    for (const auto& g : f.array("ground_truth")) {
      Fields gf(g, "scenario.ground_truth[]");
      gf.allow({"id", "class", "window", "tags"});
      GroundTruthConflict gt;
      gt.id = gf.str("id");
      if (!gt_ids.insert(gt.id).second) {
        throw ValidationError("scenario.ground_truth: duplicate id '" + gt.id + "'");
      }
      gt.cls = enum_field(class_from_string, gf.str("class"), gf.at("class"));
      const auto& w = gf.array("window");
      if (w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer()) {
        throw ValidationError(gf.at("window") + ": expected [from, to]");
      }
      gt.from = w[0].get<Tick>();
      gt.to = w[1].get<Tick>();
      if (gt.to < gt.from) throw ValidationError(gf.at("window") + ": to precedes from");
      for (const auto& t : gf.array("tags")) {
        if (!t.is_string() || !tags.contains(t.get<std::string>())) {
          throw ValidationError(gf.at("tags") + ": unresolved injection tag " + t.dump());
        }
        gt.tags.push_back(t.get<std::string>());
      }
      s.ground_truth.push_back(std::move(gt));
    }
  }

  if (f.has("policy_updates")) {
    for (const auto& u : f.array("policy_updates")) {
      Fields uf(u, "scenario.policy_updates[]");
      uf.allow({"id", "tick", "body"});
      ScriptedPolicyUpdate pu;
      pu.id = uf.str("id");
      pu.tick = uf.integer("tick");
      pu.body = uf.raw("body");
      if (!pu.body.is_object()) throw ValidationError(uf.at("body") + ": expected an object");
      s.policy_updates.push_back(std::move(pu));
    }
    std::stable_sort(s.policy_updates.begin(), s.policy_updates.end(),
                     [](const auto& a, const auto& b) { return a.tick < b.tick; });
  }

  if (f.has("contested")) {
    Fields cf(f.raw("contested"), "scenario.contested");
    cf.allow({"target", "cell"});
    if (cf.has("target")) s.contested_target = parse_target(cf.raw("target"), s.topo, cf.at("target"));
    if (cf.has("cell")) s.contested_cell = cell_ref(cf.raw("cell"), s.topo, cf.at("cell"));
  }
  if (f.has("metrics")) {
    Fields mf(f.raw("metrics"), "scenario.metrics");
    mf.allow({"count_implicit_as_fp"});
    s.count_implicit_as_fp = mf.boolean("count_implicit_as_fp", false);
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("scenario '" + path.string() + "': " + e.what());
  }
  return parse_scenario(j);
}

Json to_json(const Scenario& s) {
  const auto& topo = s.topo;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = s.name;
  j["seed"] = s.seed;
  j["ticks"] = s.ticks;

  Json cells = Json::array();
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto c = static_cast<CellIndex>(i);
    std::vector<CellIndex> nb(topo.neighbors(c).begin(), topo.neighbors(c).end());
    cells.push_back(
        {{"id", topo.name(c)}, {"neighbors", names(nb, topo)}, {"coverage_critical", topo.coverage_critical(c)}});
  }
  j["topology"] = {{"cells", cells}};

  Json near = Json::array();
  for (const auto& r : s.rics.near_rt) {
    near.push_back({{"id", r.id}, {"cells", names(r.owned, topo)}, {"boundary", names(r.boundary, topo)}});
  }
  j["rics"] = {{"near_rt", near}, {"non_rt", s.rics.non_rt}, {"propagation_delay", s.rics.delay}};

  Json base = Json::object();
  for (std::size_t i = 0; i < topo.size(); ++i) base[topo.name(static_cast<CellIndex>(i))] = s.traffic.base[i];
  Json events = Json::array();
  for (const auto& e : s.traffic.events) {
    events.push_back({{"cell", topo.name(e.cell)}, {"from", e.from}, {"until", e.until}, {"add", e.add}});
  }
  j["traffic"] = {{"base", base}, {"noise", s.traffic.noise}, {"events", events}};

  const auto& m = s.coeffs;
  j["coefficients"] = {{"kappa", m.kappa}, {"mu", m.mu},         {"pp0", m.pp0},
                       {"pp1", m.pp1},     {"pp2", m.pp2},       {"hof0", m.hof0},
                       {"hof1", m.hof1},   {"hof2", m.hof2},     {"energy0", m.energy0},
                       {"energy1", m.energy1}, {"overload_knee", m.overload_knee}};

  // Uniform defaults are taken from cell 0; everything else is an override.
  const double cio0 = topo.size() > 1 && !topo.neighbors(0).empty()
                          ? s.initial.cio(0, topo.neighbors(0).front())
                          : 0.0;
  const double tx0 = s.initial.tx_power(0);
  const double ttt0 = s.initial.ttt(0);
  Json overrides = Json::array();
  for (const auto& t : topo.all_targets()) {
    const double v = s.initial.get(t);
    const double def = t.param == ParamKind::kCio ? cio0 : t.param == ParamKind::kTxPower ? tx0 : ttt0;
    if (v != def) overrides.push_back({{"target", to_json(t, topo)}, {"value", v}});
  }
  j["initial_parameters"] = {{"cio", cio0}, {"tx_power", tx0}, {"ttt", ttt0}, {"overrides", overrides}};

  j["apps"] = Json::array();
  for (const auto& a : s.apps) j["apps"].push_back(app_to_json(a));
  j["candidates"] = Json::array();
  for (const auto& a : s.candidates) j["candidates"].push_back(app_to_json(a));
  j["policy"] = to_json(s.policy);

  const auto& d = s.detection;
  j["detection"] = {{"window", d.window}, {"inter_window", d.inter_window}, {"alpha", d.alpha},
                    {"delta", d.delta},   {"persistence", d.persistence},   {"lookback", d.lookback}};
  j["pmon"] = {{"degraded", kpi_map_json(s.pmon.degraded)},
               {"critical", kpi_map_json(s.pmon.critical)},
               {"hysteresis", s.pmon.hysteresis},
               {"clear_ticks", s.pmon.clear_ticks},
               {"history", s.pmon.history}};
  j["supervisor"] = {{"horizon", s.supervisor.horizon},
                     {"period", s.supervisor.period},
                     {"min_trials", s.supervisor.min_trials},
                     {"min_success_rate", s.supervisor.min_success_rate}};
  j["assessment"] = {{"reject_below", s.assessment.reject_below},
                     {"deploy_from", s.assessment.deploy_from},
                     {"ticks", s.assessment.ticks}};

  j["kpi_injections"] = Json::array();
  for (const auto& k : s.kpi_injections) {
    j["kpi_injections"].push_back({{"cell", topo.name(k.cell)}, {"kpi", to_string(k.kpi)},
                                   {"from", k.from}, {"until", k.until}, {"add", k.add}});
  }
  j["injections"] = Json::array();
  for (const auto& d2 : s.injections) {
    Json x{{"tick", d2.tick}, {"app", d2.app}, {"target", to_json(d2.target, topo)}, {"value", d2.value}};
    if (!d2.tag.empty()) x["tag"] = d2.tag;
    j["injections"].push_back(std::move(x));
  }
  j["ground_truth"] = Json::array();
  for (const auto& g : s.ground_truth) {
    j["ground_truth"].push_back({{"id", g.id}, {"class", to_string(g.cls)},
                                 {"window", {g.from, g.to}}, {"tags", g.tags}});
  }
  j["policy_updates"] = Json::array();
  for (const auto& u : s.policy_updates) {
    j["policy_updates"].push_back({{"id", u.id}, {"tick", u.tick}, {"body", u.body}});
  }
  Json contested = Json::object();
  if (s.contested_target) contested["target"] = to_json(*s.contested_target, topo);
  if (s.contested_cell) contested["cell"] = topo.name(*s.contested_cell);
  j["contested"] = contested;
  j["metrics"] = {{"count_implicit_as_fp", s.count_implicit_as_fp}};
  return j;
}

std::string scenario_hash(const Scenario& s) {
  auto j = to_json(s);
  j.erase("seed");  // runs are compared on seed separately
  return digest_hex(j.dump());
}

}  // namespace ricsim
