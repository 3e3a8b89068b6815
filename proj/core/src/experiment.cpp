#include "ricsim/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "ricsim/json_io.hpp"

namespace ricsim {

namespace {

namespace fs = std::filesystem;

void write_json(const fs::path& p, const Json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot read " + p.string());
  return Json::parse(in);
}

Json info_json(const RunInfo& i) {
  return Json{{"scenario", i.scenario},
              {"scenario_hash", i.scenario_hash},
              {"seed", i.seed},
              {"cm", i.cm},
              {"ticks", i.ticks}};
}

RunInfo info_from_json(const Json& j) {
  return RunInfo{j.at("scenario").get<std::string>(), j.at("scenario_hash").get<std::string>(),
                 j.at("seed").get<std::uint64_t>(), j.at("cm").get<bool>(),
                 j.at("ticks").get<Tick>()};
}

double mean_utility(const EventLog& log, std::uint64_t from_seq, const KpiWeights& w) {
  double sum = 0.0;
  int n = 0;
  for (const auto& e : log.since(from_seq)) {
    if (e.kind != EventKind::kKpiSynthesized) continue;
    sum += utility(frame_from_json(e.tick, e.payload.at("cells")), {}, w);
    ++n;
  }
  return n > 0 ? sum / n : 0.0;
}

// Trade-off orientation: +1 when higher is better, -1 when lower is better.
struct Tracked {
  const char* key;
  int better;
};

constexpr Tracked kTracked[] = {
    {"network.mean_utility", +1},
    {"network.kpi_means.pingpong", -1},
    {"network.kpi_means.hof", -1},
    {"network.kpi_means.energy", -1},
    {"network.load_spread", -1},
    {"network.oscillation", -1},
    {"network.contested_flips", -1},
    {"network.contested_pingpong", -1},
};

}  // namespace

RunResult run_experiment(const Scenario& scenario, bool cm_enabled) {
  SimState s = make_state(scenario, cm_enabled);
  run(s, scenario.ticks);
  RunResult r;
  r.log = std::move(s.log);
  r.metrics = compute_metrics(r.log);
  r.cm_report = report(r.log, 0, scenario.ticks);
  return r;
}

RunInfo run_info(const EventLog& log) {
  if (log.empty() || log.entries().front().kind != EventKind::kScenarioLoaded) {
    throw ValidationError("event log does not start with scenario-loaded");
  }
  const auto& p = log.entries().front().payload;
  RunInfo i;
  i.scenario = p.at("scenario").at("name").get<std::string>();
  i.scenario_hash = p.at("scenario_hash").get<std::string>();
  i.seed = p.at("seed").get<std::uint64_t>();
  i.cm = p.at("cm").get<bool>();
  i.ticks = static_cast<Tick>(std::count_if(log.entries().begin(), log.entries().end(),
                                            [](const EventLogEntry& e) {
                                              return e.kind == EventKind::kKpiSynthesized;
                                            }));
  return i;
}

void write_run(const RunResult& run, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "events.jsonl", std::ios::binary);
    run.log.write_jsonl(out);
  }
  {
    std::ofstream out(dir / "metrics.csv");
    write_metrics_csv(out, run.metrics);
  }
  write_json(dir / "metrics.json", to_json(run.metrics));
  write_json(dir / "cm_report.json", to_json(run.cm_report));
  write_json(dir / "run.json", info_json(run_info(run.log)));
}

EventLog read_events(const fs::path& dir) {
  std::ifstream in(dir / "events.jsonl", std::ios::binary);
  if (!in) throw ValidationError("cannot read " + (dir / "events.jsonl").string());
  return EventLog::read_jsonl(in);
}

std::string_view to_string(Recommendation r) {
  switch (r) {
    case Recommendation::kDeploy:
      return "deploy";
    case Recommendation::kReconfigure:
      return "reconfigure";
    case Recommendation::kReject:
      return "reject";
  }
  return "?";
}

Recommendation recommend(double delta_u, std::size_t conflicts, const AssessmentConfig& cfg,
                         std::string* rule) {
  auto set = [&](const char* r) {
    if (rule) *rule = r;
  };
  if (delta_u < cfg.reject_below) {
    set("utility delta below reject threshold");
    return Recommendation::kReject;
  }
  if (conflicts > 0 && delta_u < cfg.deploy_from) {
    set("conflicts found and utility delta below deploy threshold");
    return Recommendation::kReconfigure;
  }
  set(conflicts > 0 ? "utility delta at or above deploy threshold despite conflicts"
                    : "no conflicts and utility delta not below reject threshold");
  return Recommendation::kDeploy;
}

AssessmentReport assess_app(const SimState& live, const AppDescriptor& candidate,
                            const AssessmentConfig& cfg) {
  if (std::any_of(live.apps.begin(), live.apps.end(),
                  [&](const AppDescriptor& a) { return a.id == candidate.id; })) {
    throw ValidationError("candidate '" + candidate.id + "' is already deployed");
  }
  const auto& sc = live.config->scenario;
  sc.rics.ric(candidate.ric);

  SimState baseline = snapshot(live);
  SimState trial = snapshot(live);
  install_app(trial, candidate);
  const Tick until = live.clock + cfg.ticks;
  run(baseline, until);
  run(trial, until);

  AssessmentReport r;
  r.candidate = candidate.id;
  r.from = live.clock;
  r.ticks = cfg.ticks;
  const auto from_seq = live.log.next_seq();
  r.u_baseline = mean_utility(baseline.log, from_seq, sc.policy.weights);
  r.u_trial = mean_utility(trial.log, from_seq, sc.policy.weights);
  r.delta_u = r.u_trial - r.u_baseline;

  std::map<DecisionId, std::string> owner;
  for (const auto& e : trial.log.entries()) {
    if (e.kind == EventKind::kDecisionSubmitted) {
      owner[e.payload.at("id").get<DecisionId>()] = e.payload.at("app").get<std::string>();
    }
  }
  for (const auto& e : trial.log.since(from_seq)) {
    if (e.kind != EventKind::kConflictDetected) continue;
    const auto implicated = e.payload.at("implicated").get<std::vector<DecisionId>>();
    bool involved = false;
    std::set<std::string> others;
    for (DecisionId id : implicated) {
      auto it = owner.find(id);
      if (it == owner.end()) continue;
      if (it->second == candidate.id) {
        involved = true;
      } else {
        others.insert(it->second);
      }
    }
    if (!involved) continue;
    CandidateConflict c;
    c.id = e.payload.at("id").get<std::string>();
    c.cls = class_from_string(e.payload.at("class").get<std::string>());
    c.tick = e.tick;
    c.counterparties.assign(others.begin(), others.end());
    for (const auto& v : e.payload.at("evidence").value("violated", std::vector<std::string>{})) {
      c.counterparties.push_back(v);
    }
    ++r.by_class[c.cls];
    r.conflicts.push_back(std::move(c));
  }
  r.recommendation = recommend(r.delta_u, r.conflicts.size(), cfg, &r.rule);
  return r;
}

AssessmentReport assess_app(const Scenario& scenario, const std::string& candidate_id) {
  if (scenario.find_app(candidate_id)) {
    throw ValidationError("candidate '" + candidate_id + "' is already in the app roster");
  }
  auto it = std::find_if(scenario.candidates.begin(), scenario.candidates.end(),
                         [&](const AppDescriptor& a) { return a.id == candidate_id; });
  if (it == scenario.candidates.end()) {
    throw ValidationError("unknown candidate '" + candidate_id + "'");
  }
  const SimState live = make_state(scenario, true);
  return assess_app(live, *it, scenario.assessment);
}

Json to_json(const AssessmentReport& r) {
  Json conflicts = Json::array();
  for (const auto& c : r.conflicts) {
    conflicts.push_back({{"id", c.id},
                         {"class", to_string(c.cls)},
                         {"tick", c.tick},
                         {"counterparties", c.counterparties}});
  }
  Json by_class = Json::object();
  for (const auto& [c, n] : r.by_class) by_class[std::string(to_string(c))] = n;
  return Json{{"candidate", r.candidate},
              {"from", r.from},
              {"ticks", r.ticks},
              {"conflicts_by_class", by_class},
              {"conflicts", conflicts},
              {"u_baseline", r.u_baseline},
              {"u_trial", r.u_trial},
              {"delta_u", r.delta_u},
              {"recommendation", to_string(r.recommendation)},
              {"rule", r.rule}};
}

Comparison compare(const RunInfo& a, const MetricsReport& ma, const RunInfo& b,
                   const MetricsReport& mb) {
  if (a.scenario_hash != b.scenario_hash) {
    throw ValidationError("compare: runs use different scenarios (" + a.scenario_hash + " vs " +
                          b.scenario_hash + ")");
  }
  if (a.seed != b.seed) {
    throw ValidationError("compare: runs use different seeds (" + std::to_string(a.seed) +
                          " vs " + std::to_string(b.seed) + ")");
  }
  Comparison c;
  c.a = a;
  c.b = b;
  const auto fa = flatten_metrics(ma);
  const auto fb = flatten_metrics(mb);
  std::map<std::string, double> vb(fb.begin(), fb.end());
  std::map<std::string, double> va(fa.begin(), fa.end());
  for (const auto& [k, v] : fa) {
    if (k.rfind("network.utility.", 0) == 0) continue;  // per-tick trajectory
    auto it = vb.find(k);
    if (it != vb.end()) c.deltas.emplace_back(k, it->second - v);
  }
  for (const auto& t : kTracked) {
    auto ia = va.find(t.key);
    auto ib = vb.find(t.key);
    if (ia == va.end() || ib == vb.end()) continue;
    TradeOffRow row{t.key, ia->second, ib->second, ib->second - ia->second, "unchanged"};
    if (row.delta * t.better > 0) {
      row.outcome = "improved";
      c.improved.push_back(row.metric);
    } else if (row.delta * t.better < 0) {
      row.outcome = "deteriorated";
      c.deteriorated.push_back(row.metric);
    }
    c.trade_off.push_back(std::move(row));
  }
  return c;
}

Comparison compare_dirs(const fs::path& a, const fs::path& b) {
  return compare(info_from_json(read_json(a / "run.json")),
                 metrics_from_json(read_json(a / "metrics.json")),
                 info_from_json(read_json(b / "run.json")),
                 metrics_from_json(read_json(b / "metrics.json")));
}

Json to_json(const Comparison& c) {
  Json deltas = Json::object();
  for (const auto& [k, v] : c.deltas) deltas[k] = v;
  Json table = Json::array();
  for (const auto& r : c.trade_off) {
    table.push_back(
        {{"metric", r.metric}, {"a", r.a}, {"b", r.b}, {"delta", r.delta}, {"outcome", r.outcome}});
  }
  return Json{{"a", info_json(c.a)},
              {"b", info_json(c.b)},
              {"trade_off", table},
              {"improved", c.improved},
              {"deteriorated", c.deteriorated},
              {"deltas", deltas}};
}

}  // namespace ricsim
