#include "ricsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "ricsim/json_io.hpp"

namespace ricsim {

namespace {

double ratio(int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; }

struct Submitted {
  Tick tick = 0;
  std::string tag;
};

struct Detected {
  std::string id;
  ConflictClass cls = ConflictClass::kC1;
  Tick tick = 0;
  std::vector<DecisionId> implicated;
  bool low_confidence = false;
};

Json counts_json(const DetectionCounts& c) {
  return Json{{"tp", c.tp},           {"fp", c.fp},           {"fn", c.fn},
              {"fp_rate", c.fp_rate}, {"fn_rate", c.fn_rate}, {"mean_latency", c.mean_latency}};
}

DetectionCounts counts_from_json(const Json& j) {
  DetectionCounts c;
  c.tp = j.at("tp").get<int>();
  c.fp = j.at("fp").get<int>();
  c.fn = j.at("fn").get<int>();
  c.fp_rate = j.at("fp_rate").get<double>();
  c.fn_rate = j.at("fn_rate").get<double>();
  c.mean_latency = j.at("mean_latency").get<double>();
  return c;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, double>>& out) {
  auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, key(k), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], key(std::to_string(i)), out);
  } else if (j.is_boolean()) {
    out.emplace_back(prefix, j.get<bool>() ? 1.0 : 0.0);
  } else if (j.is_number()) {
    out.emplace_back(prefix, j.get<double>());
  }
}

}  // namespace

DetectionCounts with_rates(int tp, int fp, int fn, double mean_latency) {
  DetectionCounts c;
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.fp_rate = ratio(fp, fp + tp);
  c.fn_rate = ratio(fn, fn + tp);
  c.mean_latency = mean_latency;
  return c;
}

std::string target_key(const Target& t, const Topology& topo) {
  std::string k = std::string(to_string(t.param)) + ":" + topo.name(t.cell);
  if (t.neighbor != kNoCell) k += "->" + topo.name(t.neighbor);
  return k;
}

DetectionMetrics compute_detection_metrics(const EventLog& log,
                                           std::span<const GroundTruthConflict> truth,
                                           Tick ticks_run, bool count_implicit_as_fp) {
  std::map<DecisionId, Submitted> submitted;
  std::vector<Detected> detected;
  for (const auto& e : log.entries()) {
    if (e.kind == EventKind::kDecisionSubmitted) {
      submitted[e.payload.at("id").get<DecisionId>()] =
          Submitted{e.payload.at("tick").get<Tick>(), e.payload.value("tag", std::string())};
    } else if (e.kind == EventKind::kConflictDetected) {
      Detected d;
      d.id = e.payload.at("id").get<std::string>();
      d.cls = class_from_string(e.payload.at("class").get<std::string>());
      d.tick = e.tick;
      d.implicated = e.payload.at("implicated").get<std::vector<DecisionId>>();
      d.low_confidence = e.payload.at("evidence").value("low_confidence", false);
      detected.push_back(std::move(d));
    }
  }

  auto covers = [&](const Detected& d, const GroundTruthConflict& g) {
    if (d.cls != g.cls || d.tick < g.from || d.tick > g.to) return false;
    return std::all_of(g.tags.begin(), g.tags.end(), [&](const std::string& tag) {
      return std::any_of(d.implicated.begin(), d.implicated.end(), [&](DecisionId id) {
        auto it = submitted.find(id);
        return it != submitted.end() && it->second.tag == tag;
      });
    });
  };

  DetectionMetrics m;
  m.empty_ground_truth = truth.empty();
  std::map<ConflictClass, int> tp, fp, fn;
  std::map<ConflictClass, std::pair<double, int>> latency;
  std::set<std::size_t> matched;

  for (const auto& g : truth) {
    GroundTruthMatch gm;
    gm.id = g.id;
    gm.cls = g.cls;
    gm.elapsed = g.to < ticks_run;
    for (std::size_t i = 0; i < detected.size(); ++i) {
      if (!covers(detected[i], g)) continue;
      matched.insert(i);
      if (gm.detected_by) continue;
      const auto& d = detected[i];
      Tick first = d.tick;
      for (DecisionId id : d.implicated) {
        auto it = submitted.find(id);
        if (it != submitted.end()) first = std::min(first, it->second.tick);
      }
      gm.detected_by = d.id;
      gm.latency = d.tick - first;
    }
    if (gm.elapsed) {
      if (gm.detected_by) {
        ++tp[g.cls];
        latency[g.cls].first += static_cast<double>(*gm.latency);
        ++latency[g.cls].second;
      } else {
        ++fn[g.cls];
      }
    }
    m.matches.push_back(std::move(gm));
  }

  for (std::size_t i = 0; i < detected.size(); ++i) {
    const auto& d = detected[i];
    if (d.cls == ConflictClass::kC3) ++m.implicit_records;
    if (matched.count(i)) continue;
    if (d.cls == ConflictClass::kC3 && (!count_implicit_as_fp || d.low_confidence)) {
      ++m.implicit_excluded;
      continue;
    }
    ++fp[d.cls];
  }

  int ttp = 0, tfp = 0, tfn = 0, tlat_n = 0;
  double tlat = 0.0;
  for (ConflictClass c : kAllClasses) {
    const auto [lsum, ln] = latency[c];
    m.by_class[c] = with_rates(tp[c], fp[c], fn[c], ln > 0 ? lsum / ln : 0.0);
    ttp += tp[c];
    tfp += fp[c];
    tfn += fn[c];
    tlat += lsum;
    tlat_n += ln;
  }
  m.total = with_rates(ttp, tfp, tfn, tlat_n > 0 ? tlat / tlat_n : 0.0);
  return m;
}

MetricsReport compute_metrics(const EventLog& log) {
  const auto entries = log.entries();
  if (entries.empty() || entries.front().kind != EventKind::kScenarioLoaded) {
    throw ValidationError("event log does not start with scenario-loaded");
  }
  const Scenario sc = parse_scenario(entries.front().payload.at("scenario"));
  const auto& topo = sc.topo;

  MetricsReport m;
  std::vector<KpiFrame> frames;
  std::map<std::string, Tick> detected_at;
  double ttr_sum = 0.0;
  std::map<std::string, std::pair<int, int>> direction;  // key -> (last sign, flips)
  std::vector<std::string> order;

  for (const auto& e : entries) {
    switch (e.kind) {
      case EventKind::kKpiSynthesized:
        frames.push_back(frame_from_json(e.tick, e.payload.at("cells")));
        break;
      case EventKind::kConflictDetected:
        detected_at.emplace(e.payload.at("id").get<std::string>(), e.tick);
        break;
      case EventKind::kResolutionApplied: {
        auto it = detected_at.find(e.payload.at("conflict").get<std::string>());
        if (it != detected_at.end()) ttr_sum += static_cast<double>(e.tick - it->second);
        ++m.resolution.resolutions;
        break;
      }
      case EventKind::kDecisionGated:
        ++m.resolution.verdicts[e.payload.at("verdict").get<std::string>()];
        break;
      case EventKind::kDecisionRejected:
        ++m.resolution.verdicts["rejected-" + e.payload.at("reason").get<std::string>()];
        break;
      case EventKind::kDecisionActuated: {
        ++m.network.actuations;
        const auto key = target_key(target_from_json(e.payload.at("target")), topo);
        const double diff =
            e.payload.at("value").get<double>() - e.payload.at("previous").get<double>();
        const int sign = diff > 0 ? 1 : diff < 0 ? -1 : 0;
        auto [it, fresh] = direction.emplace(key, std::pair{0, 0});
        if (fresh) order.push_back(key);
        if (sign != 0) {
          if (it->second.first != 0 && it->second.first != sign) ++it->second.second;
          it->second.first = sign;
        }
        break;
      }
      default:
        break;
    }
  }

  m.ticks = static_cast<Tick>(frames.size());
  m.detection =
      compute_detection_metrics(log, sc.ground_truth, m.ticks, sc.count_implicit_as_fp);
  m.resolution.mean_time_to_resolve =
      m.resolution.resolutions > 0 ? ttr_sum / m.resolution.resolutions : 0.0;

  auto& net = m.network;
  const double per100 = m.ticks > 0 ? 100.0 / static_cast<double>(m.ticks) : 0.0;
  int flips = 0;
  for (const auto& key : order) {
    net.flips[key] = direction[key].second;
    flips += direction[key].second;
  }
  net.oscillation = order.empty() ? 0.0 : flips * per100 / static_cast<double>(order.size());
  if (sc.contested_target) {
    auto it = net.flips.find(target_key(*sc.contested_target, topo));
    net.contested_flips = (it == net.flips.end() ? 0 : it->second) * per100;
  }

  std::map<KpiKind, double> sums;
  double spread = 0.0, contested = 0.0, usum = 0.0;
  std::size_t samples = 0;
  for (const auto& f : frames) {
    const double u = utility(f, {}, sc.policy.weights);
    net.utility.push_back(u);
    usum += u;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : f.cells) {
      for (KpiKind k : kAllKpis) sums[k] += c.get(k);
      lo = std::min(lo, c.load);
      hi = std::max(hi, c.load);
    }
    samples += f.cells.size();
    if (!f.cells.empty()) spread += hi - lo;
    if (sc.contested_cell) contested += f.value(*sc.contested_cell, KpiKind::kPingpong);
  }
  const double n = static_cast<double>(frames.size());
  for (KpiKind k : kAllKpis) {
    net.kpi_means[k] = samples > 0 ? sums[k] / static_cast<double>(samples) : 0.0;
  }
  net.mean_utility = frames.empty() ? 0.0 : usum / n;
  net.load_spread = frames.empty() ? 0.0 : spread / n;
  if (sc.contested_cell) net.contested_pingpong = frames.empty() ? 0.0 : contested / n;
  return m;
}

Json to_json(const MetricsReport& m) {
  Json classes = Json::object();
  for (const auto& [c, counts] : m.detection.by_class) {
    classes[std::string(to_string(c))] = counts_json(counts);
  }
  Json matches = Json::array();
  for (const auto& g : m.detection.matches) {
    matches.push_back({{"id", g.id},
                       {"class", to_string(g.cls)},
                       {"elapsed", g.elapsed},
                       {"detected_by", optional_json(g.detected_by)},
                       {"latency", optional_json(g.latency)}});
  }
  Json kpis = Json::object();
  for (const auto& [k, v] : m.network.kpi_means) kpis[std::string(to_string(k))] = v;
  Json flips = Json::object();
  for (const auto& [k, v] : m.network.flips) flips[k] = v;
  Json verdicts = Json::object();
  for (const auto& [k, v] : m.resolution.verdicts) verdicts[k] = v;

  return Json{
      {"ticks", m.ticks},
      {"detection",
       {{"classes", classes},
        {"total", counts_json(m.detection.total)},
        {"implicit_records", m.detection.implicit_records},
        {"implicit_excluded", m.detection.implicit_excluded},
        {"empty_ground_truth", m.detection.empty_ground_truth},
        {"matches", matches}}},
      {"resolution",
       {{"resolutions", m.resolution.resolutions},
        {"mean_time_to_resolve", m.resolution.mean_time_to_resolve},
        {"verdicts", verdicts}}},
      {"network",
       {{"mean_utility", m.network.mean_utility},
        {"kpi_means", kpis},
        {"load_spread", m.network.load_spread},
        {"actuations", m.network.actuations},
        {"oscillation", m.network.oscillation},
        {"contested_flips", optional_json(m.network.contested_flips)},
        {"contested_pingpong", optional_json(m.network.contested_pingpong)},
        {"flips", flips},
        {"utility", m.network.utility}}},
  };
}

MetricsReport metrics_from_json(const Json& j) {
  MetricsReport m;
  m.ticks = j.at("ticks").get<Tick>();
  const auto& d = j.at("detection");
  for (const auto& [c, v] : d.at("classes").items()) {
    m.detection.by_class[class_from_string(c)] = counts_from_json(v);
  }
  m.detection.total = counts_from_json(d.at("total"));
  m.detection.implicit_records = d.at("implicit_records").get<int>();
  m.detection.implicit_excluded = d.at("implicit_excluded").get<int>();
  m.detection.empty_ground_truth = d.at("empty_ground_truth").get<bool>();
  for (const auto& g : d.at("matches")) {
    GroundTruthMatch gm;
    gm.id = g.at("id").get<std::string>();
    gm.cls = class_from_string(g.at("class").get<std::string>());
    gm.elapsed = g.at("elapsed").get<bool>();
    gm.detected_by = optional_from<std::string>(g.at("detected_by"));
    gm.latency = optional_from<Tick>(g.at("latency"));
    m.detection.matches.push_back(std::move(gm));
  }
  const auto& r = j.at("resolution");
  m.resolution.resolutions = r.at("resolutions").get<int>();
  m.resolution.mean_time_to_resolve = r.at("mean_time_to_resolve").get<double>();
  for (const auto& [k, v] : r.at("verdicts").items()) m.resolution.verdicts[k] = v.get<int>();
  const auto& n = j.at("network");
  m.network.mean_utility = n.at("mean_utility").get<double>();
  for (const auto& [k, v] : n.at("kpi_means").items()) {
    m.network.kpi_means[kpi_from_string(k)] = v.get<double>();
  }
  m.network.load_spread = n.at("load_spread").get<double>();
  m.network.actuations = n.at("actuations").get<int>();
  m.network.oscillation = n.at("oscillation").get<double>();
  m.network.contested_flips = optional_from<double>(n.at("contested_flips"));
  m.network.contested_pingpong = optional_from<double>(n.at("contested_pingpong"));
  for (const auto& [k, v] : n.at("flips").items()) m.network.flips[k] = v.get<int>();
  m.network.utility = n.at("utility").get<std::vector<double>>();
  return m;
}

std::vector<std::pair<std::string, double>> flatten_metrics(const MetricsReport& m) {
  std::vector<std::pair<std::string, double>> out;
  flatten(to_json(m), "", out);
  return out;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& m) {
  out << "metric,value\n";
  char buf[64];
  for (const auto& [k, v] : flatten_metrics(m)) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << k << ',' << buf << '\n';
  }
}

std::vector<std::pair<std::string, double>> read_metrics_csv(std::istream& in) {
  std::vector<std::pair<std::string, double>> rows;
  std::string line;
  if (!std::getline(in, line) || line != "metric,value") {
    throw ValidationError("metrics csv: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw ValidationError("metrics csv: malformed row '" + line + "'");
    rows.emplace_back(line.substr(0, comma), std::strtod(line.c_str() + comma + 1, nullptr));
  }
  return rows;
}

}  // namespace ricsim
