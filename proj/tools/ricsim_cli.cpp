#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ricsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace ricsim;

namespace {

void write_file(const fs::path& p, const Json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

Json read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot read " + p.string());
  return Json::parse(in);
}

int cmd_run(const fs::path& scenario_path, const std::string& cm, std::optional<std::uint64_t> seed,
            const fs::path& out) {
  Scenario sc = load_scenario(scenario_path);
  if (seed) sc.seed = *seed;
  const auto result = run_experiment(sc, cm == "on");
  write_run(result, out);
  const auto& d = result.metrics.detection.total;
  std::cout << sc.name << " cm=" << cm << " seed=" << sc.seed << " ticks=" << result.metrics.ticks
            << " events=" << result.log.size() << " tp=" << d.tp << " fp=" << d.fp
            << " fn=" << d.fn << " -> " << out.string() << '\n';
  return 0;
}

int cmd_assess(const fs::path& scenario_path, const std::string& candidate, const fs::path& out) {
  const Scenario sc = load_scenario(scenario_path);
  const auto r = assess_app(sc, candidate);
  fs::create_directories(out);
  write_file(out / "assessment.json", to_json(r));
  std::cout << candidate << ": " << to_string(r.recommendation) << " (" << r.rule
            << "), conflicts=" << r.conflicts.size() << " delta_u=" << r.delta_u << '\n';
  return 0;
}

int cmd_compare(const fs::path& a, const fs::path& b, const fs::path& out) {
  const auto c = compare_dirs(a, b);
  fs::create_directories(out);
  write_file(out / "comparison.json", to_json(c));
  for (const auto& row : c.trade_off) {
    std::cout << row.metric << ": " << row.a << " -> " << row.b << " (" << row.outcome << ")\n";
  }
  return 0;
}

// Re-derives metrics and the CM report from events.jsonl and checks them
// against the stored artifacts.
int cmd_report(const fs::path& dir) {
  const EventLog log = read_events(dir);
  const auto metrics = compute_metrics(log);
  const auto info = run_info(log);
  const auto cm = report(log, 0, info.ticks);
  std::cout << to_json(cm).dump(2) << '\n';
  int status = 0;
  if (fs::exists(dir / "metrics.json") && read_file(dir / "metrics.json") != to_json(metrics)) {
    std::cerr << "metrics.json does not match the event log\n";
    status = 1;
  }
  if (fs::exists(dir / "cm_report.json") && read_file(dir / "cm_report.json") != to_json(cm)) {
    std::cerr << "cm_report.json does not match the event log\n";
    status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-RIC conflict-mitigation simulator"};
  app.require_subcommand(1);

  fs::path scenario, out, dir_a, dir_b, dir;
  std::string cm = "on", candidate;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--cm", cm, "Conflict mitigation")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out, "Output directory")->required();

  auto* assess = app.add_subcommand("assess", "Pre-deployment assessment of a candidate app");
  assess->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  assess->add_option("--candidate", candidate, "Candidate app id")->required();
  assess->add_option("--out", out, "Output directory")->required();

  auto* cmp = app.add_subcommand("compare", "Compare two runs of one scenario and seed");
  cmp->add_option("a", dir_a, "First run directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("b", dir_b, "Second run directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--out", out, "Output directory")->required();

  auto* rep = app.add_subcommand("report", "Re-derive the CM report of a run");
  rep->add_option("dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, cm, seed, out);
    if (*assess) return cmd_assess(scenario, candidate, out);
    if (*cmp) return cmd_compare(dir_a, dir_b, out);
    if (*rep) return cmd_report(dir);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
