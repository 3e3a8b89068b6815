// Renders docs/traceability.md from docs/traceability.json and fails when the
// mapping references a test that does not exist or leaves a module unmapped.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> ScanUnitTests(const fs::path& dir) {
  static const std::regex kTest(R"(\bTEST(?:_F)?\(\s*(\w+)\s*,\s*(\w+)\s*\))");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".cpp") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::set<std::string> ids;
  for (const auto& f : files) {
    const std::string text = ReadFile(f);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), kTest);
         it != std::sregex_iterator(); ++it) {
      ids.insert((*it)[1].str() + "." + (*it)[2].str());
    }
  }
  return ids;
}

// Criterion names in the order the acceptance binary numbers them.
std::vector<std::string> ScanCriteria(const fs::path& file) {
  static const std::regex kEntry(R"re(\{"([^"]+)",\s*\w+\},?\s*$)re");
  std::vector<std::string> names;
  std::istringstream in(ReadFile(file));
  std::string line;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line.find("criteria") != std::string::npos && line.find('{') != std::string::npos) {
      inside = true;
      continue;
    }
    if (!inside) continue;
    std::smatch m;
    if (std::regex_search(line, m, kEntry)) {
      names.push_back(m[1].str());
    } else if (line.find("};") != std::string::npos) {
      break;
    }
  }
  return names;
}

std::string Join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"traceability generator"};
  std::string mapping_path, unit_dir, acceptance_path, out_path;
  app.add_option("--mapping", mapping_path)->required();
  app.add_option("--unit-dir", unit_dir)->required();
  app.add_option("--acceptance", acceptance_path)->required();
  app.add_option("--out", out_path)->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const Json mapping = Json::parse(ReadFile(mapping_path));
    const std::set<std::string> unit = ScanUnitTests(unit_dir);
    const std::vector<std::string> criteria = ScanCriteria(acceptance_path);
    if (criteria.empty()) throw std::runtime_error("no acceptance criteria found");

    std::vector<std::string> errors;
    std::set<std::string> modules;
    for (const auto& m : mapping.at("modules")) modules.insert(m.get<std::string>());
    std::set<std::string> mapped_modules, ids;

    std::ostringstream md;
    md << "# Traceability\n\n"
       << "Generated by `gen_traceability` from `docs/traceability.json`; do not edit by hand.\n"
       << "Every test id below is checked against the test sources at build time.\n\n"
       << "| Challenge | Modules | Tests | Covered |\n"
       << "|---|---|---|---|\n";
    std::ostringstream detail;
    std::size_t covered = 0;
    const auto& rows = mapping.at("challenges");
    for (const auto& row : rows) {
      const auto id = row.at("id").get<std::string>();
      if (!ids.insert(id).second) errors.push_back("duplicate challenge id " + id);
      std::vector<std::string> mods;
      for (const auto& m : row.at("modules")) {
        const auto name = m.get<std::string>();
        if (!modules.count(name)) errors.push_back(id + ": unknown module " + name);
        mapped_modules.insert(name);
        mods.push_back("`" + name + "`");
      }
      std::vector<std::string> tests;
      for (const auto& t : row.at("tests")) {
        const auto name = t.get<std::string>();
        if (name.rfind("acceptance:", 0) == 0) {
          const int n = std::stoi(name.substr(11));
          if (n < 1 || n > static_cast<int>(criteria.size())) {
            errors.push_back(id + ": dangling " + name);
            continue;
          }
          tests.push_back("acceptance " + std::to_string(n) + " (" + criteria[n - 1] + ")");
        } else {
          if (!unit.count(name)) errors.push_back(id + ": dangling " + name);
          tests.push_back("`" + name + "`");
        }
      }
      const bool is_covered = row.at("covered").get<bool>();
      if (is_covered && tests.empty()) errors.push_back(id + ": covered without tests");
      covered += is_covered;
      md << "| " << id << " | " << Join(mods, ", ") << " | " << tests.size() << " | "
         << (is_covered ? "yes" : "no") << " |\n";
      detail << "## " << id << "\n\n" << row.at("title").get<std::string>() << "\n\n";
      if (row.contains("note")) detail << "_" << row.at("note").get<std::string>() << "_\n\n";
      for (const auto& t : tests) detail << "- " << t << "\n";
      detail << "\n";
    }
    for (const auto& m : modules) {
      if (!mapped_modules.count(m)) errors.push_back("module " + m + " is not mapped");
    }
    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "traceability: " << e << "\n";
      return 1;
    }
    md << "\n" << covered << " of " << rows.size() << " challenges covered.\n\n" << detail.str();
    std::string text = md.str();
    while (text.size() > 1 && text[text.size() - 2] == '\n') text.pop_back();
    std::ofstream out(out_path);
    out << text;
    return out ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "traceability: " << e.what() << "\n";
    return 1;
  }
}
