#pragma once

// In-process CLI runs and golden report comparison, shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mframe/cli.hpp"
#include "mframe/io.hpp"

namespace clitest {

using mframe::io::json;
namespace fs = std::filesystem;

inline const std::string kData = std::string(MFRAME_SOURCE_DIR) + "/data";
inline const std::string kGolden = std::string(MFRAME_SOURCE_DIR) + "/tests/golden";

struct CliRun {
  int code;
  std::string out, err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = mframe::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// First difference between two reports, or "" when they agree. Numbers
// compare with a relative tolerance; keys, strings and flags exactly.
inline std::string json_difference(const json& got, const json& want, const std::string& at = "report") {
  if (want.is_number()) {
    if (!got.is_number()) return at + ": expected a number";
    const double a = got.get<double>(), b = want.get<double>();
    if (!(std::abs(a - b) <= 1e-9 * (1.0 + std::abs(b)))) return at + ": " + got.dump() + " vs " + want.dump();
    return "";
  }
  if (got.type() != want.type()) return at + ": type differs";
  if (want.is_object()) {
    if (got.size() != want.size()) return at + ": key sets differ";
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (!got.contains(it.key())) return at + ": missing key " + it.key();
      const std::string d = json_difference(got[it.key()], it.value(), at + "." + it.key());
      if (!d.empty()) return d;
    }
    return "";
  }
  if (want.is_array()) {
    if (got.size() != want.size()) return at + ": length differs";
    for (std::size_t i = 0; i < want.size(); ++i) {
      const std::string d = json_difference(got[i], want[i], at + "[" + std::to_string(i) + "]");
      if (!d.empty()) return d;
    }
    return "";
  }
  return got == want ? "" : at + ": " + got.dump() + " vs " + want.dump();
}

// Golden files hold {"args": [...], "exit": code, "report": {...}}. In args,
// "@data/NAME" names a sample file and "@fixture/KIND/SEED[/INDEX]" a seeded
// fixture, written to `scratch` before the run.
inline std::string resolve_arg(const std::string& arg, const fs::path& scratch) {
  if (arg.rfind("@data/", 0) == 0) return kData + "/" + arg.substr(6);
  if (arg.rfind("@fixture/", 0) != 0) return arg;
  std::istringstream parts(arg.substr(9));
  std::string kind, seed, index;
  std::getline(parts, kind, '/');
  std::getline(parts, seed, '/');
  if (!std::getline(parts, index, '/')) index = "1";
  const auto frames = mframe::random_fixture(kind, std::stoull(seed));
  const fs::path p = scratch / (kind + "-" + seed + "-" + index + ".json");
  mframe::io::write_file(p.string(), mframe::io::serialize_frame(frames.at(std::stoul(index) - 1)));
  return p.string();
}

struct GoldenOutcome {
  int checked = 0;
  std::vector<std::string> failures;
};

// With `update`, rewrites exit codes and reports instead of comparing.
inline GoldenOutcome run_golden(const fs::path& scratch, bool update) {
  GoldenOutcome g;
  fs::create_directories(scratch);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(kGolden))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    json doc = json::parse(mframe::io::read_file(path.string()));
    std::vector<std::string> args;
    for (const auto& a : doc["args"]) args.push_back(resolve_arg(a.get<std::string>(), scratch));
    const CliRun r = run_cli(args);
    ++g.checked;
    json report;
    try {
      report = json::parse(r.out);
    } catch (const json::parse_error&) {
      g.failures.push_back(name + ": output is not JSON: " + r.err);
      continue;
    }
    if (update) {
      doc["exit"] = r.code;
      doc["report"] = report;
      mframe::io::write_file(path.string(), doc.dump(2) + "\n");
      continue;
    }
    if (r.code != doc["exit"].get<int>()) g.failures.push_back(name + ": exit " + std::to_string(r.code));
    const std::string d = json_difference(report, doc["report"]);
    if (!d.empty()) g.failures.push_back(name + ": " + d);
  }
  return g;
}

struct ExitCase {
  std::vector<std::string> args;
  int expected;
};

}  // namespace clitest
