// Runs the full experiment suite twice with different worker counts and
// prints one line per acceptance criterion.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "slowdrift/experiments.hpp"
#include "slowdrift/parallel.hpp"

#ifndef SLOWDRIFT_DEFAULT_CONFIG
#define SLOWDRIFT_DEFAULT_CONFIG "configs/default.json"
#endif

namespace fs = std::filesystem;
using namespace slowdrift;

namespace {

struct Run {
  std::vector<Report> reports;
  std::map<Experiment, double> seconds;
};

Run run_all(const ExperimentConfig& c, const fs::path& dir) {
  Run run;
  for (Experiment e : kAllExperiments) {
    const auto t0 = std::chrono::steady_clock::now();
    run.reports.push_back(run_experiment(e, c));
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    run.seconds[e] = dt.count();
    fmt::print(stderr, "  {} ({} workers): {:.1f} s\n", experiment_name(e), resolve_workers(c.workers),
               dt.count());
  }
  fs::remove_all(dir);
  emit_full_run(run.reports, c, dir, true);
  return run;
}

std::string slurp(const fs::path& f) {
  std::ifstream in(f, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).generic_string()] = slurp(entry.path());
  }
  return files;
}

/// First difference between two trees, empty if identical.
std::string tree_difference(const fs::path& a, const fs::path& b) {
  const auto ta = tree(a), tb = tree(b);
  for (const auto& [name, content] : ta) {
    const auto it = tb.find(name);
    if (it == tb.end()) return fmt::format("{} missing from the second run", name);
    if (it->second != content) return fmt::format("{} differs", name);
  }
  for (const auto& [name, content] : tb) {
    if (!ta.contains(name)) return fmt::format("{} missing from the first run", name);
  }
  return {};
}

std::string describe(const CriterionPart& p) {
  return fmt::format("{} = {:.6g} ({} {:.6g}){}", p.name, p.value, p.relation, p.threshold,
                     p.passed ? "" : p.known_unattainable ? " FAILED, known unattainable" : " FAILED");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run of the full experiment suite"};
  std::string config_file = SLOWDRIFT_DEFAULT_CONFIG;
  std::string work = "acceptance_out";
  unsigned workers_a = 1, workers_b = 2;
  app.add_option("--config", config_file);
  app.add_option("--work", work, "directory for the two output trees");
  app.add_option("--workers-a", workers_a);
  app.add_option("--workers-b", workers_b);
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig c = load_config(config_file);
    const fs::path dir_a = fs::path(work) / "run_a";
    const fs::path dir_b = fs::path(work) / "run_b";
    fmt::print(stderr, "first run\n");
    c.workers = workers_a;
    const Run a = run_all(c, dir_a);
    fmt::print(stderr, "second run\n");
    c.workers = workers_b;
    run_all(c, dir_b);

    auto criteria = combined_criteria(a.reports);
    for (Criterion& cr : criteria) {
      if (cr.id == "A1") {
        const double s = a.seconds.at(Experiment::jumplaw);
        cr.parts.push_back({"runtime_s_jumplaw_experiment", s, "<", c.tolerance("A1.runtime_s"),
                            s < c.tolerance("A1.runtime_s"), false, {}});
      } else if (cr.id == "A4") {
        const double s = a.seconds.at(Experiment::theorem);
        cr.parts.push_back({"runtime_s_theorem_experiment", s, "<", c.tolerance("A4.runtime_s"),
                            s < c.tolerance("A4.runtime_s"), false, {}});
      }
    }
    const std::string diff = tree_difference(dir_a, dir_b);
    Criterion a9{"A9", "identical output trees at different worker counts", {}};
    a9.parts.push_back({"byte_identical_trees", diff.empty() ? 0.0 : 1.0, "==", 0.0, diff.empty(), false,
                        diff});
    a9.parts.push_back({"streams_disjoint", streams_disjoint(a.reports) ? 0.0 : 1.0, "==", 0.0,
                        streams_disjoint(a.reports), false, {}});
    criteria.push_back(a9);

    bool ok = true;
    std::string lines;
    for (const Criterion& cr : criteria) {
      std::vector<std::string> parts;
      for (const auto& p : cr.parts) parts.push_back(describe(p));
      const char* status = cr.passed() ? "PASS" : cr.passed_except_known() ? "FAIL (known unattainable)" : "FAIL";
      lines += fmt::format("{} {}: {}\n", cr.id, status, fmt::join(parts, "; "));
      ok = ok && cr.passed_except_known();
    }
    fmt::print("{}", lines);
    std::ofstream(fs::path(work) / "acceptance.txt") << lines;
    if (!diff.empty()) fmt::print(stderr, "first difference: {}\n", diff);
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
