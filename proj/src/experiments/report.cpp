#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "slowdrift/distributions.hpp"
#include "slowdrift/experiments.hpp"

#ifndef SLOWDRIFT_VERSION
#define SLOWDRIFT_VERSION "unknown"
#endif

namespace slowdrift {
namespace {

Json part_json(const CriterionPart& p) {
  Json j;
  j["name"] = p.name;
  j["value"] = p.value;
  j["relation"] = p.relation;
  j["threshold"] = p.threshold;
  j["passed"] = p.passed;
  if (p.known_unattainable) j["known_unattainable"] = true;
  if (!p.note.empty()) j["note"] = p.note;
  return j;
}

Json criteria_json(const std::vector<Criterion>& criteria) {
  Json out = Json::array();
  for (const Criterion& c : criteria) {
    Json j;
    j["id"] = c.id;
    j["description"] = c.description;
    j["passed"] = c.passed();
    j["passed_except_known_unattainable"] = c.passed_except_known();
    Json parts = Json::array();
    for (const auto& p : c.parts) parts.push_back(part_json(p));
    j["parts"] = parts;
    out.push_back(j);
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write {}", file.string()));
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) {
    throw std::runtime_error(fmt::format("write failed for {}", file.string()));
  }
}

void write_json(const Json& j, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << j.dump(2) << '\n';
  finish(out, file);
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  }
}

}  // namespace

std::string_view code_version() { return SLOWDRIFT_VERSION; }

bool Criterion::passed() const {
  return std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.passed; });
}

bool Criterion::passed_except_known() const {
  return std::all_of(parts.begin(), parts.end(),
                     [](const auto& p) { return p.passed || p.known_unattainable; });
}

void SampleSet::add(double r_value, std::uint64_t replica_index, double v) {
  r.push_back(r_value);
  replica.push_back(replica_index);
  value.push_back(v);
}

bool Report::passed() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed(); });
}

bool Report::passed_except_known() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const auto& c) { return c.passed_except_known(); });
}

bool streams_disjoint(const std::vector<Report>& reports) {
  std::set<std::tuple<int, unsigned, unsigned>> seen;
  for (const Report& r : reports) {
    for (const StreamBlock& b : r.streams) {
      if (!seen.emplace(static_cast<int>(b.experiment), b.branch, b.r_index).second) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Criterion> combined_criteria(const std::vector<Report>& reports) {
  std::vector<Criterion> out;
  InvariantTally total;
  for (const Report& r : reports) {
    total.merge(r.invariants);
    out.insert(out.end(), r.criteria.begin(), r.criteria.end());
  }
  for (Criterion& c : out) {
    if (c.id == "A7") {
      c.parts.push_back({"invariant_violations_full_run", static_cast<double>(total.violations),
                         "==", 0.0, total.violations == 0, false,
                         fmt::format("{} paths checked across all experiments", total.paths)});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Criterion& a, const Criterion& b) {
    return std::stoi(a.id.substr(1)) < std::stoi(b.id.substr(1));
  });
  return out;
}

void emit_report(const Report& report, const std::filesystem::path& dir, bool emit_samples) {
  make_dir(dir);
  Json summary;
  summary["experiment"] = experiment_name(report.experiment);
  summary["provenance"] = report.provenance;
  summary["passed"] = report.passed();
  summary["criteria"] = criteria_json(report.criteria);
  summary["invariants"] = {{"paths", report.invariants.paths},
                           {"violations", report.invariants.violations}};
  summary["diagnostics"] = report.diagnostics;
  Json files = Json::array();

  for (const EcdfSet& e : report.ecdfs) {
    const auto file = dir / fmt::format("ecdf_{}.csv", e.name);
    auto out = open_out(file);
    out << "x,ecdf,reference_cdf\n";
    const EmpiricalDistribution emp(e.values);
    const auto& xs = emp.samples();
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      // One row per distinct value, at the top of its ECDF step.
      if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
      out << fmt::format("{},{},{}\n", xs[i], static_cast<double>(i + 1) / n, e.reference(xs[i]));
    }
    finish(out, file);
    files.push_back(file.filename().string());
  }
  if (emit_samples) {
    for (const SampleSet& s : report.samples) {
      const auto file = dir / fmt::format("samples_{}.csv", s.name);
      auto out = open_out(file);
      out << "r,replica,value\n";
      for (std::size_t i = 0; i < s.value.size(); ++i) {
        out << fmt::format("{},{},{}\n", s.r[i], s.replica[i], s.value[i]);
      }
      finish(out, file);
      files.push_back(file.filename().string());
    }
  }
  summary["files"] = files;
  write_json(summary, dir / "summary.json");
}

void emit_full_run(const std::vector<Report>& reports, const ExperimentConfig& config,
                   const std::filesystem::path& dir, bool emit_samples) {
  make_dir(dir);
  for (const Report& r : reports) {
    emit_report(r, dir / std::string(experiment_name(r.experiment)), emit_samples);
  }
  const auto criteria = combined_criteria(reports);
  Json summary;
  summary["experiment"] = "all";
  summary["provenance"] = {{"config", config_echo(config)}, {"code_version", code_version()}};
  summary["passed"] =
      std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed(); });
  summary["criteria"] = criteria_json(criteria);
  summary["streams_disjoint"] = streams_disjoint(reports);
  Json names = Json::array();
  for (const Report& r : reports) names.push_back(experiment_name(r.experiment));
  summary["experiments"] = names;
  write_json(summary, dir / "summary.json");
}

}  // namespace slowdrift
