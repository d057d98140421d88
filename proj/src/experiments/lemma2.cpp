#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "common.hpp"
#include "slowdrift/functionals.hpp"
#include "slowdrift/potential.hpp"

namespace slowdrift {
namespace {

using detail::ks2;
using detail::ks_vs;

struct Draw {
  double value = 0.0;
  bool consistent = true;
};

struct BruteResult {
  bool checked = false;
  bool equal = true;
};

struct RefCvfResult {
  bool monotone = true;
  bool above_jump = true;
  double excess = 0.0;  // drifted barrier at the largest lambda minus the jump
};

enum Branch : unsigned { kBarrier = 1, kDrifted, kBruteForce, kRefCvf };

double brute_force(const EventPoints& ev) {
  double best = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    for (std::size_t j = i; j < ev.size(); ++j) best = std::max(best, ev.values[j] - ev.values[i]);
  }
  return best;
}

}  // namespace

Report run_verify_lemma2(const ExperimentConfig& c) {
  c.validate();
  c.params.validate(true);
  Report report;
  report.experiment = Experiment::lemma2;
  const StablePotentialParams& p = c.params;
  const std::size_t n = c.replicas(Experiment::lemma2);
  const FrechetLaw law{p.c_plus, p.alpha, 1.0};
  const auto frechet = [law](double x) { return law.cdf(x); };
  const double n_eff1 = ks_effective_n(n);
  const double n_eff2 = ks_effective_n(n, n);

  SampleSet barrier_set{"barrier_rescaled", {}, {}, {}};
  SampleSet drifted_set{"drifted_barrier_unit", {}, {}, {}};
  std::vector<double> ks_equal, ks_asym;
  Json per_r = Json::array();

  for (std::size_t i = 0; i < c.r_values.size(); ++i) {
    const double r = c.r_values[i];
    const auto ri = static_cast<unsigned>(i);
    const double h = r / std::max(2.0, std::round(r / c.step));
    const double cutoff = c.cutoff.cutoff(p, r);
    const double scale = std::pow(r, 1.0 / p.alpha);
    // Unit-horizon picture of the same discretization: step h / r, cutoff
    // scaled like the path.
    const double unit_cutoff = cutoff / scale;
    const double lambda = p.delta * std::pow(r, 1.0 - 1.0 / p.alpha);

    const auto barrier = detail::run_block<Draw>(report, c, kBarrier, ri, n, [&](RngStream& rng, std::size_t) {
      const auto s = cutoff > 0.0 ? sample_path_jump_resolved(p, r, h, cutoff, rng)
                                  : sample_path_grid(p, r, h, rng);
      const auto v = potential_path(s, p.delta);
      const auto rep = functional_report(v);
      return Draw{rep.ascending_barrier / scale, rep.consistent()};
    });
    const auto drifted = detail::run_block<Draw>(report, c, kDrifted, ri, n, [&](RngStream& rng, std::size_t) {
      const auto s = unit_cutoff > 0.0 ? sample_path_jump_resolved(p, 1.0, h / r, unit_cutoff, rng)
                                       : sample_path_grid(p, 1.0, h / r, rng);
      return Draw{drifted_barrier(s, lambda), functional_report(s).consistent()};
    });

    std::vector<double> b, d;
    for (std::size_t k = 0; k < n; ++k) {
      b.push_back(barrier[k].value);
      d.push_back(drifted[k].value);
      report.invariants.add(barrier[k].consistent);
      report.invariants.add(drifted[k].consistent);
      barrier_set.add(r, k, b.back());
      drifted_set.add(r, k, d.back());
    }
    ks_equal.push_back(ks2(b, d));
    ks_asym.push_back(ks_vs(b, frechet));
    const double ks_drifted = ks_vs(d, frechet);
    per_r.push_back({{"r", r},
                     {"lambda", lambda},
                     {"step", h},
                     {"cutoff", cutoff},
                     {"ks_barrier_vs_drifted", detail::ks_entry(ks_equal.back(), n_eff2)},
                     {"ks_barrier_vs_frechet", detail::ks_entry(ks_asym.back(), n_eff1)},
                     {"ks_drifted_vs_frechet", detail::ks_entry(ks_drifted, n_eff1)}});

    const std::string label = detail::r_label(r);
    report.ecdfs.push_back({"barrier_r" + label, b, frechet});
    const EmpiricalDistribution d_emp(d);
    report.ecdfs.push_back(
        {"barrier_vs_drifted_r" + label, b, [d_emp](double x) { return d_emp.ecdf(x); }});
  }
  report.samples.push_back(std::move(barrier_set));
  report.samples.push_back(std::move(drifted_set));

  Criterion a3{"A3", "barrier rescaled by r^(1/alpha): exact equality in law with the drifted "
                     "unit barrier, and convergence to the Frechet law", {}};
  {
    std::size_t k = 0;
    std::string note;
    const auto it = std::find(c.r_values.begin(), c.r_values.end(), 100.0);
    if (it != c.r_values.end()) {
      k = static_cast<std::size_t>(it - c.r_values.begin());
    } else {
      note = "r = 100 not configured; smallest r used";
    }
    a3.parts.push_back(detail::below(
        fmt::format("ks_equality_in_law_r{}", c.r_values[k]), ks_equal[k],
        detail::ks_threshold(c, c.tolerance("A3.ks_equality"), n_eff2), note));
  }
  const double se = ks_null_sd(n_eff1);
  for (std::size_t i = 1; i < ks_asym.size(); ++i) {
    const double allowance = c.tolerance("A3.trend_se") * std::sqrt(2.0) * se;
    a3.parts.push_back(detail::at_most(
        fmt::format("ks_frechet_r{}_not_above_r{}", c.r_values[i], c.r_values[i - 1]),
        ks_asym[i] - ks_asym[i - 1], allowance, "difference of successive KS values"));
  }
  {
    CriterionPart last = detail::below(
        fmt::format("ks_frechet_r{}", c.r_values.back()), ks_asym.back(),
        detail::ks_threshold(c, c.tolerance("A3.ks_asymptotic"), n_eff1),
        "the rescaled barrier at r = 1e4 still differs from its limit law by about 0.1 in KS "
        "distance, independent of the discretization; see README");
    last.known_unattainable = true;
    a3.parts.push_back(last);
  }
  report.criteria.push_back(a3);

  // Brute-force barrier on random small paths.
  const auto brute = detail::run_block<BruteResult>(report, c, kBruteForce, 0, 1000, [&](RngStream& rng, std::size_t i) {
    const double horizon = 0.5 + 4.0 * rng.uniform();
    const double step = horizon / static_cast<double>(2 + static_cast<int>(rng.uniform() * 300));
    const double cutoff = 0.1 + 0.3 * rng.uniform();
    const LevyPathGrid path = i % 3 == 0 ? sample_path_grid(p, horizon, step, rng)
                                         : sample_path_jump_resolved(p, horizon, step, cutoff, rng);
    const EventPoints ev = event_points(path);
    if (ev.size() > 1000) return BruteResult{};
    double expected = brute_force(ev);
    const bool events_equal = ascending_barrier(ev) == expected;
    // A listed jump is an ascent over zero width.
    for (const JumpMark& j : path.jumps) expected = std::max(expected, j.size);
    return BruteResult{true, events_equal && ascending_barrier(path) == expected};
  });
  std::size_t checked = 0, mismatches = 0;
  for (const auto& b : brute) {
    checked += b.checked;
    mismatches += b.checked && !b.equal;
  }

  // Drifted barrier decreasing to the largest jump on unit-horizon paths.
  const std::vector<double> lambdas{10.0, 100.0, 1000.0, 1e4};
  const Resolution unit_res =
      c.cutoff.kind == Resolution::Kind::grid ? Resolution::automatic() : c.cutoff;
  const auto refcvf = detail::run_block<RefCvfResult>(report, c, kRefCvf, 0, 100, [&](RngStream& rng, std::size_t) {
    const auto path = sample_path_jump_resolved(p, 1.0, 1e-3, unit_res.cutoff(p, 1.0), rng);
    const double jump = largest_positive_jump(path);
    RefCvfResult out;
    // The zero-drift value is summed in a different order: compare with a
    // relative allowance of 1e-12 there and exactly afterwards.
    double prev = drifted_barrier(path, 0.0) * (1.0 + 1e-12);
    for (double l : lambdas) {
      const double d = drifted_barrier(path, l);
      out.monotone &= d <= prev;
      out.above_jump &= d >= jump;
      prev = d;
    }
    out.excess = prev - jump;
    return out;
  });
  std::size_t non_monotone = 0, below_jump = 0;
  double worst_excess = 0.0;
  for (const auto& x : refcvf) {
    non_monotone += !x.monotone;
    below_jump += !x.above_jump;
    worst_excess = std::max(worst_excess, x.excess);
  }

  Criterion a7{"A7", "ascending barrier, drifted-barrier limit and functional invariants", {}};
  a7.parts.push_back({"brute_force_mismatches", static_cast<double>(mismatches), "==", 0.0,
                      mismatches == 0 && checked > 0, false,
                      fmt::format("{} random paths with at most 1000 event points", checked)});
  a7.parts.push_back({"refcvf_non_monotone_paths", static_cast<double>(non_monotone), "==", 0.0,
                      non_monotone == 0, false, "lambda in {0, 10, 1e2, 1e3, 1e4}, 100 paths"});
  a7.parts.push_back({"refcvf_below_largest_jump", static_cast<double>(below_jump), "==", 0.0,
                      below_jump == 0, false, {}});
  a7.parts.push_back(detail::below("refcvf_excess_at_lambda_1e4", worst_excess,
                                   c.tolerance("A7.refcvf_limit")));
  a7.parts.push_back({"invariant_violations", static_cast<double>(report.invariants.violations),
                      "==", 0.0, report.invariants.violations == 0, false,
                      fmt::format("{} paths of this experiment", report.invariants.paths)});
  report.criteria.push_back(a7);

  report.diagnostics["per_r"] = per_r;
  report.diagnostics["brute_force"] = {{"paths_checked", checked}, {"mismatches", mismatches}};
  report.diagnostics["refcvf"] = {{"paths", refcvf.size()},
                                  {"non_monotone", non_monotone},
                                  {"worst_excess_at_1e4", worst_excess}};
  return report;
}

}  // namespace slowdrift
