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

struct Marginals {
  double v[3] = {0.0, 0.0, 0.0};
  bool consistent = true;
};

enum Branch : unsigned {
  kResolvedMax = 1,
  kExactMax,
  kDriftLow,
  kDriftHigh,
  kIdentity,
  kGridMarginal,
  kResolvedMarginal,
  kScaled,
  kUnscaled,
};

}  // namespace

Report run_verify_jumplaw(const ExperimentConfig& c) {
  c.validate();
  c.params.validate(true);
  Report report;
  report.experiment = Experiment::jumplaw;
  const StablePotentialParams& p = c.params;
  const std::size_t n = c.replicas(Experiment::jumplaw);
  const double t = 1.0;
  const FrechetLaw law{p.c_plus, p.alpha, t};
  const auto frechet = [law](double x) { return law.cdf(x); };

  // The jump law needs resolved jumps even if the config asks for grid paths.
  const Resolution res =
      c.cutoff.kind == Resolution::Kind::grid ? Resolution::automatic() : c.cutoff;
  const double cutoff = res.cutoff(p, t);
  const double step = t / std::max(2.0, std::round(t / c.step));

  auto largest = [&](const StablePotentialParams& q) {
    return [&, q](RngStream& rng, std::size_t) {
      const auto path = potential_path(sample_path_jump_resolved(q, t, step, cutoff, rng), q.delta);
      const auto rep = functional_report(path);
      return Draw{rep.largest_jump, rep.consistent()};
    };
  };
  auto collect = [&](const std::vector<Draw>& d, std::vector<double>& out) {
    out.reserve(d.size());
    for (const Draw& x : d) {
      out.push_back(x.value);
      report.invariants.add(x.consistent);
    }
  };

  // Largest jump: resolved sampler and exact sampler against the Frechet law.
  std::vector<double> resolved, exact;
  collect(detail::run_block<Draw>(report, c, kResolvedMax, 0, n, largest(p)), resolved);
  for (const Draw& d : detail::run_block<Draw>(report, c, kExactMax, 0, n, [&](RngStream& rng, std::size_t) {
         return Draw{sample_largest_jump_exact(p.c_plus, p.alpha, t, rng), true};
       })) {
    exact.push_back(d.value);
  }
  const double ks_resolved = ks_vs(resolved, frechet);
  const double ks_exact = ks_vs(exact, frechet);
  const double n_eff = ks_effective_n(n);
  const double tol_a1 = detail::ks_threshold(c, c.tolerance("A1.ks"), n_eff);

  Criterion a1{"A1", "largest positive jump on [0, t] follows exp(-(c+/alpha) t a^-alpha)", {}};
  a1.parts.push_back(detail::below("ks_jump_resolved_sampler", ks_resolved, tol_a1,
                                   fmt::format("cutoff {}", cutoff)));
  a1.parts.push_back(detail::below("ks_exact_sampler", ks_exact, tol_a1));
  report.criteria.push_back(a1);

  // Drift leaves the jumps alone.
  StablePotentialParams low = p, high = p;
  low.delta = 0.5;
  high.delta = 2.0;
  std::vector<double> max_low, max_high;
  collect(detail::run_block<Draw>(report, c, kDriftLow, 0, n, largest(low)), max_low);
  collect(detail::run_block<Draw>(report, c, kDriftHigh, 0, n, largest(high)), max_high);
  const double ks_drift = ks2(max_low, max_high);

  // P{V-natural_x <= a} against the exact exponential identity.
  struct Pair {
    double x, a;
  };
  const std::vector<Pair> pairs{{0.5, 0.5}, {1.0, 1.0}, {2.0, 1.0}, {1.0, 2.0}, {4.0, 2.0}};
  Json identity = Json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [x, a] = pairs[k];
    const double pair_step = x / std::max(10.0, std::round(x / c.step));
    const double pair_cutoff = std::min(default_cutoff(p, x), a / 2.0);
    const auto draws = detail::run_block<Draw>(
        report, c, kIdentity, static_cast<unsigned>(k), n, [&](RngStream& rng, std::size_t) {
          const auto path = potential_path(
              sample_path_jump_resolved(p, x, pair_step, pair_cutoff, rng), p.delta);
          const auto rep = functional_report(path);
          return Draw{rep.largest_jump <= a ? 1.0 : 0.0, rep.consistent()};
        });
    double hits = 0.0;
    for (const Draw& d : draws) {
      hits += d.value;
      report.invariants.add(d.consistent);
    }
    const double freq = hits / static_cast<double>(n);
    const double target = std::exp(-(p.c_plus / p.alpha) * x / std::pow(a, p.alpha));
    const double sd = binomial_sd(target, n);
    identity.push_back({{"x", x}, {"a", a}, {"empirical", freq}, {"exact", target},
                        {"binomial_sd", sd}, {"z", (freq - target) / sd}});
  }

  // Grid versus jump-resolved marginal at t = 1; the cutoff puts the
  // Brownian residual at 5% of the squared stable scale.
  const double sigma = increment_law(p).scale;
  const double total = p.c_plus + p.c_minus;
  const double fine_cutoff =
      std::pow(0.05 * sigma * sigma * (2.0 - p.alpha) / total, 1.0 / (2.0 - p.alpha));
  auto marginal = [&](bool resolved_path) {
    return [&, resolved_path](RngStream& rng, std::size_t) {
      const auto path = resolved_path ? sample_path_jump_resolved(p, t, step, fine_cutoff, rng)
                                      : sample_path_grid(p, t, step, rng);
      return Draw{path.values.back(), functional_report(path).consistent()};
    };
  };
  std::vector<double> grid_end, resolved_end;
  collect(detail::run_block<Draw>(report, c, kGridMarginal, 0, n, marginal(false)), grid_end);
  collect(detail::run_block<Draw>(report, c, kResolvedMarginal, 0, n, marginal(true)), resolved_end);
  const double ks_cross = ks2(grid_end, resolved_end);
  const double n_eff2 = ks_effective_n(n, n);

  // Self-similarity: S_{kt} / k^(1/alpha) against S_t at three times.
  const double scale = 4.0;
  const std::vector<double> times{0.5, 1.0, 2.0};
  const double base_step = 0.5 / std::max(1.0, std::ceil(0.5 / c.step));
  auto marginals = [&](double factor) {
    return [&, factor](RngStream& rng, std::size_t) {
      const auto path = sample_path_grid(p, factor * times.back(), factor * base_step, rng);
      Marginals m;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::llround(times[i] / base_step));
        m.v[i] = path.values[k] / std::pow(factor, 1.0 / p.alpha);
      }
      m.consistent = functional_report(path).consistent();
      return m;
    };
  };
  const auto scaled = detail::run_block<Marginals>(report, c, kScaled, 0, n, marginals(scale));
  const auto unscaled = detail::run_block<Marginals>(report, c, kUnscaled, 0, n, marginals(1.0));
  for (const auto& m : scaled) report.invariants.add(m.consistent);
  for (const auto& m : unscaled) report.invariants.add(m.consistent);

  const double tol_cross = detail::ks_threshold(c, c.tolerance("A2.ks_cross"), n_eff2);
  const double tol_self = detail::ks_threshold(c, c.tolerance("A2.ks_selfsim"), n_eff2);
  Criterion a2{"A2", "grid and jump-resolved samplers agree; stable self-similarity", {}};
  a2.parts.push_back(detail::below("ks_grid_vs_jump_resolved_t1", ks_cross, tol_cross,
                                   fmt::format("cutoff {}", fine_cutoff)));
  Json selfsim = Json::array();
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> a, b;
    a.reserve(n);
    b.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      a.push_back(scaled[j].v[i]);
      b.push_back(unscaled[j].v[i]);
    }
    const double d = ks2(a, b);
    a2.parts.push_back(detail::below(fmt::format("ks_self_similarity_t{}", times[i]), d, tol_self,
                                     fmt::format("S_(4t) / 4^(1/alpha) versus S_t")));
    selfsim.push_back({{"t", times[i]}, {"ks", d}});
  }
  report.criteria.push_back(a2);

  report.diagnostics["frechet"] = {{"jump_resolved", detail::ks_entry(ks_resolved, n_eff)},
                                   {"exact", detail::ks_entry(ks_exact, n_eff)},
                                   {"cutoff", cutoff},
                                   {"step", step}};
  report.diagnostics["drift_invariance_delta_0.5_vs_2"] = detail::ks_entry(ks_drift, n_eff2);
  report.diagnostics["no_jump_identity"] = identity;
  report.diagnostics["sampler_consistency"] = {{"ks", ks_cross}, {"cutoff", fine_cutoff}};
  report.diagnostics["self_similarity"] = selfsim;

  auto add_samples = [&](std::string name, double r, const std::vector<double>& v) {
    SampleSet s{std::move(name), {}, {}, {}};
    for (std::size_t i = 0; i < v.size(); ++i) s.add(r, i, v[i]);
    report.samples.push_back(std::move(s));
  };
  add_samples("largest_jump_resolved", t, resolved);
  add_samples("largest_jump_exact", t, exact);
  add_samples("largest_jump_delta_0.5", t, max_low);
  add_samples("largest_jump_delta_2", t, max_high);
  add_samples("marginal_grid", t, grid_end);
  add_samples("marginal_jump_resolved", t, resolved_end);

  report.ecdfs.push_back({"largest_jump_resolved", resolved, frechet});
  report.ecdfs.push_back({"largest_jump_exact", exact, frechet});
  const EmpiricalDistribution grid_emp(grid_end);
  report.ecdfs.push_back(
      {"marginal_jump_resolved_vs_grid", resolved_end, [grid_emp](double x) { return grid_emp.ecdf(x); }});
  return report;
}

}  // namespace slowdrift
