#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "common.hpp"
#include "slowdrift/functionals.hpp"
#include "slowdrift/hitting.hpp"
#include "slowdrift/logsum.hpp"

namespace slowdrift {
namespace {

using detail::ks2;
using detail::ks_vs;

struct Draw {
  double log_I1 = 0.0;
  double log_I2 = kNegInf;
  double log_H = 0.0;
  bool consistent = true;
};

enum Branch : unsigned {
  kMain = 1,
  kDriftLow,
  kDriftHigh,
  kWithI2,
  kCrossRayKnight,
  kCrossChain,
  kZeroPotential,
  kPureDrift,
  kBesq2,
  kBesq0,
};

constexpr std::size_t kOracleReplicas = 10000;
constexpr std::size_t kLaplaceBlocks = 100;
constexpr std::size_t kLaplaceDraws = 1000;

LevyPathGrid linear_potential(double slope, double horizon, double step) {
  LevyPathGrid v;
  v.horizon = horizon;
  v.step = step;
  const auto cells = static_cast<std::size_t>(std::llround(horizon / step));
  for (std::size_t k = 0; k <= cells; ++k) v.values.push_back(slope * static_cast<double>(k) * step);
  v.values.back() = slope * horizon;
  return v;
}

std::vector<double> column(const std::vector<Draw>& d, double Draw::*field) {
  std::vector<double> out;
  out.reserve(d.size());
  for (const Draw& x : d) out.push_back(x.*field);
  return out;
}

}  // namespace

Report run_verify_theorem(const ExperimentConfig& c) {
  c.validate();
  c.params.validate(true);
  Report report;
  report.experiment = Experiment::theorem;
  const StablePotentialParams& p = c.params;
  const std::size_t n = c.replicas(Experiment::theorem);
  const FrechetLaw frechet_law{p.c_plus, p.alpha, 1.0};
  const ExponentialLaw exp_law{p.c_plus / p.alpha};
  const auto frechet = [frechet_law](double x) { return frechet_law.cdf(x); };
  const auto exponential = [exp_law](double x) { return exp_law.cdf(x); };
  const double n_eff1 = ks_effective_n(n);
  const double n_eff2 = ks_effective_n(n, n);

  HittingOptions base;
  base.step = c.step;
  base.resolution = c.cutoff;

  auto rayknight = [&](const StablePotentialParams& q, double r, HittingOptions opt) {
    return [&, q, r, opt](RngStream& rng, std::size_t) mutable {
      bool ok = true;
      opt.on_potential = [&ok](const LevyPathGrid& v) { ok = ok && functional_report(v).consistent(); };
      const auto h = hitting_time_rayknight(q, r, opt, rng);
      return Draw{h.log_I1, h.log_I2, h.log_H, ok};
    };
  };
  auto tally = [&](const std::vector<Draw>& d) {
    for (const Draw& x : d) report.invariants.add(x.consistent);
  };

  // Main sample per r.
  HittingOptions main_opt = base;
  main_opt.include_I2 = c.include_I2;
  SampleSet log_i1_set{"log_I1", {}, {}, {}};
  SampleSet log_h_set{"log_H", {}, {}, {}};
  Json per_r = Json::array();
  double ks_frechet_last = 0.0, ks_exp_last = 0.0;
  std::vector<double> last_log_i1;
  for (std::size_t i = 0; i < c.r_values.size(); ++i) {
    const double r = c.r_values[i];
    const auto draws = detail::run_block<Draw>(report, c, kMain, static_cast<unsigned>(i), n,
                                               rayknight(p, r, main_opt));
    tally(draws);
    const auto log_i1 = column(draws, &Draw::log_I1);
    for (std::size_t k = 0; k < n; ++k) {
      log_i1_set.add(r, k, draws[k].log_I1);
      log_h_set.add(r, k, draws[k].log_H);
    }
    const auto rescaled = theorem_rescale(log_i1, r, p.alpha);
    const double ksf = ks_one_sample(rescaled.frechet_scale, frechet);
    const double kse = ks_one_sample(rescaled.exponential_scale, exponential);
    Json entry{{"r", r},
               {"ks_frechet", detail::ks_entry(ksf, n_eff1)},
               {"ks_exponential", kse},
               {"excluded_nonpositive", rescaled.excluded}};
    if (c.include_I2) {
      const auto with_i2 = theorem_rescale(column(draws, &Draw::log_H), r, p.alpha);
      entry["ks_frechet_log_H"] = ks_one_sample(with_i2.frechet_scale, frechet);
    }
    per_r.push_back(entry);
    const std::string label = detail::r_label(r);
    report.ecdfs.push_back({"log_I1_rescaled_r" + label, rescaled.frechet_scale.samples(), frechet});
    report.ecdfs.push_back(
        {"sup_scale_r" + label, rescaled.exponential_scale.samples(), exponential});
    if (i + 1 == c.r_values.size()) {
      ks_frechet_last = ksf;
      ks_exp_last = kse;
      last_log_i1 = log_i1;
    }
  }
  report.samples.push_back(std::move(log_i1_set));
  report.samples.push_back(std::move(log_h_set));

  // Drift invariance at the largest r.
  const double r_max = c.r_values.back();
  StablePotentialParams low = p, high = p;
  low.delta = 0.5;
  high.delta = 2.0;
  HittingOptions no_i2 = base;
  const auto d_low = detail::run_block<Draw>(report, c, kDriftLow, 0, n, rayknight(low, r_max, no_i2));
  const auto d_high = detail::run_block<Draw>(report, c, kDriftHigh, 0, n, rayknight(high, r_max, no_i2));
  tally(d_low);
  tally(d_high);
  const double ks_drift = ks2(column(d_low, &Draw::log_I1), column(d_high, &Draw::log_I1));

  Criterion a4{"A4", "log I1(r) / r^(1/alpha) against the Frechet law, the exponential form and "
                     "drift invariance", {}};
  {
    std::string note = r_max == 1e4 ? "" : fmt::format("evaluated at the largest r = {}", r_max);
    a4.parts.push_back(detail::below(fmt::format("ks_frechet_r{}", r_max), ks_frechet_last,
                                     detail::ks_threshold(c, c.tolerance("A4.ks_frechet"), n_eff1),
                                     note));
    a4.parts.push_back(detail::below("transform_identity", std::abs(ks_frechet_last - ks_exp_last),
                                     c.tolerance("A4.transform"),
                                     "KS against Exp(c+/alpha) of the transformed sample"));
    CriterionPart drift = detail::below(
        fmt::format("ks_delta_0.5_vs_2_r{}", r_max), ks_drift,
        detail::ks_threshold(c, c.tolerance("A4.ks_drift"), n_eff2),
        "at r = 1e4 the rescaled barrier alone differs by about 0.16 in KS distance between "
        "delta = 0.5 and delta = 2, so the hitting times cannot agree closer; see README");
    drift.known_unattainable = true;
    a4.parts.push_back(drift);
  }
  report.criteria.push_back(a4);
  report.samples.push_back({"log_I1_delta_0.5", {}, {}, {}});
  report.samples.push_back({"log_I1_delta_2", {}, {}, {}});
  for (std::size_t k = 0; k < n; ++k) {
    report.samples[report.samples.size() - 2].add(r_max, k, d_low[k].log_I1);
    report.samples.back().add(r_max, k, d_high[k].log_I1);
  }

  // Size of I2 next to I1 (diagnostic).
  HittingOptions with_i2 = base;
  with_i2.include_I2 = true;
  const std::size_t n_i2 = std::min<std::size_t>(n, 200);
  Json i2_json = Json::array();
  for (std::size_t i = 0; i < c.r_values.size(); ++i) {
    const double r = c.r_values[i];
    const auto draws = detail::run_block<Draw>(report, c, kWithI2, static_cast<unsigned>(i), n_i2,
                                               rayknight(p, r, with_i2));
    tally(draws);
    std::vector<double> ratio;
    for (const Draw& d : draws) ratio.push_back(d.log_I2 - d.log_I1);
    std::nth_element(ratio.begin(), ratio.begin() + ratio.size() / 2, ratio.end());
    const auto with = theorem_rescale(column(draws, &Draw::log_H), r, p.alpha);
    const auto without = theorem_rescale(column(draws, &Draw::log_I1), r, p.alpha);
    i2_json.push_back({{"r", r},
                       {"replicas", n_i2},
                       {"median_log_I2_over_I1", ratio[ratio.size() / 2]},
                       {"ks_frechet_with_I2", ks_one_sample(with.frechet_scale, frechet)},
                       {"ks_frechet_without_I2", ks_one_sample(without.frechet_scale, frechet)}});
  }

  // Ray-Knight against the birth-death chain at a small level.
  HittingOptions cross = base;
  cross.step = c.crosscheck_step;
  cross.include_I2 = true;
  const double r_cross = c.crosscheck_r;
  const auto rk = detail::run_block<Draw>(report, c, kCrossRayKnight, 0, n, rayknight(p, r_cross, cross));
  const auto ch = detail::run_block<Draw>(report, c, kCrossChain, 0, n, [&](RngStream& rng, std::size_t) {
    HittingOptions opt = cross;
    bool ok = true;
    opt.on_potential = [&ok](const LevyPathGrid& v) { ok = ok && functional_report(v).consistent(); };
    const auto h = hitting_time_chain(p, r_cross, opt, rng);
    return Draw{h.log_I1, h.log_I2, h.log_H, ok};
  });
  tally(rk);
  tally(ch);
  const auto rk_h = column(rk, &Draw::log_H);
  const auto ch_h = column(ch, &Draw::log_H);
  const double ks_engines = ks2(rk_h, ch_h);
  const double ks_engines_i1 = ks2(column(rk, &Draw::log_I1), column(ch, &Draw::log_I1));
  Criterion a5{"A5", "Ray-Knight and birth-death chain engines agree in law", {}};
  a5.parts.push_back(detail::below(fmt::format("ks_log_H_r{}", r_cross), ks_engines,
                                   detail::ks_threshold(c, c.tolerance("A5.ks_engines"), n_eff2),
                                   fmt::format("step {}", c.crosscheck_step)));
  report.criteria.push_back(a5);
  report.samples.push_back({"crosscheck_log_H_rayknight", {}, {}, {}});
  report.samples.push_back({"crosscheck_log_H_chain", {}, {}, {}});
  for (std::size_t k = 0; k < n; ++k) {
    report.samples[report.samples.size() - 2].add(r_cross, k, rk_h[k]);
    report.samples.back().add(r_cross, k, ch_h[k]);
  }
  const EmpiricalDistribution ch_emp(ch_h);
  report.ecdfs.push_back(
      {"crosscheck_rayknight_vs_chain", rk_h, [ch_emp](double x) { return ch_emp.ecdf(x); }});

  // Analytic oracles.
  Criterion a6{"A6", "analytic oracles: zero-potential mean, drifted Brownian first passage, "
                     "squared Bessel Laplace transforms", {}};
  const double k_se = c.tolerance("A6.mean_se");
  Json oracle_json = Json::array();
  const std::vector<double> zero_r{1.0, 2.0, 4.0};
  for (std::size_t i = 0; i < zero_r.size(); ++i) {
    const double r = zero_r[i];
    const auto flat = linear_potential(0.0, r, r / 50.0);
    const auto x = detail::run_block<double>(report, c, kZeroPotential, static_cast<unsigned>(i),
                                             kOracleReplicas, [&](RngStream& rng, std::size_t) {
                                               return std::exp(hitting_time_rayknight(flat, nullptr, rng).log_I1);
                                             });
    const auto m = detail::mean_se(x);
    a6.parts.push_back(detail::below(fmt::format("zero_potential_mean_r{}_z", r),
                                     std::abs(m.mean - r * r) / m.se, k_se,
                                     fmt::format("mean {} against {}", m.mean, r * r)));
    oracle_json.push_back({{"oracle", "zero_potential"}, {"r", r}, {"mean", m.mean}, {"se", m.se}});
  }
  {
    const double h = 0.02;
    const auto env = chain_environment(linear_potential(-2.0, 10.0, h), linear_potential(2.0, 14.0, h));
    const auto x = detail::run_block<double>(report, c, kPureDrift, 0, kOracleReplicas,
                                             [&](RngStream& rng, std::size_t) {
                                               return std::exp(hitting_time_chain(env, rng).log_H);
                                             });
    const auto m = detail::mean_se(x);
    a6.parts.push_back(detail::below("chain_pure_drift_mean_z", std::abs(m.mean - 10.0) / m.se, k_se,
                                     fmt::format("mean {} against 10", m.mean)));
    oracle_json.push_back({{"oracle", "chain_pure_drift"}, {"mean", m.mean}, {"se", m.se}});
  }
  const double rel = c.tolerance("A6.laplace_rel");
  {
    const std::vector<std::pair<double, double>> points{{1.0, 0.5}, {0.5, 1.0}, {3.0, 0.2}};
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [lambda, t] = points[i];
      const auto blocks = detail::run_block<double>(
          report, c, kBesq2, static_cast<unsigned>(i), kLaplaceBlocks, [&](RngStream& rng, std::size_t) {
            const std::vector<double> times{t};
            double s = 0.0;
            for (std::size_t k = 0; k < kLaplaceDraws; ++k) s += std::exp(-lambda * besq2_at(times, rng).values[0]);
            return s;
          });
      double sum = 0.0;
      for (double b : blocks) sum += b;
      const double mc = sum / static_cast<double>(kLaplaceBlocks * kLaplaceDraws);
      const double exact = 1.0 / (1.0 + 2.0 * lambda * t);
      a6.parts.push_back(detail::below(fmt::format("besq2_laplace_l{}_t{}", lambda, t),
                                       std::abs(mc / exact - 1.0), rel));
      oracle_json.push_back({{"oracle", "besq2_laplace"}, {"lambda", lambda}, {"t", t}, {"mc", mc}, {"exact", exact}});
    }
  }
  {
    struct Point {
      double x, t, lambda;
    };
    const std::vector<Point> points{{1.0, 1.0, 1.0}, {2.0, 0.5, 1.0}, {0.5, 2.0, 0.5}};
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto [x0, t, lambda] = points[i];
      const auto blocks = detail::run_block<double>(
          report, c, kBesq0, static_cast<unsigned>(i), kLaplaceBlocks, [&](RngStream& rng, std::size_t) {
            double s = 0.0;
            for (std::size_t k = 0; k < kLaplaceDraws; ++k) s += std::exp(-lambda * besq0_transition(x0, t, rng));
            return s;
          });
      double sum = 0.0;
      for (double b : blocks) sum += b;
      const double mc = sum / static_cast<double>(kLaplaceBlocks * kLaplaceDraws);
      const double exact = std::exp(-lambda * x0 / (1.0 + 2.0 * lambda * t));
      a6.parts.push_back(detail::below(fmt::format("besq0_laplace_x{}_t{}_l{}", x0, t, lambda),
                                       std::abs(mc / exact - 1.0), rel));
      oracle_json.push_back({{"oracle", "besq0_laplace"}, {"x", x0}, {"t", t}, {"lambda", lambda},
                             {"mc", mc}, {"exact", exact}});
    }
  }
  report.criteria.push_back(a6);

  report.diagnostics["per_r"] = per_r;
  report.diagnostics["drift_invariance"] = detail::ks_entry(ks_drift, n_eff2);
  report.diagnostics["I2_sensitivity"] = i2_json;
  report.diagnostics["engine_crosscheck"] = {{"r", r_cross},
                                             {"step", c.crosscheck_step},
                                             {"ks_log_H", detail::ks_entry(ks_engines, n_eff2)},
                                             {"ks_log_I1", ks_engines_i1}};
  report.diagnostics["oracles"] = oracle_json;
  report.diagnostics["untested"] =
      "the limit law of the future infimum of the diffusion needs trajectories, not hitting "
      "times, and is not checked";
  return report;
}

}  // namespace slowdrift
