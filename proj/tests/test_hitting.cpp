#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "slowdrift/distributions.hpp"
#include "slowdrift/hitting.hpp"
#include "slowdrift/logsum.hpp"

using namespace slowdrift;

namespace {

struct Moments {
  double mean;
  double se;
};

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

LevyPathGrid linear(double slope, double horizon, double step) {
  LevyPathGrid p;
  p.horizon = horizon;
  p.step = step;
  const auto cells = static_cast<std::size_t>(std::llround(horizon / step));
  for (std::size_t k = 0; k <= cells; ++k) p.values.push_back(slope * static_cast<double>(k) * step);
  return p;
}

double median(std::vector<double> x) {
  std::nth_element(x.begin(), x.begin() + x.size() / 2, x.end());
  return x[x.size() / 2];
}

const StablePotentialParams kDefault{1.5, 1.0, 1.0, 1.0};

}  // namespace

TEST_CASE("BESQ(2) marginal moments") {
  RngStream rng(41, 1);
  const std::vector<double> times{0.3, 0.8, 1.0};
  std::vector<double> at_one(100000), cross(100000);
  for (std::size_t i = 0; i < at_one.size(); ++i) {
    const auto b = besq2_at(times, rng);
    for (double v : b.values) CHECK(v >= 0.0);
    at_one[i] = b.values[2];
    cross[i] = b.values[0] * b.values[1];
  }
  const auto m = moments(at_one);
  CHECK(std::abs(m.mean - 2.0) < 4.0 * m.se);
  // E[U(s) U(t)] = 4 s t + 4 s^2 for s < t.
  const auto c = moments(cross);
  CHECK(std::abs(c.mean - (4.0 * 0.3 * 0.8 + 4.0 * 0.09)) < 4.0 * c.se);
}

TEST_CASE("BESQ(2) Laplace transform") {
  RngStream rng(41, 2);
  const std::vector<std::pair<double, double>> points{{1.0, 0.5}, {0.5, 1.0}, {3.0, 0.2}};
  for (auto [lambda, t] : points) {
    const std::vector<double> times{t};
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += std::exp(-lambda * besq2_at(times, rng).values[0]);
    CHECK(sum / n == doctest::Approx(1.0 / (1.0 + 2.0 * lambda * t)).epsilon(0.01));
  }
}

TEST_CASE("BESQ(0) transition") {
  RngStream rng(41, 3);
  CHECK(besq0_transition(0.0, 1.0, rng) == 0.0);
  CHECK(besq0_transition_log(kNegInf, 0.0, rng) == kNegInf);

  const int n = 10000;
  int absorbed = 0;
  for (int i = 0; i < n; ++i) absorbed += besq0_transition(2.0, 1.0, rng) == 0.0;
  const double p = std::exp(-1.0);
  CHECK(std::abs(static_cast<double>(absorbed) / n - p) < 3.0 * binomial_sd(p, n));

  struct Point {
    double x, t, lambda;
  };
  for (auto [x, t, lambda] : {Point{1.0, 1.0, 1.0}, Point{2.0, 0.5, 1.0}, Point{0.5, 2.0, 0.5}}) {
    double sum = 0.0;
    const int m = 100000;
    for (int i = 0; i < m; ++i) sum += std::exp(-lambda * besq0_transition(x, t, rng));
    CHECK(sum / m == doctest::Approx(std::exp(-lambda * x / (1.0 + 2.0 * lambda * t))).epsilon(0.01));
  }
}

TEST_CASE("BESQ(0) in log coordinates far beyond the exact range") {
  // Mean x, variance 4 x t: the relative spread is tiny at x = e^40.
  RngStream rng(41, 4);
  std::vector<double> ratio(2000);
  for (double& r : ratio) r = std::exp(besq0_transition_log(40.0, 0.0, rng) - 40.0);
  const auto m = moments(ratio);
  CHECK(std::abs(m.mean - 1.0) < 4.0 * m.se + 1e-12);
  CHECK(m.se * std::sqrt(2000.0) == doctest::Approx(std::sqrt(4.0 * std::exp(-40.0))).epsilon(0.1));

  // Moderate level: log and linear samplers agree in law.
  std::vector<double> a(5000), b(5000);
  for (double& v : a) v = besq0_transition(3.0, 0.7, rng);
  for (double& v : b) v = std::exp(besq0_transition_log(std::log(3.0), std::log(0.7), rng));
  CHECK(ks_two_sample(EmpiricalDistribution(a), EmpiricalDistribution(b)) < ks_critical_1pct(ks_effective_n(5000, 5000)));
}

TEST_CASE("zero potential gives E[I1] = r^2") {
  for (double r : {1.0, 2.0, 4.0}) {
    RngStream rng(41, 10 + static_cast<std::uint64_t>(r));
    const auto v = linear(0.0, r, r / 50.0);
    std::vector<double> x(10000);
    for (double& s : x) {
      const auto h = hitting_time_rayknight(v, nullptr, rng);
      CHECK(h.I2_omitted);
      CHECK(h.log_H == h.log_I1);
      s = std::exp(h.log_I1);
    }
    const auto m = moments(x);
    CHECK(std::abs(m.mean - r * r) < 3.0 * m.se);
  }
}

TEST_CASE("Ray-Knight output stays finite on large potentials") {
  RngStream rng(41, 20);
  HittingOptions opt;
  for (int i = 0; i < 20; ++i) {
    const auto h = hitting_time_rayknight(kDefault, 1e4, opt, rng);
    CHECK(std::isfinite(h.log_I1));
    CHECK(h.log_I1 > 0.0);
    CHECK(h.engine == Engine::rayknight);
  }
}

TEST_CASE("chain engine: pure drift first-passage mean") {
  // V = -2x: Brownian motion with drift 1, E[H(10)] = 10.
  const double h = 0.02;
  const auto env = chain_environment(linear(-2.0, 10.0, h), linear(2.0, 14.0, h));
  RngStream rng(41, 30);
  std::vector<double> x(10000);
  for (double& s : x) s = std::exp(hitting_time_chain(env, rng).log_H);
  const auto m = moments(x);
  CHECK(std::abs(m.mean - 10.0) < 3.0 * m.se);
}

TEST_CASE("chain engine: symmetric steps on a flat potential") {
  const auto env = chain_environment(linear(0.0, 2.0, 0.1), linear(0.0, 1.0, 0.1));
  const long m = static_cast<long>(env.n_negative);
  CHECK(env.p_right(-m) == 1.0);
  for (long i = -m + 1; i < static_cast<long>(env.n_positive); ++i) {
    CHECK(env.p_right(i) == doctest::Approx(0.5).epsilon(1e-12));
    // Holding time h^2 per visit for Brownian motion on a lattice of step h.
    CHECK(std::exp(env.log_hold(i)) == doctest::Approx(0.01).epsilon(1e-9));
  }
}

TEST_CASE("chain engine rejects large grids") {
  RngStream rng(41, 31);
  HittingOptions opt;
  opt.step = 0.1;
  CHECK_THROWS(hitting_time_chain(kDefault, 2000.0, opt, rng));
}

TEST_CASE("Ray-Knight I1 and chain I1 agree in law at r = 5") {
  HittingOptions opt;
  opt.step = 0.05;
  RngStream a(41, 40), b(41, 41);
  const int n = 2000;
  std::vector<double> rk(n), ch(n);
  for (int i = 0; i < n; ++i) rk[i] = hitting_time_rayknight(kDefault, 5.0, opt, a).log_I1;
  for (int i = 0; i < n; ++i) ch[i] = hitting_time_chain(kDefault, 5.0, opt, b).log_I1;
  const double d = ks_two_sample(EmpiricalDistribution(rk), EmpiricalDistribution(ch));
  MESSAGE("KS(I1 rayknight, I1 chain) = ", d);
  CHECK(d < 0.05);
}

TEST_CASE("I2 continuation") {
  RngStream rng(41, 50);
  const auto neg = negative_potential_path(
      negative_side_path(kDefault, 30.0, 0.1, Resolution::automatic(), rng), 1.0);
  CHECK(I2_estimate(kDefault, neg, 0.0, rng) == 0.0);
  for (int i = 0; i < 200; ++i) CHECK(I2_estimate(kDefault, neg, 1.0 + i, rng) >= 0.0);
  CHECK_THROWS(I2_estimate(kDefault, neg, -1.0, rng));
}

TEST_CASE("I2 becomes negligible against I1 as r grows") {
  HittingOptions opt;
  opt.include_I2 = true;
  std::vector<double> medians;
  for (double r : {1e2, 1e3, 1e4}) {
    RngStream rng(41, 60 + static_cast<std::uint64_t>(std::log10(r)));
    std::vector<double> ratio(200);
    for (double& q : ratio) {
      const auto h = hitting_time_rayknight(kDefault, r, opt, rng);
      CHECK_FALSE(h.I2_omitted);
      CHECK(h.log_H >= h.log_I1);
      CHECK(h.I2 >= 0.0);
      q = h.log_I2 - h.log_I1;
    }
    medians.push_back(median(ratio));
    MESSAGE("r = ", r, ": median log(I2 / I1) = ", medians.back());
  }
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("hitting samples are reproducible") {
  HittingOptions opt;
  opt.include_I2 = true;
  for (int engine = 0; engine < 2; ++engine) {
    RngStream a(41, 70), b(41, 70);
    const auto x = engine ? hitting_time_chain(kDefault, 5.0, opt, a)
                          : hitting_time_rayknight(kDefault, 50.0, opt, a);
    const auto y = engine ? hitting_time_chain(kDefault, 5.0, opt, b)
                          : hitting_time_rayknight(kDefault, 50.0, opt, b);
    CHECK(x.log_I1 == y.log_I1);
    CHECK(x.log_I2 == y.log_I2);
    CHECK(x.log_H == y.log_H);
    CHECK(x.engine == y.engine);
  }
}
