#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "slowdrift/distributions.hpp"
#include "slowdrift/stable.hpp"

using namespace slowdrift;

TEST_CASE("empirical distribution basics") {
  EmpiricalDistribution e({3.0, 1.0, 2.0, 2.0});
  CHECK(e.n() == 4);
  CHECK(std::is_sorted(e.samples().begin(), e.samples().end()));
  CHECK(e.ecdf(0.5) == 0.0);
  CHECK(e.ecdf(2.0) == 0.75);
  CHECK(e.ecdf(3.0) == 1.0);
  CHECK_THROWS(EmpiricalDistribution({}));
  CHECK_THROWS(EmpiricalDistribution({1.0, std::nan("")}));
}

TEST_CASE("Frechet and exponential closed forms") {
  CHECK(frechet_cdf({1.5, 1.5, 1.0}, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  CHECK(frechet_cdf({3.0, 1.5, 1.0}, 2.0) == doctest::Approx(0.4930686913952398).epsilon(1e-15));
  CHECK(frechet_cdf({1.0, 1.5, 1.0}, 0.0) == 0.0);
  CHECK(frechet_cdf({1.0, 1.5, 1.0}, -2.0) == 0.0);
  CHECK(exponential_cdf({1.0}, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-15));
  CHECK(exponential_cdf({1.0}, 0.0) == 0.0);
  CHECK(exponential_cdf({1.0}, -1.0) == 0.0);
  CHECK_THROWS(FrechetLaw{0.0, 1.5, 1.0}.validate());
  CHECK_THROWS(FrechetLaw{1.0, 2.5, 1.0}.validate());
  CHECK_THROWS(ExponentialLaw{0.0}.validate());
}

TEST_CASE("CDFs are monotone with limits 0 and 1") {
  const FrechetLaw f{1.0, 1.5, 2.0};
  const ExponentialLaw e{2.0 / 3.0};
  double pf = 0.0, pe = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(-10.0 + 20.0 * i / 999.0);
    CHECK(f.cdf(x) >= pf);
    CHECK(e.cdf(x) >= pe);
    pf = f.cdf(x);
    pe = e.cdf(x);
  }
  CHECK(f.cdf(1e-10) == doctest::Approx(0.0));
  CHECK(f.cdf(1e12) == doctest::Approx(1.0));
  CHECK(e.cdf(1e-12) == doctest::Approx(0.0));
  CHECK(e.cdf(1e4) == 1.0);
}

TEST_CASE("Frechet to exponential pushforward") {
  // P{Y^-alpha <= x} = 1 - F(x^(-1/alpha)) for Y ~ Frechet(c, alpha, 1).
  for (double alpha : {1.2, 1.5, 1.8}) {
    for (double c : {0.5, 1.0, 3.0}) {
      const FrechetLaw f{c, alpha, 1.0};
      const ExponentialLaw e{c / alpha};
      double worst = 0.0;
      for (int i = 1; i <= 1000; ++i) {
        const double x = 1e-3 * i * 10.0 / alpha;
        worst = std::max(worst, std::abs((1.0 - f.cdf(std::pow(x, -1.0 / alpha))) - e.cdf(x)));
      }
      CHECK(worst < 1e-12);
      for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const double x = -std::log1p(-q) / e.rate;
        CHECK(1.0 - f.cdf(std::pow(x, -1.0 / alpha)) == doctest::Approx(q).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("theorem rescale") {
  std::vector<double> log_h{2.0, -1.0, 0.5, 0.0, 4.0};
  const auto r1 = theorem_rescale(log_h, 1.0, 1.5);
  CHECK(r1.excluded == 2);
  CHECK(r1.frechet_scale.samples() == std::vector<double>{0.5, 2.0, 4.0});
  const auto r8 = theorem_rescale(log_h, 8.0, 1.5);
  CHECK(r8.frechet_scale.samples()[2] == doctest::Approx(4.0 / 4.0));
  // Decreasing map: ordering reverses.
  const auto& fs = r8.frechet_scale.samples();
  const auto& es = r8.exponential_scale.samples();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    CHECK(es[fs.size() - 1 - i] == doctest::Approx(std::pow(fs[i], -1.5)).epsilon(1e-15));
  }
  CHECK_THROWS(theorem_rescale(log_h, 0.0, 1.5));
  CHECK_THROWS(theorem_rescale(std::vector<double>{-1.0}, 1.0, 1.5));
}

TEST_CASE("transformed exact Frechet draws are exponential") {
  RngStream rng(51, 1);
  std::vector<double> log_h(10000);
  for (double& v : log_h) v = sample_largest_jump_exact(1.0, 1.5, 1.0, rng);
  const auto r = theorem_rescale(log_h, 1.0, 1.5);
  const FrechetLaw f{1.0, 1.5, 1.0};
  const ExponentialLaw e{1.0 / 1.5};
  const double df = ks_one_sample(r.frechet_scale, [&](double x) { return f.cdf(x); });
  const double de = ks_one_sample(r.exponential_scale, [&](double x) { return e.cdf(x); });
  CHECK(de < 0.02);
  CHECK(std::abs(df - de) < 1e-12);
}

TEST_CASE("one-sample KS") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_one_sample(EmpiricalDistribution({0.5}), uniform) == 0.5);
  CHECK(ks_one_sample(EmpiricalDistribution({0.25, 0.75}), uniform) == 0.25);

  const EmpiricalDistribution e({1.0, 2.0, 3.0, 4.0});
  CHECK(ks_one_sample(e, [&](double x) { return e.ecdf(x); }) == 0.25);
}

TEST_CASE("one-sample KS under the null") {
  RngStream rng(51, 2);
  const std::size_t n = 1000;
  int within = 0;
  const int reps = 1000;
  const ExponentialLaw law{2.0};
  for (int i = 0; i < reps; ++i) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.exponential() / law.rate;
    within += ks_one_sample(EmpiricalDistribution(x), [&](double t) { return law.cdf(t); }) <
              ks_critical_1pct(static_cast<double>(n));
  }
  CHECK(within >= 990);
}

TEST_CASE("two-sample KS") {
  const EmpiricalDistribution a({1.0, 2.0, 3.0});
  CHECK(ks_two_sample(a, a) == 0.0);
  CHECK(ks_two_sample(a, EmpiricalDistribution({4.0, 5.0})) == 1.0);
  CHECK(ks_two_sample(EmpiricalDistribution({1.0, 2.0}), EmpiricalDistribution({1.5})) == 0.5);
  // Ties across the samples: both ECDFs jump before they are compared.
  CHECK(ks_two_sample(EmpiricalDistribution({1.0, 2.0}), EmpiricalDistribution({1.0, 2.0, 2.0})) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(ks_two_sample(EmpiricalDistribution({1.0, 1.0, 2.0}), EmpiricalDistribution({1.0, 2.0})) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("KS statistics are symmetric and invariant under increasing maps") {
  RngStream rng(51, 3);
  std::vector<double> x(500), y(700);
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = 0.2 + rng.normal();
  const EmpiricalDistribution ex(x), ey(y);
  CHECK(ks_two_sample(ex, ey) == ks_two_sample(ey, ex));

  std::vector<double> tx(x), ty(y);
  for (double& v : tx) v = std::exp(3.0 * v);
  for (double& v : ty) v = std::exp(3.0 * v);
  CHECK(ks_two_sample(EmpiricalDistribution(tx), EmpiricalDistribution(ty)) ==
        ks_two_sample(ex, ey));

  const ExponentialLaw law{1.0};
  std::vector<double> z(800);
  for (double& v : z) v = rng.exponential();
  const double d = ks_one_sample(EmpiricalDistribution(z), [&](double t) { return law.cdf(t); });
  std::vector<double> lz(z);
  for (double& v : lz) v = std::log(v);
  const double dl =
      ks_one_sample(EmpiricalDistribution(lz), [&](double t) { return law.cdf(std::exp(t)); });
  CHECK(dl == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("KS yardsticks") {
  CHECK(ks_effective_n(100) == 100.0);
  CHECK(ks_effective_n(100, 100) == 50.0);
  CHECK(ks_critical_1pct(10000.0) == doctest::Approx(0.01628));
  CHECK(ks_null_sd(10000.0) == doctest::Approx(0.002603));
  CHECK(binomial_sd(0.5, 100) == doctest::Approx(0.05));
}
