#include <cmath>
#include <vector>

#include "doctest.h"
#include "slowdrift/rng.hpp"

using slowdrift::RngStream;

TEST_CASE("same seed and stream replay the same sequence") {
  RngStream a(99, 3);
  RngStream b(99, 3);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  RngStream c(99, 4);
  RngStream d(98, 3);
  RngStream e(99, 3);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = e.next_u64();
    same_c += c.next_u64() == x;
    same_d += d.next_u64() == x;
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("bulk fills equal repeated single draws") {
  for (std::size_t n : {1u, 2u, 7u, 1024u, 1025u, 3000u}) {
    RngStream bulk(5, 17);
    RngStream single(5, 17);
    // Offset by one word so the spare-word path is exercised.
    bulk.next_u64();
    single.next_u64();
    std::vector<double> u(n);
    bulk.fill_uniform(u);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(u[i] == single.uniform());
    }
    CHECK(bulk.next_u64() == single.next_u64());
  }
}

TEST_CASE("uniform moments") {
  RngStream rng(1, 1);
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.003);
}

TEST_CASE("normal fills have unit variance and zero mean") {
  RngStream rng(2, 2);
  std::vector<double> z(100001);
  rng.fill_normal(z);
  double sum = 0.0;
  double sum2 = 0.0;
  for (double x : z) {
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(z.size());
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));

  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / 1e5) < 4.0 / std::sqrt(1e5));
  CHECK(std::abs(s2 / 1e5 - 1.0) < 4.0 * std::sqrt(2.0 / 1e5));
}

TEST_CASE("gamma and poisson means and variances") {
  RngStream rng(3, 3);
  for (double shape : {0.3, 1.0, 4.5, 200.0}) {
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      s += g;
      s2 += g * g;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CAPTURE(shape);
    CHECK(std::abs(mean - shape) < 4.0 * std::sqrt(shape / n));
    CHECK(var == doctest::Approx(shape).epsilon(0.05));
  }
  for (double mean : {0.2, 3.0, 9.99, 10.0, 57.0, 1e4}) {
    const int n = 100000;
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = rng.poisson(mean);
      REQUIRE(k == std::floor(k));
      s += k;
      s2 += k * k;
    }
    const double m = s / n;
    CAPTURE(mean);
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(s2 / n - m * m == doctest::Approx(mean).epsilon(0.05));
  }
  CHECK(rng.poisson(0.0) == 0.0);
  CHECK_THROWS(rng.poisson(-1.0));
  CHECK_THROWS(rng.gamma(0.0));
}
