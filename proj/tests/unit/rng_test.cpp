#include <cmath>

#include "doctest.h"
#include "patrol/rng.hpp"

using namespace patrol;

TEST_CASE("rng: identical seeds give identical sequences") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.uniform() == b.uniform());
}

TEST_CASE("rng: uniform stays in [0,1)") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng: bernoulli edge probabilities") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("rng: normal moments") {
  Rng rng(3);
  const int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
}

TEST_CASE("rng: truncated normal respects its support") {
  Rng rng(4);
  double mn = 1e18, mx = -1e18, s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.truncated_normal(-43.994, 207.828, -736.0, 716.0);
    mn = std::min(mn, x);
    mx = std::max(mx, x);
    s += x;
  }
  CHECK(mn >= -736.0);
  CHECK(mx <= 716.0);
  // Mild asymmetric truncation pulls the mean up by ~0.22.
  CHECK(std::abs(s / n - -43.773) < 1.5);
}

TEST_CASE("rng: geometric mean matches") {
  Rng rng(5);
  const int n = 300000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(rng.geometric(3.751));
  CHECK(s / n == doctest::Approx(3.751).epsilon(0.01));
}

TEST_CASE("rng: poisson mean matches at a large rate") {
  Rng rng(6);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(rng.poisson(17.65));
  CHECK(s / n == doctest::Approx(17.65).epsilon(0.005));
}

TEST_CASE("rng: zero-inflated poisson mean and zero mass") {
  Rng rng(7);
  const int n = 2000000;
  const double pi0 = 0.935747, lam = 0.56651;
  double s = 0.0;
  long zeros = 0;
  for (int i = 0; i < n; ++i) {
    const auto v = rng.zero_inflated_poisson(pi0, lam);
    s += static_cast<double>(v);
    zeros += v == 0 ? 1 : 0;
  }
  CHECK(s / n == doctest::Approx((1.0 - pi0) * lam).epsilon(0.02));
  const double zero_mass = pi0 + (1.0 - pi0) * std::exp(-lam);
  CHECK(static_cast<double>(zeros) / n == doctest::Approx(zero_mass).epsilon(0.001));
}

TEST_CASE("rng: beta mean matches") {
  Rng rng(8);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.beta(2.0, 4.46154);
  CHECK(s / n == doctest::Approx(2.0 / 6.46154).epsilon(0.01));
}

TEST_CASE("decision draws are pure functions of (seed, ordinal)") {
  CHECK(decision_draw(9, 42) == decision_draw(9, 42));
  CHECK(decision_draw(9, 42) != decision_draw(9, 43));
  CHECK(decision_draw(9, 42) != decision_draw(10, 42));
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = decision_draw(11, static_cast<std::uint64_t>(i));
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    s += u;
  }
  CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
}
