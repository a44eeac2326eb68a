#include "patrol/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace patrol {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double bits_to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double decision_draw(std::uint64_t seed, std::uint64_t ordinal) {
  return bits_to_unit(mix64(mix64(seed) ^ mix64(ordinal + 0x51ed270b7a64e9e3ULL)));
}

double Rng::uniform() { return bits_to_unit(engine_()); }

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

bool Rng::bernoulli(double p) { return uniform() < p; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0,1], keeps log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("truncated_normal: empty support");
  // Plain rejection; fine for the mild truncations used here.
  for (;;) {
    const double x = normal(mean, sd);
    if (x >= lo && x <= hi) return x;
  }
}

std::int64_t Rng::geometric(double mean) {
  if (mean <= 0.0) return 0;
  const double p = 1.0 / (1.0 + mean);
  const double u = uniform();
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

std::int64_t Rng::poisson(double lambda) {
  if (lambda <= 0.0) return 0;
  // Knuth's product method; adequate for the modest rates used here.
  const double limit = std::exp(-lambda);
  std::int64_t k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

std::int64_t Rng::zero_inflated_poisson(double pi0, double lambda) {
  if (uniform() < pi0) return 0;
  return poisson(lambda);
}

double Rng::gamma(double shape) {
  if (shape <= 0.0) throw std::invalid_argument("gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back.
    const double g = gamma(shape + 1.0);
    const double u = 1.0 - uniform();
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

}  // namespace patrol
