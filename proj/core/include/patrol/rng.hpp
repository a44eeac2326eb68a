#pragma once

#include <cstdint>
#include <random>

namespace patrol {

// Stateless 64-bit mix (splitmix64 finalizer). Used both to derive stream
// seeds and to key order-independent per-observation draws.
std::uint64_t mix64(std::uint64_t x);

// Uniform in [0,1) from 64 random bits (53-bit mantissa).
double bits_to_unit(std::uint64_t bits);

// Per-observation decision draw: a pure function of (seed, ordinal), so the
// value does not depend on scoring order or parallelism.
double decision_draw(std::uint64_t seed, std::uint64_t ordinal);

// Seeded variate stream for the synthetic environment. The engine is
// std::mt19937_64 (bit-exact across platforms); every distribution is
// generated explicitly here so draw sequences are reproducible across
// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  double uniform();                            // [0,1)
  std::uint64_t uniform_int(std::uint64_t n);  // [0,n), n > 0
  bool bernoulli(double p);
  double normal();  // standard normal, Box-Muller
  double normal(double mean, double sd);
  double truncated_normal(double mean, double sd, double lo, double hi);
  // Failures-before-first-success geometric on {0,1,...} with the given mean.
  std::int64_t geometric(double mean);
  std::int64_t poisson(double lambda);
  // Zero with probability pi0, else Poisson(lambda).
  std::int64_t zero_inflated_poisson(double pi0, double lambda);
  double gamma(double shape);  // unit scale
  double beta(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace patrol
