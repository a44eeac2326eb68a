#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "patrol/covariates.hpp"

namespace patrol {

struct UcbParams {
  double exploration = 1.0;  // delta >= 0, weight on the standard-error bonus
  double cost = 0.01;        // c in (0,1), per-observation monitoring cost
};

void validate(const UcbParams& params);

struct Decision {
  bool monitor = false;
  double mean_score = 0.0;
  double standard_error = 0.0;
  double ucb_score = 0.0;
};

struct LabeledFeature {
  FeatureVector x;
  double label = 0.0;  // {0,1}
};

// Ridge sufficient statistics for the linear monitoring policy:
//   gram     accumulates X'X + I (starts at identity, unit ridge)
//   response accumulates X'y
//   theta    cached solution of gram * theta = response
// Scoring reads the cached Cholesky factor and is safe to call concurrently;
// ingest_batch / ridge_fit are single-writer operations.
class LinUcbModel {
 public:
  explicit LinUcbModel(int dim = static_cast<int>(kFeatureDim));

  int dim() const { return dim_; }
  std::int64_t observation_count() const { return observation_count_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& response() const { return response_; }
  const Eigen::VectorXd& theta() const { return theta_; }

  // Solves gram * theta = response via the SPD factorization and caches the
  // result. Throws NumericError if the solve is unusable (non-finite entries
  // or relative residual above 1e-10).
  const Eigen::VectorXd& ridge_fit();

  // mean = x'theta, se = sqrt(x' gram^-1 x), score = mean + delta * se.
  // Monitor iff score > cost (strict; ties are not monitored).
  Decision ucb_score(std::span<const double> x, const UcbParams& params) const;

  // Accumulates one day's monitored observations in a fixed left-to-right
  // order and refreshes the fit. The batch is validated up front and
  // rejected atomically on dimension mismatch or a non-binary label.
  void ingest_batch(std::span<const LabeledFeature> batch);

  // Restores gram/response/count from a checkpoint and refits.
  void restore(Eigen::MatrixXd gram, Eigen::VectorXd response,
               std::int64_t observation_count);

 private:
  int dim_;
  std::int64_t observation_count_ = 0;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd response_;
  Eigen::VectorXd theta_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Flat text checkpoint: dim, observation count, gram (row-major), response,
// feature stats and the UCB parameters in force. Values are written with 17
// significant digits so the round-trip is bit-exact.
void write_model_checkpoint(std::ostream& os, const LinUcbModel& model,
                            const FeatureStats& stats, const UcbParams& params);

struct ModelCheckpoint {
  LinUcbModel model;
  FeatureStats stats;
  UcbParams params;
};

ModelCheckpoint read_model_checkpoint(std::istream& is);

}  // namespace patrol
