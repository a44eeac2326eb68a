#include "patrol/linucb.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "patrol/errors.hpp"

namespace patrol {

void validate(const UcbParams& params) {
  if (!std::isfinite(params.exploration) || params.exploration < 0.0)
    throw ConfigError("exploration factor must be finite and >= 0");
  if (!std::isfinite(params.cost) || params.cost <= 0.0 || params.cost >= 1.0)
    throw ConfigError("monitoring cost must lie in (0,1)");
}

LinUcbModel::LinUcbModel(int dim) : dim_(dim) {
  if (dim <= 0) throw ConfigError("model dimension must be positive");
  gram_ = Eigen::MatrixXd::Identity(dim, dim);
  response_ = Eigen::VectorXd::Zero(dim);
  theta_ = Eigen::VectorXd::Zero(dim);
  llt_.compute(gram_);
}

const Eigen::VectorXd& LinUcbModel::ridge_fit() {
  llt_.compute(gram_);
  if (llt_.info() != Eigen::Success)
    throw NumericError("ridge_fit: factorization failed");
  theta_ = llt_.solve(response_);
  if (!theta_.allFinite())
    throw NumericError("ridge_fit: solution has non-finite entries");
  const double denom = std::max(response_.norm(), 1.0);
  const double residual = (gram_ * theta_ - response_).norm() / denom;
  if (!(residual <= 1e-10))
    throw NumericError("ridge_fit: relative residual " + std::to_string(residual) +
                       " exceeds 1e-10");
  return theta_;
}

Decision LinUcbModel::ucb_score(std::span<const double> x,
                                const UcbParams& params) const {
  if (static_cast<int>(x.size()) != dim_)
    throw ConfigError("ucb_score: feature vector has dimension " +
                      std::to_string(x.size()) + ", expected " +
                      std::to_string(dim_));
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
  if (!xv.allFinite())
    throw ConfigError("ucb_score: feature vector has non-finite entries");

  Decision d;
  d.mean_score = theta_.dot(xv);
  // gram = L L', so x' gram^-1 x = |L^-1 x|^2: one triangular solve.
  d.standard_error = llt_.matrixL().solve(xv).norm();
  d.ucb_score = d.mean_score + params.exploration * d.standard_error;
  d.monitor = d.ucb_score > params.cost;
  return d;
}

void LinUcbModel::ingest_batch(std::span<const LabeledFeature> batch) {
  for (const auto& item : batch) {
    if (static_cast<int>(item.x.size()) != dim_)
      throw ConfigError("ingest_batch: feature vector dimension mismatch");
    if (item.label != 0.0 && item.label != 1.0)
      throw ConfigError("ingest_batch: labels must be 0 or 1");
    for (double v : item.x)
      if (!std::isfinite(v))
        throw ConfigError("ingest_batch: non-finite feature value");
  }
  for (const auto& item : batch) {
    Eigen::Map<const Eigen::VectorXd> xv(item.x.data(), dim_);
    gram_.selfadjointView<Eigen::Lower>().rankUpdate(xv, 1.0);
    response_ += item.label * xv;
  }
  gram_ = gram_.selfadjointView<Eigen::Lower>();
  observation_count_ += static_cast<std::int64_t>(batch.size());
  ridge_fit();
}

void LinUcbModel::restore(Eigen::MatrixXd gram, Eigen::VectorXd response,
                          std::int64_t observation_count) {
  if (gram.rows() != dim_ || gram.cols() != dim_ || response.size() != dim_)
    throw ConfigError("restore: checkpoint dimension mismatch");
  if (observation_count < 0)
    throw ConfigError("restore: negative observation count");
  gram_ = std::move(gram);
  response_ = std::move(response);
  observation_count_ = observation_count;
  ridge_fit();
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

double take(std::istream& is, const char* what) {
  double v;
  if (!(is >> v)) throw IoError(std::string("model checkpoint: bad ") + what);
  return v;
}

}  // namespace

void write_model_checkpoint(std::ostream& os, const LinUcbModel& model,
                            const FeatureStats& stats, const UcbParams& params) {
  os << "patrol_model 1\n";
  os << "dim " << model.dim() << "\n";
  os << "observation_count " << model.observation_count() << "\n";
  os << "gram";
  for (int r = 0; r < model.dim(); ++r)
    for (int c = 0; c < model.dim(); ++c) {
      os << ' ';
      put(os, model.gram()(r, c));
    }
  os << "\nresponse";
  for (int i = 0; i < model.dim(); ++i) {
    os << ' ';
    put(os, model.response()(i));
  }
  os << "\nstats_mean";
  for (double v : stats.mean) {
    os << ' ';
    put(os, v);
  }
  os << "\nstats_sd";
  for (double v : stats.sd) {
    os << ' ';
    put(os, v);
  }
  os << "\nexploration ";
  put(os, params.exploration);
  os << "\ncost ";
  put(os, params.cost);
  os << "\n";
}

ModelCheckpoint read_model_checkpoint(std::istream& is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "patrol_model" || version != 1)
    throw IoError("model checkpoint: unrecognized header");

  auto expect = [&is](const char* key) {
    std::string word;
    if (!(is >> word) || word != key)
      throw IoError(std::string("model checkpoint: expected '") + key + "'");
  };

  expect("dim");
  int dim = 0;
  if (!(is >> dim) || dim <= 0) throw IoError("model checkpoint: bad dim");
  expect("observation_count");
  std::int64_t count = 0;
  if (!(is >> count)) throw IoError("model checkpoint: bad observation_count");

  Eigen::MatrixXd gram(dim, dim);
  expect("gram");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) gram(r, c) = take(is, "gram entry");
  Eigen::VectorXd response(dim);
  expect("response");
  for (int i = 0; i < dim; ++i) response(i) = take(is, "response entry");

  ModelCheckpoint ckpt{LinUcbModel(dim), FeatureStats::identity(), UcbParams{}};
  expect("stats_mean");
  for (double& v : ckpt.stats.mean) v = take(is, "stats mean");
  expect("stats_sd");
  for (double& v : ckpt.stats.sd) v = take(is, "stats sd");
  expect("exploration");
  ckpt.params.exploration = take(is, "exploration");
  expect("cost");
  ckpt.params.cost = take(is, "cost");
  validate(ckpt.params);
  validate(ckpt.stats);

  ckpt.model.restore(std::move(gram), std::move(response), count);
  return ckpt;
}

}  // namespace patrol
