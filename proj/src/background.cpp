#include "ecspade/background.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ecspade {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotSPD: return "NotSPD";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::BadNu: return "BadNu";
    case ErrorCode::ZeroTarget: return "ZeroTarget";
    case ErrorCode::IdentityMismatch: return "IdentityMismatch";
    case ErrorCode::BadBeta: return "BadBeta";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::Numerical: return "Numerical";
  }
  return "Unknown";
}

BackgroundModel::BackgroundModel(Vector mean, Matrix covariance, double nu)
    : mean_(std::move(mean)), covariance_(std::move(covariance)), nu_(nu) {
  const Eigen::Index d = mean_.size();
  if (d < 1) throw Error(ErrorCode::DimMismatch, "mean must have at least one component");
  if (covariance_.rows() != d || covariance_.cols() != d) {
    throw Error(ErrorCode::DimMismatch, "covariance is " + std::to_string(covariance_.rows()) + "x" +
                                            std::to_string(covariance_.cols()) + ", mean has length " +
                                            std::to_string(d));
  }
  if (!(nu_ > 2.0) || std::isnan(nu_)) {
    throw Error(ErrorCode::BadNu, "nu must be > 2, got " + std::to_string(nu_));
  }
  if (!mean_.allFinite() || !covariance_.allFinite()) {
    throw Error(ErrorCode::NotSPD, "mean and covariance must be finite");
  }
  const double scale = covariance_.cwiseAbs().maxCoeff();
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::NotSymmetric, "covariance is not symmetric");
  }

  llt_.compute(covariance_);
  if (llt_.info() != Eigen::Success) throw Error(ErrorCode::NotSPD, "Cholesky factorization failed");
  factor_ = llt_.matrixL();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(factor_(i, i) > 0.0)) throw Error(ErrorCode::NotSPD, "non-positive pivot");
  }
  inverse_ = llt_.solve(Matrix::Identity(d, d));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose());
  log_det_ = 2.0 * factor_.diagonal().array().log().sum();

  const double dd = static_cast<double>(d);
  const double half_dof = 0.5 * (dd + nu_);
  log_c_reduced_ = std::lgamma(half_dof) - std::lgamma(0.5 * nu_) -
                   0.5 * dd * std::log(std::numbers::pi * (nu_ - 2.0)) - 0.5 * log_det_;
  log_c_ = log_c_reduced_ + half_dof * std::log(nu_ - 2.0);
}

BackgroundModel make_background(Vector mean, Matrix covariance, double nu) {
  return BackgroundModel(std::move(mean), std::move(covariance), nu);
}

void BackgroundModel::check_dim(const VectorRef& x, const char* what) const {
  if (x.size() != dim()) {
    throw Error(ErrorCode::DimMismatch, std::string(what) + " has length " + std::to_string(x.size()) +
                                            ", expected " + std::to_string(dim()));
  }
}

Vector BackgroundModel::whiten(const VectorRef& v) const {
  check_dim(v, "vector");
  return llt_.matrixL().solve(v);
}

Vector BackgroundModel::solve(const VectorRef& v) const {
  check_dim(v, "vector");
  return llt_.solve(v);
}

double BackgroundModel::mahalanobis_sq(const VectorRef& x) const {
  check_dim(x, "pixel");
  const Vector w = llt_.matrixL().solve(x - mean_);
  return w.squaredNorm();
}

double BackgroundModel::log_density(const VectorRef& x) const {
  const double delta = mahalanobis_sq(x);
  const double half_dof = 0.5 * (static_cast<double>(dim()) + nu_);
  // log c - k log((nu-2) + Delta) rearranged so large nu does not cancel.
  return log_c_reduced_ - half_dof * std::log1p(delta / (nu_ - 2.0));
}

StreamGenerator::StreamGenerator(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eed5eedU};
  engine_.seed(seq);
}

SampleBatch sample(const BackgroundModel& model, Eigen::Index n, StreamGenerator& gen) {
  if (n < 1) throw Error(ErrorCode::EmptyInput, "sample count must be >= 1");
  const Eigen::Index d = model.dim();
  const double nu = model.nu();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(nu);
  const auto& L = model.cholesky_factor();

  SampleBatch batch;
  batch.seed = gen.seed();
  batch.stream = gen.stream();
  batch.rows.resize(n, d);
  Vector g(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(j) = normal(gen.engine());
    const double s = chi2(gen.engine());
    const double scale = std::sqrt((nu - 2.0) / s);
    const Vector correlated = L.triangularView<Eigen::Lower>() * g;
    batch.rows.row(i) = (model.mean() + scale * correlated).transpose();
  }
  return batch;
}

}  // namespace ecspade
