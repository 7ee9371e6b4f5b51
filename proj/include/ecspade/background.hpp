#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ecspade/error.hpp"

namespace ecspade {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorRef = Eigen::Ref<const Vector>;

/// Multivariate-t background with mean `mu`, covariance `R` and tail `nu`.
///
/// The density kernel is [(nu - 2) + Delta(x)]^{-(d + nu)/2} where Delta is
/// the squared Mahalanobis distance under R, so R is the true covariance
/// (the scale matrix of the standard parameterization is R (nu - 2) / nu).
/// Immutable once built; the Cholesky factor and inverse are computed here
/// and nowhere else.
class BackgroundModel {
 public:
  BackgroundModel(Vector mean, Matrix covariance, double nu);

  Eigen::Index dim() const noexcept { return mean_.size(); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return covariance_; }
  double nu() const noexcept { return nu_; }

  /// Lower-triangular L with L L' = covariance.
  const Matrix& cholesky_factor() const noexcept { return factor_; }
  const Matrix& inverse() const noexcept { return inverse_; }
  double log_det_covariance() const noexcept { return log_det_; }

  /// log c in p(x) = c [(nu - 2) + Delta(x)]^{-(d + nu)/2}.
  double log_normalizer() const noexcept { return log_c_; }

  /// L^{-1} v. No centering.
  Vector whiten(const VectorRef& v) const;

  /// (x - mu)' R^{-1} (x - mu), by forward substitution against L.
  double mahalanobis_sq(const VectorRef& x) const;

  double log_density(const VectorRef& x) const;

  /// R^{-1} v via the cached factorization.
  Vector solve(const VectorRef& v) const;

  void check_dim(const VectorRef& x, const char* what) const;

 private:
  Vector mean_;
  Matrix covariance_;
  double nu_;
  Eigen::LLT<Matrix> llt_;
  Matrix factor_;
  Matrix inverse_;
  double log_det_ = 0.0;
  double log_c_ = 0.0;
  double log_c_reduced_ = 0.0;  // log c - ((d + nu)/2) log(nu - 2)
};

BackgroundModel make_background(Vector mean, Matrix covariance, double nu);

/// Deterministic generator addressed by (seed, stream). Distinct streams of the
/// same seed are seeded independently through std::seed_seq, so parallel work
/// partitions streams instead of sharing one engine.
class StreamGenerator {
 public:
  using engine_type = std::mt19937_64;

  StreamGenerator(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type engine_;
};

struct SampleBatch {
  RowMatrix rows;  // n x d
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// n i.i.d. draws z = mu + L g sqrt((nu - 2) / s), g ~ N(0, I), s ~ chi^2(nu).
SampleBatch sample(const BackgroundModel& model, Eigen::Index n, StreamGenerator& gen);

}  // namespace ecspade
