#pragma once

// Reference computations that deliberately avoid the production code paths
// they are used to check: explicit inverses instead of triangular solves,
// dense grids instead of closed forms, O(n^2) pair counting instead of sorting.

#include <cstdint>
#include <span>
#include <vector>

#include "ecspade/background.hpp"
#include "ecspade/detectors.hpp"

namespace ecspade::oracle {

/// (x - mu)' inv(R) (x - mu) with inv(R) from a full-pivot LU.
double explicit_mahalanobis(const Matrix& covariance, const Vector& mean, const Vector& x);

/// Ternary search for the alpha minimizing Delta((x - alpha t)/beta).
double alpha_by_search(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, double beta,
                       double lo, double hi);

/// Profile log-likelihood of beta with alpha at its conditional optimum,
/// evaluated from the residual vector.
double profile_log_likelihood(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, double beta,
                              Likelihood likelihood);

/// argmax over an n-point uniform grid on (0, 1] of the profile likelihood.
double beta_by_grid(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, std::int64_t n,
                    Likelihood likelihood);

struct DenseFit {
  double alpha;
  double log_score;
};

/// Replacement-model GLRT by an n-point grid on [0, 1 - 1e-6], using the
/// direct residual likelihood.
DenseFit replacement_by_grid(const TargetContext& ctx, const BackgroundModel& model, const Vector& x,
                             std::int64_t n, Likelihood likelihood);

/// Mann-Whitney AUC by counting all n0 * n1 pairs, ties worth one half.
double pairwise_auc(std::span<const double> h0, std::span<const double> h1);

/// Spearman rank correlation (average ranks for ties).
double rank_correlation(std::span<const double> a, std::span<const double> b);

/// Midpoint-rule integral of exp(log_density) over [-half_width, half_width]^d
/// around the mean, for d in {1, 2}.
double density_mass(const BackgroundModel& model, double half_width, int nodes_per_axis);

/// Random SPD matrix G G' + d I with G standard normal.
Matrix random_spd(Eigen::Index d, std::mt19937_64& rng);
Vector random_vector(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0);

/// The background of the Figure-1 experiments: d = 10, nu = 10, mu = 2 * 1, R = I.
BackgroundModel figure_background(double nu = 10.0);
/// t = mu + [T, 0, ..., 0]'
Vector figure_target(double target_T = 15.0);

/// Mixture of background draws and implanted pixels beta z + alpha t with
/// alpha ~ U[0, 1], beta ~ U[0.1, 1].
std::vector<Vector> random_pixels(const BackgroundModel& model, const TargetContext& ctx, std::size_t n,
                                  std::uint64_t seed);

}  // namespace ecspade::oracle
