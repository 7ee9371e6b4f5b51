#include "ecspade/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

namespace ecspade::oracle {

double explicit_mahalanobis(const Matrix& covariance, const Vector& mean, const Vector& x) {
  const Matrix inv = covariance.fullPivLu().inverse();
  const Vector u = x - mean;
  return u.dot(inv * u);
}

namespace {

double residual_delta(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, double alpha,
                      double beta) {
  const Vector z = (x - alpha * ctx.target()) / beta;
  return explicit_mahalanobis(model.covariance(), model.mean(), z);
}

double likelihood_from_delta(const BackgroundModel& model, double beta, double delta, Likelihood likelihood) {
  const double d = static_cast<double>(model.dim());
  if (likelihood == Likelihood::Gaussian) return -d * std::log(beta) - 0.5 * delta;
  return -d * std::log(beta) - 0.5 * (d + model.nu()) * std::log((model.nu() - 2.0) + delta);
}

}  // namespace

double alpha_by_search(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, double beta,
                       double lo, double hi) {
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (residual_delta(ctx, model, x, m1, beta) < residual_delta(ctx, model, x, m2, beta)) hi = m2;
    else lo = m1;
  }
  return 0.5 * (lo + hi);
}

double profile_log_likelihood(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, double beta,
                              Likelihood likelihood) {
  // Conditional optimum of alpha from the normal equation of the residual,
  // (x - alpha t - beta mu)' R^{-1} t = 0, solved with the explicit inverse.
  const Matrix inv = model.covariance().fullPivLu().inverse();
  const Vector rt = inv * ctx.target();
  const double alpha = rt.dot(x - beta * model.mean()) / rt.dot(ctx.target());
  const Vector z = (x - alpha * ctx.target()) / beta - model.mean();
  return likelihood_from_delta(model, beta, z.dot(inv * z), likelihood);
}

double beta_by_grid(const TargetContext& ctx, const BackgroundModel& model, const Vector& x, std::int64_t n,
                    Likelihood likelihood) {
  const Matrix inv = model.covariance().fullPivLu().inverse();
  const Vector rt = inv * ctx.target();
  const double tt = rt.dot(ctx.target());
  double best = -std::numeric_limits<double>::infinity();
  double best_beta = 1.0;
  Vector z(model.dim());
  for (std::int64_t i = 1; i <= n; ++i) {
    const double beta = static_cast<double>(i) / static_cast<double>(n);
    const double alpha = rt.dot(x - beta * model.mean()) / tt;
    z = (x - alpha * ctx.target()) / beta - model.mean();
    const double v = likelihood_from_delta(model, beta, z.dot(inv * z), likelihood);
    if (v > best) {
      best = v;
      best_beta = beta;
    }
  }
  return best_beta;
}

DenseFit replacement_by_grid(const TargetContext& ctx, const BackgroundModel& model, const Vector& x,
                             std::int64_t n, Likelihood likelihood) {
  const double alpha_max = 1.0 - 1e-6;
  const double null_value = likelihood_from_delta(model, 1.0, residual_delta(ctx, model, x, 0.0, 1.0), likelihood);
  DenseFit best{0.0, 0.0};
  const Matrix& L = model.cholesky_factor();
  Vector u(model.dim());
  for (std::int64_t i = 0; i < n; ++i) {
    const double alpha = alpha_max * static_cast<double>(i) / static_cast<double>(n - 1);
    const double beta = 1.0 - alpha;
    u = (x - alpha * ctx.target()) / beta - model.mean();
    const double delta = L.triangularView<Eigen::Lower>().solve(u).squaredNorm();
    const double v = likelihood_from_delta(model, beta, delta, likelihood) - null_value;
    if (v > best.log_score) best = {alpha, v};
  }
  return best;
}

double pairwise_auc(std::span<const double> h0, std::span<const double> h1) {
  long double wins = 0.0L;
  for (double s1 : h1) {
    for (double s0 : h0) {
      if (s1 > s0) wins += 1.0L;
      else if (s1 == s0) wins += 0.5L;
    }
  }
  return static_cast<double>(wins / (static_cast<long double>(h0.size()) * static_cast<long double>(h1.size())));
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double rank_correlation(std::span<const double> a, std::span<const double> b) {
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double density_mass(const BackgroundModel& model, double half_width, int nodes_per_axis) {
  const double h = 2.0 * half_width / nodes_per_axis;
  const Vector& mu = model.mean();
  double mass = 0.0;
  if (model.dim() == 1) {
    Vector x(1);
    for (int i = 0; i < nodes_per_axis; ++i) {
      x(0) = mu(0) - half_width + (i + 0.5) * h;
      mass += std::exp(model.log_density(x));
    }
    return mass * h;
  }
  Vector x(2);
  for (int i = 0; i < nodes_per_axis; ++i) {
    for (int j = 0; j < nodes_per_axis; ++j) {
      x(0) = mu(0) - half_width + (i + 0.5) * h;
      x(1) = mu(1) - half_width + (j + 0.5) * h;
      mass += std::exp(model.log_density(x));
    }
  }
  return mass * h * h;
}

Matrix random_spd(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  Matrix r = g * g.transpose() + static_cast<double>(d) * Matrix::Identity(d, d);
  return 0.5 * (r + r.transpose());
}

Vector random_vector(Eigen::Index d, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

BackgroundModel figure_background(double nu) {
  return make_background(Vector::Constant(10, 2.0), Matrix::Identity(10, 10), nu);
}

Vector figure_target(double target_T) {
  Vector t = Vector::Constant(10, 2.0);
  t(0) += target_T;
  return t;
}

std::vector<Vector> random_pixels(const BackgroundModel& model, const TargetContext& ctx, std::size_t n,
                                  std::uint64_t seed) {
  StreamGenerator gen(seed, 0);
  const SampleBatch batch = sample(model, static_cast<Eigen::Index>(n), gen);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> pixels;
  pixels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector z = batch.rows.row(static_cast<Eigen::Index>(i)).transpose();
    if (i % 2 == 0) {
      pixels.push_back(std::move(z));
    } else {
      const double alpha = unit(gen.engine());
      const double beta = 0.1 + 0.9 * unit(gen.engine());
      pixels.push_back(beta * z + alpha * ctx.target());
    }
  }
  return pixels;
}

}  // namespace ecspade::oracle
