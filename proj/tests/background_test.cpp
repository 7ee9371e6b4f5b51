#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ecspade/background.hpp"
#include "ecspade/oracles.hpp"

namespace ecspade {
namespace {

TEST(MakeBackground, IdentityCaseCachesFactorAndInverse) {
  const BackgroundModel m = make_background(Vector::Zero(1), Matrix::Identity(1, 1), 10.0);
  EXPECT_DOUBLE_EQ(m.cholesky_factor()(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m.inverse()(0, 0), 1.0);
  EXPECT_EQ(m.dim(), 1);
}

TEST(MakeBackground, FigureModel) {
  const BackgroundModel m = make_background(Vector::Constant(10, 2.0), Matrix::Identity(10, 10), 10.0);
  EXPECT_EQ(m.dim(), 10);
  EXPECT_TRUE(m.cholesky_factor().isIdentity(0.0));
  EXPECT_DOUBLE_EQ(m.log_det_covariance(), 0.0);
}

TEST(MakeBackground, Errors) {
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  try {
    make_background(Vector::Zero(2), indefinite, 10.0);
    FAIL() << "expected NotSPD";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSPD);
  }

  for (double nu : {2.0, 1.5, -3.0, std::nan("")}) {
    try {
      make_background(Vector::Zero(2), Matrix::Identity(2, 2), nu);
      FAIL() << "expected BadNu for nu=" << nu;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::BadNu);
    }
  }

  try {
    make_background(Vector::Zero(3), Matrix::Identity(2, 2), 10.0);
    FAIL() << "expected DimMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimMismatch);
  }

  Matrix skew = Matrix::Identity(2, 2);
  skew(0, 1) = 0.1;
  try {
    make_background(Vector::Zero(2), skew, 10.0);
    FAIL() << "expected NotSymmetric";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
}

TEST(Mahalanobis, SimpleValues) {
  const BackgroundModel m = make_background(Vector::Zero(2), Matrix::Identity(2, 2), 10.0);
  EXPECT_DOUBLE_EQ(m.mahalanobis_sq(Vector::Zero(2)), 0.0);
  EXPECT_DOUBLE_EQ(m.mahalanobis_sq(Eigen::Vector2d(3.0, 4.0)), 25.0);
  EXPECT_THROW(m.mahalanobis_sq(Vector::Zero(3)), Error);
}

TEST(Mahalanobis, MatchesExplicitInverse) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index d = 1 + rep % 9;
    const Matrix r = oracle::random_spd(d, rng);
    const Vector mu = oracle::random_vector(d, rng);
    const BackgroundModel m = make_background(mu, r, 5.0);
    const Vector x = oracle::random_vector(d, rng, 3.0);
    const double expected = oracle::explicit_mahalanobis(r, mu, x);
    EXPECT_NEAR(m.mahalanobis_sq(x), expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST(Mahalanobis, AffineInvariance) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index d = 2 + rep % 6;
    const Matrix r = oracle::random_spd(d, rng);
    const Vector mu = oracle::random_vector(d, rng);
    const Vector x = oracle::random_vector(d, rng, 2.0);
    // Diagonally dominant, hence invertible.
    const Matrix transform = oracle::random_spd(d, rng) + oracle::random_vector(d, rng).asDiagonal().toDenseMatrix();
    const Vector shift = oracle::random_vector(d, rng);
    const BackgroundModel base = make_background(mu, r, 7.0);
    Matrix moved_cov = transform * r * transform.transpose();
    moved_cov = 0.5 * (moved_cov + moved_cov.transpose());
    const BackgroundModel moved = make_background(transform * mu + shift, moved_cov, 7.0);
    const double a = base.mahalanobis_sq(x);
    EXPECT_NEAR(moved.mahalanobis_sq(transform * x + shift), a, 1e-8 * std::max(1.0, a));
  }
}

TEST(LogDensity, GaussianLimitAtMode) {
  const BackgroundModel m = make_background(Vector::Zero(1), Matrix::Identity(1, 1), 1e6);
  EXPECT_NEAR(m.log_density(Vector::Zero(1)), -0.5 * std::log(2.0 * std::numbers::pi), 1e-3);
}

TEST(LogDensity, KernelMatchesNormalizer) {
  const BackgroundModel m = make_background(Vector::Zero(3), Matrix::Identity(3, 3) * 2.0, 6.5);
  const Eigen::Vector3d x(0.3, -1.0, 2.0);
  const double delta = m.mahalanobis_sq(x);
  const double expected = m.log_normalizer() - 0.5 * (3.0 + 6.5) * std::log((6.5 - 2.0) + delta);
  EXPECT_NEAR(m.log_density(x), expected, 1e-12);
}

TEST(LogDensity, IntegratesToOne) {
  // d = 1 and d = 2, nu = 10; the truncated tail beyond |x| = 60 is below 1e-7.
  const BackgroundModel one = make_background(Vector::Zero(1), Matrix::Identity(1, 1), 10.0);
  EXPECT_NEAR(oracle::density_mass(one, 60.0, 200'000), 1.0, 1e-3);
  const BackgroundModel two = make_background(Vector::Zero(2), Matrix::Identity(2, 2), 10.0);
  EXPECT_NEAR(oracle::density_mass(two, 40.0, 1'600), 1.0, 1e-3);

  Matrix r(2, 2);
  r << 2.0, 0.6, 0.6, 1.0;
  const BackgroundModel corr = make_background(Eigen::Vector2d(1.0, -1.0), r, 4.0);
  EXPECT_NEAR(oracle::density_mass(corr, 80.0, 2'400), 1.0, 1e-3);
}

TEST(LogDensity, MaximizedAtMean) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index d = 1 + rep % 5;
    const BackgroundModel m = make_background(oracle::random_vector(d, rng), oracle::random_spd(d, rng), 3.0 + rep);
    const double at_mean = m.log_density(m.mean());
    for (int k = 0; k < 100; ++k) {
      EXPECT_GT(at_mean, m.log_density(m.mean() + oracle::random_vector(d, rng, 0.5)));
    }
  }
}

TEST(LogDensity, HeavierTailDominatesFarOut) {
  const Eigen::Index d = 4;
  const BackgroundModel heavy = make_background(Vector::Zero(d), Matrix::Identity(d, d), 3.0);
  const BackgroundModel light = make_background(Vector::Zero(d), Matrix::Identity(d, d), 30.0);
  Vector x = Vector::Zero(d);
  x(0) = std::sqrt(100.0 * d);  // Delta(x) = 100 d
  EXPECT_GT(heavy.log_density(x), light.log_density(x));
}

TEST(Sample, MomentsMatch) {
  const BackgroundModel m = make_background(Vector::Zero(2), Matrix::Identity(2, 2), 10.0);
  StreamGenerator gen(42, 0);
  const SampleBatch b = sample(m, 100'000, gen);
  const Eigen::RowVectorXd mean = b.rows.colwise().mean();
  EXPECT_NEAR(mean(0), 0.0, 0.02);
  EXPECT_NEAR(mean(1), 0.0, 0.02);
  const RowMatrix centered = b.rows.rowwise() - mean;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(b.rows.rows() - 1);
  EXPECT_LT((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Sample, MahalanobisMeanEqualsDimension) {
  const Eigen::Index d = 10;
  const BackgroundModel m = make_background(Vector::Constant(d, 2.0), Matrix::Identity(d, d), 10.0);
  StreamGenerator gen(43, 0);
  const SampleBatch b = sample(m, 100'000, gen);
  double total = 0.0;
  for (Eigen::Index i = 0; i < b.rows.rows(); ++i) total += m.mahalanobis_sq(b.rows.row(i).transpose());
  EXPECT_NEAR(total / static_cast<double>(b.rows.rows()), static_cast<double>(d), 0.02 * d);
}

TEST(Sample, CorrelatedCovarianceRecovered) {
  Matrix r(3, 3);
  r << 4.0, 1.0, 0.5, 1.0, 2.0, -0.3, 0.5, -0.3, 1.0;
  const BackgroundModel m = make_background(Eigen::Vector3d(1.0, 2.0, 3.0), r, 8.0);
  StreamGenerator gen(44, 3);
  const SampleBatch b = sample(m, 200'000, gen);
  const Eigen::RowVectorXd mean = b.rows.colwise().mean();
  const RowMatrix centered = b.rows.rowwise() - mean;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(b.rows.rows() - 1);
  EXPECT_LT((cov - r).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Sample, DeterministicPerStream) {
  const BackgroundModel m = make_background(Vector::Zero(3), Matrix::Identity(3, 3), 5.0);
  StreamGenerator a(9, 4), b(9, 4), c(9, 5);
  const SampleBatch first = sample(m, 500, a);
  const SampleBatch second = sample(m, 500, b);
  const SampleBatch other = sample(m, 500, c);
  EXPECT_TRUE((first.rows.array() == second.rows.array()).all());
  EXPECT_FALSE((first.rows.array() == other.rows.array()).all());
  EXPECT_EQ(first.seed, 9u);
  EXPECT_EQ(first.stream, 4u);
  EXPECT_TRUE(first.rows.allFinite());
}

TEST(Sample, RejectsEmpty) {
  const BackgroundModel m = make_background(Vector::Zero(1), Matrix::Identity(1, 1), 5.0);
  StreamGenerator gen(1, 0);
  EXPECT_THROW(sample(m, 0, gen), Error);
}

}  // namespace
}  // namespace ecspade
