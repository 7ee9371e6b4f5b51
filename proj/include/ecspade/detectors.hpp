#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "ecspade/background.hpp"

namespace ecspade {

/// Which background likelihood a scorer maximizes: the multivariate t of the
/// model, or its nu -> infinity Gaussian limit (nu is then ignored).
enum class Likelihood { StudentT, Gaussian };

/// Target signature with everything that depends only on (model, t).
///
/// `projector()` is Q = P' R^{-1} P with P = I - t t' R^{-1} / (t' R^{-1} t);
/// it is built from that definition and checked at construction against the
/// rank-one form R^{-1} - q q' with q the matched-filter vector.
class TargetContext {
 public:
  TargetContext(const BackgroundModel& model, Vector target);

  Eigen::Index dim() const noexcept { return target_.size(); }
  const Vector& target() const noexcept { return target_; }
  /// R^{-1} t
  const Vector& whitened_filter() const noexcept { return rinv_target_; }
  /// t' R^{-1} t
  double target_energy() const noexcept { return target_energy_; }
  /// q = R^{-1} t / sqrt(t' R^{-1} t)
  const Vector& matched_filter() const noexcept { return matched_filter_; }
  const Matrix& projector() const noexcept { return projector_; }
  /// a = mu' Q mu
  double mean_projected_energy() const noexcept { return mean_projected_energy_; }

  /// L^{-1} t and L^{-1} (t - mu).
  const Vector& whitened_target() const noexcept { return whitened_target_; }
  const Vector& whitened_offset() const noexcept { return whitened_offset_; }
  /// (t - mu)' R^{-1} (t - mu)
  double offset_energy() const noexcept { return offset_energy_; }

 private:
  Vector target_;
  Vector rinv_target_;
  double target_energy_ = 0.0;
  Vector matched_filter_;
  Matrix projector_;
  double mean_projected_energy_ = 0.0;
  Vector whitened_target_;
  Vector whitened_offset_;
  double offset_energy_ = 0.0;
};

TargetContext make_target_context(const BackgroundModel& model, Vector target);

/// q(beta) = a + b / beta + c / beta^2 and the stationarity quadratic
/// A beta^2 + B beta + C = 0 of the profile log-likelihood.
struct PixelQuadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  double q(double beta) const noexcept { return a + b / beta + c / (beta * beta); }
};

PixelQuadratic pixel_quadratic(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               Likelihood likelihood = Likelihood::StudentT);

struct BetaHat {
  double beta = 1.0;
  bool clamped = false;
  /// C == 0: the whitened pixel lies on the target line.
  bool degenerate = false;
};

inline constexpr double kDegenerateBetaFloor = 1e-12;

/// Positive root of the quadratic, clamped to 1; clamped iff -C >= A + B.
BetaHat beta_hat(const PixelQuadratic& pq);

/// Unconstrained abundance minimizing the Mahalanobis residual for fixed beta.
double alpha_hat(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x, double beta);

struct GlrtEstimate {
  double alpha_hat = 0.0;
  double beta_hat = 1.0;
  double log_score = 0.0;
  bool clamped_beta = false;
  bool degenerate = false;
};

struct GlrtOptions {
  /// Enforce alpha >= 0. When the closed form lands on a negative abundance
  /// the fit moves to the alpha = 0 boundary (exact piecewise closed form); the
  /// additive detectors in DetectorBank become one-sided.
  bool constrained_alpha = false;
  /// Mutation-testing hook: beta_hat is multiplied by (1 + beta_hat_mutation)
  /// before the score is evaluated. Must stay 0 outside sensitivity checks.
  double beta_hat_mutation = 0.0;
};

/// Closed-form GLRT for x = beta z + alpha t in a multivariate-t background.
GlrtEstimate ec2spade_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                            const GlrtOptions& opts = {});

/// Gaussian-background counterpart of ec2spade_score; model.nu() is unused.
GlrtEstimate gauss2spade_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               const GlrtOptions& opts = {});

/// Additive model (beta pinned to 1), multivariate t.
double ec_amf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x);
/// 1/2 (q' (x - mu))^2
double amf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x);

struct ReplacementFit {
  double alpha_hat = 0.0;
  double log_score = 0.0;
};

/// Replacement model (beta = 1 - alpha, alpha in [0, 1)) fitted by a 256-point
/// grid on [0, 1 - 1e-6] and golden-section refinement around the best node.
ReplacementFit replacement_fit(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               Likelihood likelihood);
double ec_ftmf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x);
double ftmf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x);

inline constexpr int kReplacementGridPoints = 256;
inline constexpr double kReplacementAlphaMax = 1.0 - 1e-6;

/// [Delta((x - alpha t)/beta) - Delta(x)] / (1 + Delta(x)/(nu - 2)).
/// Monotone *decreasing* in the likelihood ratio for known (alpha, beta).
double clairvoyant_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                         double alpha, double beta);
/// Delta((x - alpha t)/beta) - Delta(x)
double clairvoyant_gauss_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               double alpha, double beta);

/// log p_x(alpha, beta; x) up to an additive constant independent of
/// (alpha, beta), evaluated directly from the residual vector.
double log_likelihood(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x, double alpha,
                      double beta, Likelihood likelihood);

struct Interval {
  double lo;
  double hi;
};

struct GridSize {
  int alpha;
  int beta;
};

/// Exhaustive grid maximization of log_likelihood over alpha x beta followed by
/// one golden-section refinement pass around the best node. Reference
/// implementation for the closed forms; orders of magnitude slower.
GlrtEstimate brute_force_glrt(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                              Interval alpha_range, Interval beta_range, GridSize grid,
                              Likelihood likelihood = Likelihood::StudentT);

enum class DetectorId { Amf, EcAmf, Ftmf, EcFtmf, Spade2, EcSpade2, Clairvoyant, ClairvoyantGauss };

inline constexpr std::array<DetectorId, 8> kAllDetectors = {
    DetectorId::Amf,    DetectorId::EcAmf,    DetectorId::Ftmf,        DetectorId::EcFtmf,
    DetectorId::Spade2, DetectorId::EcSpade2, DetectorId::Clairvoyant, DetectorId::ClairvoyantGauss};

std::string_view to_string(DetectorId id);
std::optional<DetectorId> parse_detector(std::string_view name);
bool is_clairvoyant(DetectorId id);

/// Uniform "larger is more target-like" front end over every scorer. The
/// clairvoyant statistics are negated here.
class DetectorBank {
 public:
  DetectorBank(const BackgroundModel& model, const TargetContext& ctx, double true_alpha, double true_beta,
               GlrtOptions opts = {});

  double score(DetectorId id, const VectorRef& x) const;

 private:
  const BackgroundModel& model_;
  const TargetContext& ctx_;
  double true_alpha_;
  double true_beta_;
  GlrtOptions opts_;
};

}  // namespace ecspade
