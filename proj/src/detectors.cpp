#include "ecspade/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ecspade/optimize.hpp"

namespace ecspade {
namespace {

double half_dof(const BackgroundModel& model) { return 0.5 * (static_cast<double>(model.dim()) + model.nu()); }

std::string describe(const VectorRef& x) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ']';
  return os.str();
}

void check_context(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  if (ctx.dim() != model.dim()) throw Error(ErrorCode::DimMismatch, "target context and model disagree on d");
  model.check_dim(x, "pixel");
}

// Evidence of the alternative relative to the null, given the two Mahalanobis
// terms: log of [(nu-2) + null] / [(nu-2) + alt] scaled by (d + nu)/2, or half
// the difference in the Gaussian limit.
double mahalanobis_gain(const BackgroundModel& model, double null_term, double alt_term, Likelihood likelihood) {
  if (likelihood == Likelihood::Gaussian) return 0.5 * (null_term - alt_term);
  const double shift = model.nu() - 2.0;
  return half_dof(model) * std::log1p((null_term - alt_term) / (shift + alt_term));
}

// Maximum over alpha >= 0 when the unconstrained optimum has alpha_hat < 0.
// For fixed beta the likelihood is unimodal in alpha, so the constrained
// abundance is max(alpha_hat(beta), 0), and alpha_hat(beta) is linear in beta.
// On the set where alpha_hat(beta) <= 0 the profile is the alpha = 0 likelihood,
// itself a quadratic in 1/beta built from R^{-1} instead of Q; elsewhere it is
// the unconstrained profile, whose peak lies outside that set. The constrained
// maximum is therefore the alpha = 0 stationary point clipped to the set.
GlrtEstimate boundary_glrt(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                           Likelihood likelihood, double delta) {
  const Vector& rinv_t = ctx.whitened_filter();
  const double slope = rinv_t.dot(model.mean());  // alpha_hat(beta) = (intercept - slope beta) / t'R^-1 t
  const double intercept = rinv_t.dot(x);

  const Vector rinv_x = model.solve(x);
  PixelQuadratic pq;
  pq.a = model.mean().dot(model.solve(model.mean()));
  pq.b = -2.0 * model.mean().dot(rinv_x);
  pq.c = std::max(0.0, x.dot(rinv_x));
  const double d = static_cast<double>(model.dim());
  if (likelihood == Likelihood::Gaussian) {
    pq.A = d;
    pq.B = -pq.b / 2.0;
  } else {
    pq.A = d + d * (pq.a - 2.0) / model.nu();
    pq.B = -pq.b / 2.0 + d * pq.b / (2.0 * model.nu());
  }
  pq.C = -pq.c;
  const BetaHat bh = beta_hat(pq);

  double lo = kDegenerateBetaFloor;
  double hi = 1.0;
  if (slope > 0.0) lo = std::max(lo, intercept / slope);
  else if (slope < 0.0) hi = std::min(hi, intercept / slope);
  const double beta = std::clamp(bh.beta, lo, std::max(lo, hi));

  GlrtEstimate est;
  est.alpha_hat = 0.0;
  est.beta_hat = beta;
  est.clamped_beta = beta >= 1.0;
  est.degenerate = bh.degenerate;
  const double q = std::max(pq.q(beta), 0.0);
  est.log_score = std::max(0.0, -d * std::log(beta) + mahalanobis_gain(model, delta, q, likelihood));
  return est;
}

GlrtEstimate closed_form_glrt(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                              const GlrtOptions& opts, Likelihood likelihood) {
  const PixelQuadratic pq = pixel_quadratic(ctx, model, x, likelihood);
  const BetaHat bh = beta_hat(pq);

  GlrtEstimate est;
  est.beta_hat = bh.beta;
  if (opts.beta_hat_mutation != 0.0) est.beta_hat = std::min(1.0, bh.beta * (1.0 + opts.beta_hat_mutation));
  est.clamped_beta = bh.clamped;
  est.degenerate = bh.degenerate;
  est.alpha_hat = alpha_hat(ctx, model, x, est.beta_hat);

  const double d = static_cast<double>(model.dim());
  const double delta = model.mahalanobis_sq(x);
  const double q = std::max(pq.q(est.beta_hat), 0.0);
  est.log_score = -d * std::log(est.beta_hat) + mahalanobis_gain(model, delta, q, likelihood);

  if (opts.constrained_alpha && est.alpha_hat < 0.0) return boundary_glrt(ctx, model, x, likelihood, delta);
  return est;
}

}  // namespace

TargetContext::TargetContext(const BackgroundModel& model, Vector target) : target_(std::move(target)) {
  model.check_dim(target_, "target");
  if (!target_.allFinite()) throw Error(ErrorCode::ZeroTarget, "target must be finite");
  if (target_.isZero(0.0)) throw Error(ErrorCode::ZeroTarget, "target signature is the zero vector");

  const Eigen::Index d = dim();
  const Matrix& rinv = model.inverse();
  rinv_target_ = model.solve(target_);
  target_energy_ = target_.dot(rinv_target_);
  if (!(target_energy_ > 0.0)) throw Error(ErrorCode::ZeroTarget, "t' R^-1 t is not positive");
  matched_filter_ = rinv_target_ / std::sqrt(target_energy_);

  // Q = P' R^{-1} P, P = I - t t' R^{-1} / (t' R^{-1} t).
  const Matrix projection = Matrix::Identity(d, d) - target_ * rinv_target_.transpose() / target_energy_;
  projector_ = projection.transpose() * rinv * projection;
  projector_ = 0.5 * (projector_ + projector_.transpose());

  const Matrix rank_one_form = rinv - matched_filter_ * matched_filter_.transpose();
  const double scale = std::max(1.0, rinv.cwiseAbs().maxCoeff());
  const double mismatch = (projector_ - rank_one_form).cwiseAbs().maxCoeff();
  if (mismatch > 1e-10 * scale) {
    throw Error(ErrorCode::IdentityMismatch,
                "projector forms disagree by " + std::to_string(mismatch) + " (scale " + std::to_string(scale) + ")");
  }

  mean_projected_energy_ = std::max(0.0, model.mean().dot(projector_ * model.mean()));
  whitened_target_ = model.whiten(target_);
  whitened_offset_ = model.whiten(target_ - model.mean());
  offset_energy_ = whitened_offset_.squaredNorm();
}

TargetContext make_target_context(const BackgroundModel& model, Vector target) {
  return TargetContext(model, std::move(target));
}

PixelQuadratic pixel_quadratic(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               Likelihood likelihood) {
  check_context(ctx, model, x);
  const Vector qx = ctx.projector() * x;
  PixelQuadratic pq;
  pq.a = ctx.mean_projected_energy();
  pq.b = -2.0 * model.mean().dot(qx);
  pq.c = std::max(0.0, x.dot(qx));

  const double d = static_cast<double>(model.dim());
  if (likelihood == Likelihood::Gaussian) {
    pq.A = d;
    pq.B = -pq.b / 2.0;
  } else {
    const double nu = model.nu();
    pq.A = d + d * (pq.a - 2.0) / nu;
    pq.B = -pq.b / 2.0 + d * pq.b / (2.0 * nu);
  }
  pq.C = -pq.c;
  return pq;
}

BetaHat beta_hat(const PixelQuadratic& pq) {
  if (!(pq.A > 0.0)) throw Error(ErrorCode::Numerical, "beta quadratic has non-positive leading coefficient");
  BetaHat out;
  if (pq.C == 0.0) {
    // Roots 0 and -B/A; take the larger one, kept strictly positive.
    out.degenerate = true;
    const double root = -pq.B / pq.A;
    out.clamped = root >= 1.0;
    out.beta = std::clamp(root, kDegenerateBetaFloor, 1.0);
    return out;
  }
  if (-pq.C >= pq.A + pq.B) {
    out.clamped = true;
    out.beta = 1.0;
    return out;
  }
  const double sq = std::sqrt(pq.B * pq.B - 4.0 * pq.A * pq.C);
  // Two algebraically equal forms of the positive root; pick the one free of
  // cancellation.
  const double root = pq.B <= 0.0 ? (-pq.B + sq) / (2.0 * pq.A) : (-2.0 * pq.C) / (pq.B + sq);
  out.beta = std::min(root, 1.0);
  return out;
}

double alpha_hat(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x, double beta) {
  check_context(ctx, model, x);
  if (!(beta > 0.0)) throw Error(ErrorCode::BadBeta, "beta must be positive");
  return ctx.whitened_filter().dot(x - beta * model.mean()) / ctx.target_energy();
}

GlrtEstimate ec2spade_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                            const GlrtOptions& opts) {
  return closed_form_glrt(ctx, model, x, opts, Likelihood::StudentT);
}

GlrtEstimate gauss2spade_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               const GlrtOptions& opts) {
  return closed_form_glrt(ctx, model, x, opts, Likelihood::Gaussian);
}

namespace {

struct AdditiveTerms {
  double delta;         // (x - mu)' R^{-1} (x - mu)
  double filter_sq;     // (q' (x - mu))^2
  double residual;      // (x - mu)' Q (x - mu)
};

AdditiveTerms additive_terms(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  check_context(ctx, model, x);
  const Vector w = model.whiten(x - model.mean());
  const double proj = ctx.whitened_target().dot(w);
  AdditiveTerms terms;
  terms.delta = w.squaredNorm();
  terms.filter_sq = proj * proj / ctx.target_energy();
  terms.residual = std::max(0.0, terms.delta - terms.filter_sq);
  return terms;
}

}  // namespace

double ec_amf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  const AdditiveTerms terms = additive_terms(ctx, model, x);
  return half_dof(model) * std::log1p(terms.filter_sq / ((model.nu() - 2.0) + terms.residual));
}

double amf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  return 0.5 * additive_terms(ctx, model, x).filter_sq;
}

ReplacementFit replacement_fit(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               Likelihood likelihood) {
  check_context(ctx, model, x);
  // With s = t - mu and u = x - mu, the residual (x - alpha t)/(1 - alpha) - mu
  // is (u - alpha s)/(1 - alpha), so every objective evaluation is O(1).
  const Vector wu = model.whiten(x - model.mean());
  const double uu = wu.squaredNorm();
  const double us = wu.dot(ctx.whitened_offset());
  const double ss = ctx.offset_energy();
  const double d = static_cast<double>(model.dim());
  const double k = half_dof(model);
  const double shift = model.nu() - 2.0;
  const bool gaussian = likelihood == Likelihood::Gaussian;

  auto objective = [&](double alpha) {
    const double keep = 1.0 - alpha;
    const double numer = std::max(0.0, uu - 2.0 * alpha * us + alpha * alpha * ss);
    const double delta = numer / (keep * keep);
    const double fit = gaussian ? -0.5 * delta : -k * std::log1p(delta / shift);
    return -d * std::log(keep) + fit;
  };

  const double step = kReplacementAlphaMax / (kReplacementGridPoints - 1);
  int best = 0;
  double best_value = objective(0.0);
  const double null_value = best_value;
  for (int i = 1; i < kReplacementGridPoints; ++i) {
    const double v = objective(i * step);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  double best_alpha = best * step;
  const double lo = std::max(0.0, (best - 1) * step);
  const double hi = std::min(kReplacementAlphaMax, (best + 1) * step);
  const Maximum refined = golden_section_maximize(objective, lo, hi, 1e-10);
  if (refined.value > best_value) {
    best_value = refined.value;
    best_alpha = refined.x;
  }
  return {best_alpha, std::max(0.0, best_value - null_value)};
}

double ec_ftmf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  return replacement_fit(ctx, model, x, Likelihood::StudentT).log_score;
}

double ftmf_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x) {
  return replacement_fit(ctx, model, x, Likelihood::Gaussian).log_score;
}

namespace {

double clairvoyant_difference(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                              double alpha, double beta, double* null_term) {
  check_context(ctx, model, x);
  if (!(beta > 0.0) || beta > 1.0) throw Error(ErrorCode::BadBeta, "beta must lie in (0, 1]");
  const Vector corrected = (x - alpha * ctx.target()) / beta;
  *null_term = model.mahalanobis_sq(x);
  return model.mahalanobis_sq(corrected) - *null_term;
}

}  // namespace

double clairvoyant_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                         double alpha, double beta) {
  double delta = 0.0;
  const double diff = clairvoyant_difference(ctx, model, x, alpha, beta, &delta);
  return diff / (1.0 + delta / (model.nu() - 2.0));
}

double clairvoyant_gauss_score(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                               double alpha, double beta) {
  double delta = 0.0;
  return clairvoyant_difference(ctx, model, x, alpha, beta, &delta);
}

double log_likelihood(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x, double alpha,
                      double beta, Likelihood likelihood) {
  check_context(ctx, model, x);
  if (!(beta > 0.0)) throw Error(ErrorCode::BadBeta, "beta must be positive");
  const Vector z = (x - alpha * ctx.target()) / beta;
  const double delta = model.mahalanobis_sq(z);
  const double d = static_cast<double>(model.dim());
  if (likelihood == Likelihood::Gaussian) return -d * std::log(beta) - 0.5 * delta;
  return -d * std::log(beta) - half_dof(model) * std::log1p(delta / (model.nu() - 2.0));
}

GlrtEstimate brute_force_glrt(const TargetContext& ctx, const BackgroundModel& model, const VectorRef& x,
                              Interval alpha_range, Interval beta_range, GridSize grid, Likelihood likelihood) {
  if (grid.alpha < 2 || grid.beta < 2) throw Error(ErrorCode::OutOfRange, "grid needs at least 2 nodes per axis");
  if (alpha_range.hi < alpha_range.lo || beta_range.hi < beta_range.lo) {
    throw Error(ErrorCode::OutOfRange, "empty search range");
  }
  if (!(beta_range.lo > 0.0)) throw Error(ErrorCode::BadBeta, "beta range must be positive");

  auto ll = [&](double a, double b) { return log_likelihood(ctx, model, x, a, b, likelihood); };
  auto node = [](Interval r, int n, int i) { return r.lo + (r.hi - r.lo) * i / (n - 1); };

  int best_i = 0;
  int best_j = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.beta; ++i) {
    const double b = node(beta_range, grid.beta, i);
    for (int j = 0; j < grid.alpha; ++j) {
      const double v = ll(node(alpha_range, grid.alpha, j), b);
      if (v > best) {
        best = v;
        best_i = i;
        best_j = j;
      }
    }
  }
  double best_alpha = node(alpha_range, grid.alpha, best_j);
  double best_beta = node(beta_range, grid.beta, best_i);

  // Refinement: for fixed beta the residual is quadratic in alpha, so the
  // profile over the whole alpha range is unimodal. The beta bracket comes from
  // the profile at every beta node, not the 2-D grid winner, because alpha and
  // beta are strongly correlated and a coarse alpha axis biases the latter.
  const double alpha_tol = 1e-11 * std::max(1.0, alpha_range.hi - alpha_range.lo);
  auto profile_alpha = [&](double b) {
    return golden_section_maximize([&](double a) { return ll(a, b); }, alpha_range.lo, alpha_range.hi, alpha_tol);
  };
  auto consider = [&](double b, const Maximum& inner) {
    if (inner.value > best) {
      best = inner.value;
      best_alpha = inner.x;
      best_beta = b;
    }
  };
  int bracket_i = 0;
  double bracket_best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.beta; ++i) {
    const double b = node(beta_range, grid.beta, i);
    const Maximum inner = profile_alpha(b);
    consider(b, inner);
    if (inner.value > bracket_best) {
      bracket_best = inner.value;
      bracket_i = i;
    }
  }
  const double beta_lo = node(beta_range, grid.beta, std::max(bracket_i - 1, 0));
  const double beta_hi = node(beta_range, grid.beta, std::min(bracket_i + 1, grid.beta - 1));
  const Maximum refined_beta =
      golden_section_maximize([&](double b) { return profile_alpha(b).value; }, beta_lo, beta_hi, 1e-11);
  consider(refined_beta.x, profile_alpha(refined_beta.x));

  GlrtEstimate est;
  est.alpha_hat = best_alpha;
  est.beta_hat = best_beta;
  est.clamped_beta = best_beta >= beta_range.hi;
  est.log_score = best - ll(0.0, 1.0);
  return est;
}

std::string_view to_string(DetectorId id) {
  switch (id) {
    case DetectorId::Amf: return "amf";
    case DetectorId::EcAmf: return "ec-amf";
    case DetectorId::Ftmf: return "ftmf";
    case DetectorId::EcFtmf: return "ec-ftmf";
    case DetectorId::Spade2: return "2spade";
    case DetectorId::EcSpade2: return "ec-2spade";
    case DetectorId::Clairvoyant: return "clairvoyant";
    case DetectorId::ClairvoyantGauss: return "clairvoyant-gauss";
  }
  return "unknown";
}

std::optional<DetectorId> parse_detector(std::string_view name) {
  for (DetectorId id : kAllDetectors) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

bool is_clairvoyant(DetectorId id) { return id == DetectorId::Clairvoyant || id == DetectorId::ClairvoyantGauss; }

DetectorBank::DetectorBank(const BackgroundModel& model, const TargetContext& ctx, double true_alpha,
                           double true_beta, GlrtOptions opts)
    : model_(model), ctx_(ctx), true_alpha_(true_alpha), true_beta_(true_beta), opts_(opts) {}

double DetectorBank::score(DetectorId id, const VectorRef& x) const {
  double s = 0.0;
  switch (id) {
    case DetectorId::Amf:
    case DetectorId::EcAmf:
      if (opts_.constrained_alpha && alpha_hat(ctx_, model_, x, 1.0) < 0.0) break;
      s = id == DetectorId::Amf ? amf_score(ctx_, model_, x) : ec_amf_score(ctx_, model_, x);
      break;
    case DetectorId::Ftmf: s = ftmf_score(ctx_, model_, x); break;
    case DetectorId::EcFtmf: s = ec_ftmf_score(ctx_, model_, x); break;
    case DetectorId::Spade2: s = gauss2spade_score(ctx_, model_, x, opts_).log_score; break;
    case DetectorId::EcSpade2: s = ec2spade_score(ctx_, model_, x, opts_).log_score; break;
    case DetectorId::Clairvoyant: s = -clairvoyant_score(ctx_, model_, x, true_alpha_, true_beta_); break;
    case DetectorId::ClairvoyantGauss:
      s = -clairvoyant_gauss_score(ctx_, model_, x, true_alpha_, true_beta_);
      break;
  }
  if (!std::isfinite(s)) {
    throw Error(ErrorCode::Numerical,
                std::string(to_string(id)) + " produced a non-finite score at pixel " + describe(x));
  }
  return s;
}

}  // namespace ecspade
