#include "ecspade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "ecspade/oracles.hpp"
#include "ecspade/roc.hpp"

namespace ecspade::verify {
namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult make(std::string name, bool ok, std::string detail) { return {std::move(name), ok, std::move(detail)}; }

}  // namespace

CheckResult glrt_oracle(Likelihood likelihood, std::size_t n_pixels, std::uint64_t seed, double beta_hat_mutation) {
  const BackgroundModel model = oracle::figure_background();
  const TargetContext ctx = make_target_context(model, oracle::figure_target());
  const auto pixels = oracle::random_pixels(model, ctx, n_pixels, seed);
  GlrtOptions opts;
  opts.beta_hat_mutation = beta_hat_mutation;

  double worst = 0.0;
  for (const Vector& x : pixels) {
    const GlrtEstimate closed = likelihood == Likelihood::Gaussian ? gauss2spade_score(ctx, model, x, opts)
                                                                   : ec2spade_score(ctx, model, x, opts);
    const GlrtEstimate brute = brute_force_glrt(ctx, model, x, {-5.0, 5.0}, {1e-4, 1.0}, {64, 64}, likelihood);
    worst = std::max(worst, std::abs(closed.log_score - brute.log_score));
  }
  const char* name = likelihood == Likelihood::Gaussian ? "2spade vs brute-force GLRT" : "ec-2spade vs brute-force GLRT";
  return make(name, worst <= 1e-6, "max |diff| " + fmt_double(worst) + " over " + std::to_string(n_pixels) + " pixels");
}

CheckResult projector_identities(std::size_t n_contexts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_annihilation = 0.0;
  double worst_identity = 0.0;
  for (std::size_t i = 0; i < n_contexts; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(i % 12);
    const Matrix r = oracle::random_spd(d, rng);
    const BackgroundModel model = make_background(oracle::random_vector(d, rng, 2.0), r, 3.0 + 20.0 * (i % 7));
    const TargetContext ctx = make_target_context(model, oracle::random_vector(d, rng, 3.0));
    const Matrix& q = ctx.projector();
    const Vector rinv_t = r.fullPivLu().solve(ctx.target());
    const Vector mf = rinv_t / std::sqrt(ctx.target().dot(rinv_t));
    const Matrix rank_one = r.fullPivLu().inverse() - mf * mf.transpose();
    const double scale = std::max(1.0, rank_one.cwiseAbs().maxCoeff());
    worst_annihilation =
        std::max(worst_annihilation, (q * ctx.target()).cwiseAbs().maxCoeff() / (scale * ctx.target().norm()));
    worst_identity = std::max(worst_identity, (q - rank_one).cwiseAbs().maxCoeff() / scale);
  }
  const bool ok = worst_annihilation <= 1e-10 && worst_identity <= 1e-10;
  return make("Q t = 0 and Q = R^-1 - q q'", ok,
              "max |Qt| " + fmt_double(worst_annihilation) + ", max |Q - (R^-1 - qq')| " + fmt_double(worst_identity) +
                  " over " + std::to_string(n_contexts) + " contexts");
}

CheckResult beta_stationarity(std::size_t n_pixels, std::uint64_t seed) {
  const BackgroundModel model = oracle::figure_background();
  const TargetContext ctx = make_target_context(model, oracle::figure_target());
  const auto pixels = oracle::random_pixels(model, ctx, n_pixels, seed);
  constexpr double h = 1e-6;
  double worst = 0.0;
  std::size_t interior = 0;
  for (const Vector& x : pixels) {
    const GlrtEstimate est = ec2spade_score(ctx, model, x);
    if (est.clamped_beta || est.beta_hat >= 1.0 - h || est.beta_hat <= h) continue;
    ++interior;
    const double up = oracle::profile_log_likelihood(ctx, model, x, est.beta_hat + h, Likelihood::StudentT);
    const double down = oracle::profile_log_likelihood(ctx, model, x, est.beta_hat - h, Likelihood::StudentT);
    worst = std::max(worst, std::abs((up - down) / (2.0 * h)));
  }
  return make("beta_hat stationarity", worst < 1e-6 && interior > 0,
              "max |dL/dbeta| " + fmt_double(worst) + " at " + std::to_string(interior) + " interior optima");
}

CheckResult clamp_and_positivity(std::size_t n_pixels, std::uint64_t seed) {
  const BackgroundModel model = oracle::figure_background();
  const TargetContext ctx = make_target_context(model, oracle::figure_target());
  const auto pixels = oracle::random_pixels(model, ctx, n_pixels, seed);
  std::size_t clamp_mismatch = 0;
  std::size_t non_positive = 0;
  std::size_t clamped = 0;
  for (const Vector& x : pixels) {
    const PixelQuadratic pq = pixel_quadratic(ctx, model, x);
    const BetaHat bh = beta_hat(pq);
    // Textbook root, compared with the clamp decision away from the boundary.
    const double root = (-pq.B + std::sqrt(pq.B * pq.B - 4.0 * pq.A * pq.C)) / (2.0 * pq.A);
    const bool criterion = -pq.C >= pq.A + pq.B;
    if (bh.clamped != criterion || (bh.clamped && bh.beta != 1.0)) ++clamp_mismatch;
    if (std::abs(root - 1.0) > 1e-12 && (root >= 1.0) != bh.clamped) ++clamp_mismatch;
    if (pq.c > 0.0 && !(bh.beta > 0.0)) ++non_positive;
    clamped += bh.clamped ? 1 : 0;
  }
  return make("clamp iff -C >= A+B; beta_hat > 0", clamp_mismatch == 0 && non_positive == 0,
              std::to_string(clamp_mismatch) + " clamp mismatches, " + std::to_string(non_positive) +
                  " non-positive, " + std::to_string(clamped) + "/" + std::to_string(n_pixels) + " clamped");
}

CheckResult gaussian_limit(std::size_t n_pixels, std::uint64_t seed) {
  const BackgroundModel gauss = oracle::figure_background();
  const BackgroundModel heavy = oracle::figure_background(1e8);
  const TargetContext gctx = make_target_context(gauss, oracle::figure_target());
  const TargetContext hctx = make_target_context(heavy, oracle::figure_target());
  const auto pixels = oracle::random_pixels(gauss, gctx, n_pixels, seed);
  constexpr double kAlpha = 0.2;
  constexpr double kBeta = 0.5;

  auto rel = [](double ec, double g) {
    const double diff = std::abs(ec - g);
    // Below 1e-12 both scores are zero to working precision.
    if (diff <= 1e-12) return 0.0;
    return diff / std::max(std::abs(ec), std::abs(g));
  };
  double worst = 0.0;
  bool coefficients_exact = true;
  for (const Vector& x : pixels) {
    worst = std::max(worst, rel(ec2spade_score(hctx, heavy, x).log_score, gauss2spade_score(gctx, gauss, x).log_score));
    worst = std::max(worst, rel(ec_amf_score(hctx, heavy, x), amf_score(gctx, gauss, x)));
    worst = std::max(worst, rel(ec_ftmf_score(hctx, heavy, x), ftmf_score(gctx, gauss, x)));
    worst = std::max(worst, rel(clairvoyant_score(hctx, heavy, x, kAlpha, kBeta),
                                clairvoyant_gauss_score(gctx, gauss, x, kAlpha, kBeta)));

    const PixelQuadratic pq = pixel_quadratic(gctx, gauss, x, Likelihood::Gaussian);
    const Vector qx = gctx.projector() * x;
    coefficients_exact = coefficients_exact && pq.A == static_cast<double>(gauss.dim()) &&
                         pq.B == gauss.mean().dot(qx) && pq.C == -std::max(0.0, x.dot(qx));
  }
  return make("Gaussian limit (nu = 1e8)", worst < 1e-3 && coefficients_exact,
              "max relative error " + fmt_double(worst) + (coefficients_exact ? ", A=d B=mu'Qx C=-x'Qx exact"
                                                                              : ", coefficient display violated"));
}

CheckResult glrt_dominance(std::size_t n_pixels, std::uint64_t seed) {
  const BackgroundModel model = oracle::figure_background();
  const TargetContext ctx = make_target_context(model, oracle::figure_target());
  const auto pixels = oracle::random_pixels(model, ctx, n_pixels, seed);
  double worst = 0.0;
  for (const Vector& x : pixels) {
    const double full = ec2spade_score(ctx, model, x).log_score;
    const double best_sub = std::max(ec_amf_score(ctx, model, x), ec_ftmf_score(ctx, model, x));
    worst = std::max(worst, best_sub - full);
  }
  return make("ec-2spade >= max(ec-amf, ec-ftmf)", worst <= 1e-9,
              "max shortfall " + fmt_double(worst) + " over " + std::to_string(n_pixels) + " pixels");
}

CheckResult auc_oracle(std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int rep = 0; rep < 4; ++rep) {
    std::vector<double> h0(n_samples), h1(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      h0[i] = normal(rng);
      h1[i] = normal(rng) + 0.5 * rep;
      if (rep % 2 == 1) {  // coarse quantization forces ties
        h0[i] = std::round(h0[i] * 4.0) / 4.0;
        h1[i] = std::round(h1[i] * 4.0) / 4.0;
      }
    }
    worst = std::max(worst, std::abs(roc(h0, h1).auc - oracle::pairwise_auc(h0, h1)));
  }
  return make("AUC vs Mann-Whitney pair count", worst <= 1e-12, "max |diff| " + fmt_double(worst));
}

CheckResult roc_monotone_invariance(std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> h0(n_samples), h1(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    h0[i] = normal(rng);
    h1[i] = normal(rng) + 1.0;
  }
  const RocCurve base = roc(h0, h1);
  bool identical = true;
  auto compare = [&](auto&& f) {
    std::vector<double> g0(h0.size()), g1(h1.size());
    std::ranges::transform(h0, g0.begin(), f);
    std::ranges::transform(h1, g1.begin(), f);
    const RocCurve t = roc(g0, g1);
    identical = identical && t.auc == base.auc && t.points.size() == base.points.size() &&
                std::ranges::equal(t.points, base.points,
                                   [](const RocPoint& a, const RocPoint& b) { return a.pfa == b.pfa && a.pd == b.pd; });
  };
  compare([](double s) { return std::exp(s); });
  compare([](double s) { return 4.0 * s; });
  compare([](double s) { return std::atan(s) * 2.0 + 8.0 * s; });
  return make("ROC invariant under monotone transforms", identical,
              identical ? "bit-identical vertices" : "vertices changed");
}

std::vector<CheckResult> run_all(const Options& opts) {
  std::vector<CheckResult> out;
  out.push_back(glrt_oracle(Likelihood::StudentT, opts.oracle_pixels, opts.seed, opts.beta_hat_mutation));
  out.push_back(glrt_oracle(Likelihood::Gaussian, opts.oracle_pixels, opts.seed + 1, opts.beta_hat_mutation));
  out.push_back(projector_identities(opts.property_pixels, opts.seed + 2));
  out.push_back(beta_stationarity(opts.property_pixels, opts.seed + 3));
  out.push_back(clamp_and_positivity(opts.property_pixels, opts.seed + 4));
  out.push_back(gaussian_limit(opts.limit_pixels, opts.seed + 5));
  out.push_back(glrt_dominance(opts.property_pixels, opts.seed + 6));
  out.push_back(auc_oracle(opts.auc_samples, opts.seed + 7));
  out.push_back(roc_monotone_invariance(opts.auc_samples, opts.seed + 8));
  return out;
}

bool print_report(std::ostream& os, const std::vector<CheckResult>& results) {
  bool all = true;
  for (const auto& r : results) {
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    all = all && r.passed;
  }
  return all;
}

}  // namespace ecspade::verify
