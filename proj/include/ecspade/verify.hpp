#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ecspade/detectors.hpp"

namespace ecspade::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// |closed form - brute_force_glrt| <= 1e-6 on random Figure-1 pixels.
CheckResult glrt_oracle(Likelihood likelihood, std::size_t n_pixels, std::uint64_t seed,
                        double beta_hat_mutation = 0.0);
/// Q t = 0 and Q = R^{-1} - q q' (1e-10) on random SPD models and targets.
CheckResult projector_identities(std::size_t n_contexts, std::uint64_t seed);
/// Finite-difference derivative of the profile likelihood at interior beta_hat.
CheckResult beta_stationarity(std::size_t n_pixels, std::uint64_t seed);
/// clamped <=> -C >= A + B, and beta_hat > 0 whenever c > 0.
CheckResult clamp_and_positivity(std::size_t n_pixels, std::uint64_t seed);
/// EC scorers at nu = 1e8 against their Gaussian counterparts (1e-3 relative),
/// plus the exact Gaussian coefficient display.
CheckResult gaussian_limit(std::size_t n_pixels, std::uint64_t seed);
/// ec-2spade >= max(ec-amf, ec-ftmf) - 1e-9.
CheckResult glrt_dominance(std::size_t n_pixels, std::uint64_t seed);
/// Trapezoidal AUC against the O(n^2) pair count (1e-12).
CheckResult auc_oracle(std::size_t n_samples, std::uint64_t seed);
/// ROC vertices unchanged by strictly increasing score transforms.
CheckResult roc_monotone_invariance(std::size_t n_samples, std::uint64_t seed);

struct Options {
  std::uint64_t seed = 7;
  std::size_t oracle_pixels = 50;
  std::size_t property_pixels = 10'000;
  std::size_t limit_pixels = 1'000;
  std::size_t auc_samples = 1'000;
  double beta_hat_mutation = 0.0;
};

std::vector<CheckResult> run_all(const Options& opts);

/// One "PASS|FAIL  name  detail" line per check; returns true iff all passed.
bool print_report(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace ecspade::verify
