#pragma once

#include <cstdint>
#include <vector>

#include "ecspade/background.hpp"
#include "ecspade/detectors.hpp"

namespace ecspade {

/// One matched-pair experiment: background mean mu_fill * 1, unit covariance,
/// target t = mu + [target_T, 0, ..., 0]'.
struct Scenario {
  int d = 10;
  double nu = 10.0;
  double mu_fill = 2.0;
  double target_T = 15.0;
  double alpha = 0.2;
  double beta = 0.3;
  std::int64_t n_pairs = 100'000;
  int n_trials = 3;
  std::uint64_t seed = 20210611;
  std::vector<DetectorId> detectors{kAllDetectors.begin(), kAllDetectors.end()};
  bool constrained_alpha = false;

  /// Throws InvalidScenario on a violated invariant.
  void validate() const;
  BackgroundModel background() const;
  Vector target() const;
};

/// FNV-1a over a canonical text rendering of every field.
std::uint64_t fingerprint(const Scenario& s);

struct DetectorScores {
  DetectorId detector;
  std::vector<double> h0;  // x = z
  std::vector<double> h1;  // x = beta z + alpha t, same z
};

struct ScorePairs {
  std::vector<DetectorScores> scores;  // in scenario.detectors order
  double beta = 0.0;
  int trial = 0;
  std::uint64_t stream = 0;
  std::uint64_t fingerprint = 0;

  const DetectorScores& of(DetectorId id) const;
};

/// Draws scenario.n_pairs backgrounds from generator stream `stream` and scores
/// both members of every pair with each requested detector.
ScorePairs run_trial(const Scenario& scenario, int trial_index, std::uint64_t stream);
/// Stream defaults to the trial index.
ScorePairs run_trial(const Scenario& scenario, int trial_index);

struct BetaSweep {
  double beta;
  std::vector<ScorePairs> trials;
};

/// Stream used for trial `trial` of the `beta_index`-th beta of a sweep.
std::uint64_t sweep_stream(std::size_t beta_index, int trial);

/// n_trials trials for every beta, each (beta, trial) on its own stream. Jobs
/// run on up to `threads` workers (0 = hardware concurrency); results do not
/// depend on scheduling.
std::vector<BetaSweep> sweep(const Scenario& scenario_template, const std::vector<double>& beta_values,
                             unsigned threads = 0);

}  // namespace ecspade
