#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ecspade {

struct RocPoint {
  double pfa;
  double pd;
};

/// Empirical ROC: one vertex per distinct pooled score, from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

/// Sweeps the threshold down through the pooled scores. Equal scores form a
/// single step, so the trapezoidal AUC equals the Mann-Whitney statistic with
/// half credit for ties. Throws EmptyInput / Numerical (NaN scores).
RocCurve roc(std::span<const double> h0_scores, std::span<const double> h1_scores);

/// Linear interpolation of pD at `pfa`. On a vertical segment the largest pD
/// reached at that pFA is returned. Throws OutOfRange outside [0, 1].
double pd_at_pfa(const RocCurve& curve, double pfa);

/// The curve resampled at the given pFA values (sorted ascending on return).
std::vector<RocPoint> resample(const RocCurve& curve, std::vector<double> pfa_grid);

/// Union of `n` log-spaced pFA values in [floor, 1] and `n` linear ones, plus 0.
std::vector<double> default_pfa_grid(std::size_t n, double floor);

}  // namespace ecspade
