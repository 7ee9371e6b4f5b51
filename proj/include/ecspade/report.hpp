#pragma once

#include <iosfwd>
#include <vector>

#include "ecspade/roc.hpp"
#include "ecspade/sim.hpp"

namespace ecspade {

struct CurveRecord {
  DetectorId detector;
  double beta;
  int trial;
  RocCurve curve;
};

/// One ROC per (beta, trial, detector), in sweep order.
std::vector<CurveRecord> build_curves(const std::vector<BetaSweep>& results);

inline const std::vector<double> kSummaryPfa = {1e-3, 1e-2, 1e-1};

/// detector,beta,trial,pfa,pd. With roc_points == 0 every vertex is written;
/// otherwise each curve is resampled on default_pfa_grid(roc_points, 1/n0).
void write_roc_csv(std::ostream& os, const std::vector<CurveRecord>& curves, std::size_t roc_points);

/// detector,beta,trial,auc,pd@1e-3,pd@1e-2,pd@1e-1
void write_summary_csv(std::ostream& os, const std::vector<CurveRecord>& curves);

/// detector,beta,trial,pair,h0,h1 with every raw score.
void write_scores_csv(std::ostream& os, const std::vector<BetaSweep>& results);

struct SvgOptions {
  bool log_pfa = true;
  std::size_t points = 256;
};

/// One panel: a curve per (detector, trial) for the given beta.
void write_svg_panel(std::ostream& os, const std::vector<CurveRecord>& curves, double beta, double alpha,
                     const SvgOptions& opts);

}  // namespace ecspade
