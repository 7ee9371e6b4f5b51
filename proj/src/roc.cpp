#include "ecspade/roc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ecspade/error.hpp"

namespace ecspade {

RocCurve roc(std::span<const double> h0_scores, std::span<const double> h1_scores) {
  if (h0_scores.empty() || h1_scores.empty()) throw Error(ErrorCode::EmptyInput, "ROC needs scores in both classes");
  auto is_nan = [](double v) { return std::isnan(v); };
  if (std::ranges::any_of(h0_scores, is_nan) || std::ranges::any_of(h1_scores, is_nan)) {
    throw Error(ErrorCode::Numerical, "NaN score passed to roc()");
  }

  std::vector<double> h0(h0_scores.begin(), h0_scores.end());
  std::vector<double> h1(h1_scores.begin(), h1_scores.end());
  std::ranges::sort(h0, std::greater<>());
  std::ranges::sort(h1, std::greater<>());

  RocCurve curve;
  curve.n0 = h0.size();
  curve.n1 = h1.size();
  const double n0 = static_cast<double>(curve.n0);
  const double n1 = static_cast<double>(curve.n1);
  curve.points.reserve(h0.size() + h1.size() + 1);
  curve.points.push_back({0.0, 0.0});

  // Exact integer accumulation of the trapezoid: each step adds
  // dfa * (2 * tp_before + dtp) half-units of area.
  long double twice_area = 0.0L;
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  while (i0 < h0.size() || i1 < h1.size()) {
    double threshold;
    if (i0 == h0.size()) threshold = h1[i1];
    else if (i1 == h1.size()) threshold = h0[i0];
    else threshold = std::max(h0[i0], h1[i1]);

    const std::size_t fa_before = i0;
    const std::size_t tp_before = i1;
    while (i0 < h0.size() && h0[i0] == threshold) ++i0;
    while (i1 < h1.size() && h1[i1] == threshold) ++i1;
    const std::size_t dfa = i0 - fa_before;
    const std::size_t dtp = i1 - tp_before;
    twice_area += static_cast<long double>(dfa) * static_cast<long double>(2 * tp_before + dtp);
    curve.points.push_back({static_cast<double>(i0) / n0, static_cast<double>(i1) / n1});
  }
  curve.auc = static_cast<double>(twice_area / (2.0L * static_cast<long double>(n0) * static_cast<long double>(n1)));
  return curve;
}

double pd_at_pfa(const RocCurve& curve, double pfa) {
  if (!(pfa >= 0.0 && pfa <= 1.0)) throw Error(ErrorCode::OutOfRange, "pfa must lie in [0, 1]");
  const auto& pts = curve.points;
  if (pts.empty()) throw Error(ErrorCode::EmptyInput, "empty ROC curve");
  // First vertex strictly beyond pfa; the one before it is the last vertex
  // at or below pfa, which carries the largest pD on a vertical run.
  const auto upper = std::ranges::upper_bound(pts, pfa, {}, &RocPoint::pfa);
  if (upper == pts.begin()) return pts.front().pd;
  const RocPoint& left = *(upper - 1);
  if (left.pfa == pfa || upper == pts.end()) return left.pd;
  const RocPoint& right = *upper;
  const double w = (pfa - left.pfa) / (right.pfa - left.pfa);
  return left.pd + w * (right.pd - left.pd);
}

std::vector<RocPoint> resample(const RocCurve& curve, std::vector<double> pfa_grid) {
  std::ranges::sort(pfa_grid);
  std::vector<RocPoint> out;
  out.reserve(pfa_grid.size());
  for (double p : pfa_grid) out.push_back({p, pd_at_pfa(curve, p)});
  return out;
}

std::vector<double> default_pfa_grid(std::size_t n, double floor) {
  std::vector<double> grid{0.0};
  if (n < 2) {
    grid.push_back(1.0);
    return grid;
  }
  floor = std::clamp(floor, 1e-12, 1.0);
  const double log_lo = std::log10(floor);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    grid.push_back(std::pow(10.0, log_lo * (1.0 - f)));
    grid.push_back(f);
  }
  std::ranges::sort(grid);
  const auto [first, last] = std::ranges::unique(grid);
  grid.erase(first, last);
  return grid;
}

}  // namespace ecspade
