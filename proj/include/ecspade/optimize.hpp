#pragma once

#include <cmath>
#include <utility>

namespace ecspade {

struct Maximum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi], stopping
/// once the bracket is narrower than `tol`. The endpoints are not evaluated.
template <class F>
Maximum golden_section_maximize(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  if (!(hi > lo)) return {lo, f(lo)};
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

}  // namespace ecspade
