#pragma once

#include <cmath>
#include <cstddef>

namespace gaussdaemon {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of a unimodal f on [lo, hi]; stops
/// when the bracket is narrower than tol.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

/// Coarse scan over `points` equispaced abscissae on [lo, hi] (endpoints
/// included), then golden-section inside the cell pair around the best point.
/// Endpoints are kept as candidates so boundary optima are not lost.
template <class F>
ScalarMinimum bracketed_minimize(F&& f, double lo, double hi, std::size_t points, double tol) {
  if (points < 3) points = 3;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t best = 0;
  double best_value = f(lo);
  for (std::size_t i = 1; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + step * static_cast<double>(i);
    const double v = f(x);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double best_x = (best + 1 == points) ? hi : lo + step * static_cast<double>(best);
  const double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  const double b = best + 1 >= points ? hi : lo + step * static_cast<double>(best + 1);
  ScalarMinimum refined = golden_section_minimize(f, a, b, tol);
  if (best_value <= refined.value) refined = ScalarMinimum{best_x, best_value};
  return refined;
}

}  // namespace gaussdaemon
