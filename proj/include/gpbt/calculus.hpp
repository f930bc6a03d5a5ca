#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace gpbt {

using RealFn = std::function<double(double)>;

/// Open interval (lo, hi). Infinite endpoints are allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
  bool contains_closed(double x) const { return x >= lo && x <= hi; }
};

/// A real function of one real variable together with whatever closed-form
/// derivatives are known. Empty derivative slots fall back to finite
/// differences.
struct SmoothMap {
  RealFn eval;
  RealFn d1;
  RealFn d2;
  RealFn d3;
  Interval domain;

  double operator()(double z) const { return eval(z); }
  const RealFn& closed_form(int order) const;
  bool has_full_tower() const { return d1 && d2 && d3; }
};

/// Central finite-difference stencil description.
struct Stencil {
  int order = 1;      // derivative order, 1..3
  int points = 5;     // odd, >= 5, >= order + 2
  double base_step = 0.0;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;

  /// Formal accuracy of the central formula on `points` nodes.
  int accuracy() const;

  /// 5 points for orders 1 and 2, 7 points for order 3, with
  /// base_step = eps^(1/(points+1)) * max(1, |z|).
  static Stencil standard(int order, double z);
};

/// Central-difference weights for derivative `order` on the offsets
/// -k..k (k = (points-1)/2), unit spacing.
std::vector<double> central_weights(int order, int points);

/// Weights of an arbitrary-node finite-difference formula evaluated at x0
/// (Fornberg's recursion). Returns weights for derivative `order`.
std::vector<double> fornberg_weights(int order, double x0, const std::vector<double>& nodes);

/// Finite-difference estimate with one Richardson halving step.
double finite_difference(const SmoothMap& map, const Stencil& stencil, double z);

/// Closed-form derivative when available for that order, otherwise the
/// standard stencil with Richardson extrapolation.
double derivative(const SmoothMap& map, int order, double z);

struct SchwarzianOptions {
  double critical_threshold = 1e-9;
};

/// f'''/f' - (3/2)(f''/f')^2 from known derivative values.
double schwarzian_from_derivatives(double d1, double d2, double d3);

/// Schwarzian derivative {f, z}. Throws CriticalPoint where f' vanishes
/// numerically.
double schwarzian(const SmoothMap& map, double z, const SchwarzianOptions& opts = {});

/// Composition g o f with the chain rule applied to whatever closed-form
/// derivatives both factors supply.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

}  // namespace gpbt
