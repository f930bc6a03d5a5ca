#pragma once

#include "gpbt/calculus.hpp"

namespace gpbt {

/// The polynomial family G(x) = x^n (1 + eta x^n), n >= 1, eta >= 0.
/// Strictly increasing and positive on x > 0.
struct PolyG {
  int n = 1;
  double eta = 0.0;

  void validate() const;

  // Unchecked evaluation; callers guarantee x > 0.
  double value(double x) const;
  double prime(double x) const;
  double second(double x) const;
  double third(double x) const;
};

double eval_g(const PolyG& g, double x);
double eval_g_prime(const PolyG& g, double x);

/// Positive root of G(x) = y for y > 0.
double inverse_g(const PolyG& g, double y);

/// G as a SmoothMap on (0, inf) with its full closed-form derivative tower.
SmoothMap as_smooth_map(const PolyG& g);

/// Fractional linear transformation w -> (a w + b) / (c w + d).
struct Mobius {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  double determinant() const { return a * d - b * c; }
  void validate() const;

  static Mobius identity() { return {}; }
  static Mobius translation(double k) { return {1.0, k, 0.0, 1.0}; }
};

double apply_mobius(const Mobius& m, double w);

/// outer o inner, i.e. w -> outer(inner(w)).
Mobius compose(const Mobius& outer, const Mobius& inner);

/// Closed-form SmoothMap of a Mobius map restricted to `domain`, which must
/// lie on one side of the pole.
SmoothMap as_smooth_map(const Mobius& m, Interval domain);

/// Map f solving the translation equation G(f(x)) = G(x) + K. The interval
/// where G(x) + K > 0 is computed on construction.
class ShiftMap {
 public:
  ShiftMap(PolyG g, double k);

  const PolyG& g() const { return g_; }
  double k() const { return k_; }
  const Interval& valid_domain() const { return valid_; }

 private:
  PolyG g_;
  double k_;
  Interval valid_;
};

struct ShiftValue {
  double f;
  double fprime;
};

/// Positive real root f of G(f) = G(x) + K and f' = G'(x) / G'(f).
/// Throws NoRealRoot when 1 + 4 eta (G(x) + K) <= 0 and DomainError when
/// G(x) + K <= 0 or x <= 0.
ShiftValue solve_f(const ShiftMap& m, double x);

/// f'' from differentiating f' = G'(x) / G'(f) in closed form.
double shift_second_derivative(const ShiftMap& m, double x, const ShiftValue& fx);

/// f''' from differentiating the f'' relation once more.
double shift_third_derivative(const ShiftMap& m, double x, const ShiftValue& fx, double f2);

/// f as a SmoothMap on the valid domain with its closed-form derivative tower.
SmoothMap as_smooth_map(const ShiftMap& m);

/// A strictly monotone map with a known inverse defined on `range`.
struct InvertibleMap {
  SmoothMap forward;
  RealFn inverse;
  Interval range;
};

InvertibleMap as_invertible(const PolyG& g);

/// f = w^{-1} o m o w, so that w(f(z)) = m(w(z)). Evaluation throws
/// RangeError where m o w leaves the range of w.
SmoothMap conjugate_f(const InvertibleMap& w, const Mobius& m);

}  // namespace gpbt
