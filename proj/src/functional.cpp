#include "gpbt/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpbt/error.hpp"

namespace gpbt {

namespace {

double ipow(double x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double nth_root(double u, int n) {
  switch (n) {
    case 1: return u;
    case 2: return std::sqrt(u);
    case 3: return std::cbrt(u);
    default: return std::pow(u, 1.0 / n);
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) {
    throw Error(ErrorKind::DomainError, std::string(what) + " requires x > 0, got " + std::to_string(x));
  }
}

constexpr double kPoleThreshold = 1e-12;

}  // namespace

void PolyG::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "PolyG requires n >= 1");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorKind::InvalidArgument, "PolyG requires a finite eta >= 0");
  }
}

double PolyG::value(double x) const {
  const double xn = ipow(x, n);
  return xn * (1.0 + eta * xn);
}

double PolyG::prime(double x) const {
  return n * ipow(x, n - 1) * (1.0 + 2.0 * eta * ipow(x, n));
}

double PolyG::second(double x) const {
  return n * (n - 1) * ipow(x, n - 2) + 2.0 * n * (2 * n - 1) * eta * ipow(x, 2 * n - 2);
}

double PolyG::third(double x) const {
  return n * (n - 1) * (n - 2) * ipow(x, n - 3) +
         2.0 * n * (2 * n - 1) * (2 * n - 2) * eta * ipow(x, 2 * n - 3);
}

double eval_g(const PolyG& g, double x) {
  require_positive(x, "eval_g");
  return g.value(x);
}

double eval_g_prime(const PolyG& g, double x) {
  require_positive(x, "eval_g_prime");
  return g.prime(x);
}

double inverse_g(const PolyG& g, double y) {
  if (!(y > 0.0)) {
    throw Error(ErrorKind::DomainError, "inverse_g requires y > 0, got " + std::to_string(y));
  }
  // u = x^n solves eta u^2 + u - y = 0; the rationalised root avoids
  // cancellation and reduces to u = y when eta = 0.
  const double u = g.eta == 0.0 ? y : 2.0 * y / (1.0 + std::sqrt(1.0 + 4.0 * g.eta * y));
  return nth_root(u, g.n);
}

SmoothMap as_smooth_map(const PolyG& g) {
  g.validate();
  SmoothMap m;
  m.eval = [g](double x) { return g.value(x); };
  m.d1 = [g](double x) { return g.prime(x); };
  m.d2 = [g](double x) { return g.second(x); };
  m.d3 = [g](double x) { return g.third(x); };
  m.domain = {0.0, std::numeric_limits<double>::infinity()};
  return m;
}

void Mobius::validate() const {
  if (determinant() == 0.0 || !std::isfinite(determinant())) {
    throw Error(ErrorKind::InvalidArgument, "Mobius map requires ad - bc != 0");
  }
}

double apply_mobius(const Mobius& m, double w) {
  const double den = m.c * w + m.d;
  const double scale = std::max({1.0, std::abs(m.c * w), std::abs(m.d)});
  if (std::abs(den) < kPoleThreshold * scale) {
    throw Error(ErrorKind::Pole, "c w + d vanishes at w=" + std::to_string(w));
  }
  return (m.a * w + m.b) / den;
}

Mobius compose(const Mobius& outer, const Mobius& inner) {
  return {outer.a * inner.a + outer.b * inner.c, outer.a * inner.b + outer.b * inner.d,
          outer.c * inner.a + outer.d * inner.c, outer.c * inner.b + outer.d * inner.d};
}

SmoothMap as_smooth_map(const Mobius& m, Interval domain) {
  m.validate();
  SmoothMap s;
  s.eval = [m](double w) { return apply_mobius(m, w); };
  s.d1 = [m](double w) {
    const double q = m.c * w + m.d;
    return m.determinant() / (q * q);
  };
  s.d2 = [m](double w) {
    const double q = m.c * w + m.d;
    return -2.0 * m.c * m.determinant() / (q * q * q);
  };
  s.d3 = [m](double w) {
    const double q = m.c * w + m.d;
    return 6.0 * m.c * m.c * m.determinant() / (q * q * q * q);
  };
  s.domain = domain;
  return s;
}

ShiftMap::ShiftMap(PolyG g, double k) : g_(g), k_(k) {
  g_.validate();
  if (!std::isfinite(k)) throw Error(ErrorKind::InvalidArgument, "shift constant must be finite");
  valid_.lo = k_ >= 0.0 ? 0.0 : inverse_g(g_, -k_);
  valid_.hi = std::numeric_limits<double>::infinity();
}

ShiftValue solve_f(const ShiftMap& m, double x) {
  require_positive(x, "solve_f");
  const PolyG& g = m.g();
  const double target = g.value(x) + m.k();
  const double disc = 1.0 + 4.0 * g.eta * target;
  if (!(disc > 0.0)) {
    throw Error(ErrorKind::NoRealRoot,
                "1 + 4 eta (G(x) + K) <= 0 at x=" + std::to_string(x));
  }
  if (!(target > 0.0)) {
    throw Error(ErrorKind::DomainError,
                "G(x) + K <= 0 at x=" + std::to_string(x) + "; no positive root");
  }
  double f = inverse_g(g, target);
  for (int i = 0; i < 2; ++i) {
    const double step = (g.value(f) - target) / g.prime(f);
    f -= step;
  }
  return {f, g.prime(x) / g.prime(f)};
}

double shift_second_derivative(const ShiftMap& m, double x, const ShiftValue& fx) {
  const PolyG& g = m.g();
  return (g.second(x) - g.second(fx.f) * fx.fprime * fx.fprime) / g.prime(fx.f);
}

double shift_third_derivative(const ShiftMap& m, double x, const ShiftValue& fx, double f2) {
  const PolyG& g = m.g();
  const double f1 = fx.fprime;
  return (g.third(x) - 3.0 * f1 * f2 * g.second(fx.f) - f1 * f1 * f1 * g.third(fx.f)) /
         g.prime(fx.f);
}

SmoothMap as_smooth_map(const ShiftMap& m) {
  SmoothMap s;
  s.eval = [m](double x) { return solve_f(m, x).f; };
  s.d1 = [m](double x) { return solve_f(m, x).fprime; };
  s.d2 = [m](double x) { return shift_second_derivative(m, x, solve_f(m, x)); };
  s.d3 = [m](double x) {
    const auto fx = solve_f(m, x);
    return shift_third_derivative(m, x, fx, shift_second_derivative(m, x, fx));
  };
  s.domain = m.valid_domain();
  return s;
}

InvertibleMap as_invertible(const PolyG& g) {
  InvertibleMap w;
  w.forward = as_smooth_map(g);
  w.inverse = [g](double y) { return inverse_g(g, y); };
  w.range = {0.0, std::numeric_limits<double>::infinity()};
  return w;
}

SmoothMap conjugate_f(const InvertibleMap& w, const Mobius& m) {
  m.validate();
  SmoothMap f;
  auto image = [w, m](double z) {
    const double target = apply_mobius(m, w.forward.eval(z));
    if (!w.range.contains(target)) {
      throw Error(ErrorKind::RangeError,
                  "Mobius image leaves the range of w at z=" + std::to_string(z));
    }
    return target;
  };
  f.eval = [w, image](double z) { return w.inverse(image(z)); };
  if (w.forward.d1) {
    f.d1 = [w, m, image](double z) {
      const double wz = w.forward.eval(z);
      const double fz = w.inverse(image(z));
      const double q = m.c * wz + m.d;
      return m.determinant() / (q * q) * w.forward.d1(z) / w.forward.d1(fz);
    };
  }
  f.domain = w.forward.domain;
  return f;
}

}  // namespace gpbt
