#include "gpbt/identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gpbt/backlund.hpp"
#include "gpbt/error.hpp"

namespace gpbt {

namespace {

CheckResult below(std::string name, double deviation, double tol) {
  const bool ok = deviation < tol;
  return {std::move(name), deviation, tol, ok, ok ? "pass" : "fail"};
}

SmoothMap strip_derivatives(SmoothMap m) {
  m.d1 = m.d2 = m.d3 = nullptr;
  return m;
}

// Entire functions with a nowhere-vanishing derivative and a closed-form
// derivative tower; parameter a drawn by the caller.
SmoothMap smooth_family(int which, double a) {
  SmoothMap m;
  switch (which) {
    case 0:
      m.eval = [a](double z) { return std::exp(a * z); };
      m.d1 = [a](double z) { return a * std::exp(a * z); };
      m.d2 = [a](double z) { return a * a * std::exp(a * z); };
      m.d3 = [a](double z) { return a * a * a * std::exp(a * z); };
      break;
    case 1: {
      const double s = 0.5 * std::tanh(a);  // |s| < 0.5 keeps f' >= 0.5
      m.eval = [s](double z) { return z + s * std::sin(z); };
      m.d1 = [s](double z) { return 1.0 + s * std::cos(z); };
      m.d2 = [s](double z) { return -s * std::sin(z); };
      m.d3 = [s](double z) { return -s * std::cos(z); };
      break;
    }
    case 2:
      m.eval = [a](double z) { return std::sinh(a * z); };
      m.d1 = [a](double z) { return a * std::cosh(a * z); };
      m.d2 = [a](double z) { return a * a * std::sinh(a * z); };
      m.d3 = [a](double z) { return a * a * a * std::cosh(a * z); };
      break;
    case 3: {
      const double k = 0.5 + std::abs(a);
      m.eval = [k](double z) { return z * z * z / 3.0 + k * z; };
      m.d1 = [k](double z) { return z * z + k; };
      m.d2 = [](double z) { return 2.0 * z; };
      m.d3 = [](double) { return 2.0; };
      break;
    }
    default: {
      m.eval = [a](double z) { return std::atan(a * z); };
      m.d1 = [a](double z) { return a / (1.0 + a * a * z * z); };
      m.d2 = [a](double z) {
        const double q = 1.0 + a * a * z * z;
        return -2.0 * a * a * a * z / (q * q);
      };
      m.d3 = [a](double z) {
        const double q = 1.0 + a * a * z * z;
        return (6.0 * std::pow(a, 5) * z * z - 2.0 * a * a * a) / (q * q * q);
      };
      break;
    }
  }
  return m;
}

double schwarzian_closed(const SmoothMap& m, double z) {
  return schwarzian_from_derivatives(m.d1(z), m.d2(z), m.d3(z));
}

}  // namespace

CheckResult check_mobius_kernel(std::uint64_t seed, int maps, int points_per_map, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < maps; ++i) {
    Mobius m;
    // |c| + |d| >= 1.25 leaves part of [-1, 1] with |cz + d| >= 1
    do {
      m = {coef(rng), coef(rng), coef(rng), coef(rng)};
    } while (std::abs(m.determinant()) < 0.5 || std::abs(m.c) + std::abs(m.d) < 1.25);
    for (int j = 0; j < points_per_map; ++j) {
      double z;
      do {
        z = point(rng);
      } while (std::abs(m.c * z + m.d) < 1.0);
      Interval side;
      if (m.c != 0.0) {
        const double pole = -m.d / m.c;
        side = z > pole ? Interval{pole, side.hi} : Interval{side.lo, pole};
      }
      const SmoothMap fd = strip_derivatives(as_smooth_map(m, side));
      worst = std::max(worst, std::abs(schwarzian(fd, z)));
    }
  }
  return below("schwarzian_mobius_kernel", worst, tol);
}

CheckResult check_composition_law(std::uint64_t seed, int pairs, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> family(0, 4);
  std::uniform_real_distribution<double> param(0.3, 1.2);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);
  std::uniform_real_distribution<double> point(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const SmoothMap g = smooth_family(family(rng), std::copysign(param(rng), sign(rng)));
    const SmoothMap f = smooth_family(family(rng), std::copysign(param(rng), sign(rng)));
    const double z = point(rng);
    const double lhs = schwarzian(strip_derivatives(compose(g, f)), z);
    const double fz = f(z);
    const double f1 = f.d1(z);
    const double rhs = f1 * f1 * schwarzian_closed(g, fz) + schwarzian_closed(f, z);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return below("schwarzian_composition_law", worst, tol);
}

CheckResult check_translation(const PolyG& g, std::span<const double> ks,
                              std::span<const double> xs, double tol) {
  double worst = 0.0;
  for (double k : ks) {
    const ShiftMap m(g, k);
    for (double x : xs) {
      const double f = solve_f(m, x).f;
      worst = std::max(worst, std::abs(g.value(f) - g.value(x) - k));
    }
  }
  return below("translation_property", worst, tol);
}

CheckResult check_semigroup(const PolyG& g, std::span<const double> ks, std::span<const double> xs,
                            double tol) {
  double worst = 0.0;
  for (double k1 : ks) {
    for (double k2 : ks) {
      const ShiftMap outer(g, k1), inner(g, k2), both(g, k1 + k2);
      for (double x : xs) {
        if (!(x > inner.valid_domain().lo) || !(x > both.valid_domain().lo)) continue;
        const double mid = solve_f(inner, x).f;
        if (!(mid > outer.valid_domain().lo)) continue;
        worst = std::max(worst, std::abs(solve_f(outer, mid).f - solve_f(both, x).f));
      }
    }
  }
  return below("translation_semigroup", worst, tol);
}

CheckResult check_q_identity(const PolyG& g, std::span<const double> ks,
                             std::span<const double> xs, double tol) {
  const SmoothMap w = as_smooth_map(g);
  double worst = 0.0;
  for (double k : ks) {
    const ShiftMap m(g, k);
    const SmoothMap f_fd = strip_derivatives(as_smooth_map(m));
    for (double x : xs) {
      const ShiftValue fx = solve_f(m, x);
      const double q_x = schwarzian_closed(w, x);
      const double q_f = schwarzian_closed(w, fx.f);
      const double sf = schwarzian(f_fd, x);
      worst = std::max(worst, std::abs(q_x - fx.fprime * fx.fprime * q_f - sf));
    }
  }
  return below("q_identity", worst, tol);
}

CheckResult check_linear_coefficient(const GPParams& p, std::span<const double> xs, double tol) {
  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, std::abs(linear_coefficient_check(p, x)));
  return below("linear_coefficient_identity", worst, tol);
}

double closed_form_residual_max(const GPParams& p, std::span<const double> xs) {
  SmoothMap r;
  r.eval = [p](double x) { return closed_form_r(p, x); };
  r.domain = {0.0, std::numeric_limits<double>::infinity()};
  double worst = 0.0;
  for (double x : xs) {
    const double r2 = derivative(r, 2, x);
    worst = std::max(worst, std::abs(r2 - gp_rhs_value(p, x, r.eval(x))));
  }
  return worst;
}

CheckResult check_closed_form_residual(const GPParams& p, std::span<const double> xs, double tol) {
  const double dev = closed_form_residual_max(p, xs);
  if (!p.closed_form_admissible()) {
    return {"closed_form_residual", dev, tol, true, "not-applicable"};
  }
  return below("closed_form_residual", dev, tol);
}

CheckResult check_constraint_activity(const GPParams& p, std::span<const double> xs,
                                      double threshold) {
  CheckResult r;
  r.name = "constraint_activity";
  r.tolerance = threshold;
  if (p.closed_form_admissible()) {
    GPParams perturbed = p;
    perturbed.b += 0.01;
    r.deviation = closed_form_residual_max(perturbed, xs);
    r.pass = r.deviation >= threshold;
    r.status = r.pass ? "pass" : "fail";
  } else {
    r.deviation = closed_form_residual_max(p, xs);
    r.pass = r.deviation >= threshold;
    r.status = r.pass ? "expected-fail-confirmed" : "fail";
  }
  return r;
}

CheckResult check_fixed_point(const GPParams& p, std::span<const double> ks,
                              std::span<const double> xs, double tol) {
  const Amplitude seed = closed_form_amplitude(p);
  double worst = 0.0;
  for (double k : ks) {
    const BacklundMap map(ShiftMap(p.g(), k), seed.domain);
    worst = std::max(worst, is_fixed_point(map, seed, xs, tol).deviation);
  }
  return below("fixed_point_closed_form", worst, tol);
}

}  // namespace gpbt
