// Acceptance suite: one line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "gpbt/backlund.hpp"
#include "gpbt/error.hpp"
#include "gpbt/gp_model.hpp"
#include "gpbt/identities.hpp"

using namespace gpbt;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

GPParams make(int n, double eta) {
  GPParams p;
  p.n = n;
  p.eta = eta;
  return p;
}

const std::vector<std::pair<int, double>>& ne_sweep() {
  static const std::vector<std::pair<int, double>> s = {
      {1, 0.0}, {1, 0.5}, {1, 1.0}, {2, 0.0}, {2, 0.5}, {2, 1.0}, {3, 0.0}, {3, 0.5}, {3, 1.0}};
  return s;
}

Outcome schwarzian_kernel() {
  const CheckResult r = check_mobius_kernel(1, 100, 10, 1e-7);
  return {r.pass, fmt("max |{m,z}| = %.3e over 1000 samples (< %.0e)", r.deviation, r.tolerance)};
}

Outcome composition_law() {
  const CheckResult r = check_composition_law(1, 100, 1e-6);
  return {r.pass, fmt("max cocycle defect = %.3e over 100 pairs (< %.0e)", r.deviation, r.tolerance)};
}

Outcome translation() {
  const std::vector<double> ks{0.25, 0.5, 1.0, 2.0, 5.0};
  const std::vector<double> xs = linspace(0.1, 5.0, 50);
  double t = 0.0, s = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (double eta : {0.0, 0.5, 1.0, 2.0}) {
      t = std::max(t, check_translation({n, eta}, ks, xs).deviation);
      s = std::max(s, check_semigroup({n, eta}, ks, xs).deviation);
    }
  }
  return {t < 1e-10 && s < 1e-9,
          fmt("max |G(f)-G(x)-K| = %.3e (< 1e-10), semigroup defect = %.3e (< 1e-9)", t, s)};
}

Outcome q_identity() {
  const std::vector<double> ks{0.25, 0.5, 1.0};
  const std::vector<double> xs = linspace(0.5, 5.0, 46);
  double worst = 0.0;
  for (auto [n, eta] : ne_sweep()) worst = std::max(worst, check_q_identity({n, eta}, ks, xs).deviation);
  return {worst < 1e-5, fmt("max |Q(x) - f'^2 Q(f) - {f,x}| = %.3e (< 1e-05)", worst)};
}

Outcome linear_coefficient() {
  const std::vector<double> xs = linspace(0.5, 5.0, 91);
  double worst = 0.0;
  for (auto [n, eta] : ne_sweep()) {
    worst = std::max(worst, check_linear_coefficient(make(n, eta), xs).deviation);
  }
  return {worst < 1e-6, fmt("max coefficient mismatch = %.3e (< 1e-06)", worst)};
}

Outcome closed_form() {
  const std::vector<double> xs = linspace(0.5, 5.0, 401);
  double worst = 0.0, weakest = INFINITY;
  for (auto [n, eta] : ne_sweep()) {
    const GPParams p = make(n, eta);
    worst = std::max(worst, check_closed_form_residual(p, xs).deviation);
    weakest = std::min(weakest, check_constraint_activity(p, xs).deviation);
  }
  return {worst < 1e-7 && weakest > 1e-3,
          fmt("max residual = %.3e (< 1e-07), min residual with b+0.01 = %.3e (> 1e-03)", worst,
              weakest)};
}

// Seeds start at x = 1 with r'(1) = 0 and r(1) a multiple of the closed-form
// value there; they cover f(2.5) for the largest K.
std::vector<double> seed_scales() { return {0.8, 1.1, 1.3}; }
std::vector<double> k_values() { return {0.25, 0.5, 1.0}; }

Amplitude generic_seed(const GPParams& p, double scale) {
  const double hi = solve_f(ShiftMap(p.g(), 1.0), 2.5).f;
  return Amplitude::from_dense(
      integrate(gp_rhs(p), 1.0, scale * closed_form_r(p, 1.0), 0.0, hi, {1e-10, 1e-10}));
}

Outcome solution_mapping() {
  const std::vector<double> xs = linspace(1.0, 2.5, 16001);
  double worst = 0.0;
  std::size_t fewest = xs.size();
  int cases = 0;
  for (int n = 1; n <= 2; ++n) {
    for (double eta : {0.0, 0.5, 1.0}) {
      const GPParams p = make(n, eta);
      const SecondOrderODE ode = gp_rhs(p);
      for (double scale : seed_scales()) {
        const Amplitude seed = generic_seed(p, scale);
        for (double k : k_values()) {
          const SolutionGrid g = transform(BacklundMap(ShiftMap(p.g(), k), seed.domain), seed, xs);
          fewest = std::min(fewest, g.size());
          worst = std::max(worst, residual(ode, g).max_interior);
          ++cases;
        }
      }
    }
  }
  return {worst < 1e-5 && fewest == xs.size(),
          fmt("max transformed residual = %.3e (< 1e-05) over %.0f seed/K cases", worst, cases)};
}

Outcome fixed_point() {
  const std::vector<double> ks{0.25, 0.5, 1.0, 2.0};
  const std::vector<double> xs = linspace(0.5, 5.0, 91);
  double worst = 0.0;
  for (auto [n, eta] : ne_sweep()) worst = std::max(worst, check_fixed_point(make(n, eta), ks, xs).deviation);
  const std::vector<double> seed_xs = linspace(1.0, 2.5, 61);
  double least = INFINITY;
  for (int n = 1; n <= 2; ++n) {
    for (double eta : {0.0, 0.5, 1.0}) {
      const GPParams p = make(n, eta);
      for (double scale : seed_scales()) {
        const Amplitude seed = generic_seed(p, scale);
        for (double k : k_values()) {
          const FixedPointReport r =
              is_fixed_point(BacklundMap(ShiftMap(p.g(), k), seed.domain), seed, seed_xs, 1e-10);
          least = r.fixed ? 0.0 : std::min(least, r.deviation);
        }
      }
    }
  }
  return {worst < 1e-10 && least > 1e-2,
          fmt("closed-form deviation = %.3e (< 1e-10), generic seeds min deviation = %.3e (> 1e-02)",
              worst, least)};
}

Outcome boundedness() {
  double worst = 0.0;
  bool flags = true;
  for (int n = 1; n <= 3; ++n) {
    const BoundednessReport r = boundedness_report(make(n, 0.0));
    worst = std::max(worst, std::abs(r.ratio / std::pow(10.0, n - 1) - 1.0));
    flags = flags && (r.bounded == (n <= 1));
  }
  return {worst < 1e-6 && flags,
          fmt("max relative error of r(1e-4)/r(1e-2) vs 10^(n-1) = %.3e (< 1e-06), bounded flags ", worst) +
              (flags ? "ok" : "wrong")};
}

Outcome integrator_order() {
  const SecondOrderODE ode{[](double, double r) { return -r; }, {0.0, INFINITY}};
  const double x0 = 0.01, x1 = M_PI / 2;
  std::vector<double> lh, le;
  for (int k = 0; k < 10; ++k) {
    const double tol = 1e-5 * std::ldexp(1.0, -2 * k);
    const DenseSolution d = integrate(ode, x0, std::sin(x0), std::cos(x0), x1, {tol, tol});
    lh.push_back(std::log((x1 - x0) / static_cast<double>(d.steps())));
    le.push_back(std::log(std::abs(d.value(x1) - 1.0)));
  }
  const double m = static_cast<double>(lh.size());
  const double mh = std::accumulate(lh.begin(), lh.end(), 0.0) / m;
  const double me = std::accumulate(le.begin(), le.end(), 0.0) / m;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sxy += (lh[i] - mh) * (le[i] - me);
    sxx += (lh[i] - mh) * (lh[i] - mh);
  }
  const double slope = sxy / sxx;
  return {slope >= 4.0 && slope <= 6.0,
          fmt("slope of log error vs log mean step = %.3f (in [4, 6])", slope)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"schwarzian kernel", schwarzian_kernel},
      {"composition law", composition_law},
      {"translation property", translation},
      {"Q identity", q_identity},
      {"linear coefficient identity", linear_coefficient},
      {"closed-form solution", closed_form},
      {"solution mapping", solution_mapping},
      {"fixed point", fixed_point},
      {"boundedness", boundedness},
      {"integrator order", integrator_order},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %-28s %s  (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
