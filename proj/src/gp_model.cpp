#include "gpbt/gp_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gpbt/error.hpp"

namespace gpbt {

void GPParams::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "params.n must be >= 1");
  if (!(eta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "params.eta must be >= 0");
  if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "params.v must be > 0");
  for (double val : {eta, b, c, v, mu, theta0}) {
    if (!std::isfinite(val)) throw Error(ErrorKind::InvalidArgument, "parameters must be finite");
  }
}

bool GPParams::closed_form_admissible() const {
  return std::abs(constraint_residual()) <= 1e-10 * std::max(c * c, 1.0);
}

double gp_linear_coefficient(const GPParams& p, double x) {
  const double xn = std::pow(x, p.n);
  const double den = 1.0 + 2.0 * p.eta * xn;
  const double n2 = static_cast<double>(p.n) * p.n;
  return (n2 - 1.0) / (4.0 * x * x) +
         3.0 * std::pow(x, 2 * p.n - 2) * p.eta * p.eta * n2 / (den * den);
}

double gp_cubic_coefficient(const GPParams& p, double x) {
  const double den = 1.0 + 2.0 * p.eta * std::pow(x, p.n);
  return p.b * std::pow(x, 3 * p.n - 3) * den * den * den;
}

double gp_rhs_value(const GPParams& p, double x, double r) {
  const double r2 = r * r;
  return p.c * p.c / (r2 * r) + gp_linear_coefficient(p, x) * r +
         gp_cubic_coefficient(p, x) * r2 * r;
}

SecondOrderODE gp_rhs(const GPParams& p) {
  p.validate();
  SecondOrderODE ode;
  ode.rhs = [p](double x, double r) { return gp_rhs_value(p, x, r); };
  ode.domain = {1e-8, std::numeric_limits<double>::infinity()};
  return ode;
}

double linear_coefficient_check(const GPParams& p, double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "linear_coefficient_check requires x > 0");
  SmoothMap g = as_smooth_map(p.g());
  // exercise the finite-difference path of the Schwarzian
  g.d1 = g.d2 = g.d3 = nullptr;
  return gp_linear_coefficient(p, x) - (-0.5 * schwarzian(g, x));
}

double closed_form_r(const GPParams& p, double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "closed-form amplitude requires x > 0");
  const double xn = std::pow(x, p.n);
  return p.v / std::sqrt(std::pow(x, p.n - 1) * (1.0 + 2.0 * p.eta * xn));
}

double closed_form_rp(const GPParams& p, double x) {
  const double r = closed_form_r(p, x);
  const double xn = std::pow(x, p.n);
  const double log_slope =
      (p.n - 1) / x + 2.0 * p.eta * p.n * std::pow(x, p.n - 1) / (1.0 + 2.0 * p.eta * xn);
  return -0.5 * r * log_slope;
}

std::optional<std::string> constraint_warning(const GPParams& p) {
  if (p.closed_form_admissible()) return std::nullopt;
  std::ostringstream os;
  os.precision(6);
  os << "ConstraintViolated: b v^6 + c^2 = " << p.constraint_residual()
     << "; the closed-form amplitude does not solve the equation";
  return os.str();
}

Amplitude closed_form_amplitude(const GPParams& p) {
  p.validate();
  Amplitude a;
  a.value = [p](double x) { return closed_form_r(p, x); };
  a.slope = [p](double x) { return closed_form_rp(p, x); };
  a.domain = {0.0, std::numeric_limits<double>::infinity()};
  a.provenance = Provenance::ClosedForm;
  return a;
}

double phase_closed_form(const GPParams& p, double x, double x_ref) {
  const PolyG g = p.g();
  const double scale = p.c / (p.n * p.v * p.v);
  const double base = x_ref > 0.0 ? eval_g(g, x_ref) : 0.0;
  return p.theta0 + scale * (eval_g(g, x) - base);
}

double phase_quadrature(const GPParams& p, const Amplitude& r, double x, const PhaseOptions& opts) {
  if (p.c == 0.0) return p.theta0;
  const double x_ref = opts.x_ref > 0.0 ? opts.x_ref : r.domain.lo;
  if (!r.covers(x) || !r.covers(x_ref)) {
    throw Error(ErrorKind::OutOfRange, "phase integral limits outside the amplitude domain");
  }
  if (x == x_ref) return p.theta0;
  auto integrand = [&](double s) {
    const double rs = r.value(s);
    return p.c / (rs * rs);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, x_ref, x, 20, opts.quadrature_tol, &error, &l1);
  if (!std::isfinite(value) || error > opts.quadrature_tol * std::max(1.0, l1)) {
    throw Error(ErrorKind::QuadratureFailure,
                "phase quadrature did not converge at x=" + std::to_string(x));
  }
  return p.theta0 + value;
}

double phase(const GPParams& p, const Amplitude& r, double x, const PhaseOptions& opts) {
  if (r.provenance == Provenance::ClosedForm) return phase_closed_form(p, x, opts.x_ref);
  return phase_quadrature(p, r, x, opts);
}

double WaveSample::modulus() const { return std::hypot(re, im); }

WaveSample wavefunction(const GPParams& p, const Amplitude& r, double x, double t,
                        const PhaseOptions& opts) {
  if (!r.covers(x)) throw Error(ErrorKind::OutOfRange, "x outside the amplitude domain");
  const double amp = r.value(x);
  const double angle = phase(p, r, x, opts) - p.mu * t;
  return {x, t, amp * std::cos(angle), amp * std::sin(angle)};
}

BoundednessReport boundedness_report(const GPParams& p) {
  p.validate();
  BoundednessReport rep;
  rep.exponent = -0.5 * (p.n - 1);
  rep.bounded = p.n <= 1;
  rep.xs = {1e-2, 1e-4, 1e-6};
  for (std::size_t i = 0; i < rep.xs.size(); ++i) rep.rs[i] = closed_form_r(p, rep.xs[i]);
  rep.ratio = rep.rs[1] / rep.rs[0];
  return rep;
}

}  // namespace gpbt
