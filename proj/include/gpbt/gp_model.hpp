#pragma once

#include <array>
#include <optional>
#include <string>

#include "gpbt/functional.hpp"
#include "gpbt/ode.hpp"

namespace gpbt {

/// Parameters of the stationary Gross-Pitaevskii amplitude equation
///
///   r'' = c^2 / r^3 + ((n^2 - 1) / (4 x^2) + 3 x^(2n-2) eta^2 n^2 / (1 + 2 eta x^n)^2) r
///         + b x^(3n-3) (1 + 2 eta x^n)^3 r^3
///
/// with G(x) = x^n (1 + eta x^n). `b` is the cubic coefficient exactly as it
/// multiplies x^(3n-3) (1 + 2 eta x^n)^3; the coefficient in front of G'^3
/// is b / n^3.
struct GPParams {
  int n = 1;
  double eta = 0.0;
  double b = -1.0;
  double c = 1.0;
  double v = 1.0;
  double mu = 0.0;
  double theta0 = 0.0;

  void validate() const;
  PolyG g() const { return {n, eta}; }

  /// b v^6 + c^2; the closed-form amplitude solves the equation iff zero.
  double constraint_residual() const { return b * v * v * v * v * v * v + c * c; }
  bool closed_form_admissible() const;

  /// Coefficient multiplying G'(x)^3 in 2 g(x).
  double representation_coefficient() const { return b / (n * n * n); }
};

/// Linear coefficient (n^2 - 1) / (4 x^2) + 3 x^(2n-2) eta^2 n^2 / (1 + 2 eta x^n)^2.
double gp_linear_coefficient(const GPParams& p, double x);

/// Cubic coefficient b x^(3n-3) (1 + 2 eta x^n)^3.
double gp_cubic_coefficient(const GPParams& p, double x);

double gp_rhs_value(const GPParams& p, double x, double r);

/// The amplitude equation as a SecondOrderODE on (1e-8, inf).
SecondOrderODE gp_rhs(const GPParams& p);

/// Printed linear coefficient minus -(1/2){G, x}, with the Schwarzian of G
/// evaluated by finite differences.
double linear_coefficient_check(const GPParams& p, double x);

/// r(x) = v / sqrt(x^(n-1) (1 + 2 eta x^n)). Does not check the constraint.
double closed_form_r(const GPParams& p, double x);
double closed_form_rp(const GPParams& p, double x);

/// Warning text when |b v^6 + c^2| > 1e-10 max(c^2, 1).
std::optional<std::string> constraint_warning(const GPParams& p);

Amplitude closed_form_amplitude(const GPParams& p);

struct PhaseOptions {
  /// Lower limit of the phase integral. Zero selects the closed-form
  /// antiderivative c G(x) / (n v^2), which vanishes at the origin.
  double x_ref = 0.0;
  double quadrature_tol = 1e-10;
};

/// theta(x) = theta0 + c (G(x) - G(x_ref)) / (n v^2) for the closed form.
double phase_closed_form(const GPParams& p, double x, double x_ref = 0.0);

/// theta(x) = theta0 + integral_{x_ref}^{x} c / r(s)^2 ds by adaptive
/// Gauss-Kronrod quadrature.
double phase_quadrature(const GPParams& p, const Amplitude& r, double x, const PhaseOptions& opts);

/// Dispatches on the amplitude's provenance.
double phase(const GPParams& p, const Amplitude& r, double x, const PhaseOptions& opts = {});

struct WaveSample {
  double x;
  double t;
  double re;
  double im;

  double modulus() const;
};

/// psi(x, t) = r(x) exp(i (theta(x) - mu t)).
WaveSample wavefunction(const GPParams& p, const Amplitude& r, double x, double t,
                        const PhaseOptions& opts = {});

struct BoundednessReport {
  double exponent;  // r(x) ~ v x^exponent as x -> 0+
  bool bounded;
  std::array<double, 3> xs;
  std::array<double, 3> rs;
  double ratio;     // r(1e-4) / r(1e-2)
};

BoundednessReport boundedness_report(const GPParams& p);

}  // namespace gpbt
