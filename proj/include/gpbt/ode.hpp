#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpbt/calculus.hpp"

namespace gpbt {

/// r'' = rhs(x, r) on an open interval of the positive half line.
struct SecondOrderODE {
  std::function<double(double, double)> rhs;
  Interval domain{0.0, std::numeric_limits<double>::infinity()};
};

struct ToleranceSpec {
  double abs = 1e-10;
  double rel = 1e-10;
};

struct IntegratorOptions {
  double amplitude_floor = 1e-6;
  double blowup_limit = 1e12;
  std::size_t max_steps = 2'000'000;
  /// Upper bound on |h|; bounds the interpolation error of the dense output
  /// independently of the local error estimate.
  double max_step = std::numeric_limits<double>::infinity();
};

enum class Provenance { ClosedForm, Integrated, Transformed };

std::string to_string(Provenance p);

struct GridMeta {
  Provenance provenance = Provenance::Integrated;
  std::map<std::string, double> params;
  /// Set when the grid was trimmed to a sub-interval of the requested xs.
  std::optional<Interval> trimmed;
};

/// Sampled amplitude r(x) and slope r'(x) on a strictly increasing grid.
struct SolutionGrid {
  std::vector<double> xs;
  std::vector<double> rs;
  std::vector<double> rps;
  GridMeta meta;

  std::size_t size() const { return xs.size(); }
  bool empty() const { return xs.empty(); }

  /// Equal lengths, strictly increasing xs, positive rs.
  void validate() const;
};

/// Piecewise quintic Hermite interpolant built from (r, r', r'') at the
/// endpoints of each accepted integrator step. C^2 across nodes.
class DenseSolution {
 public:
  struct Segment {
    double x0, x1;
    double r0, p0, a0;  // value, slope, curvature at x0
    double r1, p1, a1;  // same at x1
  };

  DenseSolution() = default;
  explicit DenseSolution(std::vector<Segment> segments);

  double x_start() const { return segments_.front().x0; }
  double x_end() const { return segments_.back().x1; }
  Interval domain() const { return {x_start(), x_end()}; }
  bool covers(double x) const { return x >= x_start() && x <= x_end(); }

  double value(double x) const;
  double slope(double x) const;

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t steps() const { return segments_.size(); }

  /// Join two solutions sharing one endpoint.
  static DenseSolution merge(const DenseSolution& left, const DenseSolution& right);

 private:
  const Segment& locate(double x) const;
  std::vector<Segment> segments_;
};

/// Dormand-Prince 5(4) on the first-order system (r, r') with mixed
/// error control err <= abs + rel |state|. Integrates in either direction.
DenseSolution integrate(const SecondOrderODE& ode, double x0, double r0, double rp0, double x_end,
                        const ToleranceSpec& tol, const IntegratorOptions& opts = {});

/// Integrates from x0 towards both lo and hi and joins the pieces.
DenseSolution integrate_span(const SecondOrderODE& ode, double x0, double r0, double rp0, double lo,
                             double hi, const ToleranceSpec& tol,
                             const IntegratorOptions& opts = {});

SolutionGrid sample(const DenseSolution& dense, std::span<const double> xs);

/// Anything that can report r(x) and r'(x) on a closed interval: a dense
/// integrator solution, a closed form, a resampled grid or a transformed
/// solution.
struct Amplitude {
  RealFn value;
  RealFn slope;
  Interval domain;  // closed: endpoints are valid query points
  Provenance provenance = Provenance::Integrated;

  bool covers(double x) const { return domain.contains_closed(x); }

  static Amplitude from_dense(DenseSolution dense);
  /// Cubic Hermite interpolation of (r, r') between grid nodes.
  static Amplitude from_grid(SolutionGrid grid);
};

SolutionGrid sample(const Amplitude& amp, std::span<const double> xs);

std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Cubic Hermite resampling of a grid onto new abscissae inside its span.
SolutionGrid resample(const SolutionGrid& grid, std::span<const double> xs);

struct ResidualOptions {
  bool allow_resample = true;
  double uniform_rtol = 1e-9;
};

struct ResidualReport {
  std::vector<double> xs;      // abscissae the residual was evaluated on
  std::vector<double> values;  // r''_FD - rhs, one per point
  double max_interior = 0.0;   // max |value| over points with a central stencil
  bool resampled = false;
};

/// Fourth-order finite-difference residual of a sampled solution.
ResidualReport residual(const SecondOrderODE& ode, const SolutionGrid& grid,
                        const ResidualOptions& opts = {});

}  // namespace gpbt
