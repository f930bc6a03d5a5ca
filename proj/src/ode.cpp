#include "gpbt/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>

#include "gpbt/error.hpp"

namespace gpbt {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed_form";
    case Provenance::Integrated: return "integrated";
    case Provenance::Transformed: return "transformed";
  }
  return "unknown";
}

void SolutionGrid::validate() const {
  if (rs.size() != xs.size() || rps.size() != xs.size()) {
    throw Error(ErrorKind::InvalidArgument, "solution grid arrays differ in length");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "solution grid abscissae not strictly increasing");
    }
  }
  for (double r : rs) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, "solution grid amplitude not positive");
  }
}

// ---------------------------------------------------------------------------
// Dense output

namespace {

struct HermiteBasis {
  // value weights for (r0, h p0, h^2 a0, r1, h p1, h^2 a1)
  std::array<double, 6> v;
  // derivative weights (w.r.t. t) for the same coefficients
  std::array<double, 6> d;
};

HermiteBasis quintic_basis(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  HermiteBasis b;
  b.v = {1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
         t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
         0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
         10.0 * t3 - 15.0 * t4 + 6.0 * t5,
         -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
         0.5 * t3 - t4 + 0.5 * t5};
  b.d = {-30.0 * t2 + 60.0 * t3 - 30.0 * t4,
         1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
         t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
         30.0 * t2 - 60.0 * t3 + 30.0 * t4,
         -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
         1.5 * t2 - 4.0 * t3 + 2.5 * t4};
  return b;
}

}  // namespace

DenseSolution::DenseSolution(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error(ErrorKind::InvalidArgument, "dense solution without segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].x1 > segments_[i].x0)) {
      throw Error(ErrorKind::InvalidArgument, "dense segment of non-positive length");
    }
    if (i > 0 && segments_[i].x0 != segments_[i - 1].x1) {
      throw Error(ErrorKind::InvalidArgument, "dense segments not contiguous");
    }
  }
}

const DenseSolution::Segment& DenseSolution::locate(double x) const {
  if (segments_.empty() || !covers(x)) {
    throw Error(ErrorKind::OutOfRange, "x=" + std::to_string(x) + " outside dense solution");
  }
  // first segment whose right end exceeds x; nodes map to t = 0 of the
  // segment that starts there
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double v, const Segment& s) { return v < s.x1; });
  if (it == segments_.end()) --it;
  return *it;
}

double DenseSolution::value(double x) const {
  const Segment& s = locate(x);
  const double h = s.x1 - s.x0;
  const double t = (x - s.x0) / h;
  const auto b = quintic_basis(t);
  return b.v[0] * s.r0 + b.v[1] * h * s.p0 + b.v[2] * h * h * s.a0 + b.v[3] * s.r1 +
         b.v[4] * h * s.p1 + b.v[5] * h * h * s.a1;
}

double DenseSolution::slope(double x) const {
  const Segment& s = locate(x);
  const double h = s.x1 - s.x0;
  const double t = (x - s.x0) / h;
  const auto b = quintic_basis(t);
  return (b.d[0] * s.r0 + b.d[3] * s.r1) / h + b.d[1] * s.p0 + b.d[2] * h * s.a0 +
         b.d[4] * s.p1 + b.d[5] * h * s.a1;
}

DenseSolution DenseSolution::merge(const DenseSolution& left, const DenseSolution& right) {
  std::vector<Segment> all = left.segments_;
  all.insert(all.end(), right.segments_.begin(), right.segments_.end());
  return DenseSolution(std::move(all));
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

using State = std::array<double, 2>;  // (r, r')

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const SecondOrderODE& ode) : ode_(ode) {}

  State deriv(double x, const State& y) const { return {y[1], ode_.rhs(x, y[0])}; }

  static bool finite(const State& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

  // Advances one step from (x, y) with FSAL derivative k1. Returns false
  // when a stage produced a non-finite value.
  bool step(double x, const State& y, const State& k1, double h, State& y_new, State& k7,
            State& err) const {
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (const auto& [w, k] : terms) {
        out[0] += h * w * (*k)[0];
        out[1] += h * w * (*k)[1];
      }
      return out;
    };
    const State k2 = deriv(x + c2 * h, comb({{a21, &k1}}));
    if (!finite(k2)) return false;
    const State k3 = deriv(x + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
    if (!finite(k3)) return false;
    const State k4 = deriv(x + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    if (!finite(k4)) return false;
    const State k5 = deriv(x + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    if (!finite(k5)) return false;
    const State k6 =
        deriv(x + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    if (!finite(k6)) return false;
    y_new = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    if (!finite(y_new)) return false;
    k7 = deriv(x + h, y_new);
    if (!finite(k7)) return false;
    for (int i = 0; i < 2; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    return true;
  }

 private:
  const SecondOrderODE& ode_;
};

double error_norm(const State& err, const State& y0, const State& y1, const ToleranceSpec& tol) {
  double worst = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double scale = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / scale);
  }
  return worst;
}

// Hairer-Norsett-Wanner starting step heuristic.
double initial_step(const Stepper& s, double x0, const State& y0, const State& f0, double dir,
                    double span, const ToleranceSpec& tol) {
  auto norm = [&](const State& v) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = tol.abs + tol.rel * std::abs(y0[i]);
      acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / 2.0);
  };
  const double d0 = norm(y0);
  const double d1 = norm(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const State y1 = {y0[0] + dir * h0 * f0[0], y0[1] + dir * h0 * f0[1]};
  const State f1 = s.deriv(x0 + dir * h0, y1);
  double h1;
  if (!Stepper::finite(f1)) {
    h1 = h0 * 1e-3;
  } else {
    const double d2 = norm({f1[0] - f0[0], f1[1] - f0[1]}) / h0;
    const double dm = std::max(d1, d2);
    h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  }
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

DenseSolution integrate(const SecondOrderODE& ode, double x0, double r0, double rp0, double x_end,
                        const ToleranceSpec& tol, const IntegratorOptions& opts) {
  if (!ode.rhs) throw Error(ErrorKind::InvalidArgument, "ODE without right-hand side");
  if (!ode.domain.contains(x0) || !ode.domain.contains(x_end)) {
    throw Error(ErrorKind::DomainError, "integration endpoints outside the ODE domain");
  }
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "initial amplitude must be positive");
  if (!(tol.abs > 0.0) || !(tol.rel > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
  if (!(opts.max_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_step must be positive");
  if (x_end == x0) throw Error(ErrorKind::InvalidArgument, "empty integration interval");

  const double dir = x_end > x0 ? 1.0 : -1.0;
  const double span = std::abs(x_end - x0);
  Stepper stepper(ode);

  double x = x0;
  State y = {r0, rp0};
  State k1 = stepper.deriv(x, y);
  if (!Stepper::finite(k1)) throw Error(ErrorKind::NonFinite, "rhs not finite at initial point");

  double h = initial_step(stepper, x, y, k1, dir, span, tol);
  std::vector<DenseSolution::Segment> segs;
  constexpr double safety = 0.9, min_factor = 0.2, max_factor = 5.0;

  for (std::size_t n = 0; n < opts.max_steps; ++n) {
    h = std::min(h, opts.max_step);
    const double remaining = std::abs(x_end - x);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h < 1e-14 * std::max(std::abs(x), 1e-300)) {
      throw Error(ErrorKind::StepSizeUnderflow, "step size underflow at x=" + std::to_string(x));
    }

    State y_new{}, k7{}, err{};
    const bool ok = stepper.step(x, y, k1, dir * h, y_new, k7, err);
    const double en = ok ? error_norm(err, y, y_new, tol) : 2.0;
    if (en > 1.0) {
      const double factor = ok ? std::max(min_factor, safety * std::pow(en, -0.2)) : 0.25;
      h *= factor;
      continue;
    }

    const double x_new = last ? x_end : x + dir * h;
    if (std::abs(y_new[0]) > opts.blowup_limit || std::abs(y_new[1]) > opts.blowup_limit) {
      throw Error(ErrorKind::BlowUp, "solution exceeds blow-up limit near x=" + std::to_string(x_new));
    }
    if (y_new[0] < opts.amplitude_floor) {
      throw Error(ErrorKind::AmplitudeCollapse,
                  "amplitude fell below floor near x=" + std::to_string(x_new));
    }

    if (dir > 0) {
      segs.push_back({x, x_new, y[0], y[1], k1[1], y_new[0], y_new[1], k7[1]});
    } else {
      segs.push_back({x_new, x, y_new[0], y_new[1], k7[1], y[0], y[1], k1[1]});
    }
    x = x_new;
    y = y_new;
    k1 = k7;
    if (last) {
      if (dir < 0) std::reverse(segs.begin(), segs.end());
      return DenseSolution(std::move(segs));
    }
    const double factor = en == 0.0 ? max_factor : std::clamp(safety * std::pow(en, -0.2), min_factor, max_factor);
    h *= factor;
  }
  throw Error(ErrorKind::StepSizeUnderflow, "maximum number of steps exceeded");
}

DenseSolution integrate_span(const SecondOrderODE& ode, double x0, double r0, double rp0, double lo,
                             double hi, const ToleranceSpec& tol, const IntegratorOptions& opts) {
  if (!(lo <= x0 && x0 <= hi) || !(lo < hi)) {
    throw Error(ErrorKind::InvalidArgument, "integration span must contain the initial point");
  }
  if (x0 == lo) return integrate(ode, x0, r0, rp0, hi, tol, opts);
  if (x0 == hi) return integrate(ode, x0, r0, rp0, lo, tol, opts);
  return DenseSolution::merge(integrate(ode, x0, r0, rp0, lo, tol, opts),
                              integrate(ode, x0, r0, rp0, hi, tol, opts));
}

SolutionGrid sample(const DenseSolution& dense, std::span<const double> xs) {
  SolutionGrid g;
  g.meta.provenance = Provenance::Integrated;
  g.xs.assign(xs.begin(), xs.end());
  g.rs.reserve(xs.size());
  g.rps.reserve(xs.size());
  for (double x : xs) {
    g.rs.push_back(dense.value(x));
    g.rps.push_back(dense.slope(x));
  }
  return g;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double h = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + static_cast<double>(i) * h;
  if (count > 1) out.back() = hi;
  return out;
}

SolutionGrid resample(const SolutionGrid& grid, std::span<const double> xs) {
  if (grid.size() < 2) throw Error(ErrorKind::GridTooSmall, "cannot resample fewer than 2 points");
  SolutionGrid out;
  out.meta = grid.meta;
  out.xs.assign(xs.begin(), xs.end());
  for (double x : xs) {
    if (x < grid.xs.front() || x > grid.xs.back()) {
      throw Error(ErrorKind::OutOfRange, "resample abscissa outside grid");
    }
    auto it = std::upper_bound(grid.xs.begin(), grid.xs.end(), x);
    std::size_t i = it == grid.xs.begin() ? 0 : static_cast<std::size_t>(it - grid.xs.begin()) - 1;
    if (i + 1 >= grid.size()) i = grid.size() - 2;
    const double h = grid.xs[i + 1] - grid.xs[i];
    const double t = (x - grid.xs[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    out.rs.push_back(h00 * grid.rs[i] + h10 * h * grid.rps[i] + h01 * grid.rs[i + 1] +
                     h11 * h * grid.rps[i + 1]);
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    out.rps.push_back((d00 * grid.rs[i] + d01 * grid.rs[i + 1]) / h + d10 * grid.rps[i] +
                      d11 * grid.rps[i + 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residual

namespace {

// Fourth-order second-derivative stencils (times 12 h^2).
constexpr std::array<double, 5> kCentral = {-1.0, 16.0, -30.0, 16.0, -1.0};
constexpr std::array<double, 6> kEdge0 = {45.0, -154.0, 214.0, -156.0, 61.0, -10.0};
constexpr std::array<double, 6> kEdge1 = {10.0, -15.0, -4.0, 14.0, -6.0, 1.0};

bool is_uniform(std::span<const double> xs, double rtol) {
  const double span = xs.back() - xs.front();
  const double h = span / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * h)) > rtol * span) return false;
  }
  return true;
}

}  // namespace

ResidualReport residual(const SecondOrderODE& ode, const SolutionGrid& grid,
                        const ResidualOptions& opts) {
  if (grid.size() < 7) {
    throw Error(ErrorKind::GridTooSmall, "residual needs at least 7 grid points");
  }
  ResidualReport rep;
  const SolutionGrid* g = &grid;
  SolutionGrid uniform;
  if (!is_uniform(grid.xs, opts.uniform_rtol)) {
    if (!opts.allow_resample) {
      throw Error(ErrorKind::NonUniform, "residual grid is not uniformly spaced");
    }
    uniform = resample(grid, linspace(grid.xs.front(), grid.xs.back(), grid.size()));
    g = &uniform;
    rep.resampled = true;
  }

  const std::size_t n = g->size();
  const auto& r = g->rs;
  const double h = (g->xs.back() - g->xs.front()) / static_cast<double>(n - 1);
  const double scale = 12.0 * h * h;
  rep.xs = g->xs;
  rep.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i >= 2 && i + 2 < n) {
      for (std::size_t k = 0; k < 5; ++k) acc += kCentral[k] * r[i - 2 + k];
    } else if (i < 2) {
      const auto& w = i == 0 ? kEdge0 : kEdge1;
      for (std::size_t k = 0; k < 6; ++k) acc += w[k] * r[k];
    } else {
      // mirrored one-sided stencils; reflection keeps the sign for even order
      const auto& w = i == n - 1 ? kEdge0 : kEdge1;
      for (std::size_t k = 0; k < 6; ++k) acc += w[k] * r[n - 1 - k];
    }
    const double rpp = acc / scale;
    const double value = rpp - ode.rhs(g->xs[i], r[i]);
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::NonFinite, "residual not finite at x=" + std::to_string(g->xs[i]));
    }
    rep.values[i] = value;
    if (i >= 2 && i + 2 < n) rep.max_interior = std::max(rep.max_interior, std::abs(value));
  }
  return rep;
}

}  // namespace gpbt

namespace gpbt {

Amplitude Amplitude::from_dense(DenseSolution dense) {
  Amplitude a;
  a.domain = dense.domain();
  auto shared = std::make_shared<const DenseSolution>(std::move(dense));
  a.value = [shared](double x) { return shared->value(x); };
  a.slope = [shared](double x) { return shared->slope(x); };
  a.provenance = Provenance::Integrated;
  return a;
}

Amplitude Amplitude::from_grid(SolutionGrid grid) {
  if (grid.size() < 2) throw Error(ErrorKind::GridTooSmall, "amplitude needs at least 2 grid points");
  grid.validate();
  Amplitude a;
  a.domain = {grid.xs.front(), grid.xs.back()};
  a.provenance = grid.meta.provenance;
  auto shared = std::make_shared<const SolutionGrid>(std::move(grid));
  a.value = [shared](double x) {
    const double xs[] = {x};
    return resample(*shared, xs).rs[0];
  };
  a.slope = [shared](double x) {
    const double xs[] = {x};
    return resample(*shared, xs).rps[0];
  };
  return a;
}

SolutionGrid sample(const Amplitude& amp, std::span<const double> xs) {
  SolutionGrid g;
  g.meta.provenance = amp.provenance;
  g.xs.assign(xs.begin(), xs.end());
  g.rs.reserve(xs.size());
  g.rps.reserve(xs.size());
  for (double x : xs) {
    if (!amp.covers(x)) {
      throw Error(ErrorKind::OutOfRange, "x=" + std::to_string(x) + " outside amplitude domain");
    }
    g.rs.push_back(amp.value(x));
    g.rps.push_back(amp.slope(x));
  }
  return g;
}

}  // namespace gpbt
