#include "gpbt/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpbt/error.hpp"

namespace gpbt {

const RealFn& SmoothMap::closed_form(int order) const {
  switch (order) {
    case 1: return d1;
    case 2: return d2;
    case 3: return d3;
    default: throw Error(ErrorKind::InvalidArgument, "derivative order must be 1, 2 or 3");
  }
}

void Stencil::validate() const {
  if (order < 1 || order > 3) {
    throw Error(ErrorKind::InvalidArgument, "stencil order must be 1, 2 or 3");
  }
  if (points < 5 || points % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "stencil needs an odd point count >= 5");
  }
  if (points < order + 2) {
    throw Error(ErrorKind::InvalidArgument, "stencil point count too small for derivative order");
  }
  if (!(base_step > 0.0) || !std::isfinite(base_step)) {
    throw Error(ErrorKind::InvalidArgument, "stencil base_step must be positive");
  }
}

int Stencil::accuracy() const { return 2 * ((points - order + 1) / 2); }

Stencil Stencil::standard(int order, double z) {
  Stencil s;
  s.order = order;
  s.points = order == 3 ? 7 : 5;
  const double eps = std::numeric_limits<double>::epsilon();
  s.base_step = std::pow(eps, 1.0 / (s.points + 1)) * std::max(1.0, std::abs(z));
  return s;
}

std::vector<double> fornberg_weights(int order, double x0, const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || n <= order) {
    throw Error(ErrorKind::InvalidArgument, "not enough nodes for requested derivative order");
  }
  // c[j][k]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][order];
  return w;
}

std::vector<double> central_weights(int order, int points) {
  const int half = (points - 1) / 2;
  std::vector<double> nodes;
  nodes.reserve(points);
  for (int k = -half; k <= half; ++k) nodes.push_back(static_cast<double>(k));
  return fornberg_weights(order, 0.0, nodes);
}

namespace {

double sample(const SmoothMap& map, double z) {
  const double v = map.eval(z);
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::NonFinite, "map value not finite at z=" + std::to_string(z));
  }
  return v;
}

double apply_stencil(const SmoothMap& map, const std::vector<double>& w, int order, double z,
                     double h) {
  const int half = static_cast<int>(w.size() - 1) / 2;
  double acc = 0.0;
  for (int k = -half; k <= half; ++k) {
    const double wk = w[k + half];
    if (wk == 0.0) continue;
    acc += wk * sample(map, z + k * h);
  }
  return acc / std::pow(h, order);
}

}  // namespace

double finite_difference(const SmoothMap& map, const Stencil& stencil, double z) {
  stencil.validate();
  const double h = stencil.base_step;
  const int half = (stencil.points - 1) / 2;
  if (!map.domain.contains(z - half * h) || !map.domain.contains(z + half * h)) {
    throw Error(ErrorKind::DomainError,
                "stencil around z=" + std::to_string(z) + " leaves the map's domain");
  }
  const auto w = central_weights(stencil.order, stencil.points);
  const double coarse = apply_stencil(map, w, stencil.order, z, h);
  const double fine = apply_stencil(map, w, stencil.order, z, 0.5 * h);
  const double gain = std::ldexp(1.0, stencil.accuracy());
  return (gain * fine - coarse) / (gain - 1.0);
}

double derivative(const SmoothMap& map, int order, double z) {
  const RealFn& exact = map.closed_form(order);
  if (exact) {
    if (!map.domain.contains(z)) {
      throw Error(ErrorKind::DomainError, "z=" + std::to_string(z) + " outside the map's domain");
    }
    const double v = exact(z);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::NonFinite, "closed-form derivative not finite");
    }
    return v;
  }
  return finite_difference(map, Stencil::standard(order, z), z);
}

double schwarzian_from_derivatives(double d1, double d2, double d3) {
  const double ratio = d2 / d1;
  return d3 / d1 - 1.5 * ratio * ratio;
}

double schwarzian(const SmoothMap& map, double z, const SchwarzianOptions& opts) {
  const double f1 = derivative(map, 1, z);
  const double f2 = derivative(map, 2, z);
  const double h = Stencil::standard(1, z).base_step;
  if (std::abs(f1) < opts.critical_threshold * std::max(1.0, std::abs(f2 * h))) {
    throw Error(ErrorKind::CriticalPoint,
                "first derivative vanishes at z=" + std::to_string(z));
  }
  const double f3 = derivative(map, 3, z);
  return schwarzian_from_derivatives(f1, f2, f3);
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  SmoothMap out;
  out.eval = [outer, inner](double z) { return outer.eval(inner.eval(z)); };
  out.domain = inner.domain;
  if (outer.d1 && inner.d1) {
    out.d1 = [outer, inner](double z) { return outer.d1(inner.eval(z)) * inner.d1(z); };
  }
  if (outer.d1 && outer.d2 && inner.d1 && inner.d2) {
    out.d2 = [outer, inner](double z) {
      const double u = inner.eval(z);
      const double i1 = inner.d1(z);
      return outer.d2(u) * i1 * i1 + outer.d1(u) * inner.d2(z);
    };
  }
  if (outer.has_full_tower() && inner.has_full_tower()) {
    out.d3 = [outer, inner](double z) {
      const double u = inner.eval(z);
      const double i1 = inner.d1(z);
      const double i2 = inner.d2(z);
      return outer.d3(u) * i1 * i1 * i1 + 3.0 * outer.d2(u) * i1 * i2 + outer.d1(u) * inner.d3(z);
    };
  }
  return out;
}

}  // namespace gpbt
