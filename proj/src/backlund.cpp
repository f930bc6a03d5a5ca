#include "gpbt/backlund.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpbt/error.hpp"

namespace gpbt {

namespace {

// Preimage of y under f: the x > 0 with G(x) = G(y) - K, if any.
double preimage(const ShiftMap& shift, double y) {
  const double target = shift.g().value(y) - shift.k();
  return target > 0.0 ? inverse_g(shift.g(), target) : 0.0;
}

}  // namespace

BacklundMap::BacklundMap(ShiftMap shift, Interval seed_domain) : shift_(std::move(shift)) {
  const Interval& valid = shift_.valid_domain();
  source_.lo = valid.lo;
  if (seed_domain.lo > 0.0) source_.lo = std::max(source_.lo, preimage(shift_, seed_domain.lo));
  source_.hi = std::isinf(seed_domain.hi) ? valid.hi : preimage(shift_, seed_domain.hi);
  if (!(seed_domain.hi > 0.0)) source_.hi = 0.0;
}

BacklundMap::Jacobian BacklundMap::at(double x) const {
  const ShiftValue fx = solve_f(shift_, x);
  if (!(fx.fprime > 0.0)) {
    throw Error(ErrorKind::NegativeJacobian, "f'(x) <= 0 at x=" + std::to_string(x));
  }
  return {fx.f, fx.fprime, shift_second_derivative(shift_, x, fx)};
}

Amplitude transformed(const BacklundMap& map, const Amplitude& seed) {
  Amplitude out;
  out.domain = map.source_domain();
  out.provenance = Provenance::Transformed;
  auto image = [map, seed](double x) {
    const auto jac = map.at(x);
    if (!seed.covers(jac.f)) {
      throw Error(ErrorKind::DomainEscape,
                  "f(x)=" + std::to_string(jac.f) + " leaves the seed domain at x=" + std::to_string(x));
    }
    return jac;
  };
  out.value = [seed, image](double x) {
    const auto jac = image(x);
    return seed.value(jac.f) / std::sqrt(jac.f1);
  };
  out.slope = [seed, image](double x) {
    const auto jac = image(x);
    const double root = std::sqrt(jac.f1);
    return seed.slope(jac.f) * root - 0.5 * seed.value(jac.f) * jac.f2 / (jac.f1 * root);
  };
  return out;
}

SolutionGrid transform(const BacklundMap& map, const Amplitude& seed, std::span<const double> xs,
                       DomainPolicy policy) {
  const Amplitude r1 = transformed(map, seed);
  std::vector<double> kept;
  kept.reserve(xs.size());
  for (double x : xs) {
    bool inside = x > map.shift().valid_domain().lo && r1.covers(x);
    if (inside) inside = seed.covers(solve_f(map.shift(), x).f);
    if (inside) {
      kept.push_back(x);
    } else if (policy == DomainPolicy::Strict) {
      throw Error(ErrorKind::DomainEscape,
                  "x=" + std::to_string(x) + " is not mapped into the seed domain");
    }
  }
  SolutionGrid grid = sample(r1, kept);
  grid.meta.provenance = Provenance::Transformed;
  grid.meta.params["K"] = map.shift().k();
  if (kept.size() != xs.size() && !kept.empty()) {
    grid.meta.trimmed = Interval{kept.front(), kept.back()};
  }
  return grid;
}

std::vector<SolutionGrid> orbit(const PolyG& g, std::span<const double> k_schedule,
                                const Amplitude& seed, std::span<const double> xs) {
  std::vector<SolutionGrid> out;
  out.reserve(k_schedule.size());
  double total = 0.0;
  for (std::size_t j = 0; j < k_schedule.size(); ++j) {
    total += k_schedule[j];
    try {
      BacklundMap map(ShiftMap(g, total), seed.domain);
      out.push_back(transform(map, seed, xs));
    } catch (const Error& e) {
      throw Error(e.kind(), "orbit element " + std::to_string(j + 1) + ": " + e.detail());
    }
  }
  return out;
}

FixedPointReport is_fixed_point(const BacklundMap& map, const Amplitude& seed,
                                std::span<const double> xs, double tol) {
  FixedPointReport rep;
  std::size_t used = 0;
  for (double x : xs) {
    if (!seed.covers(x) || !(x > map.shift().valid_domain().lo)) continue;
    const auto jac = map.at(x);
    if (!seed.covers(jac.f)) continue;
    const double r0x = seed.value(x);
    const double r0f = seed.value(jac.f);
    const double dev = std::abs(r0x * r0x * jac.f1 - r0f * r0f) / std::max(1.0, r0f * r0f);
    rep.deviation = std::max(rep.deviation, dev);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::DomainEscape, "no grid point is mapped into the seed domain");
  }
  rep.fixed = rep.deviation < tol;
  return rep;
}

FixedPointReport is_fixed_point(const BacklundMap& map, const SolutionGrid& grid, double tol) {
  return is_fixed_point(map, Amplitude::from_grid(grid), grid.xs, tol);
}

}  // namespace gpbt
