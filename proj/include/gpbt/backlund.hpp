#pragma once

#include <span>
#include <vector>

#include "gpbt/functional.hpp"
#include "gpbt/ode.hpp"

namespace gpbt {

/// The auto-Backlund map r1(x)^2 f'(x) = r0(f(x))^2 driven by a translation
/// G(f(x)) = G(x) + K, restricted to the x where f(x) lands in the seed's
/// domain.
class BacklundMap {
 public:
  BacklundMap(ShiftMap shift, Interval seed_domain);

  const ShiftMap& shift() const { return shift_; }
  /// Closed interval of x with f(x) inside the seed domain. Empty when lo > hi.
  const Interval& source_domain() const { return source_; }
  bool empty() const { return !(source_.lo <= source_.hi); }

  struct Jacobian {
    double f;
    double f1;
    double f2;
  };

  /// f, f', f'' at x. Throws NegativeJacobian if f' <= 0.
  Jacobian at(double x) const;

 private:
  ShiftMap shift_;
  Interval source_;
};

/// The transformed amplitude r1 = r0(f) / sqrt(f'), evaluated lazily, with
/// r1' from the chain rule. Defined on the map's source domain.
Amplitude transformed(const BacklundMap& map, const Amplitude& seed);

enum class DomainPolicy {
  Trim,    // drop abscissae whose image leaves the seed domain, record the kept interval
  Strict,  // throw DomainEscape
};

SolutionGrid transform(const BacklundMap& map, const Amplitude& seed, std::span<const double> xs,
                       DomainPolicy policy = DomainPolicy::Trim);

/// Element j is the transform with K equal to the sum of the first j+1
/// schedule entries.
std::vector<SolutionGrid> orbit(const PolyG& g, std::span<const double> k_schedule,
                                const Amplitude& seed, std::span<const double> xs);

struct FixedPointReport {
  bool fixed = false;
  double deviation = 0.0;
};

/// max |r0(x)^2 f'(x) - r0(f(x))^2| / max(1, r0(f(x))^2) over xs (restricted
/// to the source domain) compared against tol.
FixedPointReport is_fixed_point(const BacklundMap& map, const Amplitude& seed,
                                std::span<const double> xs, double tol);

/// Grid form: the grid is interpolated (cubic Hermite) to reach f(x).
FixedPointReport is_fixed_point(const BacklundMap& map, const SolutionGrid& grid, double tol);

}  // namespace gpbt
