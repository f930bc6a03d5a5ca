#include <cmath>

#include "doctest.h"

#include "gpbt/backlund.hpp"
#include "gpbt/error.hpp"
#include "gpbt/gp_model.hpp"

using namespace gpbt;

namespace {

GPParams make(int n, double eta) {
  GPParams p;
  p.n = n;
  p.eta = eta;
  return p;
}

Amplitude integrated_seed(const GPParams& p, double r1, double hi, double max_step = INFINITY) {
  IntegratorOptions opts;
  opts.max_step = max_step;
  return Amplitude::from_dense(integrate(gp_rhs(p), 1.0, r1, 0.0, hi, {1e-10, 1e-10}, opts));
}

SolutionGrid constant_grid(const std::vector<double>& xs) {
  SolutionGrid g;
  g.xs = xs;
  g.rs.assign(xs.size(), 1.0);
  g.rps.assign(xs.size(), 0.0);
  return g;
}

}  // namespace

TEST_CASE("K = 0 is the identity") {
  const GPParams p = make(1, 1.0);
  const Amplitude seed = integrated_seed(p, 0.7, 3.0);
  const BacklundMap map(ShiftMap(p.g(), 0.0), seed.domain);
  const std::vector<double> xs = linspace(1.0, 3.0, 41);
  const SolutionGrid g = transform(map, seed, xs);
  REQUIRE(g.size() == xs.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(g.rs[i] == doctest::Approx(seed.value(xs[i])).epsilon(1e-14));
    CHECK(g.rps[i] == doctest::Approx(seed.slope(xs[i])).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("closed-form amplitude maps to itself") {
  const GPParams p = make(1, 1.0);
  const Amplitude seed = closed_form_amplitude(p);
  const std::vector<double> xs = linspace(0.2, 6.0, 59);
  for (double k : {0.1, 0.5, 2.0, 10.0, -0.05}) {
    const BacklundMap map(ShiftMap(p.g(), k), seed.domain);
    const SolutionGrid g = transform(map, seed, xs);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(g.rs[i] - closed_form_r(p, g.xs[i])) < 1e-10);
      CHECK(std::abs(g.rps[i] - closed_form_rp(p, g.xs[i])) < 1e-9);
    }
    const FixedPointReport fp = is_fixed_point(map, seed, xs, 1e-10);
    CHECK(fp.fixed);
    CHECK(fp.deviation < 1e-10);
  }
}

TEST_CASE("generic seed transforms to a solution") {
  const GPParams p = make(1, 1.0);
  const double hi = solve_f(ShiftMap(p.g(), 0.5), 2.5).f;
  // step cap keeps the dense-output error below the residual target
  const Amplitude seed = integrated_seed(p, 1.3, hi, 2.5e-4);
  const BacklundMap map(ShiftMap(p.g(), 0.5), seed.domain);
  const std::vector<double> xs = linspace(1.0, 2.5, 16001);
  const SolutionGrid g = transform(map, seed, xs);
  CHECK(g.size() == xs.size());
  CHECK(residual(gp_rhs(p), g).max_interior < 1e-5);
}

TEST_CASE("transformed slopes follow the chain rule") {
  const GPParams p = make(2, 0.5);
  const Amplitude seed = integrated_seed(p, 0.9, 3.0);
  const BacklundMap map(ShiftMap(p.g(), 0.4), seed.domain);
  const Amplitude r1 = transformed(map, seed);
  SmoothMap fd;
  fd.eval = r1.value;
  fd.domain = {r1.domain.lo, r1.domain.hi};
  for (double x : {1.2, 1.5, 1.8}) {
    CHECK(r1.slope(x) == doctest::Approx(derivative(fd, 1, x)).epsilon(1e-7));
  }
}

TEST_CASE("orbit elements") {
  const GPParams p = make(1, 1.0);
  const Amplitude seed = integrated_seed(p, 0.7, 4.0);
  const std::vector<double> xs = linspace(1.0, 2.0, 21);

  const std::vector<double> zeros{0.0, 0.0, 0.0};
  const auto same = orbit(p.g(), zeros, seed, xs);
  REQUIRE(same.size() == 3);
  for (const auto& g : same) {
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.rs[i] == doctest::Approx(seed.value(xs[i])));
  }

  const GPParams flat = make(1, 0.0);
  const Amplitude one = Amplitude::from_grid(constant_grid(linspace(0.5, 10.0, 101)));
  const std::vector<double> ks{1.0, 2.0};
  for (const auto& g : orbit(flat.g(), ks, one, xs)) {
    for (double r : g.rs) CHECK(r == doctest::Approx(1.0).epsilon(1e-15));
  }

  const Amplitude cf = closed_form_amplitude(p);
  const std::vector<double> halves{0.5, 0.5}, whole{1.0};
  const auto a = orbit(p.g(), halves, cf, xs);
  const auto b = orbit(p.g(), whole, cf, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(a[1].rs[i] - b[0].rs[i]) < 1e-9);

  const std::vector<double> steps{0.3, 0.2, 0.4};
  const auto c = orbit(p.g(), steps, seed, xs);
  double total = 0.0;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    total += steps[j];
    const SolutionGrid direct = transform(BacklundMap(ShiftMap(p.g(), total), seed.domain), seed, xs);
    REQUIRE(direct.size() == c[j].size());
    for (std::size_t i = 0; i < direct.size(); ++i) CHECK(std::abs(direct.rs[i] - c[j].rs[i]) < 1e-8);
  }
}

TEST_CASE("fixed-point detection") {
  const GPParams flat = make(1, 0.0);
  const SolutionGrid ones = constant_grid(linspace(1.0, 5.0, 41));
  const FixedPointReport a = is_fixed_point(BacklundMap(ShiftMap(flat.g(), 1.0), {1.0, 5.0}), ones, 1e-10);
  CHECK(a.fixed);

  const GPParams p = make(1, 1.0);
  const Amplitude seed = integrated_seed(p, 1.3, 4.0);
  const std::vector<double> xs = linspace(1.0, 2.5, 31);
  const FixedPointReport b = is_fixed_point(BacklundMap(ShiftMap(p.g(), 0.7), seed.domain), seed, xs, 1e-10);
  CHECK_FALSE(b.fixed);
  CHECK(b.deviation > 1e-2);
}

TEST_CASE("transform with K then -K returns the seed") {
  const GPParams p = make(2, 0.5);
  const Amplitude seed = integrated_seed(p, 0.9, 3.0);
  const Amplitude up = transformed(BacklundMap(ShiftMap(p.g(), 0.6), seed.domain), seed);
  const Amplitude back = transformed(BacklundMap(ShiftMap(p.g(), -0.6), up.domain), up);
  for (double x : linspace(back.domain.lo, back.domain.hi, 25)) {
    CHECK(std::abs(back.value(x) - seed.value(x)) < 1e-7);
  }
}

TEST_CASE("domain bookkeeping") {
  const GPParams p = make(1, 1.0);
  const Amplitude seed = integrated_seed(p, 0.7, 2.0);
  const BacklundMap map(ShiftMap(p.g(), 1.0), seed.domain);
  const std::vector<double> xs = linspace(0.2, 2.0, 19);
  const SolutionGrid g = transform(map, seed, xs);
  REQUIRE(g.meta.trimmed.has_value());
  CHECK(g.size() < xs.size());
  CHECK(g.meta.provenance == Provenance::Transformed);
  CHECK(g.meta.params.at("K") == 1.0);
  for (double x : g.xs) CHECK(solve_f(map.shift(), x).f <= 2.0);
  try {
    transform(map, seed, xs, DomainPolicy::Strict);
    FAIL("expected DomainEscape");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainEscape);
  }
  const Amplitude r1 = transformed(map, seed);
  try {
    r1.value(1.9);
    FAIL("expected DomainEscape");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DomainEscape);
  }
  Amplitude broken = seed;
  broken.domain = {0.5, 10.0};
  broken.value = [](double x) -> double {
    if (x > 2.05) throw Error(ErrorKind::NonFinite, "bad sample");
    return 1.0;
  };
  broken.slope = [](double) { return 0.0; };
  const std::vector<double> ks{0.0, 1.0};
  try {
    orbit(p.g(), ks, broken, linspace(1.0, 2.0, 6));
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFinite);
    CHECK(std::string(e.what()).find("orbit element 2") != std::string::npos);
  }
}
