#include <cmath>
#include <random>

#include "doctest.h"

#include "gpbt/calculus.hpp"
#include "gpbt/error.hpp"
#include "gpbt/functional.hpp"

using namespace gpbt;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("G and G' at reference points") {
  CHECK(eval_g({1, 0.0}, 2.0) == 2.0);
  CHECK(eval_g({1, 1.0}, 1.0) == 2.0);
  CHECK(eval_g({2, 1.0}, 1.0) == 2.0);
  CHECK(eval_g_prime({1, 0.0}, 5.0) == 1.0);
  CHECK(eval_g_prime({1, 1.0}, 1.0) == 3.0);
  CHECK(eval_g_prime({2, 1.0}, std::sqrt(2.0)) == doctest::Approx(10.0 * std::sqrt(2.0)));
  CHECK(kind_of([] { eval_g({1, 0.0}, 0.0); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { eval_g_prime({2, 1.0}, -1.0); }) == ErrorKind::DomainError);
}

TEST_CASE("G derivative tower against finite differences") {
  for (int n = 1; n <= 3; ++n) {
    const PolyG g{n, 0.7};
    SmoothMap fd;
    fd.eval = [g](double x) { return g.value(x); };
    fd.domain = {0.0, INFINITY};
    for (double x : {0.6, 1.0, 1.7}) {
      CHECK(g.prime(x) == doctest::Approx(derivative(fd, 1, x)).epsilon(1e-9));
      CHECK(g.second(x) == doctest::Approx(derivative(fd, 2, x)).epsilon(1e-7));
      CHECK(g.third(x) == doctest::Approx(derivative(fd, 3, x)).epsilon(1e-5));
    }
  }
}

TEST_CASE("solve_f reference roots") {
  const ShiftValue a = solve_f(ShiftMap({1, 0.0}, 3.0), 2.0);
  CHECK(a.f == 5.0);
  CHECK(a.fprime == 1.0);

  // f^2 + f - 4 = 0
  const ShiftValue b = solve_f(ShiftMap({1, 1.0}, 2.0), 1.0);
  const double root = (-1.0 + std::sqrt(17.0)) / 2.0;
  CHECK(b.f == doctest::Approx(root).epsilon(1e-15));
  CHECK(b.fprime == doctest::Approx(3.0 / std::sqrt(17.0)).epsilon(1e-14));

  // f^4 + f^2 - 6 = 0
  const ShiftValue c = solve_f(ShiftMap({2, 1.0}, 4.0), 1.0);
  CHECK(c.f == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c.fprime == doctest::Approx(6.0 / (10.0 * std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("solve_f error paths and valid domain") {
  const ShiftMap neg({1, 0.0}, -2.0);
  CHECK(neg.valid_domain().lo == doctest::Approx(2.0));
  CHECK(kind_of([&] { solve_f(neg, 1.5); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { solve_f(neg, -1.0); }) == ErrorKind::DomainError);
  // 1 + 4 eta (G + K) < 0
  const ShiftMap deep({1, 10.0}, -2.0);
  CHECK(kind_of([&] { solve_f(deep, 0.05); }) == ErrorKind::NoRealRoot);
  CHECK(solve_f(deep, deep.valid_domain().lo + 0.1).f > 0.0);
}

TEST_CASE("translation property over random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> nd(1, 3);
  std::uniform_real_distribution<double> eta(0.0, 2.0), kd(-0.5, 3.0), xd(0.1, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const PolyG g{nd(rng), eta(rng)};
    const ShiftMap m(g, kd(rng));
    const double x = xd(rng);
    if (!(x > m.valid_domain().lo)) continue;
    const ShiftValue fx = solve_f(m, x);
    const double scale = std::max(1.0, std::abs(g.value(x) + m.k()));
    CHECK(std::abs(g.value(fx.f) - g.value(x) - m.k()) < 1e-12 * scale);
  }
}

TEST_CASE("semigroup of translations") {
  for (int n = 1; n <= 3; ++n) {
    for (double eta : {0.0, 0.5, 2.0}) {
      const PolyG g{n, eta};
      for (double k1 : {0.25, 1.0}) {
        for (double k2 : {0.5, 2.0}) {
          for (double x : {0.2, 1.0, 3.0}) {
            const double two = solve_f(ShiftMap(g, k1), solve_f(ShiftMap(g, k2), x).f).f;
            CHECK(std::abs(two - solve_f(ShiftMap(g, k1 + k2), x).f) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("implicit f' and the closed-form tower match finite differences") {
  const ShiftMap m({2, 0.8}, 1.5);
  SmoothMap fd = as_smooth_map(m);
  REQUIRE(fd.has_full_tower());
  const SmoothMap exact = fd;
  fd.d1 = fd.d2 = fd.d3 = nullptr;
  for (double x : {0.5, 1.0, 2.0}) {
    CHECK(std::abs(solve_f(m, x).fprime - derivative(fd, 1, x)) < 1e-6);
    CHECK(exact.d2(x) == doctest::Approx(derivative(fd, 2, x)).epsilon(1e-6));
    CHECK(exact.d3(x) == doctest::Approx(derivative(fd, 3, x)).epsilon(1e-5));
  }
}

TEST_CASE("Q identity for the shift map") {
  const SmoothMap w = as_smooth_map(PolyG{2, 1.0});
  for (double k : {0.5, 2.0}) {
    const ShiftMap m({2, 1.0}, k);
    SmoothMap fd = as_smooth_map(m);
    fd.d1 = fd.d2 = fd.d3 = nullptr;
    for (double x : {0.5, 1.0, 3.0}) {
      const ShiftValue fx = solve_f(m, x);
      const double lhs = schwarzian(w, x);
      const double rhs = fx.fprime * fx.fprime * schwarzian(w, fx.f) + schwarzian(fd, x);
      CHECK(std::abs(lhs - rhs) < 1e-5);
    }
  }
}

TEST_CASE("Mobius evaluation and group closure") {
  CHECK(apply_mobius(Mobius::identity(), 7.0) == 7.0);
  CHECK(apply_mobius(Mobius::translation(3.0), 2.0) == 5.0);
  CHECK(apply_mobius({2, 1, 1, 1}, 1.0) == 1.5);
  CHECK(kind_of([] { apply_mobius({1, 0, 1, 1}, -1.0); }) == ErrorKind::Pole);
  CHECK_THROWS_AS((Mobius{1, 2, 2, 4}.validate()), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Mobius p{c(rng), c(rng), c(rng), c(rng)}, q{c(rng), c(rng), c(rng), c(rng)};
    const Mobius pq = compose(p, q);
    const double want = p.determinant() * q.determinant();
    CHECK(std::abs(pq.determinant() - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    const double w = 0.37;
    if (std::abs(q.c * w + q.d) > 0.1 && std::abs(p.c * apply_mobius(q, w) + p.d) > 0.1) {
      CHECK(apply_mobius(pq, w) == doctest::Approx(apply_mobius(p, apply_mobius(q, w))));
    }
  }
}

TEST_CASE("conjugation reproduces the translation map") {
  SmoothMap ident;
  ident.eval = [](double z) { return z; };
  ident.d1 = [](double) { return 1.0; };
  const InvertibleMap id_map{ident, [](double y) { return y; }, {}};
  const SmoothMap shift = conjugate_f(id_map, Mobius::translation(2.5));
  CHECK(shift(1.0) == 3.5);

  for (int n = 1; n <= 3; ++n) {
    const PolyG g{n, 0.6};
    const SmoothMap f = conjugate_f(as_invertible(g), Mobius::translation(1.3));
    const ShiftMap m(g, 1.3);
    for (double x : {0.3, 1.0, 4.0}) CHECK(std::abs(f(x) - solve_f(m, x).f) < 1e-10);
  }

  SmoothMap sq;
  sq.eval = [](double x) { return x * x; };
  sq.d1 = [](double x) { return 2.0 * x; };
  sq.domain = {0.0, INFINITY};
  const InvertibleMap sq_map{sq, [](double y) { return std::sqrt(y); }, {0.0, INFINITY}};
  const SmoothMap same = conjugate_f(sq_map, Mobius::identity());
  for (double x : {0.5, 2.0}) CHECK(same(x) == doctest::Approx(x).epsilon(1e-15));

  const SmoothMap out = conjugate_f(as_invertible(PolyG{1, 0.0}), Mobius::translation(-5.0));
  CHECK(kind_of([&] { out(1.0); }) == ErrorKind::RangeError);
}
