#include <doctest.h>

#include <cmath>

#include "sdelab/bump.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/quadrature.hpp"

using namespace sdelab;

namespace {
// High-precision reference values (40-digit quadrature and differentiation).
constexpr double kEta = 32107861.787124283761;
constexpr double kG01 = 0.00044591218212360541087;       // g(0.1)
constexpr double kGp01 = 0.083608534148176014539;        // g'(0.1)
constexpr double kGpp01 = 13.865081912905855744;         // g''(0.1)
constexpr double kF075 = 3.6132638360758544706;          // f(0.75)
constexpr double kSupGp = 52.04584517435773;             // sup |g'|
constexpr double kSupGpp = 1849.9910840708376;           // sup |g''|
}  // namespace

TEST_SUITE("bump_functions") {
  TEST_CASE("values vanish off the open support") {
    const BumpFunction b(0.0, 0.5, 2.0);
    for (double t : {-1.0, 0.0, 0.5, 0.75, 3.0})
      for (int k = 0; k < 3; ++k) CHECK(b.eval(t, k) == 0.0);
  }

  TEST_CASE("unnormalized peak is exp(-4/(b-a)^2)") {
    const BumpFunction b(0.0, 1.0, 1.0);
    CHECK(b.value(0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
    CHECK(std::abs(b.deriv1(0.5)) < 1e-15);
  }

  TEST_CASE("normalized bump matches the reference amplitude") {
    const BumpFunction g = make_normalized_bump(0.0, 0.5);
    CHECK(g.eta() == doctest::Approx(kEta).epsilon(1e-12));
    CHECK(g.value(0.1) == doctest::Approx(kG01).epsilon(1e-12));
    CHECK(g.deriv1(0.1) == doctest::Approx(kGp01).epsilon(1e-12));
    CHECK(g.deriv2(0.1) == doctest::Approx(kGpp01).epsilon(1e-11));
    const BumpFunction f = make_normalized_bump(0.5, 1.0);
    CHECK(f.value(0.75) == doctest::Approx(kF075).epsilon(1e-12));
  }

  TEST_CASE("normalized bump has unit square integral") {
    for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}, std::pair{-2.0, 3.0}, std::pair{0.0, 0.2}}) {
      const BumpFunction g = make_normalized_bump(a, b);
      const auto r = quad::gauss_kronrod([&](double t) { return g.value(t) * g.value(t); }, a, b, {0.0, 1e-13});
      CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    }
    // exp(-1 / (a b)) underflows on very short supports.
    CHECK_THROWS_AS(make_normalized_bump(0.0, 0.01), Error);
  }

  TEST_CASE("derivatives agree with central differences") {
    const BumpFunction g = make_normalized_bump(0.0, 0.5);
    for (double t : {0.05, 0.13, 0.25, 0.31, 0.44}) {
      const double h = 1e-6;
      const double d1 = (g.value(t + h) - g.value(t - h)) / (2 * h);
      const double d2 = (g.deriv1(t + h) - g.deriv1(t - h)) / (2 * h);
      CHECK(g.deriv1(t) == doctest::Approx(d1).epsilon(1e-6).scale(1.0));
      CHECK(g.deriv2(t) == doctest::Approx(d2).epsilon(1e-6).scale(1.0));
    }
  }

  TEST_CASE("eval_all matches the single-order calls") {
    const BumpFunction g(0.2, 0.9, 3.0);
    for (double t : {0.21, 0.4, 0.55, 0.89}) {
      const auto all = g.eval_all(t);
      CHECK(all[0] == g.eval(t, 0));
      CHECK(all[1] == g.eval(t, 1));
      CHECK(all[2] == g.eval(t, 2));
    }
  }

  TEST_CASE("scaled multiplies the amplitude") {
    const BumpFunction g = make_normalized_bump(0.0, 0.5);
    const BumpFunction s = g.scaled(2.0);
    CHECK(s.value(0.2) == doctest::Approx(2.0 * g.value(0.2)).epsilon(1e-15));
    CHECK(s.a() == g.a());
    CHECK(s.b() == g.b());
  }

  TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(BumpFunction(1.0, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(BumpFunction(0.0, 1.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(BumpFunction(0.0, 1.0, NAN), InvalidArgument);
    CHECK_THROWS_AS(make_normalized_bump(2.0, 1.0), InvalidArgument);
    const BumpFunction g(0.0, 1.0, 1.0);
    CHECK_THROWS_AS(g.eval(0.5, 3), InvalidArgument);
    CHECK_THROWS_AS(g.eval(0.5, -1), InvalidArgument);
  }

  TEST_CASE("sup constants match the reference maxima") {
    const BumpFunction g = make_normalized_bump(0.0, 0.5);
    const BumpFunction f = make_normalized_bump(0.5, 1.0);
    CHECK(sup_bounds(f, g) == doctest::Approx(kSupGpp).epsilon(1e-9));
    CHECK(sup_f_gprime(f, g) == doctest::Approx(kSupGp).epsilon(1e-9));
    CHECK(sup_bounds(f, g) >= 1.0);
  }

  TEST_CASE("sup constant is at least one") {
    const BumpFunction tiny(0.0, 1.0, 1e-6);
    CHECK(sup_bounds(tiny, tiny) == 1.0);
  }
}
