#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sdelab/bounds.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/random.hpp"

using namespace sdelab;

namespace {

// Independent high-precision quadrature of the normal functional.
struct Lemma21Case {
  double p, kappa, log_eps_inv, lhs;
};

constexpr Lemma21Case kLemma21[] = {
    {1, 0.1, 1, 0.392790515756496},   {1, 1, 1, 0.31911034079013},     {1, 1, 3, 0.125521636340569},
    {1, 10, 8, 0.0187136714196416},   {2, 0.1, 8, 0.000375058613981356}, {2, 1, 1, 0.279616404130548},
    {2, 10, 3, 0.0310396874618254},   {2, 10, 8, 0.0112225358345196},  {4, 0.1, 1, 0.436586508805337},
    {4, 1, 3, 0.0811333699851658},    {4, 1, 8, 0.0117778710172286},   {4, 10, 1, 0.028859070743587},
};

constexpr double kKappa09 = 0.0734903708484455;
constexpr double kIntF09 = 0.38338067465234993;

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("kappa schedule") {
    const BumpFunction f = make_normalized_bump(0.5, 1.0);
    const KappaSchedule k(f, 0.5);
    CHECK(k.at(0.5) == 0.0);
    CHECK(k.at(0.9) == doctest::Approx(kKappa09).epsilon(1e-10));
    CHECK(k.at(0.9) == doctest::Approx(0.5 * kIntF09 * kIntF09).epsilon(1e-10));
    CHECK(k.at(1.0) == doctest::Approx(4.0 * k.at(0.75)).epsilon(1e-10));
    CHECK_THROWS_AS(k.at(0.4), DomainError);
    double prev = 0.0;
    for (double t = 0.5; t <= 1.0; t += 0.01) {
      const double v = k.at(t);
      CHECK(v >= prev * (1.0 - 1e-13));
      prev = v;
    }
    const auto tab = k.tabulate(TimeGrid(1.0, 8));
    CHECK(tab[0] == 0.0);
    CHECK(tab[3] == 0.0);
    CHECK(tab[4] == 0.0);
    CHECK(tab[8] == doctest::Approx(k.at(1.0)).epsilon(1e-12));
    CHECK(kappa_t(f, 0.5, 0.75) == doctest::Approx(k.at(0.75)).epsilon(1e-15));
  }

  TEST_CASE("kappa schedule against a double integral") {
    const BumpFunction f = make_normalized_bump(0.5, 1.0);
    // Midpoint rule on the triangle tau <= u <= s <= t.
    const double t = 0.8;
    const int n = 2000;
    const double h = (t - 0.5) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = 0.5 + (i + 0.5) * h;
      double inner = 0.0;
      for (int j = 0; j < i; ++j) inner += f.value(0.5 + (j + 0.5) * h) * h;
      inner += 0.5 * f.value(s) * h;
      sum += f.value(s) * inner * h;
    }
    CHECK(kappa_t(f, 0.5, t) == doctest::Approx(sum).epsilon(1e-5));
  }

  TEST_CASE("lemma constant") {
    CHECK(lemma21_c(1.0, 1.0) == doctest::Approx(1.0 + std::sqrt(2.0 * std::numbers::pi) + 1.0 + 1.0).epsilon(1e-15));
    CHECK(lemma21_c(2.0, 4.0) ==
          doctest::Approx(2.0 / 4.0 + (2.0 * std::sqrt(2.0 * std::numbers::pi) + 1.0) * 4.0 + 1.0).epsilon(1e-15));
  }

  TEST_CASE("lemma lhs matches frozen quadrature") {
    for (const auto& c : kLemma21) {
      CAPTURE(c.p);
      CAPTURE(c.kappa);
      CAPTURE(c.log_eps_inv);
      const Lemma21Params prm{c.p, c.kappa, std::exp(-c.log_eps_inv)};
      CHECK(lemma21_lhs(prm) == doctest::Approx(c.lhs).epsilon(1e-9));
      CHECK(lemma21_lhs(prm) >= lemma21_rhs(prm));
    }
  }

  TEST_CASE("lemma lhs against Monte Carlo") {
    const Lemma21Params prm{2.0, 0.5, std::exp(-3.0)};
    Rng rng(2024);
    const std::size_t n = 10'000'000;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = std::abs(rng.normal());
      const double e = prm.kappa * std::pow(z, prm.p);
      const double v = prm.eps * std::exp(e - prm.eps * prm.eps * prm.kappa * std::exp(2.0 * e));
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(lemma21_lhs(prm) - mean) <= 4.0 * se);
  }

  TEST_CASE("lemma grid and argument checks") {
    const std::vector<double> p{1, 2, 4}, kappa{0.1, 1, 10};
    std::vector<double> eps;
    for (int i = 1; i <= 8; ++i) eps.push_back(std::exp(-i));
    const Report r = check_lemma21(p, kappa, eps);
    CHECK(r.passed());
    CHECK(r.grid_size == 72);
    CHECK(r.max_violation == 0.0);
    CHECK_THROWS_AS(lemma21_lhs({0.5, 1.0, 0.1}), InvalidArgument);
    CHECK_THROWS_AS(lemma21_lhs({1.0, 0.0, 0.1}), InvalidArgument);
    CHECK_THROWS_AS(lemma21_lhs({1.0, 1.0, 0.5}), InvalidArgument);
    CHECK(lemma21_rhs({1.0, 1.0, std::exp(-1.0)}) == doctest::Approx(std::exp(-lemma21_c(1.0, 1.0))).epsilon(1e-14));
  }

  TEST_CASE("variance identity") {
    const BumpFunction g = make_normalized_bump(0.0, 0.5);
    CHECK(stdnorm_variance(g, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
    const BumpFunction g2(0.0, 0.5, 2.0 * g.eta());
    CHECK(stdnorm_variance(g2, 0.5) == doctest::Approx(4.0).epsilon(1e-5));
    // Integration by parts: int g'(s) W(s) ds = -int g dW on the support.
    const BumpFunction h = make_normalized_bump(0.1, 0.3);
    CHECK(stdnorm_variance(h, 0.5) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("sandwich holds on simulated paths") {
    const AxisAlignedModel m = build_axis_aligned({});
    const KappaSchedule k(m.f(), 0.5);
    const TimeGrid grid(1.0, 2048);
    for (double eps : {0.0, 0.05}) {
      CAPTURE(eps);
      bool all = true;
      for (std::uint64_t i = 0; i < 100; ++i) {
        const auto x = solve_cascade(m, sample_brownian(grid, 1, 42, i), Vector{0, 0, 0, eps, 0});
        const Report r = sandwich_check(x, eps, k, m.n());
        all = all && r.passed();
      }
      CHECK(all);
    }
  }

  TEST_CASE("sandwich flags a corrupted path") {
    const AxisAlignedModel m = build_axis_aligned({});
    const KappaSchedule k(m.f(), 0.5);
    auto x = solve_cascade(m, sample_brownian(TimeGrid(1.0, 512), 1, 42, 0), Vector{0, 0, 0, 0.05, 0});
    x.at(400)[3] *= 10.0;
    CHECK_FALSE(sandwich_check(x, 0.05, k, m.n()).passed());
  }

  TEST_CASE("hoelder comparison") {
    CHECK(hoeldercomp_log_threshold(1.0, 1.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(hoeldercomp_threshold(2.0, 1.0, 0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
    const double K = hoeldercomp_K(1.0, 1.0, 1.0, 0.5);
    CHECK(K == doctest::Approx(std::exp(-0.25)).epsilon(1e-9));
    CHECK(hoeldercomp_K(1.0, 1.0, 1.0, 0.5, 100000) == doctest::Approx(K).epsilon(1e-9));
    const HoelderCompParams prm{1.0, 1.0, 1.0, 0.5, K};
    const Report r = check_hoeldercomp(prm, hoeldercomp_log_grid(prm));
    CHECK(r.passed());
    const HoelderCompParams loose{1.0, 1.0, 1.0, 0.5, 1.01 * K};
    CHECK_FALSE(check_hoeldercomp(loose, hoeldercomp_log_grid(loose)).passed());
    for (double c : {0.5, 2.0, 5.0})
      for (double beta : {0.2, 0.5, 0.8}) {
        const HoelderCompParams q{c, 0.5, 1.5, beta, hoeldercomp_K(c, 0.5, 1.5, beta)};
        CHECK(check_hoeldercomp(q, hoeldercomp_log_grid(q)).passed());
      }
    // K = exp(-4096) is below the double range; the logarithm carries it.
    const double lk = hoeldercomp_log_K(5.0, 1.0, 0.5, 0.8);
    CHECK(lk == doctest::Approx(-4096.0).epsilon(1e-9));
    CHECK(hoeldercomp_K(5.0, 1.0, 0.5, 0.8) == 0.0);
    HoelderCompParams tiny{5.0, 1.0, 0.5, 0.8};
    tiny.log_K = lk;
    CHECK(check_hoeldercomp(tiny, hoeldercomp_log_grid(tiny)).passed());
    tiny.log_K = lk + 1e-3;
    CHECK_FALSE(check_hoeldercomp(tiny, hoeldercomp_log_grid(tiny)).passed());
    CHECK_THROWS_AS((HoelderCompParams{1.0, 1.0, 1.0, 1.5, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((HoelderCompParams{1.0, 1.0, 1.0, 0.0, 1.0}.validate()), DomainError);
  }
}
