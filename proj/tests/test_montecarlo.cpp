#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdelab/bounds.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/montecarlo.hpp"

using namespace sdelab;

namespace {

const GeneralModel& default_general() {
  static const GeneralModel g = build_general(build_axis_aligned({}));
  return g;
}

Vector e4_times(double eps) { return {0, 0, 0, eps, 0}; }

}  // namespace

TEST_SUITE("montecarlo") {
  TEST_CASE("coincident initial values give zero distance") {
    const auto r = estimate_distance(default_general(), e4_times(0.1), e4_times(0.1), 0.9, 64, 42);
    CHECK(r.mean == 0.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.aborted == 0);
    CHECK(r.samples.size() == 64);
  }

  TEST_CASE("distance dominates the normal-functional bound") {
    const auto& g = default_general();
    const double eps = 0.05;
    const auto r = estimate_distance(g, Vector(5, 0.0), e4_times(eps), 0.9, 4000, 42);
    const double kappa = kappa_t(g.base().f(), 0.5, 0.9);
    const double lhs = lemma21_lhs({4.0, kappa, eps});
    CHECK(r.mean >= lhs - 4.0 * r.std_error);
    CHECK(r.mean >= eps * 0.5);
  }

  TEST_CASE("results do not depend on the thread count") {
    MonteCarloOptions one, four;
    four.threads = 4;
    one.chunk = four.chunk = 64;
    const auto a = estimate_distance(default_general(), Vector(5, 0.0), e4_times(0.2), 0.9, 300, 7, one);
    const auto b = estimate_distance(default_general(), Vector(5, 0.0), e4_times(0.2), 0.9, 300, 7, four);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.samples == b.samples);
  }

  TEST_CASE("schemes agree on average") {
    MonteCarloOptions em;
    em.scheme = Scheme::EulerMaruyama;
    em.taming = false;
    em.dt = 1.0 / 4096;
    MonteCarloOptions cascade = em;
    cascade.scheme = Scheme::Cascade;
    const auto a = estimate_distance(default_general(), Vector(5, 0.0), e4_times(0.2), 0.9, 100, 3, em);
    const auto b = estimate_distance(default_general(), Vector(5, 0.0), e4_times(0.2), 0.9, 100, 3, cascade);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-2));
  }

  TEST_CASE("argument checks") {
    const auto& g = default_general();
    CHECK_THROWS_AS(estimate_distance(g, Vector(5, 0.0), e4_times(0.1), 0.0, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(estimate_distance(g, Vector(5, 0.0), e4_times(0.1), 1.5, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(estimate_distance(g, Vector(5, 0.0), e4_times(0.1), 0.9, 1, 1), InvalidArgument);
    const std::vector<double> increasing{0.01, 0.1};
    CHECK_THROWS_AS(sweep_epsilon(g, 0.9, increasing, 10, 1), InvalidArgument);
    const std::vector<double> too_big{0.5, 0.1};
    CHECK_THROWS_AS(sweep_epsilon(g, 0.9, too_big, 10, 1), InvalidArgument);
    const std::vector<double> fine{0.3, 0.1};
    CHECK_THROWS_AS(sweep_epsilon(g, 0.4, fine, 10, 1), InvalidArgument);
  }

  TEST_CASE("slopes and exponent fits") {
    std::vector<double> eps, mean;
    for (int i = 1; i <= 6; ++i) {
      eps.push_back(std::exp(-i));
      mean.push_back(3.0 * std::pow(eps.back(), 0.7));
    }
    for (double s : local_slopes(eps, mean)) CHECK(s == doctest::Approx(0.7).epsilon(1e-12));
    const auto fits = fit_exponent(eps, mean, 3);
    CHECK(fits.size() == 4);
    for (double s : fits) CHECK(s == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit_exponent(eps, mean, 6).size() == 1);
    CHECK_THROWS_AS(fit_exponent(eps, mean, 1), InvalidArgument);
    mean[2] = 0.0;
    CHECK_THROWS_AS(fit_exponent(eps, mean, 3), InvalidArgument);
  }

  TEST_CASE("small sweep output") {
    const std::vector<double> grid{std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)};
    const auto r = sweep_epsilon(default_general(), 0.9, grid, 200, 42);
    CHECK(r.estimates.size() == 3);
    CHECK(r.local_slopes.size() == 2);
    CHECK(local_slope_errors(r).size() == 2);
    CHECK(r.constants.K == 1.0);
    CHECK(r.constants.kappa_t == doctest::Approx(0.0734903708484455).epsilon(1e-9));
    CHECK(r.constants.c == doctest::Approx(16.56553136996883).epsilon(1e-9));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.upper_bound_curve[i] == doctest::Approx(1.0 / (i + 1.0)).epsilon(1e-14));
      CHECK(r.lower_bound_curve[i] <= r.estimates[i].mean);
    }
    std::ostringstream os;
    write_sweep_csv(os, r);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "eps,mean,stderr,aborted,lower_bound,upper_bound,local_slope");
    std::getline(is, line);
    CHECK(line.back() == ',');
    const auto js = sweep_summary(r);
    CHECK(js.contains("local_slopes"));
    CHECK(js.contains("local_slope_errors"));
    CHECK(js["regime"] == "non-hoelder");
    CHECK(js["constants"]["kappa"] == "inf");
    CHECK(js["constants"]["log_kappa"].get<double>() > 1000.0);
  }

  TEST_CASE("kolmogorov-smirnov distance") {
    std::vector<double> zeros(10, 0.0);
    CHECK(ks_distance_normal(zeros) == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<double> sample{1.0, -1.0, 0.0};
    const double d = ks_distance_normal(sample);
    CHECK(std::is_sorted(sample.begin(), sample.end()));
    CHECK(d > 0.0);
    CHECK(d < 0.5);
  }

  TEST_CASE("X3 at tau is standard normal") {
    const auto r = stdnormality_test(build_axis_aligned({}), 4000, 42);
    CHECK(r.passed());
    CHECK(r.params.contains("ks"));
  }
}
