#include "sdelab/bump.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sdelab/errors.hpp"
#include "sdelab/quadrature.hpp"

namespace sdelab {

namespace {

// Inside this distance of an endpoint the bump is reported as exactly zero.
constexpr double kEndpointClamp = 1e-12;

// Largest finite argument of exp() that still produces a normal double.
constexpr double kExpFloor = -745.0;

void require_interval(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
    throw InvalidArgument("bump support requires finite a < b");
}

}  // namespace

BumpFunction::BumpFunction(double a, double b, double eta) : a_(a), b_(b), eta_(eta) {
  require_interval(a, b);
  if (!std::isfinite(eta) || !(eta > 0.0)) throw InvalidArgument("bump amplitude must be positive");
}

std::array<double, 3> BumpFunction::eval_all(double t) const noexcept {
  if (!(t > a_ + kEndpointClamp && t < b_ - kEndpointClamp)) return {0.0, 0.0, 0.0};
  // h = exp(phi), phi = -1/p with p = (t - a)(b - t).
  const double p = (t - a_) * (b_ - t);
  const double phi = -1.0 / p;
  if (phi < kExpFloor) return {0.0, 0.0, 0.0};
  const double dp = a_ + b_ - 2.0 * t;
  const double p2 = p * p;
  const double dphi = dp / p2;
  const double d2phi = -2.0 / p2 - 2.0 * dp * dp / (p2 * p);
  const double h = eta_ * std::exp(phi);
  return {h, h * dphi, h * (dphi * dphi + d2phi)};
}

double BumpFunction::eval(double t, int order) const {
  if (order < 0 || order > 2) throw InvalidArgument("bump derivative order must be 0, 1 or 2");
  return eval_all(t)[static_cast<std::size_t>(order)];
}

BumpFunction BumpFunction::scaled(double factor) const { return BumpFunction(a_, b_, eta_ * factor); }

BumpFunction make_normalized_bump(double a, double b) {
  require_interval(a, b);
  const BumpFunction unit(a, b, 1.0);
  const auto r = quad::adaptive_simpson([&](double t) { return std::pow(unit.value(t), 2); }, a, b,
                                        {.abs = 0.0, .rel = 1e-12});
  if (!(r.value > 0.0) || !std::isfinite(r.value))
    throw ToleranceError("bump normalization integral is not positive");
  return BumpFunction(a, b, 1.0 / std::sqrt(r.value));
}

namespace {

// Grid supremum of `term` over the union of the supports, refined by doubling.
double refined_sup(double lo, double hi, const std::function<double(double)>& term) {
  struct Peak {
    double value, at, step;
  };
  auto sweep = [&](std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    Peak best{term(lo), lo, h};
    for (std::size_t i = 1; i < n; ++i) {
      const double t = lo + h * static_cast<double>(i);
      const double v = term(t);
      if (v > best.value) best = {v, t, h};
    }
    return best;
  };
  std::size_t points = 10000;
  Peak current = sweep(points);
  for (int round = 0; round < 12; ++round) {
    points = 2 * points - 1;
    const Peak next = sweep(points);
    const double change = std::abs(next.value - current.value) / std::max(next.value, 1e-300);
    current = next;
    if (change < 1e-6) break;
  }
  // Golden-section search on the cells next to the grid maximum.
  double a = std::max(lo, current.at - current.step), b = std::min(hi, current.at + current.step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = term(x1), f2 = term(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = term(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = term(x2);
    }
  }
  return std::max({current.value, f1, f2});
}

}  // namespace

double sup_bounds(const BumpFunction& f, const BumpFunction& g) {
  const double lo = std::min(f.a(), g.a());
  const double hi = std::max(f.b(), g.b());
  const double s = refined_sup(lo, hi, [&](double t) {
    const auto fv = f.eval_all(t);
    const auto gv = g.eval_all(t);
    return std::max({std::abs(fv[0]), std::abs(fv[1]), std::abs(gv[1]), std::abs(gv[2])});
  });
  return std::max(1.0, s);
}

double sup_f_gprime(const BumpFunction& f, const BumpFunction& g) {
  const double lo = std::min(f.a(), g.a());
  const double hi = std::max(f.b(), g.b());
  return refined_sup(lo, hi, [&](double t) {
    return std::max(std::abs(f.value(t)), std::abs(g.deriv1(t)));
  });
}

}  // namespace sdelab
