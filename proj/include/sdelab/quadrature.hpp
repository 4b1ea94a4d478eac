#pragma once

// One-dimensional adaptive quadrature used throughout the library.
//
// Both integrators take an absolute and a relative tolerance; a panel is
// accepted once its error estimate is below max(abs_tol, rel_tol * |I|)
// scaled to the panel's share of the interval.  Integrands in this project
// are often tiny in absolute terms (unnormalized bumps peak near 1e-7), so the
// relative tolerance is the one that normally bites.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "sdelab/errors.hpp"

namespace sdelab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

struct Tolerance {
  double abs = 0.0;
  double rel = 1e-12;
};

namespace detail {

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
  int depth;
};

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (positive half, centre last).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct KronrodPanel {
  double a, b, value, error;
  bool operator<(const KronrodPanel& o) const { return error < o.error; }
};

template <class F>
KronrodPanel kronrod15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Adaptive Simpson rule.  The interval is first split into `initial_panels`
/// equal pieces so that integrands concentrated in a small part of [a, b]
/// are not mistaken for zero by the first coarse estimate.
template <class F>
Result adaptive_simpson(F&& f, double a, double b, Tolerance tol = {},
                        int max_depth = 48, int initial_panels = 64) {
  Result out;
  if (!(b > a)) return out;
  const int panels = std::max(initial_panels, 1);
  const double width = (b - a) / panels;
  std::vector<detail::SimpsonPanel> stack;
  stack.reserve(2 * static_cast<std::size_t>(panels) + 2 * static_cast<std::size_t>(max_depth));
  std::vector<double> nodes(2 * static_cast<std::size_t>(panels) + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = f(a + 0.5 * width * static_cast<double>(i));
  out.evaluations = nodes.size();

  double coarse = 0.0;
  for (int p = panels - 1; p >= 0; --p) {
    const double pa = a + width * p;
    const double pb = (p + 1 == panels) ? b : a + width * (p + 1);
    const auto i = static_cast<std::size_t>(2 * p);
    const double s = detail::simpson(pa, pb, nodes[i], nodes[i + 1], nodes[i + 2]);
    coarse += s;
    stack.push_back({pa, pb, nodes[i], nodes[i + 1], nodes[i + 2], s, 0});
  }
  const double target = std::max(tol.abs, tol.rel * std::abs(coarse));

  double sum = 0.0;
  double err = 0.0;
  while (!stack.empty()) {
    const detail::SimpsonPanel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double flm = f(0.5 * (p.a + m));
    const double frm = f(0.5 * (m + p.b));
    out.evaluations += 2;
    const double left = detail::simpson(p.a, m, p.fa, flm, p.fm);
    const double right = detail::simpson(m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    const double budget = target * (p.b - p.a) / (b - a);
    if (std::abs(delta) <= 15.0 * budget || (p.b - p.a) < 1e-15 * (b - a)) {
      sum += left + right + delta / 15.0;
      err += std::abs(delta) / 15.0;
      continue;
    }
    if (p.depth + 1 > max_depth) throw ToleranceError("adaptive Simpson: maximum depth exceeded");
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, p.depth + 1});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, p.depth + 1});
  }
  out.value = sum;
  out.error = err;
  return out;
}

/// Globally adaptive Gauss-Kronrod (G7/K15) quadrature.  The panel with the
/// largest error estimate is bisected until the summed estimate meets the
/// tolerance.  `breakpoints` (sorted, strictly inside (a, b)) seed the
/// initial partition, which matters for sharply peaked integrands.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, Tolerance tol = {},
                     std::span<const double> breakpoints = {}, std::size_t max_panels = 20000) {
  Result out;
  if (!(b > a)) return out;
  std::vector<double> edges{a};
  for (double p : breakpoints)
    if (p > edges.back() && p < b) edges.push_back(p);
  edges.push_back(b);

  std::priority_queue<detail::KronrodPanel> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto panel = detail::kronrod15(f, edges[i], edges[i + 1]);
    out.evaluations += 15;
    value += panel.value;
    error += panel.error;
    heap.push(panel);
  }
  while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (heap.size() >= max_panels) throw ToleranceError("Gauss-Kronrod: panel budget exhausted");
    const auto worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      // Interval cannot be split further in floating point; accept it.
      heap.push({worst.a, worst.b, worst.value, 0.0});
      error -= worst.error;
      continue;
    }
    const auto left = detail::kronrod15(f, worst.a, m);
    const auto right = detail::kronrod15(f, m, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum from the panels so the running updates do not leave round-off behind.
  double total = 0.0;
  double total_err = 0.0;
  std::vector<detail::KronrodPanel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& p : panels) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error = total_err;
  return out;
}

}  // namespace sdelab::quad
