#include "sdelab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdelab/errors.hpp"
#include "sdelab/quadrature.hpp"

namespace sdelab {

namespace {

constexpr double kLogMaxDouble = 709.0;

double integral_of(const BumpFunction& f, double lo, double hi) {
  lo = std::max(lo, f.a());
  hi = std::min(hi, f.b());
  if (!(hi > lo)) return 0.0;
  return quad::adaptive_simpson([&](double s) { return f.value(s); }, lo, hi, {1e-16, 1e-13}).value;
}

// Allowance for rounding when both sides of an inequality agree exactly.
double rounding_allowance(double a, double b) { return 1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

KappaSchedule::KappaSchedule(BumpFunction f, double tau) : f_(f), tau_(tau) {
  if (!std::isfinite(tau)) throw InvalidArgument("kappa schedule: tau must be finite");
}

double KappaSchedule::at(double t) const { return kappa_t(f_, tau_, t); }

std::vector<double> KappaSchedule::tabulate(const TimeGrid& grid) const {
  std::vector<double> out(grid.steps() + 1, 0.0);
  double acc = 0.0;
  double prev = tau_;
  for (std::size_t k = 0; k <= grid.steps(); ++k) {
    const double t = grid.time(k);
    if (t <= tau_) continue;
    acc += integral_of(f_, prev, t);
    prev = t;
    out[k] = 0.5 * acc * acc;
  }
  return out;
}

double kappa_t(const BumpFunction& f, double tau, double t) {
  if (!(t >= tau)) throw DomainError("kappa_t: t must not precede tau");
  const double F = integral_of(f, tau, t);
  return 0.5 * F * F;
}

// ---------------------------------------------------------------------------

void Lemma21Params::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("normal functional: p must be >= 1");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("normal functional: kappa must be > 0");
  const double e_inv = std::exp(-1.0);
  if (!(eps > 0.0) || eps > e_inv * (1.0 + 1e-14))
    throw InvalidArgument("normal functional: eps must lie in (0, 1/e]");
}

double lemma21_c(double p, double kappa) {
  const double root_2pi = std::sqrt(2.0 * std::numbers::pi);
  return p * std::pow(kappa, -2.0 / p) + (root_2pi * p + 1.0) * kappa + 1.0;
}

double lemma21_lhs(const Lemma21Params& prm) {
  prm.validate();
  const double p = prm.p, kappa = prm.kappa, eps = prm.eps;
  const double log_eps = std::log(eps);
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi);

  auto integrand = [&](double z) {
    const double zp = std::pow(z, p);
    const double doubled = 2.0 * kappa * zp;
    if (doubled > kLogMaxDouble) return 0.0;
    const double damping = eps * eps * kappa * std::exp(doubled);
    const double log_val = log_norm - 0.5 * z * z + log_eps + kappa * zp - damping;
    return std::exp(log_val);
  };

  // Density below 1e-300 beyond z_max.
  const double z_max = std::sqrt(2.0 * (300.0 * std::numbers::ln10 + log_norm));
  // Where the damping term reaches one the integrand turns over sharply.
  std::vector<double> breaks{12.0};
  const double log_arg = -std::log(eps * eps * kappa);
  if (log_arg > 0.0) {
    const double z_turn = std::pow(log_arg / (2.0 * kappa), 1.0 / p);
    for (double s : {0.5, 0.9, 1.0, 1.1, 1.5}) breaks.push_back(s * z_turn);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const auto res = quad::gauss_kronrod(integrand, 0.0, z_max, {0.0, 1e-11}, breaks, 200000);
  return 2.0 * res.value;
}

double lemma21_rhs(const Lemma21Params& prm) {
  prm.validate();
  const double c = lemma21_c(prm.p, prm.kappa);
  return std::exp(-c * std::pow(std::abs(std::log(prm.eps)), 2.0 / prm.p));
}

namespace {

void add_lemma21_point(Report& report, const Lemma21Params& prm) {
  const double lhs = lemma21_lhs(prm);
  const double rhs = lemma21_rhs(prm);
  report.record((rhs - lhs) / rhs,
                {{"p", prm.p}, {"kappa", prm.kappa}, {"eps", prm.eps}, {"lhs", lhs}, {"rhs", rhs}});
}

}  // namespace

Report check_lemma21(const Lemma21Params& prm) {
  Report report;
  report.check = "lemma21";
  report.params = {{"p", prm.p}, {"kappa", prm.kappa}, {"eps", prm.eps}, {"c", lemma21_c(prm.p, prm.kappa)}};
  add_lemma21_point(report, prm);
  return report;
}

Report check_lemma21(std::span<const double> p, std::span<const double> kappa,
                     std::span<const double> eps) {
  Report report;
  report.check = "lemma21";
  report.params = {{"p", std::vector<double>(p.begin(), p.end())},
                   {"kappa", std::vector<double>(kappa.begin(), kappa.end())},
                   {"eps", std::vector<double>(eps.begin(), eps.end())}};
  for (double pp : p)
    for (double kk : kappa)
      for (double ee : eps) add_lemma21_point(report, {pp, kk, ee});
  return report;
}

// ---------------------------------------------------------------------------

double stdnorm_variance(const BumpFunction& g, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("stdnorm_variance: tau must be positive");
  const double lo = std::max(0.0, g.a());
  const double hi = std::min(tau, g.b());
  if (!(hi > lo)) return 0.0;
  // 2 int_lo^hi g'(s) int_lo^s u g'(u) du ds
  auto inner = [&](double s) {
    if (!(s > lo)) return 0.0;
    return quad::gauss_kronrod([&](double u) { return u * g.deriv1(u); }, lo, s, {0.0, 1e-12}).value;
  };
  const auto outer = quad::gauss_kronrod([&](double s) { return g.deriv1(s) * inner(s); }, lo, hi,
                                         {0.0, 1e-11});
  return 2.0 * outer.value;
}

// ---------------------------------------------------------------------------

Report sandwich_check(const SolutionPath& path, double eps, const KappaSchedule& schedule, int n,
                      double slack) {
  if (path.dim < 5) throw InvalidArgument("sandwich_check: path must carry five coordinates");
  if (!(eps >= 0.0)) throw InvalidArgument("sandwich_check: eps must be nonnegative");
  Report report;
  report.check = "sandwich";
  report.params = {{"eps", eps}, {"n", n}, {"tau", schedule.tau()}, {"slack", slack}};

  const TimeGrid& grid = path.grid;
  const std::size_t k_tau = grid.index_of(schedule.tau());
  const double z_pow = std::pow(path.component(k_tau, 2), n);
  const std::vector<double> kappa = schedule.tabulate(grid);

  for (std::size_t k = k_tau; k <= grid.steps(); ++k) {
    const double x4 = path.component(k, 3);
    const double growth = kappa[k] * z_pow;
    double upper = 0.0, lower = 0.0;
    if (eps > 0.0) {
      upper = eps * std::exp(growth);
      const double doubled = 2.0 * growth;
      if (doubled < kLogMaxDouble) lower = eps * std::exp(growth - eps * eps * kappa[k] * std::exp(doubled));
    }
    const double tiny = std::numeric_limits<double>::min();
    const double above = (x4 - upper - slack * std::abs(upper)) / std::max(std::abs(upper), tiny);
    const double below = (lower - x4 - slack * std::abs(lower)) / std::max(std::abs(lower), tiny);
    report.record(std::max(above, below),
                  {{"t", grid.time(k)}, {"x4", x4}, {"lower", lower}, {"upper", upper}});
  }
  return report;
}

// ---------------------------------------------------------------------------

void HoelderCompParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("hoeldercomp: beta must lie in (0, 1)");
  if (!(c > 0.0) || !(R > 0.0) || !(alpha > 0.0) || !std::isfinite(c) || !std::isfinite(R) ||
      !std::isfinite(alpha))
    throw InvalidArgument("hoeldercomp: c, R and alpha must be positive and finite");
  const double lk = effective_log_K();
  if (!(lk <= 0.0) || !std::isfinite(lk)) throw InvalidArgument("hoeldercomp: K must lie in (0, 1]");
}

double hoeldercomp_log_threshold(double c, double alpha, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("hoeldercomp: beta must lie in (0, 1)");
  if (!(c > 0.0) || !(alpha > 0.0)) throw InvalidArgument("hoeldercomp: c and alpha must be positive");
  return -std::pow(c / alpha, 1.0 / (1.0 - beta));
}

double hoeldercomp_threshold(double c, double alpha, double beta) {
  return std::exp(hoeldercomp_log_threshold(c, alpha, beta));
}

namespace {

// ln(exp(-c |u|^beta) / e^(alpha u)) with u = ln r.
double log_ratio(double u, double c, double alpha, double beta) {
  return -c * std::pow(std::abs(u), beta) - alpha * u;
}

}  // namespace

double hoeldercomp_K(double c, double R, double alpha, double beta, std::size_t grid_points) {
  return std::exp(hoeldercomp_log_K(c, R, alpha, beta, grid_points));
}

double hoeldercomp_log_K(double c, double R, double alpha, double beta, std::size_t grid_points) {
  HoelderCompParams{c, R, alpha, beta, 1.0}.validate();
  if (grid_points < 3) throw InvalidArgument("hoeldercomp_K: need at least three grid points");
  const double lo = hoeldercomp_log_threshold(c, alpha, beta);
  const double hi = std::log(R);
  if (hi < lo) return 0.0;
  if (hi == lo) return std::min(0.0, log_ratio(lo, c, alpha, beta));

  auto obj = [&](double u) { return log_ratio(u, c, alpha, beta); };
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  std::size_t best = 0;
  double best_val = obj(lo);
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double u = i + 1 == grid_points ? hi : lo + step * static_cast<double>(i);
    const double val = obj(u);
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }

  // Golden-section search on the bracketing cells.
  double a = best == 0 ? lo : lo + step * static_cast<double>(best - 1);
  double b = best + 1 >= grid_points ? hi : lo + step * static_cast<double>(best + 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = obj(x1), f2 = obj(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = obj(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = obj(x2);
    }
  }
  best_val = std::min({best_val, f1, f2});
  return std::min(0.0, best_val);
}

Report check_hoeldercomp(const HoelderCompParams& prm, std::span<const double> log_r) {
  prm.validate();
  Report report;
  report.check = "hoeldercomp";
  const double log_star = hoeldercomp_log_threshold(prm.c, prm.alpha, prm.beta);
  report.params = {{"c", prm.c},         {"R", prm.R},       {"alpha", prm.alpha},
                   {"beta", prm.beta},   {"log_K", prm.effective_log_K()}, {"log_threshold", log_star}};
  const double log_R = std::log(prm.R);
  const double log_K = prm.effective_log_K();
  for (double u : log_r) {
    if (u > log_R) continue;
    const double lhs = -prm.c * std::pow(std::abs(u), prm.beta);
    double excess = (log_K + prm.alpha * u) - lhs - rounding_allowance(lhs, log_K + prm.alpha * u);
    if (u <= log_star) {
      const double plain = prm.alpha * u;
      excess = std::max(excess, plain - lhs - rounding_allowance(lhs, plain));
    }
    report.record(excess, {{"log_r", u}, {"log_lhs", lhs}});
  }
  return report;
}

std::vector<double> hoeldercomp_log_grid(const HoelderCompParams& prm, std::size_t count) {
  prm.validate();
  if (count < 2) throw InvalidArgument("hoeldercomp_log_grid: need at least two points");
  const double hi = std::log(prm.R);
  const double lo = std::min(hoeldercomp_log_threshold(prm.c, prm.alpha, prm.beta), hi) - 20.0;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace sdelab
