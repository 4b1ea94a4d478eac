#pragma once

// Deterministic evaluation of the analytic quantities behind the
// counterexample: the schedule kappa_t, the normal-functional lower bound,
// the variance identity for int g'(s) W(s) ds, the pathwise X4 envelope and
// the log-Hoelder versus Hoelder comparison constants.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sdelab/bump.hpp"
#include "sdelab/paths.hpp"
#include "sdelab/report.hpp"
#include "sdelab/solvers.hpp"

namespace sdelab {

/// kappa_t = int_tau^t int_tau^s f(u) f(s) du ds = (int_tau^t f)^2 / 2.
class KappaSchedule {
 public:
  KappaSchedule(BumpFunction f, double tau);

  const BumpFunction& f() const noexcept { return f_; }
  double tau() const noexcept { return tau_; }

  /// Throws DomainError for t < tau.
  double at(double t) const;
  /// kappa at every grid time (0 before tau).
  std::vector<double> tabulate(const TimeGrid& grid) const;

 private:
  BumpFunction f_;
  double tau_;
};

double kappa_t(const BumpFunction& f, double tau, double t);

// ---------------------------------------------------------------------------

struct Lemma21Params {
  double p = 1.0;
  double kappa = 1.0;
  double eps = 0.36787944117144233;  // 1/e

  /// Throws InvalidArgument unless p >= 1, kappa > 0 and 0 < eps <= 1/e.
  void validate() const;
};

/// c = p kappa^(-2/p) + (sqrt(2 pi) p + 1) kappa + 1.
double lemma21_c(double p, double kappa);

/// E[eps exp(kappa |Z|^p - eps^2 kappa exp(2 kappa |Z|^p))], Z standard
/// normal, by adaptive quadrature of a log-space integrand.
double lemma21_lhs(const Lemma21Params& prm);

/// exp(-c |ln eps|^(2/p)).
double lemma21_rhs(const Lemma21Params& prm);

/// Asserts lhs >= rhs at one parameter point.
Report check_lemma21(const Lemma21Params& prm);
/// Same over the product grid p x kappa x eps.
Report check_lemma21(std::span<const double> p, std::span<const double> kappa,
                     std::span<const double> eps);

// ---------------------------------------------------------------------------

/// Var[int_0^tau g'(s) W(s) ds] = int int g'(s) g'(u) min(s, u) du ds by
/// nested quadrature; equals int g^2 when g is supported in [0, tau].
double stdnorm_variance(const BumpFunction& g, double tau);

// ---------------------------------------------------------------------------

/// Checks, at every grid time t >= tau,
///   eps exp(k Z^n - eps^2 k exp(2 k Z^n)) <= X4(t) <= eps exp(k Z^n),
/// k = kappa_t, Z = X3(tau), up to relative slack.
Report sandwich_check(const SolutionPath& path, double eps, const KappaSchedule& schedule, int n,
                      double slack = 1e-3);

// ---------------------------------------------------------------------------

struct HoelderCompParams {
  double c = 1.0;
  double R = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double K = 1.0;
  /// ln K; when set it takes precedence over K (K itself may underflow).
  double log_K = std::numeric_limits<double>::quiet_NaN();

  double effective_log_K() const noexcept { return std::isnan(log_K) ? std::log(K) : log_K; }
  /// Throws DomainError for beta outside (0, 1), InvalidArgument otherwise.
  void validate() const;
};

/// ln r* = -(c / alpha)^(1 / (1 - beta)).  r* itself often underflows, so
/// most callers want the logarithm.
double hoeldercomp_log_threshold(double c, double alpha, double beta);
double hoeldercomp_threshold(double c, double alpha, double beta);

/// K = min(1, min over r in [r*, R] of exp(-c |ln r|^beta) / r^alpha), from a
/// log-spaced grid refined by golden-section search.
double hoeldercomp_K(double c, double R, double alpha, double beta, std::size_t grid_points = 10000);
/// ln K; finite even where K underflows.
double hoeldercomp_log_K(double c, double R, double alpha, double beta, std::size_t grid_points = 10000);

/// Checks exp(-c |ln r|^beta) >= K r^alpha for every ln r in `log_r` with
/// r <= R, and exp(-c |ln r|^beta) >= r^alpha wherever r <= r*.
Report check_hoeldercomp(const HoelderCompParams& prm, std::span<const double> log_r);

/// `count` log-spaced values of ln r covering (0, R] with the threshold well
/// inside: from min(ln r*, ln R) - 20 up to ln R.
std::vector<double> hoeldercomp_log_grid(const HoelderCompParams& prm, std::size_t count = 10000);

}  // namespace sdelab
