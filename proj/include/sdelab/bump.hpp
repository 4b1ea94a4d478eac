#pragma once

#include <array>

namespace sdelab {

/// Smooth nonnegative bump eta * exp(-1 / ((t - a)(b - t))) supported on (a, b).
///
/// The value and its first two derivatives are available in closed form and
/// vanish identically outside the open support.  Instances are immutable.
class BumpFunction {
 public:
  /// Bump on (a, b) with amplitude `eta`.  Throws InvalidArgument unless
  /// b > a and eta > 0 (both finite).
  BumpFunction(double a, double b, double eta);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double eta() const noexcept { return eta_; }

  /// Value (order 0) or derivative (order 1, 2) at t; exactly 0 off (a, b).
  /// Throws InvalidArgument for any other order.
  double eval(double t, int order = 0) const;

  double value(double t) const noexcept { return eval_all(t)[0]; }
  double deriv1(double t) const noexcept { return eval_all(t)[1]; }
  double deriv2(double t) const noexcept { return eval_all(t)[2]; }

  /// Value, first and second derivative at t in one pass.
  std::array<double, 3> eval_all(double t) const noexcept;

  /// Copy of this bump with the amplitude multiplied by `factor`.
  BumpFunction scaled(double factor) const;

 private:
  double a_;
  double b_;
  double eta_;
};

/// Bump on (a, b) scaled so that the integral of its square over (a, b) is 1.
/// Throws InvalidArgument for b <= a and ToleranceError if the normalizing
/// quadrature does not converge.
BumpFunction make_normalized_bump(double a, double b);

/// C = sup over t of max{1, |f|, |f'|, |g'|, |g''|}, from a uniform grid that
/// is doubled until the estimate changes by less than 1e-6 relative.
double sup_bounds(const BumpFunction& f, const BumpFunction& g);

/// sup over t of max{|f|, |g'|}; the constant in the Lyapunov estimate.
double sup_f_gprime(const BumpFunction& f, const BumpFunction& g);

}  // namespace sdelab
