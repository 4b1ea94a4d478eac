#pragma once

// The counterexample drift and its Lyapunov data.
//
// The core is a drift on R^5,
//   nu(x) = (1, 0, g'(x1) x2, f(x1) x4 x5, f(x1) (x3^n - x4^2)),
// driven by additive noise in the second coordinate.  It is embedded into
// R^d (coordinates 6..d are frozen) and then moved to an arbitrary base point
// v and perturbation direction delta by the affine map x -> B y + v with
// B = |delta| A, A orthogonal and A e4 = delta / |delta|.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdelab/bump.hpp"
#include "sdelab/linalg.hpp"

namespace sdelab {

using Vec5 = std::array<double, 5>;
using Mat5 = std::array<std::array<double, 5>, 5>;

struct ModelParams {
  int n = 4;           ///< power of x3 in the fifth drift component
  double tau = 0.5;    ///< end of the support of g, start of the support of f
  double T = 1.0;      ///< time horizon
  std::size_t d = 5;   ///< state dimension
  std::size_t m = 1;   ///< noise dimension
  double p = 1.0;      ///< Lyapunov exponent on the (x1, x4, x5) block
  double q = 8.0;      ///< Lyapunov exponent on x2, x3
  Vector v;            ///< base point (empty means origin)
  Vector delta;        ///< perturbation direction (empty means e4)

  /// Throws InvalidArgument when an invariant fails; fills defaulted v, delta.
  void validate();
};

/// Exponents of the Lyapunov function
/// V(x) = (1 + x1^2 + x4^2 + x5^2)^p + |x2|^q + |x3|^q + 1.
/// With p = 1 and q = 2n this is exactly U.
struct LyapunovExponents {
  double p = 1.0;
  double q = 8.0;
};

/// The five-dimensional drift with bumps f on (tau, T) and g on (0, tau).
class AxisAlignedModel {
 public:
  explicit AxisAlignedModel(ModelParams params);

  const ModelParams& params() const noexcept { return params_; }
  int n() const noexcept { return params_.n; }
  const BumpFunction& f() const noexcept { return f_; }
  const BumpFunction& g() const noexcept { return g_; }

  /// sup max{1, |f|, |f'|, |g'|, |g''|}.
  double C() const noexcept { return C_; }
  /// 2 + 8 (n + 1) C.
  double kappa5() const noexcept { return kappa5_; }
  /// Growth/Lyapunov constant carried into the general model (equals kappa5).
  double varkappa() const noexcept { return kappa5_; }
  /// sup max{|f|, |g'|}, the constant in the Lyapunov estimate for nu.
  double sup_f_gprime() const noexcept { return sup_fg_; }
  /// 2p + (2p + q) sup max{|f|, |g'|}.
  double lyapunov_constant(LyapunovExponents e) const noexcept;
  /// Noise direction (0, 1, 0, 0, 0).
  static constexpr Vec5 rho() noexcept { return {0.0, 1.0, 0.0, 0.0, 0.0}; }

  Vec5 nu(const Vec5& x) const noexcept;
  Mat5 nu_jacobian(const Vec5& x) const noexcept;

  /// U(x) = 1 + x1^2 + x4^2 + x5^2 + x2^(2n) + x3^(2n) + 1.
  double U(const Vec5& x) const noexcept;
  Vec5 U_grad(const Vec5& x) const noexcept;
  /// V(x) = (1 + x1^2 + x4^2 + x5^2)^p + |x2|^q + |x3|^q + 1.
  double V(const Vec5& x, LyapunovExponents e) const noexcept;
  Vec5 V_grad(const Vec5& x, LyapunovExponents e) const noexcept;

  // Embedding into R^d: acts as nu on the first five coordinates, zero elsewhere.
  std::size_t dim() const noexcept { return params_.d; }
  void embedded_drift(std::span<const double> x, std::span<double> out) const;
  Matrix embedded_jacobian(std::span<const double> x) const;
  /// U(x1..x5) + sum_{i>5} x_i^2 + 1.
  double embedded_V(std::span<const double> x) const;
  Vector embedded_V_grad(std::span<const double> x) const;
  /// (0, 1, 0, ..., 0) in R^d.
  Vector sigma0() const;

 private:
  ModelParams params_;
  BumpFunction f_;
  BumpFunction g_;
  double C_;
  double kappa5_;
  double sup_fg_;
};

/// Bundled view of the embedded model as callables (drift, V, noise vector).
struct EmbeddedModel {
  const AxisAlignedModel* base;
  Vector drift(std::span<const double> x) const;
  double V(std::span<const double> x) const { return base->embedded_V(x); }
  Vector sigma0() const { return base->sigma0(); }
};

EmbeddedModel embed_to_dim(const AxisAlignedModel& model);

/// The embedded model moved to base point v and direction delta.
class GeneralModel {
 public:
  /// Throws InvalidArgument if delta is zero.
  explicit GeneralModel(AxisAlignedModel base);

  const AxisAlignedModel& base() const noexcept { return base_; }
  std::size_t dim() const noexcept { return base_.dim(); }
  std::size_t noise_dim() const noexcept { return base_.params().m; }
  const Vector& v() const noexcept { return base_.params().v; }
  const Vector& delta() const noexcept { return base_.params().delta; }
  double delta_norm() const noexcept { return delta_norm_; }

  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& Binv() const noexcept { return Binv_; }
  /// d x m noise matrix; first column B sigma0, remaining columns zero.
  const Matrix& sigma() const noexcept { return sigma_; }

  /// 2 varkappa (1 + |delta|^-1 2^varkappa max{1, |v|^varkappa}); usually
  /// overflows a double, so the logarithm is what verification uses.
  double kappa() const noexcept { return kappa_; }
  double log_kappa() const noexcept { return log_kappa_; }

  /// B^-1 (x - v).
  Vector to_base(std::span<const double> x) const;
  /// B y + v.
  Vector from_base(std::span<const double> y) const;

  void drift(std::span<const double> x, std::span<double> out) const;
  Vector drift(std::span<const double> x) const;
  Matrix jacobian(std::span<const double> x) const;
  /// |delta| Vemb(B^-1 (x - v)) + |v|.
  double V(std::span<const double> x) const;
  Vector V_grad(std::span<const double> x) const;

 private:
  AxisAlignedModel base_;
  double delta_norm_;
  Matrix A_, B_, Binv_, sigma_;
  double kappa_;
  double log_kappa_;
};

/// Convenience: builds the axis-aligned model (validating params).
AxisAlignedModel build_axis_aligned(ModelParams params);
GeneralModel build_general(const AxisAlignedModel& model);

// ---------------------------------------------------------------------------
// Sampling verification suites.

struct Counterexample {
  Vector x;
  Vector h;  ///< direction (growth check) or z (Lyapunov check)
  double lhs = 0.0;
  double rhs = 0.0;
};

struct VerificationReport {
  std::string check;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  ///< max over samples of lhs / rhs
  std::vector<Counterexample> counterexamples;  ///< first few violations
  bool passed() const noexcept { return violations == 0; }
};

/// Samples x uniformly in [-r, r]^5 and h uniformly in the unit ball and
/// checks |nu'(x) h| <= 4 n C (1 + |x|^n) |h|.
VerificationReport verify_jacobian_growth(const AxisAlignedModel& model, std::size_t trials,
                                          double box_radius, std::uint64_t seed = 1);
/// Same for the general model with constant kappa: |mu'(x)h| <= kappa (1 + |x|^kappa)|h|,
/// checked in log space.
VerificationReport verify_jacobian_growth(const GeneralModel& model, std::size_t trials,
                                          double box_radius, std::uint64_t seed = 1);

/// Checks V'(x) nu(x + rho z) <= (2p + (2p + q) sup max{|f|,|g'|}) (1 + |z|) V(x)
/// together with |x| <= V(x); z uniform in [-z_radius, z_radius].
VerificationReport verify_lyapunov(const AxisAlignedModel& model, LyapunovExponents e,
                                   std::size_t trials, double box_radius, double z_radius,
                                   std::uint64_t seed = 1);
/// Checks V'(x) mu(x + sigma z) <= varkappa (1 + |z|) V(x) and |x| <= V(x) for
/// the general model; z uniform in the m-dimensional ball of radius z_radius.
VerificationReport verify_lyapunov(const GeneralModel& model, std::size_t trials, double box_radius,
                                   double z_radius, std::uint64_t seed = 1);

/// Checks |A x| <= frobenius(A) |x| on random x.
VerificationReport frobenius_bound_check(const Matrix& a, std::size_t trials, std::uint64_t seed = 1);

}  // namespace sdelab
