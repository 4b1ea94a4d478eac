#include "sdelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdelab/errors.hpp"
#include "sdelab/random.hpp"

namespace sdelab {

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// log(1 + exp(s)) without overflow.
double softplus(double s) {
  if (s == std::numeric_limits<double>::infinity()) return s;
  if (s == -std::numeric_limits<double>::infinity()) return 0.0;
  return s > 0.0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

Vec5 head5(std::span<const double> x) { return {x[0], x[1], x[2], x[3], x[4]}; }

void record(VerificationReport& r, double lhs, double rhs, std::span<const double> x,
            std::span<const double> h, bool violated) {
  if (rhs > 0.0) r.max_ratio = std::max(r.max_ratio, lhs / rhs);
  if (!violated) return;
  ++r.violations;
  if (r.counterexamples.size() < kMaxCounterexamples)
    r.counterexamples.push_back({Vector(x.begin(), x.end()), Vector(h.begin(), h.end()), lhs, rhs});
}

Vector sample_box(Rng& rng, std::size_t dim, double radius) {
  Vector x(dim);
  for (double& xi : x) xi = rng.uniform(-radius, radius);
  return x;
}

// Uniform in the ball of the given radius.
Vector sample_ball(Rng& rng, std::size_t dim, double radius) {
  Vector x(dim);
  for (double& xi : x) xi = rng.normal();
  const double len = norm(x);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim));
  for (double& xi : x) xi *= r / len;
  return x;
}

VerificationReport make_report(std::string name, std::size_t trials) {
  VerificationReport r;
  r.check = std::move(name);
  r.trials = trials;
  r.max_ratio = -std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

void ModelParams::validate() {
  if (n < 2) throw InvalidArgument("n must be at least 2");
  if (!std::isfinite(T) || !(T > 0.0)) throw InvalidArgument("T must be positive");
  if (!(tau > 0.0 && tau < T)) throw InvalidArgument("tau must lie in (0, T)");
  if (d < 5) throw InvalidArgument("state dimension d must be at least 5");
  if (m < 1) throw InvalidArgument("noise dimension m must be at least 1");
  if (!(p >= 1.0)) throw InvalidArgument("Lyapunov exponent p must be at least 1");
  if (!(q >= 2.0 * p * n)) throw InvalidArgument("Lyapunov exponent q must be at least 2 p n");
  if (v.empty()) v.assign(d, 0.0);
  if (delta.empty()) delta = unit_vector(d, 3);
  if (v.size() != d || delta.size() != d) throw InvalidArgument("v and delta must have dimension d");
  if (!(norm(delta) > 0.0)) throw InvalidArgument("delta must be nonzero");
}

AxisAlignedModel::AxisAlignedModel(ModelParams params)
    : params_((params.validate(), std::move(params))),
      f_(make_normalized_bump(params_.tau, params_.T)),
      g_(make_normalized_bump(0.0, params_.tau)),
      C_(sup_bounds(f_, g_)),
      kappa5_(2.0 + 8.0 * (params_.n + 1) * C_),
      sup_fg_(sdelab::sup_f_gprime(f_, g_)) {}

double AxisAlignedModel::lyapunov_constant(LyapunovExponents e) const noexcept {
  return 2.0 * e.p + (2.0 * e.p + e.q) * sup_fg_;
}

Vec5 AxisAlignedModel::nu(const Vec5& x) const noexcept {
  const double fx = f_.value(x[0]);
  const double gp = g_.deriv1(x[0]);
  return {1.0, 0.0, gp * x[1], fx * x[3] * x[4], fx * (ipow(x[2], params_.n) - x[3] * x[3])};
}

Mat5 AxisAlignedModel::nu_jacobian(const Vec5& x) const noexcept {
  const auto fv = f_.eval_all(x[0]);
  const auto gv = g_.eval_all(x[0]);
  const int n = params_.n;
  Mat5 j{};
  j[2][0] = gv[2] * x[1];
  j[2][1] = gv[1];
  j[3][0] = fv[1] * x[3] * x[4];
  j[3][3] = fv[0] * x[4];
  j[3][4] = fv[0] * x[3];
  j[4][0] = fv[1] * (ipow(x[2], n) - x[3] * x[3]);
  j[4][2] = n * fv[0] * ipow(x[2], n - 1);
  j[4][3] = -2.0 * fv[0] * x[3];
  return j;
}

double AxisAlignedModel::U(const Vec5& x) const noexcept {
  return V(x, {1.0, 2.0 * params_.n});
}

Vec5 AxisAlignedModel::U_grad(const Vec5& x) const noexcept {
  return V_grad(x, {1.0, 2.0 * params_.n});
}

double AxisAlignedModel::V(const Vec5& x, LyapunovExponents e) const noexcept {
  const double base = 1.0 + x[0] * x[0] + x[3] * x[3] + x[4] * x[4];
  return std::pow(base, e.p) + std::pow(std::abs(x[1]), e.q) + std::pow(std::abs(x[2]), e.q) + 1.0;
}

Vec5 AxisAlignedModel::V_grad(const Vec5& x, LyapunovExponents e) const noexcept {
  const double base = 1.0 + x[0] * x[0] + x[3] * x[3] + x[4] * x[4];
  const double outer = 2.0 * e.p * std::pow(base, e.p - 1.0);
  auto abs_power_deriv = [&](double y) {
    return y == 0.0 ? 0.0 : e.q * std::pow(std::abs(y), e.q - 1.0) * (y > 0.0 ? 1.0 : -1.0);
  };
  return {outer * x[0], abs_power_deriv(x[1]), abs_power_deriv(x[2]), outer * x[3], outer * x[4]};
}

void AxisAlignedModel::embedded_drift(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim() || out.size() != dim()) throw InvalidArgument("embedded drift: dimension mismatch");
  const Vec5 y = nu(head5(x));
  std::copy(y.begin(), y.end(), out.begin());
  std::fill(out.begin() + 5, out.end(), 0.0);
}

Matrix AxisAlignedModel::embedded_jacobian(std::span<const double> x) const {
  if (x.size() != dim()) throw InvalidArgument("embedded jacobian: dimension mismatch");
  const Mat5 j = nu_jacobian(head5(x));
  Matrix out(dim(), dim());
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) out(r, c) = j[r][c];
  return out;
}

double AxisAlignedModel::embedded_V(std::span<const double> x) const {
  if (x.size() != dim()) throw InvalidArgument("embedded V: dimension mismatch");
  double tail = 0.0;
  for (std::size_t i = 5; i < x.size(); ++i) tail += x[i] * x[i];
  return U(head5(x)) + tail + 1.0;
}

Vector AxisAlignedModel::embedded_V_grad(std::span<const double> x) const {
  if (x.size() != dim()) throw InvalidArgument("embedded V gradient: dimension mismatch");
  const Vec5 g = U_grad(head5(x));
  Vector out(dim());
  std::copy(g.begin(), g.end(), out.begin());
  for (std::size_t i = 5; i < x.size(); ++i) out[i] = 2.0 * x[i];
  return out;
}

Vector AxisAlignedModel::sigma0() const { return unit_vector(dim(), 1); }

Vector EmbeddedModel::drift(std::span<const double> x) const {
  Vector out(base->dim());
  base->embedded_drift(x, out);
  return out;
}

EmbeddedModel embed_to_dim(const AxisAlignedModel& model) { return EmbeddedModel{&model}; }

AxisAlignedModel build_axis_aligned(ModelParams params) { return AxisAlignedModel(std::move(params)); }

GeneralModel::GeneralModel(AxisAlignedModel base) : base_(std::move(base)) {
  const std::size_t d = base_.dim();
  const Vector& delta = base_.params().delta;
  delta_norm_ = norm(delta);
  if (!(delta_norm_ > 0.0)) throw InvalidArgument("delta must be nonzero");
  Vector w = delta;
  for (double& wi : w) wi /= delta_norm_;
  A_ = householder_map(unit_vector(d, 3), w);
  B_ = A_.scaled(delta_norm_);
  Binv_ = A_.transpose().scaled(1.0 / delta_norm_);

  sigma_ = Matrix(d, base_.params().m);
  const Vector s = B_.apply(base_.sigma0());
  for (std::size_t i = 0; i < d; ++i) sigma_(i, 0) = s[i];

  const double vk = base_.varkappa();
  const double vnorm = norm(base_.params().v);
  const double log_vmax = vnorm > 1.0 ? vk * std::log(vnorm) : 0.0;
  const double inner = -std::log(delta_norm_) + vk * std::numbers::ln2 + log_vmax;
  log_kappa_ = std::numbers::ln2 + std::log(vk) + softplus(inner);
  kappa_ = std::exp(log_kappa_);
}

Vector GeneralModel::to_base(std::span<const double> x) const {
  Vector shifted(x.begin(), x.end());
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] -= v()[i];
  return Binv_.apply(shifted);
}

Vector GeneralModel::from_base(std::span<const double> y) const {
  Vector x = B_.apply(y);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += v()[i];
  return x;
}

void GeneralModel::drift(std::span<const double> x, std::span<double> out) const {
  const Vector y = to_base(x);
  Vector nu(dim());
  base_.embedded_drift(y, nu);
  B_.apply(nu, out);
}

Vector GeneralModel::drift(std::span<const double> x) const {
  Vector out(dim());
  drift(x, out);
  return out;
}

Matrix GeneralModel::jacobian(std::span<const double> x) const {
  return B_ * base_.embedded_jacobian(to_base(x)) * Binv_;
}

double GeneralModel::V(std::span<const double> x) const {
  return delta_norm_ * base_.embedded_V(to_base(x)) + norm(v());
}

Vector GeneralModel::V_grad(std::span<const double> x) const {
  // Chain rule: |delta| (B^-1)^T grad Vemb(B^-1 (x - v)).
  Vector out = Binv_.transpose().apply(base_.embedded_V_grad(to_base(x)));
  for (double& o : out) o *= delta_norm_;
  return out;
}

GeneralModel build_general(const AxisAlignedModel& model) { return GeneralModel(model); }

// ---------------------------------------------------------------------------

VerificationReport verify_jacobian_growth(const AxisAlignedModel& model, std::size_t trials,
                                          double box_radius, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  auto report = make_report("jacobian_growth_axis_aligned", trials);
  Rng rng(seed);
  const double c = 4.0 * model.n() * model.C();
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector x = sample_box(rng, 5, box_radius);
    const Vector h = sample_ball(rng, 5, 1.0);
    const Mat5 j = model.nu_jacobian(head5(x));
    Vector jh(5, 0.0);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t s = 0; s < 5; ++s) jh[r] += j[r][s] * h[s];
    const double lhs = norm(jh);
    const double rhs = c * (1.0 + std::pow(norm(x), model.n())) * norm(h);
    record(report, lhs, rhs, x, h, lhs > rhs);
  }
  return report;
}

VerificationReport verify_jacobian_growth(const GeneralModel& model, std::size_t trials,
                                          double box_radius, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  auto report = make_report("jacobian_growth_general", trials);
  Rng rng(seed);
  const double kappa = model.kappa();
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector x = sample_box(rng, model.dim(), box_radius);
    const Vector h = sample_ball(rng, model.dim(), 1.0);
    const double lhs = norm(model.jacobian(x).apply(h));
    const double xn = norm(x);
    // log(1 + |x|^kappa), with kappa possibly infinite.
    const double growth = xn == 1.0 ? std::numbers::ln2 : softplus(kappa * std::log(xn));
    const double log_rhs = model.log_kappa() + growth + std::log(norm(h));
    const double log_ratio = std::log(lhs) - log_rhs;
    const double ratio = lhs > 0.0 ? std::exp(log_ratio) : 0.0;
    report.max_ratio = std::max(report.max_ratio, ratio);
    if (lhs > 0.0 && log_ratio > 0.0) {
      ++report.violations;
      if (report.counterexamples.size() < kMaxCounterexamples)
        report.counterexamples.push_back({x, h, lhs, std::exp(log_rhs)});
    }
  }
  return report;
}

VerificationReport verify_lyapunov(const AxisAlignedModel& model, LyapunovExponents e,
                                   std::size_t trials, double box_radius, double z_radius,
                                   std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  auto report = make_report("lyapunov_axis_aligned", trials);
  Rng rng(seed);
  const double c = model.lyapunov_constant(e);
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector xs = sample_box(rng, 5, box_radius);
    const double z = rng.uniform(-z_radius, z_radius);
    const Vec5 x = head5(xs);
    Vec5 shifted = x;
    shifted[1] += z;
    const Vec5 grad = model.V_grad(x, e);
    const Vec5 drift = model.nu(shifted);
    double lhs = 0.0;
    for (std::size_t i = 0; i < 5; ++i) lhs += grad[i] * drift[i];
    const double vx = model.V(x, e);
    const double rhs = c * (1.0 + std::abs(z)) * vx;
    const Vector zs{z};
    record(report, lhs, rhs, xs, zs, lhs > rhs || norm(xs) > vx);
  }
  return report;
}

VerificationReport verify_lyapunov(const GeneralModel& model, std::size_t trials, double box_radius,
                                   double z_radius, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  auto report = make_report("lyapunov_general", trials);
  Rng rng(seed);
  const double vk = model.base().varkappa();
  const std::size_t d = model.dim();
  const std::size_t m = model.noise_dim();
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector x = sample_box(rng, d, box_radius);
    const Vector z = sample_ball(rng, m, z_radius);
    Vector shifted = x;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < m; ++j) shifted[i] += model.sigma()(i, j) * z[j];
    const double lhs = dot(model.V_grad(x), model.drift(shifted));
    const double vx = model.V(x);
    const double rhs = vk * (1.0 + norm(z)) * vx;
    record(report, lhs, rhs, x, z, lhs > rhs || norm(x) > vx);
  }
  return report;
}

VerificationReport frobenius_bound_check(const Matrix& a, std::size_t trials, std::uint64_t seed) {
  auto report = make_report("frobenius_bound", trials);
  Rng rng(seed);
  const double fro = a.frobenius();
  for (std::size_t k = 0; k < trials; ++k) {
    Vector x(a.cols());
    for (double& xi : x) xi = rng.normal();
    const double lhs = norm(a.apply(x));
    const double rhs = fro * norm(x);
    // One rounding unit of slack: equality holds exactly for rank-one matrices.
    record(report, lhs, rhs, x, {}, lhs > rhs * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()));
  }
  if (report.max_ratio == -std::numeric_limits<double>::infinity()) report.max_ratio = 0.0;
  return report;
}

}  // namespace sdelab
