#include "sdelab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sdelab/errors.hpp"
#include "sdelab/format.hpp"

namespace sdelab {

namespace {


}  // namespace

std::vector<double> SolutionPath::coordinate(std::size_t i) const {
  std::vector<double> c(grid.steps() + 1);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = states[k * dim + i];
  return c;
}

double max_distance(const SolutionPath& a, const SolutionPath& b) {
  if (!(a.grid == b.grid) || a.dim != b.dim) throw InvalidArgument("paths live on different grids");
  double best = 0.0;
  for (std::size_t k = 0; k <= a.grid.steps(); ++k) best = std::max(best, distance(a.at(k), b.at(k)));
  return best;
}

void write_csv(std::ostream& out, const SolutionPath& path) {
  out << "t";
  for (std::size_t i = 0; i < path.dim; ++i) out << ",x" << (i + 1);
  out << "\n";
  for (std::size_t k = 0; k <= path.grid.steps(); ++k) {
    out << fmt_double(path.grid.time(k));
    for (double x : path.at(k)) out << "," << fmt_double(x);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------

CascadeBatch::CascadeBatch(const AxisAlignedModel& model, const TimeGrid& grid, double x1_initial)
    : model_(&model), grid_(grid), x1_(x1_initial) {
  const std::size_t steps = grid.steps();
  const double dt = grid.dt();
  times_.resize(steps + 1);
  gprime_.resize(steps + 1);
  f_node_.resize(steps + 1);
  f_mid_.resize(steps);
  for (std::size_t k = 0; k <= steps; ++k) {
    times_[k] = grid.time(k);
    gprime_[k] = model.g().deriv1(x1_ + times_[k]);
    f_node_[k] = model.f().value(x1_ + times_[k]);
    if (k < steps) f_mid_[k] = model.f().value(x1_ + times_[k] + 0.5 * dt);
  }
}

void CascadeBatch::run(std::span<const std::span<const double>> w, std::span<const Vec5> initial,
                       const kernels::KernelTable& kernels) {
  if (w.size() != initial.size()) throw InvalidArgument("cascade batch: one initial value per path");
  const std::size_t steps = grid_.steps();
  lanes_ = w.size();
  const std::size_t rows = steps + 1;
  w_.assign(rows * lanes_, 0.0);
  x3_.assign(rows * lanes_, 0.0);
  x4_.assign(rows * lanes_, 0.0);
  x5_.assign(rows * lanes_, 0.0);
  x2_0_.resize(lanes_);
  std::vector<double> x3_0(lanes_);
  for (std::size_t l = 0; l < lanes_; ++l) {
    if (w[l].size() != rows) throw InvalidArgument("cascade batch: Brownian path does not match grid");
    for (std::size_t k = 0; k < rows; ++k) w_[k * lanes_ + l] = w[l][k];
    x2_0_[l] = initial[l][1];
    x3_0[l] = initial[l][2];
    x4_[l] = initial[l][3];
    x5_[l] = initial[l][4];
  }
  const kernels::CascadeTables tab{gprime_, f_node_, f_mid_, steps, grid_.dt(), model_->n()};
  kernels.cascade_x3(tab, w_.data(), x2_0_.data(), x3_0.data(), x3_.data(), lanes_);
  kernels.cascade_rk4(tab, x3_.data(), x4_.data(), x5_.data(), lanes_);

  for (std::size_t k = 0; k < rows; ++k)
    for (std::size_t l = 0; l < lanes_; ++l) {
      const std::size_t i = k * lanes_ + l;
      if (!std::isfinite(x3_[i]) || !std::isfinite(x4_[i]) || !std::isfinite(x5_[i]))
        throw ExplosionError(k, "cascade solver");
    }
}

Vec5 CascadeBatch::state(std::size_t lane, std::size_t k) const {
  const std::size_t i = k * lanes_ + lane;
  return {x1_ + times_[k], x2_0_[lane] + w_[i], x3_[i], x4_[i], x5_[i]};
}

SolutionPath CascadeBatch::path(std::size_t lane) const {
  SolutionPath p{grid_, 5, std::vector<double>((grid_.steps() + 1) * 5), {}};
  for (std::size_t k = 0; k <= grid_.steps(); ++k) {
    const Vec5 s = state(lane, k);
    std::copy(s.begin(), s.end(), p.at(k).begin());
  }
  p.initial.assign(p.at(0).begin(), p.at(0).end());
  return p;
}

SolutionPath solve_cascade(const AxisAlignedModel& model, const BrownianPath& W,
                           std::span<const double> x0) {
  if (x0.size() != 5) throw InvalidArgument("cascade solver: initial value must be in R^5");
  for (double x : x0)
    if (!std::isfinite(x)) throw InvalidArgument("cascade solver: initial value must be finite");
  const std::vector<double> w = W.column(0);
  const std::span<const double> col(w);
  const Vec5 init{x0[0], x0[1], x0[2], x0[3], x0[4]};
  CascadeBatch batch(model, W.grid, x0[0]);
  batch.run(std::span(&col, 1), std::span(&init, 1));
  return batch.path(0);
}

SolutionPath solve_cascade_embedded(const AxisAlignedModel& model, const BrownianPath& W,
                                    std::span<const double> y0) {
  const std::size_t d = model.dim();
  if (y0.size() != d) throw InvalidArgument("embedded cascade: initial value must be in R^d");
  const SolutionPath core = solve_cascade(model, W, y0.first(5));
  SolutionPath out{W.grid, d, std::vector<double>((W.grid.steps() + 1) * d), Vector(y0.begin(), y0.end())};
  for (std::size_t k = 0; k <= W.grid.steps(); ++k) {
    auto row = out.at(k);
    std::copy_n(core.at(k).begin(), 5, row.begin());
    std::copy(y0.begin() + 5, y0.end(), row.begin() + 5);
  }
  return out;
}

SolutionPath solve_em(const GeneralModel& model, const BrownianPath& W, std::span<const double> x0,
                      bool taming) {
  const std::size_t d = model.dim();
  const std::size_t m = model.noise_dim();
  if (x0.size() != d) throw InvalidArgument("EM solver: initial value must be in R^d");
  if (W.m < m) throw InvalidArgument("EM solver: Brownian path has too few components");
  const std::size_t steps = W.grid.steps();
  const double dt = W.grid.dt();
  SolutionPath out{W.grid, d, std::vector<double>((steps + 1) * d), Vector(x0.begin(), x0.end())};
  std::copy(x0.begin(), x0.end(), out.at(0).begin());
  Vector mu(d);
  const Matrix& sigma = model.sigma();
  for (std::size_t k = 0; k < steps; ++k) {
    const auto x = out.at(k);
    auto next = out.at(k + 1);
    model.drift(x, mu);
    const double scale = taming ? dt / (1.0 + dt * norm(mu)) : dt;
    for (std::size_t i = 0; i < d; ++i) {
      double noise = 0.0;
      for (std::size_t j = 0; j < m; ++j) noise += sigma(i, j) * (W.component(k + 1, j) - W.component(k, j));
      next[i] = x[i] + scale * mu[i] + noise;
    }
    for (double xi : next)
      if (!std::isfinite(xi)) throw ExplosionError(k + 1, "Euler-Maruyama solver");
  }
  return out;
}

SolutionPath solve_variation(const GeneralModel& model, const SolutionPath& X,
                             std::span<const double> h) {
  const std::size_t d = model.dim();
  if (X.dim != d || h.size() != d) throw InvalidArgument("variation solver: dimension mismatch");
  const std::size_t steps = X.grid.steps();
  const double dt = X.grid.dt();
  SolutionPath out{X.grid, d, std::vector<double>((steps + 1) * d), Vector(h.begin(), h.end())};
  std::copy(h.begin(), h.end(), out.at(0).begin());

  Vector mid(d), stage(d), k1(d), k2(d), k3(d), k4(d);
  Matrix jac_left = model.jacobian(X.at(0));
  for (std::size_t k = 0; k < steps; ++k) {
    const auto x0 = X.at(k);
    const auto x1 = X.at(k + 1);
    for (std::size_t i = 0; i < d; ++i) mid[i] = 0.5 * (x0[i] + x1[i]);
    const Matrix jac_mid = model.jacobian(mid);
    Matrix jac_right = model.jacobian(x1);
    const auto j = out.at(k);

    jac_left.apply(j, k1);
    for (std::size_t i = 0; i < d; ++i) stage[i] = j[i] + 0.5 * dt * k1[i];
    jac_mid.apply(stage, k2);
    for (std::size_t i = 0; i < d; ++i) stage[i] = j[i] + 0.5 * dt * k2[i];
    jac_mid.apply(stage, k3);
    for (std::size_t i = 0; i < d; ++i) stage[i] = j[i] + dt * k3[i];
    jac_right.apply(stage, k4);

    auto next = out.at(k + 1);
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = j[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i])) throw ExplosionError(k + 1, "variation solver");
    }
    jac_left = std::move(jac_right);
  }
  return out;
}

SolutionPath transform_solution(const SolutionPath& Y, const Matrix& B, std::span<const double> v) {
  const std::size_t d = Y.dim;
  if (B.rows() != d || B.cols() != d || v.size() != d)
    throw InvalidArgument("transform_solution: dimension mismatch");
  SolutionPath out{Y.grid, d, std::vector<double>(Y.states.size()), {}};
  for (std::size_t k = 0; k <= Y.grid.steps(); ++k) {
    auto row = out.at(k);
    B.apply(Y.at(k), row);
    for (std::size_t i = 0; i < d; ++i) row[i] += v[i];
  }
  out.initial.assign(out.at(0).begin(), out.at(0).end());
  return out;
}

}  // namespace sdelab
