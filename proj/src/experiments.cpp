#include "sdelab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/paths.hpp"
#include "sdelab/random.hpp"
#include "sdelab/solvers.hpp"

namespace sdelab {

namespace {

Vector random_unit(Rng& rng, std::size_t dim) {
  Vector u(dim);
  double r = 0.0;
  while (!(r > 1e-12)) {
    for (double& ui : u) ui = rng.normal();
    r = norm(u);
  }
  for (double& ui : u) ui /= r;
  return u;
}

// Cascade solve in base coordinates mapped back to the model's coordinates.
SolutionPath transformed_flow(const GeneralModel& model, const BrownianPath& W, std::span<const double> x0) {
  const Vector y0 = model.to_base(x0);
  return transform_solution(solve_cascade_embedded(model.base(), W, y0), model.B(), model.v());
}

}  // namespace

ModelParams randomize_shift(ModelParams params, std::uint64_t seed) {
  params.validate();
  Rng rng(substream_seed(seed, 0x5417f7));
  const std::size_t d = params.d;
  params.v.assign(d, 0.0);
  for (double& vi : params.v) vi = rng.uniform(-1.0, 1.0);
  params.delta = random_unit(rng, d);
  const double scale = rng.uniform(0.5, 1.0);
  for (double& di : params.delta) di *= scale;
  return params;
}

Report transform_check(const GeneralModel& model, std::span<const double> y0, std::size_t n_paths,
                       std::size_t steps, std::uint64_t seed, bool taming, double tolerance,
                       unsigned threads) {
  if (steps < 2 || steps % 2 != 0) throw InvalidArgument("transform_check: steps must be even");
  if (y0.size() != model.dim()) throw InvalidArgument("transform_check: y0 must be in R^d");
  const Vector x0 = model.from_base(y0);
  const TimeGrid fine(model.base().params().T, steps);

  std::vector<double> dist_fine(n_paths), dist_coarse(n_paths);
  detail::parallel_for(n_paths, threads, [&](std::size_t i) {
    const BrownianPath W = sample_brownian(fine, model.noise_dim(), seed, i);
    const BrownianPath Wc = coarsen(W, 2);
    try {
      dist_fine[i] = max_distance(transformed_flow(model, W, x0), solve_em(model, W, x0, taming));
      dist_coarse[i] = max_distance(transformed_flow(model, Wc, x0), solve_em(model, Wc, x0, taming));
    } catch (const ExplosionError&) {
      dist_fine[i] = dist_coarse[i] = std::numeric_limits<double>::infinity();
    }
  });

  Report report;
  report.check = "transform";
  double mean_fine = 0.0, mean_coarse = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    mean_fine += dist_fine[i];
    mean_coarse += dist_coarse[i];
    worst = std::max(worst, dist_fine[i]);
    report.record(dist_fine[i] / tolerance - 1.0, {{"path", i}, {"distance", json_number(dist_fine[i])}});
  }
  mean_fine /= static_cast<double>(n_paths);
  mean_coarse /= static_cast<double>(n_paths);
  const double ratio = mean_coarse / mean_fine;
  const double ratio_excess = ratio < 1.5 ? (1.5 - ratio) / 1.5 : ratio > 2.5 ? (ratio - 2.5) / 2.5 : 0.0;
  report.record(std::isnan(ratio) ? 1.0 : ratio_excess, {{"ratio", json_number(ratio)}});
  report.params = {{"d", model.dim()},
                   {"paths", n_paths},
                   {"steps", steps},
                   {"taming", taming},
                   {"tolerance", tolerance},
                   {"max_distance", json_number(worst)},
                   {"mean_distance_fine", json_number(mean_fine)},
                   {"mean_distance_coarse", json_number(mean_coarse)},
                   {"halving_ratio", json_number(ratio)}};
  return report;
}

Report variation_check(const GeneralModel& model, std::span<const double> x0, std::size_t n_paths,
                       std::size_t steps, std::uint64_t seed, double fd, double tolerance, unsigned threads) {
  if (x0.size() != model.dim()) throw InvalidArgument("variation_check: x0 must be in R^d");
  const TimeGrid grid(model.base().params().T, steps);
  const std::size_t d = model.dim();
  std::vector<double> errors(n_paths);
  detail::parallel_for(n_paths, threads, [&](std::size_t i) {
    const BrownianPath W = sample_brownian(grid, model.noise_dim(), seed, i);
    Rng rng(substream_seed(seed ^ 0xd1ffULL, i));
    const Vector h = random_unit(rng, d);
    Vector xh(x0.begin(), x0.end());
    for (std::size_t j = 0; j < d; ++j) xh[j] += fd * h[j];
    const SolutionPath X = transformed_flow(model, W, x0);
    const SolutionPath Xh = transformed_flow(model, W, xh);
    const SolutionPath J = solve_variation(model, X, h);
    double diff = 0.0, scale = 0.0;
    Vector D(d);
    for (std::size_t k = 0; k <= steps; ++k) {
      for (std::size_t j = 0; j < d; ++j) D[j] = (Xh.component(k, j) - X.component(k, j)) / fd;
      diff = std::max(diff, distance(J.at(k), D));
      scale = std::max(scale, norm(J.at(k)));
    }
    errors[i] = diff / scale;
  });

  Report report;
  report.check = "variation";
  double worst = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    worst = std::max(worst, errors[i]);
    report.record(errors[i] / tolerance - 1.0, {{"path", i}, {"rel_error", json_number(errors[i])}});
  }
  report.params = {{"d", d}, {"paths", n_paths}, {"steps", steps}, {"fd_step", fd},
                   {"tolerance", tolerance}, {"max_rel_error", json_number(worst)}};
  return report;
}

Report jacobian_fd_check(const AxisAlignedModel& model, std::size_t points, double box_radius,
                         std::uint64_t seed, double tolerance) {
  Report report;
  report.check = "jacobian_fd";
  Rng rng(seed);
  const double T = model.params().T;
  double worst = 0.0, worst_rich = 0.0;
  auto central = [&](const Vec5& x, std::size_t s, double step) {
    Vec5 up = x, down = x;
    up[s] += step;
    down[s] -= step;
    const Vec5 fu = model.nu(up), fd = model.nu(down);
    Vec5 d;
    for (std::size_t r = 0; r < 5; ++r) d[r] = (fu[r] - fd[r]) / (up[s] - down[s]);
    return d;
  };
  for (std::size_t p = 0; p < points; ++p) {
    Vec5 x;
    x[0] = rng.uniform(-0.25, T + 0.25);
    for (std::size_t i = 1; i < 5; ++i) x[i] = rng.uniform(-box_radius, box_radius);
    const Mat5 J = model.nu_jacobian(x);
    double diff = 0.0, diff_rich = 0.0, scale = 0.0;
    for (std::size_t s = 0; s < 5; ++s) {
      const double step = 1e-6 * (1.0 + std::abs(x[s]));
      const Vec5 D = central(x, s, step), Dh = central(x, s, 0.5 * step);
      for (std::size_t r = 0; r < 5; ++r) {
        diff = std::max(diff, std::abs(D[r] - J[r][s]));
        diff_rich = std::max(diff_rich, std::abs((4.0 * Dh[r] - D[r]) / 3.0 - J[r][s]));
        scale = std::max(scale, std::abs(J[r][s]));
      }
    }
    const double err = scale > 0.0 ? diff / scale : diff;
    worst = std::max(worst, err);
    worst_rich = std::max(worst_rich, scale > 0.0 ? diff_rich / scale : diff_rich);
    report.record(err / tolerance - 1.0, {{"x", x}, {"rel_error", err}});
  }
  report.params = {{"points", points}, {"box_radius", box_radius}, {"tolerance", tolerance},
                   {"max_rel_error", worst}, {"max_rel_error_richardson", worst_rich}};
  return report;
}

}  // namespace sdelab
