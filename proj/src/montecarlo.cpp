#include "sdelab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "parallel.hpp"
#include "sdelab/bounds.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/format.hpp"
#include "sdelab/paths.hpp"
#include "sdelab/solvers.hpp"

namespace sdelab {

namespace {

constexpr double kAborted = std::numeric_limits<double>::quiet_NaN();

std::size_t steps_for(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(span / dt)));
}

std::size_t chunk_count(std::size_t n, std::size_t chunk) { return (n + chunk - 1) / chunk; }

struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased
};

// Two passes, each summing within chunks in index order and then across chunks.
Moments reduce(const std::vector<double>& values, std::size_t chunk) {
  const std::size_t chunks = chunk_count(values.size(), chunk);
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    double s = 0.0;
    for (std::size_t i = c * chunk; i < std::min(values.size(), (c + 1) * chunk); ++i)
      if (!std::isnan(values[i])) {
        s += values[i];
        ++count;
      }
    total += s;
  }
  Moments m;
  m.count = count;
  if (count == 0) return m;
  m.mean = total / static_cast<double>(count);
  double squares = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    double s = 0.0;
    for (std::size_t i = c * chunk; i < std::min(values.size(), (c + 1) * chunk); ++i)
      if (!std::isnan(values[i])) s += (values[i] - m.mean) * (values[i] - m.mean);
    squares += s;
  }
  m.variance = count > 1 ? squares / static_cast<double>(count - 1) : 0.0;
  return m;
}

Vector padded_state(const Vec5& core, std::span<const double> base_initial) {
  Vector y(base_initial.begin(), base_initial.end());
  std::copy(core.begin(), core.end(), y.begin());
  return y;
}

// Distances at grid index k for one chunk of paths, cascade scheme.
void cascade_chunk(const GeneralModel& model, const TimeGrid& grid, std::size_t k,
                   std::span<const double> x, std::span<const double> y, std::uint64_t seed,
                   std::size_t first, std::size_t last, std::span<double> out) {
  const Vector bx = model.to_base(x);
  const Vector by = model.to_base(y);
  const Vec5 ix{bx[0], bx[1], bx[2], bx[3], bx[4]};
  const Vec5 iy{by[0], by[1], by[2], by[3], by[4]};
  const std::size_t lanes = last - first;

  std::vector<std::vector<double>> columns(lanes);
  std::vector<std::span<const double>> views(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    columns[l] = sample_brownian(grid, model.noise_dim(), seed, first + l).column(0);
    views[l] = columns[l];
  }

  CascadeBatch batch_x(model.base(), grid, ix[0]);
  CascadeBatch batch_y(model.base(), grid, iy[0]);
  auto finish = [&](std::size_t l, const CascadeBatch& bxs, std::size_t lx, const CascadeBatch& bys,
                    std::size_t ly) {
    const Vector px = model.from_base(padded_state(bxs.state(lx, k), bx));
    const Vector py = model.from_base(padded_state(bys.state(ly, k), by));
    out[l] = distance(px, py);
  };
  try {
    const std::vector<Vec5> init_x(lanes, ix), init_y(lanes, iy);
    batch_x.run(views, init_x);
    batch_y.run(views, init_y);
    for (std::size_t l = 0; l < lanes; ++l) finish(l, batch_x, l, batch_y, l);
  } catch (const ExplosionError&) {
    // Identify the aborted lanes one at a time.
    for (std::size_t l = 0; l < lanes; ++l) {
      try {
        CascadeBatch sx(model.base(), grid, ix[0]), sy(model.base(), grid, iy[0]);
        sx.run(std::span(&views[l], 1), std::span(&ix, 1));
        sy.run(std::span(&views[l], 1), std::span(&iy, 1));
        finish(l, sx, 0, sy, 0);
      } catch (const ExplosionError&) {
        out[l] = kAborted;
      }
    }
  }
}

void em_chunk(const GeneralModel& model, const TimeGrid& grid, std::size_t k, std::span<const double> x,
              std::span<const double> y, bool taming, std::uint64_t seed, std::size_t first,
              std::size_t last, std::span<double> out) {
  for (std::size_t i = first; i < last; ++i) {
    const BrownianPath W = sample_brownian(grid, model.noise_dim(), seed, i);
    try {
      const SolutionPath px = solve_em(model, W, x, taming);
      const SolutionPath py = solve_em(model, W, y, taming);
      out[i - first] = distance(px.at(k), py.at(k));
    } catch (const ExplosionError&) {
      out[i - first] = kAborted;
    }
  }
}

}  // namespace

DistanceEstimate estimate_distance(const GeneralModel& model, std::span<const double> x,
                                   std::span<const double> y, double t, std::size_t n_paths,
                                   std::uint64_t master_seed, const MonteCarloOptions& options) {
  const double T = model.base().params().T;
  if (!(t > 0.0 && t <= T)) throw InvalidArgument("estimate_distance: t must lie in (0, T]");
  if (n_paths < 2) throw InvalidArgument("estimate_distance: need at least two paths");
  if (x.size() != model.dim() || y.size() != model.dim())
    throw InvalidArgument("estimate_distance: initial values must be in R^d");
  if (options.chunk < 1) throw InvalidArgument("estimate_distance: chunk size must be positive");

  if (!(options.dt > 0.0)) throw InvalidArgument("estimate_distance: dt must be positive");
  // Integrate on [0, t] so that t is the last node whatever the step.
  const TimeGrid grid(t, steps_for(t, options.dt));
  const std::size_t k = grid.steps();
  std::vector<double> dist(n_paths);
  const std::size_t chunks = chunk_count(n_paths, options.chunk);
  detail::parallel_for(chunks, options.threads, [&](std::size_t c) {
    const std::size_t first = c * options.chunk;
    const std::size_t last = std::min(n_paths, first + options.chunk);
    const std::span<double> out(dist.data() + first, last - first);
    if (options.scheme == Scheme::Cascade)
      cascade_chunk(model, grid, k, x, y, master_seed, first, last, out);
    else
      em_chunk(model, grid, k, x, y, options.taming, master_seed, first, last, out);
  });

  const Moments m = reduce(dist, options.chunk);
  if (m.count == 0) throw EstimationFailed("estimate_distance: every path aborted");
  DistanceEstimate est;
  est.x.assign(x.begin(), x.end());
  est.y.assign(y.begin(), y.end());
  est.t = t;
  est.n_paths = n_paths;
  est.mean = m.mean;
  est.std_error = std::sqrt(m.variance / static_cast<double>(m.count));
  est.aborted = n_paths - m.count;
  est.samples = std::move(dist);
  return est;
}

// ---------------------------------------------------------------------------

std::vector<double> local_slopes(std::span<const double> eps, std::span<const double> mean) {
  if (eps.size() != mean.size()) throw InvalidArgument("local_slopes: size mismatch");
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < eps.size(); ++i)
    out.push_back((std::log(mean[i + 1]) - std::log(mean[i])) / (std::log(eps[i + 1]) - std::log(eps[i])));
  return out;
}

std::vector<double> local_slope_errors(const SweepResult& result) {
  std::vector<double> out;
  const auto& e = result.estimates;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    const auto& a = e[i].samples;
    const auto& b = e[i + 1].samples;
    if (a.size() != b.size()) throw InvalidArgument("local_slope_errors: estimates use different path counts");
    // Per-path influence of ln(mean_b) - ln(mean_a), over paths usable in both.
    std::vector<double> infl;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!std::isnan(a[k]) && !std::isnan(b[k])) infl.push_back(b[k] / e[i + 1].mean - a[k] / e[i].mean);
    const Moments m = reduce(infl, 256);
    const double span = std::abs(std::log(result.eps_grid[i + 1]) - std::log(result.eps_grid[i]));
    out.push_back(std::sqrt(m.variance / static_cast<double>(m.count)) / span);
  }
  return out;
}

SweepResult sweep_epsilon(const GeneralModel& model, double t, std::span<const double> eps_grid,
                          std::size_t n_paths, std::uint64_t master_seed, const MonteCarloOptions& options,
                          double q) {
  const ModelParams& prm = model.base().params();
  if (!(t > prm.tau && t < prm.T)) throw InvalidArgument("sweep_epsilon: t must lie in (tau, T)");
  if (eps_grid.empty()) throw InvalidArgument("sweep_epsilon: empty eps grid");
  const double e_inv = std::exp(-1.0);
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || eps_grid[i] > e_inv * (1.0 + 1e-14))
      throw InvalidArgument("sweep_epsilon: eps must lie in (0, 1/e]");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw InvalidArgument("sweep_epsilon: eps grid must be strictly decreasing");
  }

  SweepResult res;
  res.t = t;
  res.n = prm.n;
  res.eps_grid.assign(eps_grid.begin(), eps_grid.end());
  auto& k = res.constants;
  k.C = model.base().C();
  k.log_kappa = model.log_kappa();
  k.kappa_t = kappa_t(model.base().f(), prm.tau, t);
  k.c = lemma21_c(static_cast<double>(prm.n), k.kappa_t);
  k.K = model.delta_norm();
  k.q = q;

  const Vector& v = model.v();
  const Vector& delta = model.delta();
  std::vector<double> means;
  for (double eps : eps_grid) {
    Vector w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[i] + eps * delta[i];
    res.estimates.push_back(estimate_distance(model, v, w, t, n_paths, master_seed, options));
    means.push_back(res.estimates.back().mean);
    const double log_eps = std::abs(std::log(eps));
    res.lower_bound_curve.push_back(k.K * std::exp(-k.c * std::pow(log_eps, 2.0 / prm.n)));
    res.upper_bound_curve.push_back(std::pow(log_eps, -q));
  }
  res.local_slopes = local_slopes(res.eps_grid, means);
  return res;
}

std::vector<double> fit_exponent(std::span<const double> eps, std::span<const double> mean,
                                 std::size_t window) {
  if (eps.size() != mean.size()) throw InvalidArgument("fit_exponent: size mismatch");
  if (window < 2) throw InvalidArgument("fit_exponent: window must cover at least two points");
  std::vector<double> out;
  for (std::size_t s = 0; s + window <= eps.size(); ++s) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = s; i < s + window; ++i) {
      if (!(mean[i] > 0.0) || !(eps[i] > 0.0)) throw InvalidArgument("fit_exponent: nonpositive data");
      mx += std::log(eps[i]);
      my += std::log(mean[i]);
    }
    mx /= static_cast<double>(window);
    my /= static_cast<double>(window);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = s; i < s + window; ++i) {
      const double dx = std::log(eps[i]) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(mean[i]) - my);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("fit_exponent: degenerate window");
    out.push_back(sxy / sxx);
  }
  return out;
}

std::vector<double> fit_exponent(const SweepResult& result, std::size_t window) {
  std::vector<double> means;
  for (const auto& e : result.estimates) means.push_back(e.mean);
  return fit_exponent(result.eps_grid, means, window);
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "eps,mean,stderr,aborted,lower_bound,upper_bound,local_slope\n";
  for (std::size_t i = 0; i < r.eps_grid.size(); ++i) {
    const auto& e = r.estimates[i];
    out << fmt_double(r.eps_grid[i]) << ',' << fmt_double(e.mean) << ',' << fmt_double(e.std_error) << ','
        << e.aborted << ',' << fmt_double(r.lower_bound_curve[i]) << ',' << fmt_double(r.upper_bound_curve[i])
        << ',';
    if (i > 0) out << fmt_double(r.local_slopes[i - 1]);
    out << '\n';
  }
}

nlohmann::json sweep_summary(const SweepResult& r) {
  const auto& k = r.constants;
  std::size_t aborted = 0, paths = 0;
  for (const auto& e : r.estimates) {
    aborted += e.aborted;
    paths += e.n_paths;
  }
  return {{"t", r.t},
          {"n", r.n},
          {"regime", r.n >= 3 ? "non-hoelder" : "hoelder-consistent"},
          {"constants",
           {{"C", k.C},
            {"kappa", json_number(std::exp(k.log_kappa))},
            {"log_kappa", k.log_kappa},
            {"kappa_t", k.kappa_t},
            {"c", k.c},
            {"K", k.K},
            {"q", k.q}}},
          {"eps", r.eps_grid},
          {"local_slopes", r.local_slopes},
          {"local_slope_errors", local_slope_errors(r)},
          {"paths", paths},
          {"aborted", aborted}};
}

// ---------------------------------------------------------------------------

double ks_distance_normal(std::span<double> sample) {
  if (sample.empty()) throw InvalidArgument("ks_distance_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-sample[i] / std::numbers::sqrt2);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

Report stdnormality_test(const AxisAlignedModel& model, std::size_t n_paths, std::uint64_t master_seed,
                         const MonteCarloOptions& options) {
  if (n_paths < 1000) throw InvalidArgument("stdnormality_test: need at least 1000 paths");
  const ModelParams& prm = model.params();
  const TimeGrid grid(prm.tau, steps_for(prm.tau, options.dt));
  const std::size_t k_tau = grid.steps();

  std::vector<double> z(n_paths);
  const std::size_t chunks = chunk_count(n_paths, options.chunk);
  detail::parallel_for(chunks, options.threads, [&](std::size_t c) {
    const std::size_t first = c * options.chunk;
    const std::size_t last = std::min(n_paths, first + options.chunk);
    std::vector<std::vector<double>> cols(last - first);
    std::vector<std::span<const double>> views(last - first);
    for (std::size_t i = first; i < last; ++i) {
      cols[i - first] = sample_brownian(grid, 1, master_seed, i).column(0);
      views[i - first] = cols[i - first];
    }
    CascadeBatch batch(model, grid, 0.0);
    const std::vector<Vec5> init(last - first, Vec5{});
    batch.run(views, init);
    for (std::size_t i = first; i < last; ++i) z[i] = batch.state(i - first, k_tau)[2];
  });

  const Moments m = reduce(z, options.chunk);
  const double n = static_cast<double>(n_paths);
  const double ks = ks_distance_normal(z);
  const double mean_tol = 4.0 / std::sqrt(n);
  const double var_tol = 8.0 / std::sqrt(n);
  const double ks_crit = 1.63 / std::sqrt(n);

  Report report;
  report.check = "stdnormality";
  report.params = {{"n_paths", n_paths}, {"seed", master_seed}, {"steps", k_tau},
                   {"mean", m.mean},     {"variance", m.variance}, {"ks", ks},
                   {"ks_critical", ks_crit}};
  report.record(std::abs(m.mean) / mean_tol - 1.0, {{"statistic", "mean"}, {"value", m.mean}});
  report.record(std::abs(m.variance - 1.0) / var_tol - 1.0, {{"statistic", "variance"}, {"value", m.variance}});
  report.record(ks / ks_crit - 1.0, {{"statistic", "ks"}, {"value", ks}});
  return report;
}

}  // namespace sdelab
