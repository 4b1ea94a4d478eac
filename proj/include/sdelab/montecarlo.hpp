#pragma once

// Synchronously coupled Monte Carlo estimates of E|X^x(t) - X^y(t)|.
//
// Every path index owns one Brownian path, derived from (master_seed, index)
// alone, which drives both initial values.  Per-path results are reduced in
// fixed-size chunks in index order, so estimates are bit-identical for any
// number of worker threads.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "sdelab/model.hpp"
#include "sdelab/report.hpp"

namespace sdelab {

enum class Scheme {
  Cascade,         ///< cascade solve in base coordinates, then the affine transform
  EulerMaruyama,   ///< direct (tamed) Euler-Maruyama in R^d
};

struct MonteCarloOptions {
  double dt = 1.0 / 2048.0;   ///< target step; each run uses round(t / dt) steps on [0, t]
  Scheme scheme = Scheme::Cascade;
  bool taming = true;         ///< Euler-Maruyama only
  unsigned threads = 1;
  std::size_t chunk = 256;    ///< paths per reduction chunk (fixed; not tied to threads)
};

struct DistanceEstimate {
  Vector x, y;
  double t = 0.0;
  std::size_t n_paths = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t aborted = 0;
  std::vector<double> samples;  ///< per-path distances in index order; NaN marks an aborted path
};

/// Throws EstimationFailed if every path aborts; InvalidArgument for t
/// outside (0, T] or fewer than two paths.
DistanceEstimate estimate_distance(const GeneralModel& model, std::span<const double> x,
                                   std::span<const double> y, double t, std::size_t n_paths,
                                   std::uint64_t master_seed, const MonteCarloOptions& options = {});

/// Constants entering the reference curves of a sweep.
struct SweepConstants {
  double C = 0.0;
  double log_kappa = 0.0;  ///< general-model growth constant, logarithm
  double kappa_t = 0.0;
  double c = 0.0;          ///< n kappa_t^(-2/n) + (sqrt(2 pi) n + 1) kappa_t + 1
  double K = 0.0;          ///< prefactor |delta|
  double q = 1.0;          ///< exponent of the logarithmic upper curve
};

struct SweepResult {
  int n = 4;
  double t = 0.0;
  std::vector<double> eps_grid;
  std::vector<DistanceEstimate> estimates;
  std::vector<double> local_slopes;       ///< one per adjacent pair
  std::vector<double> lower_bound_curve;  ///< K exp(-c |ln eps|^(2/n))
  std::vector<double> upper_bound_curve;  ///< |ln eps|^(-q)
  SweepConstants constants;
};

/// Estimates E|X^v(t) - X^(v + eps delta)(t)| for each eps.  The grid must be
/// strictly decreasing inside (0, 1/e] and t must lie in (tau, T).
SweepResult sweep_epsilon(const GeneralModel& model, double t, std::span<const double> eps_grid,
                          std::size_t n_paths, std::uint64_t master_seed,
                          const MonteCarloOptions& options = {}, double q = 1.0);

/// (ln m_{i+1} - ln m_i) / (ln e_{i+1} - ln e_i).
std::vector<double> local_slopes(std::span<const double> eps, std::span<const double> mean);

/// Standard error of each local slope by the delta method, including the
/// covariance between neighbouring estimates that share Brownian paths.
std::vector<double> local_slope_errors(const SweepResult& result);

/// Least-squares slope of ln(mean) against ln(eps) over every window of
/// `window` consecutive points.  Throws InvalidArgument for a window < 2, a
/// degenerate window or a nonpositive mean.
std::vector<double> fit_exponent(std::span<const double> eps, std::span<const double> mean,
                                 std::size_t window);
std::vector<double> fit_exponent(const SweepResult& result, std::size_t window);

/// `eps,mean,stderr,aborted,lower_bound,upper_bound,local_slope`; the slope
/// in row i belongs to the pair (i - 1, i) and is empty in the first row.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Constants, slopes and abort counts.  `regime` is "non-hoelder" for n >= 3
/// and "hoelder-consistent" for n = 2, where the lower curve is a power of eps.
nlohmann::json sweep_summary(const SweepResult& result);

/// Simulates X3(tau) from the origin on `n_paths` paths and checks mean,
/// variance and Kolmogorov-Smirnov distance against N(0, 1).
Report stdnormality_test(const AxisAlignedModel& model, std::size_t n_paths, std::uint64_t master_seed,
                         const MonteCarloOptions& options = {});

/// sup |F_N - Phi| for the given sample (sorted in place).
double ks_distance_normal(std::span<double> sample);

}  // namespace sdelab
