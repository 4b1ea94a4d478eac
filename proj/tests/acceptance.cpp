// Runs the acceptance criteria at their stated budgets and tolerances and
// prints one PASS/FAIL line per criterion.
//
// Usage: acceptance [--expect-fail ID]... [--only ID]...
// The exit status is 0 when every criterion passes or fails only among the
// ids passed with --expect-fail; FAIL lines are printed either way.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sdelab/bounds.hpp"
#include "sdelab/experiments.hpp"
#include "sdelab/model.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/random.hpp"

using namespace sdelab;

namespace {

constexpr std::uint64_t kSeed = 42;

// E|X^0(0.9) - X^(eps e4)(0.9)| for eps = e^-1..e^-6 from an independent
// quadrature over Z = X3(tau) of the reduced (X4, X5) system.
constexpr double kOracleMean[] = {0.84451427, 0.45577594, 0.27183085, 0.17760108, 0.1245134, 0.09171494};
constexpr double kOracleSlope[] = {0.61676031, 0.51682132, 0.4256401, 0.35512655, 0.30572805};

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [violated: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned worker_threads() { return std::max(2u, std::thread::hardware_concurrency()); }

Outcome criterion1() {
  Outcome o;
  const auto start = Clock::now();
  std::vector<double> eps;
  for (int i = 1; i <= 8; ++i) eps.push_back(std::exp(-i));
  const std::vector<double> p{1, 2, 4}, kappa{0.1, 1, 10};
  const Report r = check_lemma21(p, kappa, eps);
  const double secs = seconds_since(start);
  o.detail << "grid=" << r.grid_size << " violations=" << r.violations << " time=" << secs << "s";
  o.require(r.grid_size == 72, "grid of 72 points");
  o.require(r.passed(), "zero violations");
  o.require(secs < 10.0, "runtime < 10 s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto start = Clock::now();
  const AxisAlignedModel axis = build_axis_aligned({});
  const double var_quad = stdnorm_variance(axis.g(), axis.params().tau);
  MonteCarloOptions mc;
  mc.threads = 1;
  const std::size_t n = 100000;
  const Report r = stdnormality_test(axis, n, kSeed, mc);
  const double var = r.params["variance"].get<double>();
  const double ks = r.params["ks"].get<double>();
  const double ks_crit = 1.628 / std::sqrt(static_cast<double>(n));
  const double secs = seconds_since(start);
  o.detail << "quadrature_variance=" << std::setprecision(12) << var_quad << std::setprecision(6)
           << " sample_variance=" << var << " ks=" << ks << " ks_crit_1pct=" << ks_crit << " time=" << secs << "s";
  o.require(std::abs(var_quad - 1.0) <= 1e-6, "quadrature variance 1 +- 1e-6");
  o.require(var >= 0.97 && var <= 1.03, "sample variance in [0.97, 1.03]");
  o.require(ks < ks_crit, "KS below 1% critical value");
  o.require(secs < 60.0, "runtime < 60 s");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto start = Clock::now();
  const AxisAlignedModel axis = build_axis_aligned({});
  const std::size_t n = 100000;
  const std::vector<VerificationReport> reports{
      verify_jacobian_growth(axis, n, 5.0, substream_seed(kSeed, 1)),
      verify_lyapunov(axis, {1.0, 8.0}, n, 5.0, 5.0, substream_seed(kSeed, 2)),
      verify_lyapunov(axis, {2.0, 16.0}, n, 5.0, 5.0, substream_seed(kSeed, 3))};
  const double secs = seconds_since(start);
  std::size_t violations = 0;
  for (const auto& r : reports) {
    violations += r.violations;
    o.detail << r.check << ":max_ratio=" << r.max_ratio << " ";
  }
  o.detail << "violations=" << violations << " time=" << secs << "s";
  o.require(violations == 0, "zero violations");
  o.require(secs < 30.0, "runtime < 30 s");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const AxisAlignedModel axis = build_axis_aligned({});
  const Report jac = jacobian_fd_check(axis, 1000, 5.0, kSeed, 1e-5);
  const GeneralModel general = build_general(build_axis_aligned(randomize_shift({}, kSeed)));
  Vector x0 = general.v();
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += 0.1 * general.delta()[i];
  const Report var = variation_check(general, x0, 20, 2048, kSeed, 1e-5, 1e-3, worker_threads());
  o.detail << "jacobian_points=" << jac.grid_size << " jacobian_violations=" << jac.violations
           << " jacobian_max_rel_error=" << jac.params["max_rel_error"].get<double>()
           << " (richardson " << jac.params["max_rel_error_richardson"].get<double>() << ")"
           << " variation_paths=" << var.grid_size << " variation_violations=" << var.violations;
  o.require(jac.passed(), "jacobian rel. error <= 1e-5 at 1000 points");
  o.require(var.passed(), "variation rel. error <= 1e-3 on 20 paths");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const AxisAlignedModel axis = build_axis_aligned({});
  const KappaSchedule schedule(axis.f(), axis.params().tau);
  const TimeGrid grid(axis.params().T, 2048);
  std::size_t violations = 0, checked = 0;
  for (double eps : {0.2, 0.05, 0.01}) {
    for (std::uint64_t i = 0; i < 100; ++i) {
      const SolutionPath x = solve_cascade(axis, sample_brownian(grid, 1, kSeed, i), Vector{0, 0, 0, eps, 0});
      const Report r = sandwich_check(x, eps, schedule, axis.n(), 1e-3);
      violations += r.violations;
      checked += r.grid_size;
    }
  }
  o.detail << "paths=300 grid_points=" << checked << " violations=" << violations;
  o.require(violations == 0, "zero violations");
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (std::size_t d : {5u, 7u}) {
    ModelParams prm;
    prm.d = d;
    const GeneralModel model = build_general(build_axis_aligned(randomize_shift(prm, substream_seed(kSeed, d))));
    Vector y0(d, 0.0);
    y0[3] = 0.1;
    const Report r = transform_check(model, y0, 50, 4096, kSeed, false, 5e-3, worker_threads());
    o.detail << " d=" << d << ":max_distance=" << r.params["max_distance"].dump()
             << ",mean_distance=" << r.params["mean_distance_fine"].dump()
             << ",ratio=" << r.params["halving_ratio"].dump() << " ";
    o.require(r.passed(), "d=" + std::to_string(d) + " distance <= 5e-3 and ratio in [1.5, 2.5]");
  }
  return o;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  write_sweep_csv(os, r);
  return os.str();
}

SweepResult default_sweep(unsigned threads) {
  const GeneralModel model = build_general(build_axis_aligned({}));
  std::vector<double> eps;
  for (int i = 1; i <= 6; ++i) eps.push_back(std::exp(-i));
  MonteCarloOptions mc;
  mc.threads = threads;
  return sweep_epsilon(model, 0.9, eps, 10000, kSeed, mc);
}

SweepResult g_sweep_single;

Outcome criterion7() {
  Outcome o;
  const auto start = Clock::now();
  g_sweep_single = default_sweep(1);
  const double secs = seconds_since(start);
  const SweepResult& r = g_sweep_single;
  const auto se = local_slope_errors(r);

  bool dominated = true;
  for (std::size_t i = 0; i < r.estimates.size(); ++i)
    dominated = dominated && r.estimates[i].mean + 4.0 * r.estimates[i].std_error >= r.lower_bound_curve[i];

  bool decreasing = true;
  for (std::size_t i = 1; i < r.local_slopes.size(); ++i) decreasing = decreasing && r.local_slopes[i] < r.local_slopes[i - 1];
  const double ratio = r.local_slopes.back() / r.local_slopes.front();

  bool near_oracle = true;
  for (std::size_t i = 0; i < r.local_slopes.size(); ++i)
    near_oracle = near_oracle && std::abs(r.local_slopes[i] - kOracleSlope[i]) <= 4.0 * se[i];

  o.detail << std::setprecision(4) << "means=[";
  for (std::size_t i = 0; i < r.estimates.size(); ++i)
    o.detail << (i ? "," : "") << r.estimates[i].mean << "(" << kOracleMean[i] << ")";
  o.detail << "] slopes=[";
  for (std::size_t i = 0; i < r.local_slopes.size(); ++i)
    o.detail << (i ? "," : "") << r.local_slopes[i] << "+-" << se[i] << "(" << kOracleSlope[i] << ")";
  o.detail << "] final/initial=" << ratio << " time=" << secs << "s";

  o.require(dominated, "(a) estimate + 4 SE >= lower curve");
  o.require(decreasing, "(b) local exponents decrease");
  o.require(ratio <= 0.5, "(b) final <= 0.5 x initial");
  o.require(near_oracle, "(b) each slope within 4 SE of the oracle");
  o.require(secs < 600.0, "runtime < 10 min single-threaded");
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::size_t cases = 0, violations = 0;
  bool k_ok = true;
  double min_log_k = 0.0;
  for (double c : {0.5, 1.0, 2.0, 5.0})
    for (double alpha : {0.5, 1.0, 2.0})
      for (double beta : {0.2, 0.5, 0.8})
        for (double R : {0.5, 1.0}) {
          HoelderCompParams prm{c, R, alpha, beta};
          prm.log_K = hoeldercomp_log_K(c, R, alpha, beta);
          // K itself can sit below the double range, so (0, 1] is checked as ln K in (-inf, 0].
          k_ok = k_ok && std::isfinite(prm.log_K) && prm.log_K <= 0.0;
          min_log_k = std::min(min_log_k, prm.log_K);
          const Report r = check_hoeldercomp(prm, hoeldercomp_log_grid(prm, 10000));
          violations += r.violations;
          ++cases;
        }
  o.detail << "parameter_sets=" << cases << " min_ln_K=" << min_log_k << " violations=" << violations;
  o.require(k_ok, "K in (0, 1]");
  o.require(violations == 0, "zero violations");
  return o;
}

Outcome criterion9() {
  Outcome o;
  if (g_sweep_single.estimates.empty()) g_sweep_single = default_sweep(1);
  const unsigned threads = worker_threads();
  const std::string a = sweep_csv(g_sweep_single);
  const std::string b = sweep_csv(default_sweep(threads));
  o.detail << "threads=1 vs " << threads << " bytes=" << a.size();
  o.require(!a.empty() && a == b, "byte-identical CSV");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--expect-fail" || arg == "--only") && i + 1 < argc) {
      (arg == "--only" ? only : expect_fail).insert(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--expect-fail ID]... [--only ID]...\n";
      return 2;
    }
  }

  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const bool expected = expect_fail.count(id) > 0;
    std::cout << "criterion " << id << ": " << (o.passed ? "PASS" : "FAIL")
              << (!o.passed && expected ? " (expected)" : "") << "  " << o.detail.str() << std::endl;
    if (!o.passed && !expected) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
