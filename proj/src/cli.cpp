#include "sdelab/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "sdelab/bounds.hpp"
#include "sdelab/experiments.hpp"
#include "sdelab/montecarlo.hpp"
#include "sdelab/paths.hpp"
#include "sdelab/random.hpp"
#include "sdelab/solvers.hpp"

namespace sdelab::cli {

namespace {

using nlohmann::json;

std::filesystem::path output_file(const ExperimentConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.output_dir);
  return std::filesystem::path(cfg.output_dir) / name;
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw sdelab::Error("cannot write '" + p.string() + "'");
  return f;
}

int emit(std::ostream& out, const json& j, bool passed) {
  out << j.dump(2) << '\n';
  return passed ? kExitOk : kExitCheckFailed;
}

// Model with the configured shift, or a random one when neither v nor delta is given.
GeneralModel check_model(const ExperimentConfig& cfg) {
  ModelParams prm = cfg.model;
  if (prm.v.empty() && prm.delta.empty()) prm = randomize_shift(prm, cfg.seed);
  return build_general(build_axis_aligned(prm));
}

int verify_bounds(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const AxisAlignedModel axis = build_axis_aligned(cfg.model);
  const GeneralModel general = build_general(axis);
  const LyapunovExponents u{1.0, 2.0 * axis.n()};
  const LyapunovExponents e{cfg.model.p, cfg.model.q};
  std::vector<VerificationReport> reports{
      verify_jacobian_growth(axis, opts.trials, opts.radius, substream_seed(cfg.seed, 1)),
      verify_lyapunov(axis, u, opts.trials, opts.radius, opts.z_radius, substream_seed(cfg.seed, 2)),
      verify_lyapunov(axis, e, opts.trials, opts.radius, opts.z_radius, substream_seed(cfg.seed, 3)),
      verify_jacobian_growth(general, opts.trials, opts.radius, substream_seed(cfg.seed, 4)),
      verify_lyapunov(general, opts.trials, opts.radius, opts.z_radius, substream_seed(cfg.seed, 5)),
      frobenius_bound_check(general.A(), 1000, substream_seed(cfg.seed, 6)),
      frobenius_bound_check(general.B(), 1000, substream_seed(cfg.seed, 7))};
  reports[2].check = "lyapunov_axis_aligned_configured";

  bool passed = true;
  double lyap = 0.0, growth = 0.0;
  json list = json::array();
  for (const auto& r : reports) {
    passed = passed && r.passed();
    if (r.check.starts_with("lyapunov")) lyap = std::max(lyap, r.max_ratio);
    if (r.check.starts_with("jacobian")) growth = std::max(growth, r.max_ratio);
    list.push_back(to_json(r));
  }
  json j{{"check", "verify-bounds"},
         {"passed", passed},
         {"max_lyapunov_ratio", lyap},
         {"max_growth_ratio", growth},
         {"constants",
          {{"C", axis.C()},
           {"kappa5", axis.kappa5()},
           {"varkappa", axis.varkappa()},
           {"log_kappa", general.log_kappa()},
           {"kappa", json_number(general.kappa())}}},
         {"params", {{"trials", opts.trials}, {"radius", opts.radius}, {"z_radius", opts.z_radius}}},
         {"reports", list}};
  return emit(out, j, passed);
}

int lemma21(const CommandOptions& opts, std::ostream& out) {
  std::vector<double> eps;
  for (std::size_t i = 0; i < opts.eps_count; ++i) eps.push_back(opts.eps_max * std::exp(-static_cast<double>(i)));
  const Report r = check_lemma21(opts.lemma_p, opts.lemma_kappa, eps);
  return emit(out, r.to_json(), r.passed());
}

int stdnorm_check(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const AxisAlignedModel axis = build_axis_aligned(cfg.model);
  const double variance = stdnorm_variance(axis.g(), cfg.model.tau);
  const bool variance_ok = std::abs(variance - 1.0) <= 1e-6;
  const Report stat = stdnormality_test(axis, opts.check_paths.value_or(cfg.n_paths), cfg.seed, cfg.mc_options());
  json j{{"check", "stdnorm-check"},
         {"passed", variance_ok && stat.passed()},
         {"variance_quadrature", variance},
         {"variance_passed", variance_ok},
         {"statistical", stat.to_json()}};
  return emit(out, j, variance_ok && stat.passed());
}

int simulate(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const GeneralModel model = build_general(build_axis_aligned(cfg.model));
  Vector x0 = opts.x0.empty() ? model.v() : opts.x0;
  if (x0.size() != model.dim()) throw ConfigError("--x0 must have d entries");
  const TimeGrid grid(cfg.model.T, cfg.steps());
  const BrownianPath W = sample_brownian(grid, model.noise_dim(), cfg.seed, opts.path_index);
  const SolutionPath X =
      cfg.scheme == Scheme::Cascade
          ? transform_solution(solve_cascade_embedded(model.base(), W, model.to_base(x0)), model.B(), model.v())
          : solve_em(model, W, x0, cfg.taming);
  const auto path_file = output_file(cfg, "path.csv");
  const auto noise_file = output_file(cfg, "brownian.csv");
  {
    auto f = open_output(path_file);
    write_csv(f, X);
    auto g = open_output(noise_file);
    write_csv(g, W);
  }
  const auto last = X.at(grid.steps());
  json j{{"check", "simulate"},
         {"passed", true},
         {"scheme", scheme_name(cfg.scheme)},
         {"path_index", opts.path_index},
         {"initial", x0},
         {"final", Vector(last.begin(), last.end())},
         {"files", {path_file.string(), noise_file.string()}}};
  return emit(out, j, true);
}

int sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const GeneralModel model = build_general(build_axis_aligned(cfg.model));
  const std::vector<double> eps = cfg.eps_grid.empty() ? eps_grid_from_exponents(1.0, 6.0, 1.0) : cfg.eps_grid;
  const SweepResult res =
      sweep_epsilon(model, cfg.t_eval, eps, cfg.n_paths, cfg.seed, cfg.mc_options(), cfg.q_upper);

  Report domination;
  domination.check = "lower_bound_domination";
  std::size_t aborted = 0, total = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto& e = res.estimates[i];
    const double lhs = e.mean + 4.0 * e.std_error;
    domination.record((res.lower_bound_curve[i] - lhs) / res.lower_bound_curve[i],
                      {{"eps", eps[i]}, {"mean", e.mean}, {"lower_bound", res.lower_bound_curve[i]}});
    aborted += e.aborted;
    total += e.n_paths;
  }
  const double abort_fraction = static_cast<double>(aborted) / static_cast<double>(total);
  const bool abort_ok = abort_fraction < 1e-3;

  json summary = sweep_summary(res);
  summary["regime"] = cfg.model.n >= 3 ? "non-hoelder" : "hoelder-consistent";
  if (eps.size() >= 3) summary["fitted_exponents"] = fit_exponent(res, 3);
  summary["checks"] = {domination.to_json(),
                       {{"check", "abort_fraction"}, {"value", abort_fraction}, {"passed", abort_ok}}};
  summary["passed"] = domination.passed() && abort_ok;

  {
    auto f = open_output(output_file(cfg, "sweep.csv"));
    write_sweep_csv(f, res);
    auto g = open_output(output_file(cfg, "sweep_summary.json"));
    g << summary.dump(2) << '\n';
  }
  return emit(out, summary, domination.passed() && abort_ok);
}

int transform_check_cmd(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const GeneralModel model = check_model(cfg);
  Vector y0(model.dim(), 0.0);
  y0[3] = 0.1;
  const Report r = transform_check(model, y0, opts.check_paths.value_or(50), opts.check_steps.value_or(4096),
                                   cfg.seed, opts.taming.value_or(false), 5e-3, cfg.threads);
  json j = r.to_json();
  j["v"] = model.v();
  j["delta"] = model.delta();
  return emit(out, j, r.passed());
}

int variation_check_cmd(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const GeneralModel model = check_model(cfg);
  Vector x0 = model.v();
  for (std::size_t i = 0; i < x0.size(); ++i) x0[i] += 0.1 * model.delta()[i];
  const Report r = variation_check(model, x0, opts.check_paths.value_or(20), opts.check_steps.value_or(cfg.steps()),
                                   cfg.seed, 1e-5, 1e-3, cfg.threads);
  json j = r.to_json();
  j["v"] = model.v();
  j["delta"] = model.delta();
  return emit(out, j, r.passed());
}

}  // namespace

int run(std::string_view command, const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  ExperimentConfig resolved = cfg;
  if (opts.taming) resolved.taming = *opts.taming;
  if (command == "verify-bounds") return verify_bounds(resolved, opts, out);
  if (command == "lemma21") return lemma21(opts, out);
  if (command == "stdnorm-check") return stdnorm_check(resolved, opts, out);
  if (command == "simulate") return simulate(resolved, opts, out);
  if (command == "sweep") return sweep(resolved, out);
  if (command == "transform-check") return transform_check_cmd(resolved, opts, out);
  if (command == "variation-check") return variation_check_cmd(resolved, opts, out);
  throw ConfigError("unknown command '" + std::string(command) + "'");
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on an SDE whose solutions depend on the initial value in a non-Hoelder way",
               "sde_lab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, seed, eps_list, eps_max, taming, scheme;
  std::string n, tau, T, d, m, p, q, v, delta, dt, paths, t_eval, q_upper, lemma_p, lemma_kappa, x0, eps_start,
      eps_stop, eps_per, radius, z_radius;
  std::size_t trials = 0, eps_count = 0, path_index = 0, steps = 0;
  std::string output, threads;

  app.add_option("--config", config_path, "JSON config file with flat keys");
  app.add_option("--seed", seed, "master seed (fallback: SDE_LAB_SEED, then the config file)");
  app.add_option("--threads", threads, "worker threads; results do not depend on it");
  app.add_option("--output", output, "output directory");
  app.add_option("--n", n, "power of x3 in the drift");
  app.add_option("--tau", tau, "switch time between the two bumps");
  app.add_option("--T", T, "time horizon");
  app.add_option("--d", d, "state dimension");
  app.add_option("--m", m, "noise dimension");
  app.add_option("--p", p, "Lyapunov exponent p (lemma21: comma list of p)");
  app.add_option("--q", q, "Lyapunov exponent q");
  app.add_option("--v", v, "base point, comma separated");
  app.add_option("--delta", delta, "perturbation direction, comma separated");
  app.add_option("--dt", dt, "time step (must divide T)");
  app.add_option("--paths", paths, "Monte Carlo paths");
  app.add_option("--t", t_eval, "evaluation time of the sweep");
  app.add_option("--q-upper", q_upper, "exponent of the logarithmic upper curve");
  app.add_option("--scheme", scheme, "cascade or em");
  app.add_option("--taming", taming, "on or off (Euler-Maruyama)");
  app.add_option("--eps", eps_list, "explicit eps grid, comma separated");
  app.add_option("--eps-start", eps_start, "first exponent of the eps grid e^-k");
  app.add_option("--eps-stop", eps_stop, "last exponent of the eps grid e^-k");
  app.add_option("--eps-per-decade", eps_per, "grid points per unit exponent");

  for (std::string_view name : kCommands) app.add_subcommand(std::string(name));
  auto* verify = app.get_subcommand("verify-bounds");
  verify->add_option("--trials", trials, "samples per suite");
  verify->add_option("--radius", radius, "half width of the sampling box");
  verify->add_option("--z-radius", z_radius, "radius of the noise-shift ball");
  auto* lem = app.get_subcommand("lemma21");
  lem->add_option("--kappa", lemma_kappa, "comma list of kappa");
  lem->add_option("--eps-max", eps_max, "largest eps (at most 1/e)");
  lem->add_option("--eps-count", eps_count, "number of eps values eps_max e^-i");
  auto* sim = app.get_subcommand("simulate");
  sim->add_option("--x0", x0, "initial value, comma separated (default v)");
  sim->add_option("--path-index", path_index, "Brownian path index");
  for (const char* c : {"transform-check", "variation-check"})
    app.get_subcommand(c)->add_option("--steps", steps, "grid steps over [0, T]");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  CommandOptions opts;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    const bool file_has_seed = [&] {
      if (config_path.empty()) return false;
      std::ifstream in(config_path);
      return json::parse(in).contains("seed");
    }();
    if (!file_has_seed)
      if (const char* env = std::getenv("SDE_LAB_SEED")) seed = seed.empty() ? env : seed;

    json overrides = json::object();
    auto set = [&](const char* key, const std::string& value) {
      if (!value.empty()) overrides[key] = value;
    };
    set("n", n);
    set("tau", tau);
    set("T", T);
    set("d", d);
    set("m", m);
    if (command != "lemma21") set("p", p);
    set("q", q);
    set("v", v);
    set("delta", delta);
    set("dt", dt);
    set("n_paths", paths);
    set("t_eval", t_eval);
    set("q_upper", q_upper);
    set("threads", threads);
    if (!eps_list.empty()) overrides["eps_grid"] = eps_list;
    if (!eps_start.empty() || !eps_stop.empty()) {
      if (eps_start.empty() || eps_stop.empty()) throw ConfigError("--eps-start and --eps-stop go together");
      overrides["eps_grid"] = {{"start_exponent", eps_start},
                               {"stop_exponent", eps_stop},
                               {"per_decade", eps_per.empty() ? std::string("1") : eps_per}};
    }
    if (!output.empty()) overrides["output_dir"] = output;
    if (!scheme.empty()) overrides["scheme"] = scheme;
    if (!seed.empty()) {
      std::uint64_t s = 0;
      const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), s);
      if (ec != std::errc() || ptr != seed.data() + seed.size())
        throw ConfigError("seed must be a nonnegative integer");
      overrides["seed"] = s;
    }
    apply_json(cfg, overrides);
    cfg.validate();

    if (!taming.empty()) {
      if (taming != "on" && taming != "off") throw ConfigError("--taming expects on or off");
      opts.taming = taming == "on";
    }
    if (trials) opts.trials = trials;
    if (!radius.empty()) opts.radius = parse_real(radius);
    if (!z_radius.empty()) opts.z_radius = parse_real(z_radius);
    if (command == "lemma21" && !p.empty()) opts.lemma_p = parse_real_list(p);
    if (!lemma_kappa.empty()) opts.lemma_kappa = parse_real_list(lemma_kappa);
    if (!eps_max.empty()) opts.eps_max = parse_real(eps_max);
    if (eps_count) opts.eps_count = eps_count;
    if (!x0.empty()) opts.x0 = parse_real_list(x0);
    opts.path_index = path_index;
    if (!paths.empty()) opts.check_paths = cfg.n_paths;
    if (steps) opts.check_steps = steps;
    if (!(opts.radius > 0.0) || !(opts.z_radius >= 0.0)) throw ConfigError("radii must be positive");
    if (opts.eps_count < 1) throw ConfigError("--eps-count must be positive");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  }

  try {
    return run(command, cfg, opts, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const std::exception& e) {
    out << json{{"check", command}, {"passed", false}, {"error", e.what()}}.dump(2) << '\n';
    return kExitCheckFailed;
  }
}

}  // namespace sdelab::cli
