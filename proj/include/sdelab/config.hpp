#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sdelab/errors.hpp"

#include "sdelab/model.hpp"
#include "sdelab/montecarlo.hpp"

namespace sdelab {

/// Raised for malformed configuration files or values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Everything one command-line run needs.  JSON keys are flat and mirror the
/// field names (model fields at top level); `q` is the Lyapunov exponent and
/// `q_upper` the exponent of the logarithmic upper curve.
struct ExperimentConfig {
  ModelParams model;
  double dt = 1.0 / 2048.0;
  std::size_t n_paths = 10000;
  std::vector<double> eps_grid;  ///< resolved; defaults to e^-1 ... e^-6
  double t_eval = 0.9;
  std::uint64_t seed = 42;
  std::string output_dir = ".";
  bool taming = true;
  double q_upper = 1.0;
  Scheme scheme = Scheme::Cascade;
  unsigned threads = 1;

  /// Grid steps over [0, T]; throws ConfigError unless T / dt is an integer.
  std::size_t steps() const;
  MonteCarloOptions mc_options() const;
  /// Throws ConfigError when an invariant fails.
  void validate() const;
};

/// e^-start, ..., e^-stop with `per_unit` points per unit of exponent.
std::vector<double> eps_grid_from_exponents(double start_exponent, double stop_exponent, double per_unit);

/// Applies keys of `j` onto `cfg`; unknown keys are rejected.
void apply_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Parses reals written as numbers or simple expressions: "0.25", "e",
/// "1/e", "e^-3", "exp(-2)", "pi/4".
double parse_real(std::string_view text);
/// Comma-separated list of parse_real values.
std::vector<double> parse_real_list(std::string_view text);

Scheme parse_scheme(std::string_view text);
std::string_view scheme_name(Scheme s);

}  // namespace sdelab
