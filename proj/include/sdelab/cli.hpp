#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdelab/config.hpp"

namespace sdelab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitParseError = 2;

/// Per-command settings that are not part of the experiment configuration.
struct CommandOptions {
  // verify-bounds
  std::size_t trials = 100000;
  double radius = 5.0;
  double z_radius = 5.0;
  // lemma21
  std::vector<double> lemma_p{1.0, 2.0, 4.0};
  std::vector<double> lemma_kappa{0.1, 1.0, 10.0};
  double eps_max = 0.36787944117144233;
  std::size_t eps_count = 8;
  // simulate
  std::vector<double> x0;  ///< empty means v
  std::size_t path_index = 0;
  // transform-check, variation-check, stdnorm-check
  std::optional<std::size_t> check_paths;
  std::optional<std::size_t> check_steps;
  std::optional<bool> taming;  ///< overrides the config flag when set
};

inline constexpr std::string_view kCommands[] = {"verify-bounds", "lemma21",         "stdnorm-check",
                                                 "simulate",      "sweep",           "transform-check",
                                                 "variation-check"};

/// Runs one command with a resolved configuration; writes the JSON report
/// to `out` and any files into cfg.output_dir.  Returns 0 when every check
/// passes and 1 otherwise.
int run(std::string_view command, const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out);

/// Full command-line entry point (argument parsing, config file, SDE_LAB_SEED
/// fallback, error mapping to exit codes).
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdelab::cli
