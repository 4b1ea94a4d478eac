#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

#include "sdelab/model.hpp"

namespace sdelab {

/// Outcome of a deterministic check over a grid of points.
///
/// max_violation is the largest relative excess of the violated side over
/// the bound (0 when nothing is violated).
struct Report {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  double max_violation = 0.0;
  std::size_t grid_size = 0;
  std::size_t violations = 0;
  nlohmann::json failures = nlohmann::json::array();  ///< first few violating points

  bool passed() const noexcept { return violations == 0; }

  /// Records one point; `excess` > 0 means the inequality failed.
  void record(double excess, const nlohmann::json& point);

  /// {check, params, max_violation, grid_size, passed} plus failure detail.
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const VerificationReport& report);

/// JSON number, or the strings "inf", "-inf", "nan" for non-finite input.
nlohmann::json json_number(double x);

}  // namespace sdelab
