#include "sdelab/report.hpp"

#include <algorithm>
#include <cmath>

namespace sdelab {

namespace {
constexpr std::size_t kMaxFailures = 10;
}

void Report::record(double excess, const nlohmann::json& point) {
  ++grid_size;
  if (!(excess > 0.0) && !std::isnan(excess)) return;
  ++violations;
  max_violation = std::isnan(excess) ? excess : std::max(max_violation, excess);
  if (failures.size() < kMaxFailures) failures.push_back(point);
}

nlohmann::json Report::to_json() const {
  nlohmann::json j{{"check", check},
                   {"params", params},
                   {"max_violation", json_number(max_violation)},
                   {"grid_size", grid_size},
                   {"passed", passed()}};
  if (!passed()) {
    j["violations"] = violations;
    j["failures"] = failures;
  }
  return j;
}

nlohmann::json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

nlohmann::json to_json(const VerificationReport& report) {
  nlohmann::json j{{"check", report.check},
                   {"trials", report.trials},
                   {"violations", report.violations},
                   {"max_ratio", json_number(report.max_ratio)},
                   {"passed", report.passed()}};
  if (!report.counterexamples.empty()) {
    auto& list = j["counterexamples"] = nlohmann::json::array();
    for (const auto& c : report.counterexamples)
      list.push_back({{"x", c.x}, {"h", c.h}, {"lhs", json_number(c.lhs)}, {"rhs", json_number(c.rhs)}});
  }
  return j;
}

}  // namespace sdelab
