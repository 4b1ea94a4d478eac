#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdelab {

/// Uniform grid 0 = t_0 < ... < t_steps = T.
class TimeGrid {
 public:
  /// Throws InvalidArgument unless T > 0 and steps >= 1.
  TimeGrid(double T, std::size_t steps);

  double T() const noexcept { return T_; }
  std::size_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return T_ / static_cast<double>(steps_); }
  /// t_k; t_steps is exactly T.
  double time(std::size_t k) const noexcept {
    return k == steps_ ? T_ : static_cast<double>(k) * dt();
  }
  /// Index k with t_k == t (within half a step); throws DomainError otherwise.
  std::size_t index_of(double t) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double T_;
  std::size_t steps_;
};

/// m-dimensional Brownian motion sampled on a grid; values is row-major
/// (steps + 1) x m with the first row zero.
struct BrownianPath {
  TimeGrid grid;
  std::size_t m = 1;
  std::vector<double> values;

  std::span<const double> at(std::size_t k) const { return {values.data() + k * m, m}; }
  double component(std::size_t k, std::size_t j) const { return values[k * m + j]; }
  /// Column j as a contiguous copy (length steps + 1).
  std::vector<double> column(std::size_t j) const;
};

/// Brownian path fully determined by (master_seed, path_index).  Increments
/// are N(0, dt) and independent across steps, components and path indices.
BrownianPath sample_brownian(const TimeGrid& grid, std::size_t m, std::uint64_t master_seed,
                             std::uint64_t path_index);

/// The same path observed on every `factor`-th node (steps must divide).
BrownianPath coarsen(const BrownianPath& path, std::size_t factor);

/// Writes `t,w1,...,wm` CSV.
void write_csv(std::ostream& out, const BrownianPath& path);

}  // namespace sdelab
