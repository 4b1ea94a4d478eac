#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sdelab/kernels.hpp"
#include "sdelab/linalg.hpp"
#include "sdelab/model.hpp"
#include "sdelab/paths.hpp"

namespace sdelab {

/// Discretized solution; states is row-major (steps + 1) x dim.
struct SolutionPath {
  TimeGrid grid;
  std::size_t dim = 0;
  std::vector<double> states;
  Vector initial;

  std::span<const double> at(std::size_t k) const { return {states.data() + k * dim, dim}; }
  std::span<double> at(std::size_t k) { return {states.data() + k * dim, dim}; }
  double component(std::size_t k, std::size_t i) const { return states[k * dim + i]; }
  /// Coordinate i over the grid (zero-based).
  std::vector<double> coordinate(std::size_t i) const;
};

/// Largest Euclidean distance between two paths over the grid.
double max_distance(const SolutionPath& a, const SolutionPath& b);

/// Writes `t,x1,...,xd` CSV.
void write_csv(std::ostream& out, const SolutionPath& path);

/// Cascade solver for the five-dimensional drift on several Brownian paths at
/// once.  All lanes share the first initial coordinate (so that X1 and the
/// f, g' tables are common); the remaining initial coordinates are per lane.
///
///   X1 = x1 + t,  X2 = x2 + W  (exact)
///   X3 = x3 + int_0^t g'(X1) X2 ds  (cumulative trapezoid on the grid)
///   (X4, X5): RK4 with one step per interval, X3 linear between nodes.
class CascadeBatch {
 public:
  CascadeBatch(const AxisAlignedModel& model, const TimeGrid& grid, double x1_initial);

  /// Solves one lane per entry of `w` (each the driving scalar Brownian
  /// column, length steps + 1) from the matching `initial` (x1 entries are
  /// ignored in favour of the shared value).  Throws ExplosionError on a
  /// non-finite state.
  void run(std::span<const std::span<const double>> w, std::span<const Vec5> initial,
           const kernels::KernelTable& kernels = kernels::active());

  std::size_t lanes() const noexcept { return lanes_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  Vec5 state(std::size_t lane, std::size_t k) const;
  /// Lane as a full SolutionPath in R^5.
  SolutionPath path(std::size_t lane) const;

 private:
  const AxisAlignedModel* model_;
  TimeGrid grid_;
  double x1_;
  std::vector<double> times_, gprime_, f_node_, f_mid_;
  std::size_t lanes_ = 0;
  std::vector<double> x2_0_, w_, x3_, x4_, x5_;
};

/// Single-path cascade solve from x0 in R^5 (the model's W must be scalar or
/// its first component is used).
SolutionPath solve_cascade(const AxisAlignedModel& model, const BrownianPath& W,
                           std::span<const double> x0);

/// Cascade solve of the embedded model in R^d: coordinates beyond the fifth
/// stay at their initial values.
SolutionPath solve_cascade_embedded(const AxisAlignedModel& model, const BrownianPath& W,
                                    std::span<const double> y0);

/// Euler-Maruyama on R^d:
///   X_{k+1} = X_k + a(X_k) + sigma dW_k,  a = mu dt  or  mu dt / (1 + dt |mu|)  (tamed).
SolutionPath solve_em(const GeneralModel& model, const BrownianPath& W, std::span<const double> x0,
                      bool taming = true);

/// First variation J' = mu'(X(t)) J, J(0) = h, by RK4 with X linear between nodes.
SolutionPath solve_variation(const GeneralModel& model, const SolutionPath& X,
                             std::span<const double> h);

/// X(t) = B Y(t) + v pointwise.
SolutionPath transform_solution(const SolutionPath& Y, const Matrix& B, std::span<const double> v);

}  // namespace sdelab
