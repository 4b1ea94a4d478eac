#include "sdelab/paths.hpp"

#include <cmath>
#include <ostream>

#include "sdelab/errors.hpp"
#include "sdelab/format.hpp"
#include "sdelab/random.hpp"

namespace sdelab {

TimeGrid::TimeGrid(double T, std::size_t steps) : T_(T), steps_(steps) {
  if (!std::isfinite(T) || !(T > 0.0)) throw InvalidArgument("time grid requires T > 0");
  if (steps < 1) throw InvalidArgument("time grid requires at least one step");
}

std::size_t TimeGrid::index_of(double t) const {
  const double k = std::round(t / dt());
  if (!(k >= 0.0 && k <= static_cast<double>(steps_)) || std::abs(k * dt() - t) > 1e-9 * std::max(1.0, T_))
    throw DomainError("time is not a grid point");
  return static_cast<std::size_t>(k);
}

std::vector<double> BrownianPath::column(std::size_t j) const {
  std::vector<double> c(grid.steps() + 1);
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = values[k * m + j];
  return c;
}

BrownianPath sample_brownian(const TimeGrid& grid, std::size_t m, std::uint64_t master_seed,
                             std::uint64_t path_index) {
  if (m < 1) throw InvalidArgument("Brownian path needs at least one component");
  BrownianPath path{grid, m, std::vector<double>((grid.steps() + 1) * m, 0.0)};
  Rng rng(substream_seed(master_seed, path_index));
  const double sd = std::sqrt(grid.dt());
  for (std::size_t k = 1; k <= grid.steps(); ++k)
    for (std::size_t j = 0; j < m; ++j)
      path.values[k * m + j] = path.values[(k - 1) * m + j] + sd * rng.normal();
  return path;
}

BrownianPath coarsen(const BrownianPath& path, std::size_t factor) {
  if (factor < 1 || path.grid.steps() % factor != 0)
    throw InvalidArgument("coarsen: factor must divide the number of steps");
  const std::size_t steps = path.grid.steps() / factor;
  BrownianPath out{TimeGrid(path.grid.T(), steps), path.m, std::vector<double>((steps + 1) * path.m)};
  for (std::size_t k = 0; k <= steps; ++k)
    for (std::size_t j = 0; j < path.m; ++j) out.values[k * path.m + j] = path.component(k * factor, j);
  return out;
}

void write_csv(std::ostream& out, const BrownianPath& path) {
  out << "t";
  for (std::size_t j = 0; j < path.m; ++j) out << ",w" << (j + 1);
  out << "\n";
  for (std::size_t k = 0; k <= path.grid.steps(); ++k) {
    out << fmt_double(path.grid.time(k));
    for (std::size_t j = 0; j < path.m; ++j) out << "," << fmt_double(path.component(k, j));
    out << "\n";
  }
}

}  // namespace sdelab
