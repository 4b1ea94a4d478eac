#pragma once

// End-to-end consistency experiments shared by the command-line tool and the
// acceptance suite.

#include <cstddef>
#include <cstdint>
#include <span>

#include "sdelab/model.hpp"
#include "sdelab/report.hpp"

namespace sdelab {

/// Copy of `params` with v uniform in [-1, 1]^d and delta of uniform
/// direction and norm uniform in [0.5, 1], drawn from `seed`.
ModelParams randomize_shift(ModelParams params, std::uint64_t seed);

/// Compares B Y + v (Y the cascade solution from y0) with Euler-Maruyama on
/// the transformed model from B y0 + v, on shared Brownian paths at `steps`
/// and at steps / 2.  Passes when the largest max-over-grid distance at the
/// fine step is below `tolerance` and the mean discrepancy shrinks by a factor
/// in [1.5, 2.5] when the step is halved.
Report transform_check(const GeneralModel& model, std::span<const double> y0, std::size_t n_paths,
                       std::size_t steps, std::uint64_t seed, bool taming = false,
                       double tolerance = 5e-3, unsigned threads = 1);

/// Compares the first variation along X^x with forward differences
/// (X^(x + fd h) - X^x) / fd of cascade-transformed flows on shared paths, h a
/// random unit vector per path.  The error of a path is
/// max_k |J_k - D_k| / max_k |J_k|.
Report variation_check(const GeneralModel& model, std::span<const double> x0, std::size_t n_paths,
                       std::size_t steps, std::uint64_t seed, double fd = 1e-5, double tolerance = 1e-3,
                       unsigned threads = 1);

/// Central differences of nu against the closed-form Jacobian at points with
/// x1 uniform in [-0.25, T + 0.25] and the rest uniform in [-r, r].  The
/// error at a point is max_ij |J_ij - D_ij| / max_ij |J_ij|.  The same error
/// against the Richardson extrapolation of steps h and h/2 is reported as
/// max_rel_error_richardson (diagnostic only).
Report jacobian_fd_check(const AxisAlignedModel& model, std::size_t points, double box_radius,
                         std::uint64_t seed, double tolerance = 1e-5);

}  // namespace sdelab
