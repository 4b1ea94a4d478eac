#pragma once

// Data-parallel inner loops of the cascade solver.
//
// Every kernel advances several independent "lanes" (one lane per Brownian
// path) in lockstep.  Per-step arrays are interleaved: element (k, lane)
// lives at index k * lanes + lane.  The scalar kernels are the reference;
// the SIMD variants perform the same floating-point operations in the same
// order on several lanes at once, so both produce bit-identical results.
// The library is compiled with -ffp-contract=off to keep it that way.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sdelab::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view name(Isa isa) noexcept;

/// Deterministic tables shared by all lanes of one cascade solve.
struct CascadeTables {
  std::span<const double> gprime;  ///< g'(X1(t_k)), k = 0..steps
  std::span<const double> f_node;  ///< f(X1(t_k)), k = 0..steps
  std::span<const double> f_mid;   ///< f(X1(t_k + dt/2)), k = 0..steps-1
  std::size_t steps = 0;
  double dt = 0.0;
  int n = 4;
};

/// X3 by cumulative trapezoid:
///   X3(t_0) = x3_0, X3(t_{k+1}) = X3(t_k) + dt/2 (I_k + I_{k+1}),
///   I_k = g'(X1(t_k)) (x2_0 + W(t_k)).
/// `w` and `x3` are interleaved (steps + 1) x lanes; x2_0, x3_0 have `lanes` entries.
using CascadeX3Fn = void (*)(const CascadeTables& tab, const double* w, const double* x2_0,
                             const double* x3_0, double* x3, std::size_t lanes);

/// Classical RK4, one step per grid interval, for
///   X4' = f X4 X5,  X5' = f (X3^n - X4^2)
/// with X3 linear between nodes.  x4, x5 rows 0 hold the initial values on
/// entry; all rows are filled on exit.
using CascadeRk4Fn = void (*)(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                              std::size_t lanes);

struct KernelTable {
  Isa isa;
  CascadeX3Fn cascade_x3;
  CascadeRk4Fn cascade_rk4;
};

/// Reference implementation.
const KernelTable& scalar_table() noexcept;

/// Kernels selected for this process: the widest ISA that is both compiled
/// in and supported by the CPU, unless SDELAB_SIMD=scalar is set or
/// force_isa() was called.
const KernelTable& active() noexcept;

/// ISAs usable on this machine (always includes Scalar).
std::vector<Isa> available() noexcept;

/// Table for a specific ISA; nullptr if it is not available here.
const KernelTable* table_for(Isa isa) noexcept;

/// Overrides the selection for the rest of the process (tests, benchmarks).
/// Returns false if the ISA is not available.
bool force_isa(Isa isa) noexcept;

namespace detail {
// Reference loops restricted to lanes [begin, end); SIMD variants use them for tails.
void cascade_x3_lanes(const CascadeTables& tab, const double* w, const double* x2_0,
                      const double* x3_0, double* x3, std::size_t lanes, std::size_t begin,
                      std::size_t end);
void cascade_rk4_lanes(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                       std::size_t lanes, std::size_t begin, std::size_t end);
void cascade_x3_scalar(const CascadeTables& tab, const double* w, const double* x2_0,
                       const double* x3_0, double* x3, std::size_t lanes);
void cascade_rk4_scalar(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                        std::size_t lanes);
#if defined(SDELAB_HAVE_AVX2)
void cascade_x3_avx2(const CascadeTables& tab, const double* w, const double* x2_0,
                     const double* x3_0, double* x3, std::size_t lanes);
void cascade_rk4_avx2(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                      std::size_t lanes);
#endif
#if defined(SDELAB_HAVE_NEON)
void cascade_x3_neon(const CascadeTables& tab, const double* w, const double* x2_0,
                     const double* x3_0, double* x3, std::size_t lanes);
void cascade_rk4_neon(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                      std::size_t lanes);
#endif
}  // namespace detail

}  // namespace sdelab::kernels
