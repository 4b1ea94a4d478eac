// NEON variants of the cascade kernels, two lanes per register.

#include <arm_neon.h>

#include "sdelab/kernels.hpp"

namespace sdelab::kernels::detail {

namespace {

inline float64x2_t ipow2(float64x2_t x, int n) {
  float64x2_t r = x;
  for (int i = 1; i < n; ++i) r = vmulq_f64(r, x);
  return r;
}

}  // namespace

void cascade_x3_neon(const CascadeTables& tab, const double* w, const double* x2_0,
                     const double* x3_0, double* x3, std::size_t lanes) {
  const double* gp = tab.gprime.data();
  const float64x2_t half_dt = vdupq_n_f64(0.5 * tab.dt);
  std::size_t l = 0;
  for (; l + 2 <= lanes; l += 2) {
    const float64x2_t off = vld1q_f64(x2_0 + l);
    float64x2_t prev = vmulq_f64(vdupq_n_f64(gp[0]), vaddq_f64(off, vld1q_f64(w + l)));
    float64x2_t acc = vld1q_f64(x3_0 + l);
    vst1q_f64(x3 + l, acc);
    for (std::size_t k = 1; k <= tab.steps; ++k) {
      const float64x2_t cur = vmulq_f64(vdupq_n_f64(gp[k]), vaddq_f64(off, vld1q_f64(w + k * lanes + l)));
      acc = vaddq_f64(acc, vmulq_f64(half_dt, vaddq_f64(prev, cur)));
      vst1q_f64(x3 + k * lanes + l, acc);
      prev = cur;
    }
  }
  cascade_x3_lanes(tab, w, x2_0, x3_0, x3, lanes, l, lanes);
}

void cascade_rk4_neon(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                      std::size_t lanes) {
  const double* fnode = tab.f_node.data();
  const double* fmid = tab.f_mid.data();
  const int n = tab.n;
  const float64x2_t dt = vdupq_n_f64(tab.dt);
  const float64x2_t half_dt = vdupq_n_f64(0.5 * tab.dt);
  const float64x2_t sixth_dt = vdupq_n_f64(tab.dt / 6.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t two = vdupq_n_f64(2.0);

  std::size_t l = 0;
  for (; l + 2 <= lanes; l += 2) {
    float64x2_t a = vld1q_f64(x4 + l);
    float64x2_t b = vld1q_f64(x5 + l);
    for (std::size_t k = 0; k < tab.steps; ++k) {
      const float64x2_t f0 = vdupq_n_f64(fnode[k]);
      const float64x2_t fm = vdupq_n_f64(fmid[k]);
      const float64x2_t f1 = vdupq_n_f64(fnode[k + 1]);
      const float64x2_t z0 = vld1q_f64(x3 + k * lanes + l);
      const float64x2_t z1 = vld1q_f64(x3 + (k + 1) * lanes + l);
      const float64x2_t zm = vmulq_f64(half, vaddq_f64(z0, z1));
      const float64x2_t p0 = ipow2(z0, n);
      const float64x2_t pm = ipow2(zm, n);
      const float64x2_t p1 = ipow2(z1, n);

      const float64x2_t k1a = vmulq_f64(vmulq_f64(f0, a), b);
      const float64x2_t k1b = vmulq_f64(f0, vsubq_f64(p0, vmulq_f64(a, a)));
      const float64x2_t a2 = vaddq_f64(a, vmulq_f64(half_dt, k1a));
      const float64x2_t b2 = vaddq_f64(b, vmulq_f64(half_dt, k1b));
      const float64x2_t k2a = vmulq_f64(vmulq_f64(fm, a2), b2);
      const float64x2_t k2b = vmulq_f64(fm, vsubq_f64(pm, vmulq_f64(a2, a2)));
      const float64x2_t a3 = vaddq_f64(a, vmulq_f64(half_dt, k2a));
      const float64x2_t b3 = vaddq_f64(b, vmulq_f64(half_dt, k2b));
      const float64x2_t k3a = vmulq_f64(vmulq_f64(fm, a3), b3);
      const float64x2_t k3b = vmulq_f64(fm, vsubq_f64(pm, vmulq_f64(a3, a3)));
      const float64x2_t a4 = vaddq_f64(a, vmulq_f64(dt, k3a));
      const float64x2_t b4 = vaddq_f64(b, vmulq_f64(dt, k3b));
      const float64x2_t k4a = vmulq_f64(vmulq_f64(f1, a4), b4);
      const float64x2_t k4b = vmulq_f64(f1, vsubq_f64(p1, vmulq_f64(a4, a4)));

      const float64x2_t sa =
          vaddq_f64(vaddq_f64(vaddq_f64(k1a, vmulq_f64(two, k2a)), vmulq_f64(two, k3a)), k4a);
      const float64x2_t sb =
          vaddq_f64(vaddq_f64(vaddq_f64(k1b, vmulq_f64(two, k2b)), vmulq_f64(two, k3b)), k4b);
      a = vaddq_f64(a, vmulq_f64(sixth_dt, sa));
      b = vaddq_f64(b, vmulq_f64(sixth_dt, sb));
      vst1q_f64(x4 + (k + 1) * lanes + l, a);
      vst1q_f64(x5 + (k + 1) * lanes + l, b);
    }
  }
  cascade_rk4_lanes(tab, x3, x4, x5, lanes, l, lanes);
}

}  // namespace sdelab::kernels::detail
