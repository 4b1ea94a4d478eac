// AVX2 variants of the cascade kernels, four lanes per register.  Compiled
// with per-function target attributes so the rest of this translation unit
// (and any inline code it instantiates) stays baseline x86-64.

#include <immintrin.h>

#include "sdelab/kernels.hpp"

#define SDELAB_AVX2 __attribute__((target("avx2")))

namespace sdelab::kernels::detail {

namespace {

SDELAB_AVX2 inline __m256d ipow4(__m256d x, int n) {
  __m256d r = x;
  for (int i = 1; i < n; ++i) r = _mm256_mul_pd(r, x);
  return r;
}

}  // namespace

SDELAB_AVX2 void cascade_x3_avx2(const CascadeTables& tab, const double* w, const double* x2_0,
                                 const double* x3_0, double* x3, std::size_t lanes) {
  const double* gp = tab.gprime.data();
  const std::size_t steps = tab.steps;
  const __m256d half_dt = _mm256_set1_pd(0.5 * tab.dt);
  std::size_t l = 0;
  for (; l + 4 <= lanes; l += 4) {
    const __m256d off = _mm256_loadu_pd(x2_0 + l);
    __m256d prev = _mm256_mul_pd(_mm256_set1_pd(gp[0]), _mm256_add_pd(off, _mm256_loadu_pd(w + l)));
    __m256d acc = _mm256_loadu_pd(x3_0 + l);
    _mm256_storeu_pd(x3 + l, acc);
    for (std::size_t k = 1; k <= steps; ++k) {
      const __m256d wk = _mm256_loadu_pd(w + k * lanes + l);
      const __m256d cur = _mm256_mul_pd(_mm256_set1_pd(gp[k]), _mm256_add_pd(off, wk));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(half_dt, _mm256_add_pd(prev, cur)));
      _mm256_storeu_pd(x3 + k * lanes + l, acc);
      prev = cur;
    }
  }
  cascade_x3_lanes(tab, w, x2_0, x3_0, x3, lanes, l, lanes);
}

SDELAB_AVX2 void cascade_rk4_avx2(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                                  std::size_t lanes) {
  const double* fnode = tab.f_node.data();
  const double* fmid = tab.f_mid.data();
  const std::size_t steps = tab.steps;
  const int n = tab.n;
  const __m256d dt = _mm256_set1_pd(tab.dt);
  const __m256d half_dt = _mm256_set1_pd(0.5 * tab.dt);
  const __m256d sixth_dt = _mm256_set1_pd(tab.dt / 6.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d two = _mm256_set1_pd(2.0);

  std::size_t l = 0;
  for (; l + 4 <= lanes; l += 4) {
    __m256d a = _mm256_loadu_pd(x4 + l);
    __m256d b = _mm256_loadu_pd(x5 + l);
    for (std::size_t k = 0; k < steps; ++k) {
      const __m256d f0 = _mm256_set1_pd(fnode[k]);
      const __m256d fm = _mm256_set1_pd(fmid[k]);
      const __m256d f1 = _mm256_set1_pd(fnode[k + 1]);
      const __m256d z0 = _mm256_loadu_pd(x3 + k * lanes + l);
      const __m256d z1 = _mm256_loadu_pd(x3 + (k + 1) * lanes + l);
      const __m256d zm = _mm256_mul_pd(half, _mm256_add_pd(z0, z1));
      const __m256d p0 = ipow4(z0, n);
      const __m256d pm = ipow4(zm, n);
      const __m256d p1 = ipow4(z1, n);

      const __m256d k1a = _mm256_mul_pd(_mm256_mul_pd(f0, a), b);
      const __m256d k1b = _mm256_mul_pd(f0, _mm256_sub_pd(p0, _mm256_mul_pd(a, a)));
      const __m256d a2 = _mm256_add_pd(a, _mm256_mul_pd(half_dt, k1a));
      const __m256d b2 = _mm256_add_pd(b, _mm256_mul_pd(half_dt, k1b));
      const __m256d k2a = _mm256_mul_pd(_mm256_mul_pd(fm, a2), b2);
      const __m256d k2b = _mm256_mul_pd(fm, _mm256_sub_pd(pm, _mm256_mul_pd(a2, a2)));
      const __m256d a3 = _mm256_add_pd(a, _mm256_mul_pd(half_dt, k2a));
      const __m256d b3 = _mm256_add_pd(b, _mm256_mul_pd(half_dt, k2b));
      const __m256d k3a = _mm256_mul_pd(_mm256_mul_pd(fm, a3), b3);
      const __m256d k3b = _mm256_mul_pd(fm, _mm256_sub_pd(pm, _mm256_mul_pd(a3, a3)));
      const __m256d a4 = _mm256_add_pd(a, _mm256_mul_pd(dt, k3a));
      const __m256d b4 = _mm256_add_pd(b, _mm256_mul_pd(dt, k3b));
      const __m256d k4a = _mm256_mul_pd(_mm256_mul_pd(f1, a4), b4);
      const __m256d k4b = _mm256_mul_pd(f1, _mm256_sub_pd(p1, _mm256_mul_pd(a4, a4)));

      const __m256d sa = _mm256_add_pd(
          _mm256_add_pd(_mm256_add_pd(k1a, _mm256_mul_pd(two, k2a)), _mm256_mul_pd(two, k3a)), k4a);
      const __m256d sb = _mm256_add_pd(
          _mm256_add_pd(_mm256_add_pd(k1b, _mm256_mul_pd(two, k2b)), _mm256_mul_pd(two, k3b)), k4b);
      a = _mm256_add_pd(a, _mm256_mul_pd(sixth_dt, sa));
      b = _mm256_add_pd(b, _mm256_mul_pd(sixth_dt, sb));
      _mm256_storeu_pd(x4 + (k + 1) * lanes + l, a);
      _mm256_storeu_pd(x5 + (k + 1) * lanes + l, b);
    }
  }
  cascade_rk4_lanes(tab, x3, x4, x5, lanes, l, lanes);
}

}  // namespace sdelab::kernels::detail
