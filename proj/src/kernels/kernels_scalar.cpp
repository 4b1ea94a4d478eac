#include "sdelab/kernels.hpp"

namespace sdelab::kernels::detail {

namespace {

inline double ipow(double x, int n) {
  double r = x;
  for (int i = 1; i < n; ++i) r = r * x;
  return r;
}

}  // namespace

void cascade_x3_lanes(const CascadeTables& tab, const double* w, const double* x2_0,
                      const double* x3_0, double* x3, std::size_t lanes, std::size_t begin,
                      std::size_t end) {
  const double half_dt = 0.5 * tab.dt;
  for (std::size_t l = begin; l < end; ++l) {
    double prev = tab.gprime[0] * (x2_0[l] + w[l]);
    double acc = x3_0[l];
    x3[l] = acc;
    for (std::size_t k = 1; k <= tab.steps; ++k) {
      const double cur = tab.gprime[k] * (x2_0[l] + w[k * lanes + l]);
      acc = acc + half_dt * (prev + cur);
      x3[k * lanes + l] = acc;
      prev = cur;
    }
  }
}

void cascade_rk4_lanes(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                       std::size_t lanes, std::size_t begin, std::size_t end) {
  const double dt = tab.dt;
  const double half_dt = 0.5 * dt;
  const double sixth_dt = dt / 6.0;
  for (std::size_t l = begin; l < end; ++l) {
    double a = x4[l];
    double b = x5[l];
    for (std::size_t k = 0; k < tab.steps; ++k) {
      const double f0 = tab.f_node[k];
      const double fm = tab.f_mid[k];
      const double f1 = tab.f_node[k + 1];
      const double z0 = x3[k * lanes + l];
      const double z1 = x3[(k + 1) * lanes + l];
      const double zm = 0.5 * (z0 + z1);
      const double p0 = ipow(z0, tab.n);
      const double pm = ipow(zm, tab.n);
      const double p1 = ipow(z1, tab.n);

      const double k1a = (f0 * a) * b;
      const double k1b = f0 * (p0 - a * a);
      const double a2 = a + half_dt * k1a;
      const double b2 = b + half_dt * k1b;
      const double k2a = (fm * a2) * b2;
      const double k2b = fm * (pm - a2 * a2);
      const double a3 = a + half_dt * k2a;
      const double b3 = b + half_dt * k2b;
      const double k3a = (fm * a3) * b3;
      const double k3b = fm * (pm - a3 * a3);
      const double a4 = a + dt * k3a;
      const double b4 = b + dt * k3b;
      const double k4a = (f1 * a4) * b4;
      const double k4b = f1 * (p1 - a4 * a4);

      a = a + sixth_dt * (((k1a + 2.0 * k2a) + 2.0 * k3a) + k4a);
      b = b + sixth_dt * (((k1b + 2.0 * k2b) + 2.0 * k3b) + k4b);
      x4[(k + 1) * lanes + l] = a;
      x5[(k + 1) * lanes + l] = b;
    }
  }
}

void cascade_x3_scalar(const CascadeTables& tab, const double* w, const double* x2_0,
                       const double* x3_0, double* x3, std::size_t lanes) {
  cascade_x3_lanes(tab, w, x2_0, x3_0, x3, lanes, 0, lanes);
}

void cascade_rk4_scalar(const CascadeTables& tab, const double* x3, double* x4, double* x5,
                        std::size_t lanes) {
  cascade_rk4_lanes(tab, x3, x4, x5, lanes, 0, lanes);
}

}  // namespace sdelab::kernels::detail
