#include "ergolab/kernels.hpp"

#include <algorithm>
#include <cmath>

// Reference implementations. Deliberately plain loops: these define the
// semantics the SIMD variants are tested against.

namespace ergolab::kernels {
namespace {

void dot_phase_scalar(const double* const* pts, std::size_t dims,
                      std::size_t n, const double* xi, double* phase) {
  switch (dims) {
    case 1: {
      const double* p0 = pts[0];
      const double x0 = xi[0];
      for (std::size_t i = 0; i < n; ++i) phase[i] = x0 * p0[i];
      return;
    }
    case 2: {
      const double *p0 = pts[0], *p1 = pts[1];
      const double x0 = xi[0], x1 = xi[1];
      for (std::size_t i = 0; i < n; ++i) phase[i] = x0 * p0[i] + x1 * p1[i];
      return;
    }
    case 3: {
      const double *p0 = pts[0], *p1 = pts[1], *p2 = pts[2];
      const double x0 = xi[0], x1 = xi[1], x2 = xi[2];
      for (std::size_t i = 0; i < n; ++i)
        phase[i] = x0 * p0[i] + x1 * p1[i] + x2 * p2[i];
      return;
    }
    default: {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t ax = 0; ax < dims; ++ax) acc += xi[ax] * pts[ax][i];
        phase[i] = acc;
      }
    }
  }
}

void accum_cis_neg_scalar(const double* phase, const double* w, std::size_t n,
                          double* acc_re, double* acc_im) {
  double re = 0.0, im = 0.0;
  if (w) {
    for (std::size_t i = 0; i < n; ++i) {
      re += w[i] * std::cos(phase[i]);
      im -= w[i] * std::sin(phase[i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      re += std::cos(phase[i]);
      im -= std::sin(phase[i]);
    }
  }
  *acc_re += re;
  *acc_im += im;
}

void sincos_scalar(const double* x, std::size_t n, double* s, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

double reduce_max_abs_scalar(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

void max_abs_update_scalar(double* dst, const double* re, const double* im,
                           std::size_t n) {
  if (im) {
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = std::max(dst[i], std::sqrt(re[i] * re[i] + im[i] * im[i]));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = std::max(dst[i], std::abs(re[i]));
  }
}

double sum_abs_pow_scalar(const double* re, const double* im, std::size_t n,
                          double p) {
  double acc = 0.0;
  if (p == 2.0) {
    if (im) {
      for (std::size_t i = 0; i < n; ++i) acc += re[i] * re[i] + im[i] * im[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) acc += re[i] * re[i];
    }
    return acc;
  }
  if (p == 1.0) {
    if (im) {
      for (std::size_t i = 0; i < n; ++i)
        acc += std::sqrt(re[i] * re[i] + im[i] * im[i]);
    } else {
      for (std::size_t i = 0; i < n; ++i) acc += std::abs(re[i]);
    }
    return acc;
  }
  const double half_p = 0.5 * p;
  if (im) {
    for (std::size_t i = 0; i < n; ++i) {
      const double m2 = re[i] * re[i] + im[i] * im[i];
      acc += (m2 > 0.0) ? std::pow(m2, half_p) : 0.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double m2 = re[i] * re[i];
      acc += (m2 > 0.0) ? std::pow(m2, half_p) : 0.0;
    }
  }
  return acc;
}

std::size_t count_above_scalar(const double* v, std::size_t n, double alpha) {
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < n; ++i) cnt += (v[i] > alpha) ? 1 : 0;
  return cnt;
}

void tap_axpy_scalar(double* dst, const double* src, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += w * src[i];
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops table = {
      dot_phase_scalar,  accum_cis_neg_scalar, sincos_scalar,
      reduce_max_abs_scalar, max_abs_update_scalar, sum_abs_pow_scalar,
      count_above_scalar, tap_axpy_scalar,
  };
  return table;
}

}  // namespace ergolab::kernels
