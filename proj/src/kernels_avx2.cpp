#include "ergolab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace ergolab::kernels {
namespace {

// ---- vector sin/cos ------------------------------------------------------
// Cody-Waite reduction by pi/2 (three 33-bit pieces, products exact for
// |n| < 2^20) plus the fdlibm kernel polynomials on [-pi/4, pi/4].
// Valid for |x| <= 1e6; larger arguments (and NaN) are patched with libm.

constexpr double kInvPio2 = 6.36619772367581382433e-01;
constexpr double kPio2_1 = 1.57079632673412561417e+00;
constexpr double kPio2_2 = 6.07710050630396597660e-11;
constexpr double kPio2_3 = 2.02226624871116645580e-21;

constexpr double kS1 = -1.66666666666666324348e-01;
constexpr double kS2 = 8.33333333332248946124e-03;
constexpr double kS3 = -1.98412698298579493134e-04;
constexpr double kS4 = 2.75573137070700676789e-06;
constexpr double kS5 = -2.50507602534068634195e-08;
constexpr double kS6 = 1.58969099521155010221e-10;

constexpr double kC1 = 4.16666666666666019037e-02;
constexpr double kC2 = -1.38888888888741095749e-03;
constexpr double kC3 = 2.48015872894767294178e-05;
constexpr double kC4 = -2.75573143513906633035e-07;
constexpr double kC5 = 2.08757232129817482790e-09;
constexpr double kC6 = -1.13596475577881948265e-11;

constexpr double kRangeLimit = 1e6;

inline __m256d poly_sin(__m256d r, __m256d z) {
  __m256d p = _mm256_set1_pd(kS6);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kS5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kS4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kS3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kS2));
  const __m256d zr = _mm256_mul_pd(z, r);
  const __m256d inner = _mm256_fmadd_pd(z, p, _mm256_set1_pd(kS1));
  return _mm256_fmadd_pd(zr, inner, r);
}

inline __m256d poly_cos(__m256d z) {
  __m256d p = _mm256_set1_pd(kC6);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kC5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kC4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kC3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kC2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(kC1));
  const __m256d zr = _mm256_mul_pd(z, p);  // z*(C1 + ...)
  // 1 - (z/2 - z^2*(C1 + ...))
  const __m256d t = _mm256_fnmadd_pd(z, zr, _mm256_mul_pd(_mm256_set1_pd(0.5), z));
  return _mm256_sub_pd(_mm256_set1_pd(1.0), t);
}

// 4-lane sincos; returns a movemask of lanes outside the valid range
// (those results are garbage and must be patched by the caller).
inline int sincos4(__m256d x, __m256d* sv, __m256d* cv) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  const __m256d ax = _mm256_and_pd(x, absmask);
  const int bad = _mm256_movemask_pd(
      _mm256_cmp_pd(ax, _mm256_set1_pd(kRangeLimit), _CMP_NLE_UQ));

  const __m256d fn = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kInvPio2)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fn, _mm256_set1_pd(kPio2_1), x);
  r = _mm256_fnmadd_pd(fn, _mm256_set1_pd(kPio2_2), r);
  r = _mm256_fnmadd_pd(fn, _mm256_set1_pd(kPio2_3), r);

  const __m256d z = _mm256_mul_pd(r, r);
  const __m256d sr = poly_sin(r, z);
  const __m256d cr = poly_cos(z);

  const __m128i qi = _mm256_cvtpd_epi32(fn);
  const __m128i one32 = _mm_set1_epi32(1);
  const __m128i b0 = _mm_and_si128(qi, one32);
  const __m128i b1 = _mm_and_si128(_mm_srli_epi32(qi, 1), one32);

  const __m256d swap = _mm256_castsi256_pd(
      _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(b0, one32)));
  const __m256d sflip = _mm256_castsi256_pd(
      _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(b1, one32)));
  const __m256d cflip = _mm256_castsi256_pd(
      _mm256_cvtepi32_epi64(_mm_cmpeq_epi32(_mm_xor_si128(b0, b1), one32)));

  const __m256d signbit = _mm256_set1_pd(-0.0);
  __m256d s = _mm256_blendv_pd(sr, cr, swap);
  __m256d c = _mm256_blendv_pd(cr, sr, swap);
  s = _mm256_xor_pd(s, _mm256_and_pd(sflip, signbit));
  c = _mm256_xor_pd(c, _mm256_and_pd(cflip, signbit));
  *sv = s;
  *cv = c;
  return bad;
}

void sincos_avx2(const double* x, std::size_t n, double* s, double* c) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv, cv;
    const int bad = sincos4(_mm256_loadu_pd(x + i), &sv, &cv);
    _mm256_storeu_pd(s + i, sv);
    _mm256_storeu_pd(c + i, cv);
    if (bad) {
      for (int l = 0; l < 4; ++l) {
        if (bad & (1 << l)) {
          s[i + l] = std::sin(x[i + l]);
          c[i + l] = std::cos(x[i + l]);
        }
      }
    }
  }
  for (; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

// ---- kernel table --------------------------------------------------------

void dot_phase_avx2(const double* const* pts, std::size_t dims, std::size_t n,
                    const double* xi, double* phase) {
  std::size_t i = 0;
  if (dims <= 4) {
    for (; i + 4 <= n; i += 4) {
      __m256d acc = _mm256_mul_pd(_mm256_set1_pd(xi[0]), _mm256_loadu_pd(pts[0] + i));
      for (std::size_t ax = 1; ax < dims; ++ax)
        acc = _mm256_fmadd_pd(_mm256_set1_pd(xi[ax]), _mm256_loadu_pd(pts[ax] + i), acc);
      _mm256_storeu_pd(phase + i, acc);
    }
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t ax = 0; ax < dims; ++ax) acc += xi[ax] * pts[ax][i];
    phase[i] = acc;
  }
}

void accum_cis_neg_avx2(const double* phase, const double* w, std::size_t n,
                        double* acc_re, double* acc_im) {
  __m256d vre = _mm256_setzero_pd();
  __m256d vim = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv, cv;
    const int bad = sincos4(_mm256_loadu_pd(phase + i), &sv, &cv);
    if (bad) {
      alignas(32) double sb[4], cb[4];
      _mm256_store_pd(sb, sv);
      _mm256_store_pd(cb, cv);
      for (int l = 0; l < 4; ++l) {
        if (bad & (1 << l)) {
          sb[l] = std::sin(phase[i + l]);
          cb[l] = std::cos(phase[i + l]);
        }
      }
      sv = _mm256_load_pd(sb);
      cv = _mm256_load_pd(cb);
    }
    if (w) {
      const __m256d wv = _mm256_loadu_pd(w + i);
      vre = _mm256_fmadd_pd(wv, cv, vre);
      vim = _mm256_fnmadd_pd(wv, sv, vim);
    } else {
      vre = _mm256_add_pd(vre, cv);
      vim = _mm256_sub_pd(vim, sv);
    }
  }
  alignas(32) double lr[4], li[4];
  _mm256_store_pd(lr, vre);
  _mm256_store_pd(li, vim);
  double re = ((lr[0] + lr[1]) + (lr[2] + lr[3]));
  double im = ((li[0] + li[1]) + (li[2] + li[3]));
  for (; i < n; ++i) {
    const double ww = w ? w[i] : 1.0;
    re += ww * std::cos(phase[i]);
    im -= ww * std::sin(phase[i]);
  }
  *acc_re += re;
  *acc_im += im;
}

double reduce_max_abs_avx2(const double* v, std::size_t n) {
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(v + i), absmask));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::abs(v[i]));
  return r;
}

void max_abs_update_avx2(double* dst, const double* re, const double* im,
                         std::size_t n) {
  std::size_t i = 0;
  if (im) {
    for (; i + 4 <= n; i += 4) {
      const __m256d r = _mm256_loadu_pd(re + i);
      const __m256d m = _mm256_loadu_pd(im + i);
      const __m256d mag = _mm256_sqrt_pd(_mm256_fmadd_pd(m, m, _mm256_mul_pd(r, r)));
      _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), mag));
    }
    for (; i < n; ++i)
      dst[i] = std::max(dst[i], std::sqrt(re[i] * re[i] + im[i] * im[i]));
  } else {
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
    for (; i + 4 <= n; i += 4) {
      const __m256d mag = _mm256_and_pd(_mm256_loadu_pd(re + i), absmask);
      _mm256_storeu_pd(dst + i, _mm256_max_pd(_mm256_loadu_pd(dst + i), mag));
    }
    for (; i < n; ++i) dst[i] = std::max(dst[i], std::abs(re[i]));
  }
}

double sum_abs_pow_avx2(const double* re, const double* im, std::size_t n,
                        double p) {
  std::size_t i = 0;
  if (p == 2.0) {
    __m256d acc = _mm256_setzero_pd();
    if (im) {
      for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(re + i);
        const __m256d m = _mm256_loadu_pd(im + i);
        acc = _mm256_fmadd_pd(r, r, acc);
        acc = _mm256_fmadd_pd(m, m, acc);
      }
    } else {
      for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(re + i);
        acc = _mm256_fmadd_pd(r, r, acc);
      }
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i)
      s += im ? re[i] * re[i] + im[i] * im[i] : re[i] * re[i];
    return s;
  }
  if (p == 1.0) {
    __m256d acc = _mm256_setzero_pd();
    if (im) {
      for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_loadu_pd(re + i);
        const __m256d m = _mm256_loadu_pd(im + i);
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_fmadd_pd(m, m, _mm256_mul_pd(r, r))));
      }
    } else {
      const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFll));
      for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_and_pd(_mm256_loadu_pd(re + i), absmask));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i)
      s += im ? std::sqrt(re[i] * re[i] + im[i] * im[i]) : std::abs(re[i]);
    return s;
  }
  // General exponent: vectorizing pow is not worth it here.
  double s = 0.0;
  const double half_p = 0.5 * p;
  for (; i < n; ++i) {
    const double m2 = im ? re[i] * re[i] + im[i] * im[i] : re[i] * re[i];
    s += (m2 > 0.0) ? std::pow(m2, half_p) : 0.0;
  }
  return s;
}

std::size_t count_above_avx2(const double* v, std::size_t n, double alpha) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t cnt = 0, i = 0;
  for (; i + 4 <= n; i += 4) {
    const int m = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_loadu_pd(v + i), a, _CMP_GT_OQ));
    cnt += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
  }
  for (; i < n; ++i) cnt += (v[i] > alpha) ? 1 : 0;
  return cnt;
}

void tap_axpy_avx2(double* dst, const double* src, std::size_t n, double w) {
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_fmadd_pd(wv, _mm256_loadu_pd(src + i), _mm256_loadu_pd(dst + i));
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += w * src[i];
}

const Ops kAvx2Table = {
    dot_phase_avx2, accum_cis_neg_avx2, sincos_avx2,  reduce_max_abs_avx2,
    max_abs_update_avx2, sum_abs_pow_avx2, count_above_avx2, tap_axpy_avx2,
};

}  // namespace

const Ops* avx2_ops() {
#if defined(__GNUC__) || defined(__clang__)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return &kAvx2Table;
#endif
  return nullptr;
}

}  // namespace ergolab::kernels

#else  // non-x86 build: no AVX2 table

namespace ergolab::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace ergolab::kernels

#endif
