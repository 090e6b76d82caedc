#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the integration, transform and grid
// operators. Every operation has a scalar reference implementation and an
// AVX2 variant; the active table is chosen once at startup from CPUID and
// can be overridden (tests exercise both paths and check equivalence).
//
// Accumulation order inside one call is fixed per implementation, so results
// are reproducible run-to-run on the same machine. Callers that need
// worker-count independence chunk their data into fixed-size blocks and
// combine the per-block results in index order.

namespace ergolab::kernels {

enum class Isa { scalar, avx2 };

struct Ops {
  // phase[i] = sum_ax xi[ax] * pts[ax][i]   (SoA point layout, dims <= 8)
  void (*dot_phase)(const double* const* pts, std::size_t dims, std::size_t n,
                    const double* xi, double* phase);

  // acc += sum_i w[i] * exp(-i * phase[i]); w == nullptr means unit weights.
  // Valid for |phase| <= 1e6 (arguments above that are reduced scalar-side).
  void (*accum_cis_neg)(const double* phase, const double* w, std::size_t n,
                        double* acc_re, double* acc_im);

  // s[i] = sin(x[i]), c[i] = cos(x[i]); same argument-range contract.
  void (*sincos)(const double* x, std::size_t n, double* s, double* c);

  // max_i |v[i]|
  double (*reduce_max_abs)(const double* v, std::size_t n);

  // dst[i] = max(dst[i], sqrt(re[i]^2 + im[i]^2)); im == nullptr means |re|.
  void (*max_abs_update)(double* dst, const double* re, const double* im,
                         std::size_t n);

  // sum_i (re[i]^2 + im[i]^2)^(p/2); im == nullptr means sum |re|^p.
  double (*sum_abs_pow)(const double* re, const double* im, std::size_t n,
                        double p);

  // #{ i : v[i] > alpha }
  std::size_t (*count_above)(const double* v, std::size_t n, double alpha);

  // dst[i] += w * src[i]
  void (*tap_axpy)(double* dst, const double* src, std::size_t n, double w);
};

// Table active for this process (CPUID-selected unless forced).
const Ops& ops();

Isa active_isa();
const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Force a specific table; used by the kernel equivalence tests.
void force_isa(Isa isa);
void clear_forced_isa();

// Named tables for direct comparison in tests.
const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unavailable on this CPU

}  // namespace ergolab::kernels
