#include "ergolab/maximal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include "ergolab/kernels.hpp"
#include "ergolab/parallel.hpp"

namespace ergolab::maximal {
namespace {

using measures::QuadratureAtoms;

// Atomization density: atom gaps at most half the grid spacing.
constexpr double kAtomSpacingFactor = 0.5;
// direct-tap path is used while taps * nodes stays below this.
constexpr double kTapFlopBudget = 4e8;

// ---- tap stencil -----------------------------------------------------------

// Dense rasterization of the atom cloud with the multilinear hat; offsets v
// with K[v] = sum_q w_q prod_ax hat(v_ax - t_q_ax / h). The discrete
// convolution sum_v K[v] phi[i - v] equals the per-node atom sum exactly.
struct TapStencil {
  std::vector<long long> vmin, vmax;  // inclusive, per axis
  std::vector<std::size_t> shape;
  std::vector<double> w;
  bool empty = true;

  std::size_t total() const { return w.size(); }
};

TapStencil rasterize(const QuadratureAtoms& atoms, double h,
                     const std::vector<std::size_t>& grid_extents) {
  const std::size_t d = grid_extents.size();
  TapStencil st;
  st.vmin.assign(d, 0);
  st.vmax.assign(d, 0);
  if (atoms.weights.empty()) return st;

  // offset bounds from the atom bounding box, clamped to reachable offsets
  bool any = false;
  std::vector<long long> lo(d), hi(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    const auto& c = atoms.points.coords[ax];
    const auto [mn, mx] = std::minmax_element(c.begin(), c.end());
    lo[ax] = static_cast<long long>(std::floor(*mn / h));
    hi[ax] = static_cast<long long>(std::floor(*mx / h)) + 1;
    const long long limit = static_cast<long long>(grid_extents[ax]) - 1;
    lo[ax] = std::max(lo[ax], -limit);
    hi[ax] = std::min(hi[ax], limit);
    if (lo[ax] > hi[ax]) return st;  // fully out of reach
  }
  st.vmin = lo;
  st.vmax = hi;
  st.shape.resize(d);
  std::size_t total = 1;
  for (std::size_t ax = 0; ax < d; ++ax) {
    st.shape[ax] = static_cast<std::size_t>(hi[ax] - lo[ax] + 1);
    total *= st.shape[ax];
  }
  st.w.assign(total, 0.0);

  const std::size_t n_atoms = atoms.weights.size();
  std::vector<long long> cell(d);
  std::vector<double> frac(d);
  for (std::size_t q = 0; q < n_atoms; ++q) {
    bool reachable = true;
    for (std::size_t ax = 0; ax < d; ++ax) {
      const double u = atoms.points.coords[ax][q] / h;
      const double fl = std::floor(u);
      cell[ax] = static_cast<long long>(fl);
      frac[ax] = u - fl;
      if (cell[ax] + 1 < st.vmin[ax] || cell[ax] > st.vmax[ax]) {
        reachable = false;
        break;
      }
    }
    if (!reachable) continue;
    const std::size_t corners = 1ull << d;
    for (std::size_t c = 0; c < corners; ++c) {
      double wgt = atoms.weights[q];
      std::size_t flat = 0;
      bool ok = true;
      for (std::size_t ax = 0; ax < d; ++ax) {
        const bool hi_corner = (c >> ax) & 1u;
        const long long v = cell[ax] + (hi_corner ? 1 : 0);
        if (v < st.vmin[ax] || v > st.vmax[ax]) {
          ok = false;
          break;
        }
        wgt *= hi_corner ? frac[ax] : (1.0 - frac[ax]);
        flat = flat * st.shape[ax] + static_cast<std::size_t>(v - st.vmin[ax]);
      }
      if (ok && wgt != 0.0) {
        st.w[flat] += wgt;
        any = true;
      }
    }
  }
  st.empty = !any;
  return st;
}

// ---- direct paths ----------------------------------------------------------

void conv_direct_points(const GridFunction& phi, const QuadratureAtoms& atoms,
                        GridFunction& out) {
  const std::size_t d = phi.dim();
  std::vector<double> x(d), y(d);
  std::vector<std::size_t> idx(d, 0);
  const std::size_t n_atoms = atoms.weights.size();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t rem = flat;
    for (std::size_t ax = d; ax-- > 0;) {
      idx[ax] = rem % phi.extents()[ax];
      rem /= phi.extents()[ax];
    }
    for (std::size_t ax = 0; ax < d; ++ax) x[ax] = phi.node_coord(ax, idx[ax]);
    std::complex<double> acc = 0.0;
    for (std::size_t q = 0; q < n_atoms; ++q) {
      for (std::size_t ax = 0; ax < d; ++ax)
        y[ax] = x[ax] - atoms.points.coords[ax][q];
      acc += atoms.weights[q] * phi.interp(y);
    }
    out.re()[flat] = acc.real();
    if (!out.is_real()) out.im()[flat] = acc.imag();
  }
}

// dst += w * shifted(src, v) over the valid overlap, one channel.
void accumulate_tap(double* dst, const double* src,
                    const std::vector<std::size_t>& extents,
                    std::span<const long long> v, double w) {
  const std::size_t d = extents.size();
  std::vector<long long> lo(d), hi(d);  // output index range, inclusive lo, exclusive hi
  for (std::size_t ax = 0; ax < d; ++ax) {
    const long long n = static_cast<long long>(extents[ax]);
    lo[ax] = std::max<long long>(0, v[ax]);
    hi[ax] = std::min<long long>(n, n + v[ax]);
    if (lo[ax] >= hi[ax]) return;
  }
  // iterate all but last axis; last axis is a contiguous run
  if (d == 1) {
    kernels::ops().tap_axpy(dst + lo[0], src + (lo[0] - v[0]),
                            static_cast<std::size_t>(hi[0] - lo[0]), w);
    return;
  }
  std::vector<long long> idx(lo.begin(), lo.end() - 1);
  const std::size_t run = static_cast<std::size_t>(hi[d - 1] - lo[d - 1]);
  for (;;) {
    std::size_t off_dst = 0, off_src = 0;
    for (std::size_t ax = 0; ax + 1 < d; ++ax) {
      off_dst = off_dst * extents[ax] + static_cast<std::size_t>(idx[ax]);
      off_src = off_src * extents[ax] + static_cast<std::size_t>(idx[ax] - v[ax]);
    }
    off_dst = off_dst * extents[d - 1] + static_cast<std::size_t>(lo[d - 1]);
    off_src = off_src * extents[d - 1] + static_cast<std::size_t>(lo[d - 1] - v[d - 1]);
    kernels::ops().tap_axpy(dst + off_dst, src + off_src, run, w);
    // bump the multi-index
    std::size_t ax = d - 1;
    while (ax-- > 0) {
      if (++idx[ax] < hi[ax]) break;
      if (ax == 0 && idx[0] >= hi[0]) return;
      idx[ax] = lo[ax];
      if (ax == 0) return;
    }
    if (idx[0] >= hi[0]) return;
  }
}

void conv_direct_taps(const GridFunction& phi, const TapStencil& st,
                      GridFunction& out) {
  const std::size_t d = phi.dim();
  std::vector<long long> v(d);
  for (std::size_t flat = 0; flat < st.w.size(); ++flat) {
    const double w = st.w[flat];
    if (w == 0.0) continue;
    std::size_t rem = flat;
    for (std::size_t ax = d; ax-- > 0;) {
      v[ax] = st.vmin[ax] + static_cast<long long>(rem % st.shape[ax]);
      rem /= st.shape[ax];
    }
    accumulate_tap(out.re().data(), phi.re().data(), phi.extents(), v, w);
    if (!phi.is_real())
      accumulate_tap(out.im().data(), phi.im().data(), phi.extents(), v, w);
  }
}

// ---- FFT path --------------------------------------------------------------

std::size_t next_fast_size(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t f : {2, 3, 5, 7})
      while (m % f == 0) m /= f;
    if (m == 1) return n;
  }
}

struct FftPlans {
  fftw_plan fwd = nullptr;  // r2c
  fftw_plan inv = nullptr;  // c2r
};

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Plans are cached per padded shape; FFTW_ESTIMATE keeps planning
// deterministic (no timing-dependent algorithm choice), which the
// byte-identical-output contract relies on.
const FftPlans& plans_for(const std::vector<std::size_t>& shape) {
  static std::map<std::vector<std::size_t>, FftPlans> cache;
  std::lock_guard<std::mutex> lock(fftw_mutex());
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;

  std::size_t real_total = 1, cplx_total = 1;
  std::vector<int> dims(shape.size());
  for (std::size_t ax = 0; ax < shape.size(); ++ax) {
    dims[ax] = static_cast<int>(shape[ax]);
    real_total *= shape[ax];
    cplx_total *= (ax + 1 == shape.size()) ? shape[ax] / 2 + 1 : shape[ax];
  }
  double* rbuf = fftw_alloc_real(real_total);
  fftw_complex* cbuf = fftw_alloc_complex(cplx_total);
  FftPlans p;
  p.fwd = fftw_plan_dft_r2c(static_cast<int>(shape.size()), dims.data(), rbuf,
                            cbuf, FFTW_ESTIMATE);
  p.inv = fftw_plan_dft_c2r(static_cast<int>(shape.size()), dims.data(), cbuf,
                            rbuf, FFTW_ESTIMATE);
  fftw_free(rbuf);
  fftw_free(cbuf);
  if (!p.fwd || !p.inv) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(std::move(shape), p).first->second;
}

std::size_t padded_real_total(const std::vector<std::size_t>& shape) {
  std::size_t t = 1;
  for (auto s : shape) t *= s;
  return t;
}

std::size_t padded_cplx_total(const std::vector<std::size_t>& shape) {
  std::size_t t = 1;
  for (std::size_t ax = 0; ax < shape.size(); ++ax)
    t *= (ax + 1 == shape.size()) ? shape[ax] / 2 + 1 : shape[ax];
  return t;
}

struct FftwRealBuf {
  double* p = nullptr;
  explicit FftwRealBuf(std::size_t n) : p(fftw_alloc_real(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwRealBuf() { fftw_free(p); }
  FftwRealBuf(const FftwRealBuf&) = delete;
  FftwRealBuf& operator=(const FftwRealBuf&) = delete;
};

struct FftwCplxBuf {
  fftw_complex* p = nullptr;
  explicit FftwCplxBuf(std::size_t n) : p(fftw_alloc_complex(n)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwCplxBuf() { fftw_free(p); }
  FftwCplxBuf(const FftwCplxBuf&) = delete;
  FftwCplxBuf& operator=(const FftwCplxBuf&) = delete;
};

// Copies a channel of phi into the zero-padded buffer (row-major).
void pad_channel(const std::vector<double>& src,
                 const std::vector<std::size_t>& n,
                 const std::vector<std::size_t>& m, double* dst) {
  std::memset(dst, 0, padded_real_total(m) * sizeof(double));
  const std::size_t d = n.size();
  std::vector<std::size_t> idx(d, 0);
  const std::size_t run = n[d - 1];
  std::size_t src_off = 0;
  for (;;) {
    std::size_t dst_off = 0;
    for (std::size_t ax = 0; ax + 1 < d; ++ax)
      dst_off = dst_off * m[ax] + idx[ax];
    dst_off = dst_off * m[d - 1];
    std::memcpy(dst + dst_off, src.data() + src_off, run * sizeof(double));
    src_off += run;
    std::size_t ax = d - 1;
    bool done = (d == 1);
    while (ax-- > 0) {
      if (++idx[ax] < n[ax]) break;
      idx[ax] = 0;
      if (ax == 0) done = true;
    }
    if (done) break;
  }
}

// Scatters the tap stencil into the padded buffer with wrap-around offsets.
void pad_stencil(const TapStencil& st, const std::vector<std::size_t>& m,
                 double* dst) {
  std::memset(dst, 0, padded_real_total(m) * sizeof(double));
  const std::size_t d = m.size();
  std::vector<long long> v(d);
  for (std::size_t flat = 0; flat < st.w.size(); ++flat) {
    const double w = st.w[flat];
    if (w == 0.0) continue;
    std::size_t rem = flat;
    std::size_t off = 0;
    for (std::size_t ax = 0; ax < d; ++ax) {
      // decode in row-major order
      std::size_t stride = 1;
      for (std::size_t bx = ax + 1; bx < d; ++bx) stride *= st.shape[bx];
      const long long vi = st.vmin[ax] + static_cast<long long>(rem / stride);
      rem %= stride;
      const long long mm = static_cast<long long>(m[ax]);
      const std::size_t wrapped = static_cast<std::size_t>((vi % mm + mm) % mm);
      off = off * m[ax] + wrapped;
      v[ax] = vi;
    }
    dst[off] += w;
  }
}

// out[i] = extracted circular-conv result for i in [0, n).
void extract_channel(const double* src, const std::vector<std::size_t>& n,
                     const std::vector<std::size_t>& m, double scale,
                     std::vector<double>& out) {
  const std::size_t d = n.size();
  std::vector<std::size_t> idx(d, 0);
  const std::size_t run = n[d - 1];
  std::size_t dst_off = 0;
  for (;;) {
    std::size_t src_off = 0;
    for (std::size_t ax = 0; ax + 1 < d; ++ax)
      src_off = src_off * m[ax] + idx[ax];
    src_off = src_off * m[d - 1];
    for (std::size_t i = 0; i < run; ++i)
      out[dst_off + i] = scale * src[src_off + i];
    dst_off += run;
    std::size_t ax = d - 1;
    bool done = (d == 1);
    while (ax-- > 0) {
      if (++idx[ax] < n[ax]) break;
      idx[ax] = 0;
      if (ax == 0) done = true;
    }
    if (done) break;
  }
}

// Spectral data of one phi channel on a padded shape.
struct SpectralChannel {
  std::vector<std::size_t> shape;
  std::vector<std::complex<double>> data;
};

SpectralChannel forward_channel(const std::vector<double>& values,
                                const std::vector<std::size_t>& n,
                                const std::vector<std::size_t>& m) {
  SpectralChannel ch;
  ch.shape = m;
  const auto& plans = plans_for(m);
  FftwRealBuf rbuf(padded_real_total(m));
  FftwCplxBuf cbuf(padded_cplx_total(m));
  pad_channel(values, n, m, rbuf.p);
  fftw_execute_dft_r2c(plans.fwd, rbuf.p, cbuf.p);
  ch.data.assign(reinterpret_cast<std::complex<double>*>(cbuf.p),
                 reinterpret_cast<std::complex<double>*>(cbuf.p) +
                     padded_cplx_total(m));
  return ch;
}

// Per-worker scratch for the FFT route.
struct FftScratch {
  FftwRealBuf real;
  FftwCplxBuf kernel_hat;
  FftwCplxBuf prod;
  explicit FftScratch(const std::vector<std::size_t>& m)
      : real(padded_real_total(m)),
        kernel_hat(padded_cplx_total(m)),
        prod(padded_cplx_total(m)) {}
};

void conv_fft(const GridFunction& phi, const TapStencil& st,
              const std::vector<std::size_t>& m,
              const SpectralChannel& phi_hat_re,
              const SpectralChannel* phi_hat_im, FftScratch& scratch,
              GridFunction& out) {
  const auto& plans = plans_for(m);
  const std::size_t rc = padded_cplx_total(m);
  const double scale = 1.0 / static_cast<double>(padded_real_total(m));

  pad_stencil(st, m, scratch.real.p);
  fftw_execute_dft_r2c(plans.fwd, scratch.real.p, scratch.kernel_hat.p);

  auto* khat = reinterpret_cast<std::complex<double>*>(scratch.kernel_hat.p);
  auto* prod = reinterpret_cast<std::complex<double>*>(scratch.prod.p);
  for (std::size_t i = 0; i < rc; ++i) prod[i] = khat[i] * phi_hat_re.data[i];
  fftw_execute_dft_c2r(plans.inv, scratch.prod.p, scratch.real.p);
  extract_channel(scratch.real.p, phi.extents(), m, scale, out.re());

  if (phi_hat_im) {
    for (std::size_t i = 0; i < rc; ++i)
      prod[i] = khat[i] * phi_hat_im->data[i];
    fftw_execute_dft_c2r(plans.inv, scratch.prod.p, scratch.real.p);
    extract_channel(scratch.real.p, phi.extents(), m, scale, out.im());
  }
}

std::vector<std::size_t> padded_shape_for(
    const GridFunction& phi, const std::vector<long long>& vmin,
    const std::vector<long long>& vmax) {
  const std::size_t d = phi.dim();
  std::vector<std::size_t> m(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    const long long kneed =
        std::max<long long>({vmax[ax], -vmin[ax], 0});
    m[ax] = next_fast_size(phi.extents()[ax] +
                           static_cast<std::size_t>(kneed));
  }
  return m;
}

QuadratureAtoms atoms_for(const ProbabilityMeasure& nu, const Dilation& dil,
                          double lambda, double h, std::size_t budget) {
  const auto dilated = nu.dilated(dil, lambda);
  return dilated.quadrature_atoms(kAtomSpacingFactor * h, budget);
}

GridFunction make_output_like(const GridFunction& phi) {
  GridFunction out(phi.origin(), phi.spacing(), phi.extents(), !phi.is_real());
  return out;
}

}  // namespace

GridFunction dilated_convolution(const GridFunction& phi,
                                 const ProbabilityMeasure& nu,
                                 const Dilation& dil, double lambda,
                                 std::size_t budget, std::uint64_t seed,
                                 ConvPath path) {
  (void)seed;  // atomization is deterministic for every shipped variant
  if (nu.dim() != phi.dim())
    throw std::invalid_argument("dilated_convolution: dimension mismatch");
  if (!(lambda > 0.0))
    throw std::invalid_argument("dilated_convolution: lambda must be positive");

  GridFunction out = make_output_like(phi);
  const auto atoms = atoms_for(nu, dil, lambda, phi.spacing(), budget);

  if (path == ConvPath::direct_points) {
    conv_direct_points(phi, atoms, out);
    return out;
  }

  const auto st = rasterize(atoms, phi.spacing(), phi.extents());
  if (st.empty) return out;

  if (path == ConvPath::automatic) {
    const double flops =
        static_cast<double>(st.total()) * static_cast<double>(phi.size());
    path = flops <= kTapFlopBudget ? ConvPath::direct_taps : ConvPath::fft;
  }
  if (path == ConvPath::direct_taps) {
    conv_direct_taps(phi, st, out);
    return out;
  }

  const auto m = padded_shape_for(phi, st.vmin, st.vmax);
  const auto phi_hat_re = forward_channel(phi.re(), phi.extents(), m);
  std::unique_ptr<SpectralChannel> phi_hat_im;
  if (!phi.is_real())
    phi_hat_im = std::make_unique<SpectralChannel>(
        forward_channel(phi.im(), phi.extents(), m));
  FftScratch scratch(m);
  conv_fft(phi, st, m, phi_hat_re, phi_hat_im.get(), scratch, out);
  return out;
}

namespace {

// Shared lambda-sweep engine: evaluates |D_lambda phi| for each lambda from a
// per-lambda atom source and folds the pointwise max. The fold is a plain max,
// so the result does not depend on how lambdas are chunked across workers.
GridFunction sweep_maximal(
    const GridFunction& phi,
    const std::function<measures::Box(double)>& support_box,
    const std::function<QuadratureAtoms(double)>& atomize,
    const std::vector<double>& lambda_grid, int workers, ConvPath path) {
  if (lambda_grid.empty())
    throw std::invalid_argument("maximal sweep: empty lambda grid");
  const std::size_t d = phi.dim();
  const double h = phi.spacing();

  // Reachable-offset window per lambda; unreachable lambdas contribute zero.
  struct LambdaJob {
    double lambda;
    std::vector<long long> vmin, vmax;
  };
  std::vector<LambdaJob> jobs;
  std::vector<long long> gmin(d, 0), gmax(d, 0);
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("maximal sweep: lambda must be positive");
    const auto box = support_box(lambda);
    LambdaJob job;
    job.lambda = lambda;
    job.vmin.resize(d);
    job.vmax.resize(d);
    bool reachable = true;
    for (std::size_t ax = 0; ax < d; ++ax) {
      const long long limit = static_cast<long long>(phi.extents()[ax]) - 1;
      job.vmin[ax] = std::max<long long>(
          static_cast<long long>(std::floor(box.lower[ax] / h)), -limit);
      job.vmax[ax] = std::min<long long>(
          static_cast<long long>(std::floor(box.upper[ax] / h)) + 1, limit);
      if (job.vmin[ax] > job.vmax[ax]) reachable = false;
    }
    if (!reachable) continue;
    for (std::size_t ax = 0; ax < d; ++ax) {
      gmin[ax] = std::min(gmin[ax], job.vmin[ax]);
      gmax[ax] = std::max(gmax[ax], job.vmax[ax]);
    }
    jobs.push_back(std::move(job));
  }

  GridFunction S(phi.origin(), phi.spacing(), phi.extents());
  if (jobs.empty()) return S;

  // One padded shape for every FFT lambda, so the phi spectrum is computed
  // once. Small stencils take the tap route and skip the scratch entirely.
  const auto m = padded_shape_for(phi, gmin, gmax);
  bool any_fft = false;
  std::vector<bool> use_fft(jobs.size(), false);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (path == ConvPath::fft) {
      use_fft[j] = true;
    } else if (path == ConvPath::automatic) {
      double taps = 1.0;
      for (std::size_t ax = 0; ax < d; ++ax)
        taps *= static_cast<double>(jobs[j].vmax[ax] - jobs[j].vmin[ax] + 1);
      use_fft[j] = taps * static_cast<double>(phi.size()) > kTapFlopBudget;
    }
    any_fft = any_fft || use_fft[j];
  }

  std::unique_ptr<SpectralChannel> phi_hat_re, phi_hat_im;
  if (any_fft) {
    phi_hat_re = std::make_unique<SpectralChannel>(
        forward_channel(phi.re(), phi.extents(), m));
    if (!phi.is_real())
      phi_hat_im = std::make_unique<SpectralChannel>(
          forward_channel(phi.im(), phi.extents(), m));
  }

  const int nworkers = std::max(
      1, std::min(resolve_workers(workers), static_cast<int>(jobs.size())));
  std::vector<std::vector<double>> partial_max(
      static_cast<std::size_t>(nworkers));

  parallel_for(static_cast<std::size_t>(nworkers), nworkers,
               [&](std::size_t w) {
    std::vector<double>& acc = partial_max[w];
    acc.assign(phi.size(), 0.0);
    GridFunction conv = make_output_like(phi);
    std::unique_ptr<FftScratch> scratch;
    for (std::size_t j = w; j < jobs.size();
         j += static_cast<std::size_t>(nworkers)) {
      const auto atoms = atomize(jobs[j].lambda);
      const auto st = rasterize(atoms, h, phi.extents());
      if (st.empty) continue;
      std::fill(conv.re().begin(), conv.re().end(), 0.0);
      if (!conv.is_real()) std::fill(conv.im().begin(), conv.im().end(), 0.0);
      if (use_fft[j]) {
        if (!scratch) scratch = std::make_unique<FftScratch>(m);
        conv_fft(phi, st, m, *phi_hat_re, phi_hat_im.get(), *scratch, conv);
      } else {
        conv_direct_taps(phi, st, conv);
      }
      kernels::ops().max_abs_update(
          acc.data(), conv.re().data(),
          conv.is_real() ? nullptr : conv.im().data(), conv.size());
    }
  });

  for (const auto& acc : partial_max) {
    if (acc.empty()) continue;
    kernels::ops().max_abs_update(S.re().data(), acc.data(), nullptr, S.size());
  }
  return S;
}

}  // namespace

GridFunction maximal_function(const GridFunction& phi,
                              const ProbabilityMeasure& nu, const Dilation& dil,
                              const std::vector<double>& lambda_grid,
                              std::size_t budget, std::uint64_t seed,
                              int workers, ConvPath path) {
  (void)seed;
  if (nu.dim() != phi.dim())
    throw std::invalid_argument("maximal_function: dimension mismatch");
  const double h = phi.spacing();
  return sweep_maximal(
      phi,
      [&](double lambda) { return nu.dilated(dil, lambda).bounding_box(); },
      [&](double lambda) { return atoms_for(nu, dil, lambda, h, budget); },
      lambda_grid, workers, path);
}

double weak_type_ratio(const GridFunction& S_phi, const GridFunction& phi,
                       double p, const std::vector<double>& alpha_grid) {
  if (!(p >= 1.0)) throw std::invalid_argument("weak_type_ratio: p must be >= 1");
  if (alpha_grid.empty())
    throw std::invalid_argument("weak_type_ratio: empty alpha grid");
  for (double a : alpha_grid)
    if (!(a > 0.0))
      throw std::invalid_argument("weak_type_ratio: alphas must be positive");
  if (!S_phi.is_real())
    throw std::invalid_argument("weak_type_ratio: S_phi must be a real grid");

  const double cell =
      std::pow(S_phi.spacing(), static_cast<double>(S_phi.dim()));
  const double denom = std::pow(lp_norm(phi, p), p);
  double best = 0.0;
  for (double alpha : alpha_grid) {
    const std::size_t count =
        kernels::ops().count_above(S_phi.re().data(), S_phi.size(), alpha);
    const double meas = cell * static_cast<double>(count);
    best = std::max(best, std::pow(alpha, p) * meas / denom);
  }
  return best;
}

std::vector<double> default_alpha_grid(double sup, std::size_t count,
                                       double alpha_min) {
  if (!(sup > 0.0)) return {alpha_min};
  std::vector<double> alphas;
  const double lo = std::log(alpha_min);
  const double hi = std::log(sup);
  if (hi <= lo) return {alpha_min};
  for (std::size_t i = 0; i < count; ++i)
    alphas.push_back(std::exp(
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1)));
  return alphas;
}

std::vector<double> log_lambda_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2)
    throw std::invalid_argument("log_lambda_grid: bad range");
  std::vector<double> g(count);
  const double la = std::log(lo), lb = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::exp(la + (lb - la) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
  return g;
}

GridFunction curve_maximal(const GridFunction& phi,
                           const std::vector<double>& q, const Dilation& dil,
                           const std::vector<double>& lambda_grid,
                           std::size_t panels, int workers, ConvPath path) {
  if (q.empty() || q.size() != phi.dim())
    throw std::invalid_argument(
        "curve_maximal: coefficient/grid dimension mismatch");
  if (dil.dim() != q.size())
    throw std::invalid_argument("curve_maximal: dilation dimension mismatch");
  for (std::size_t i = 0; i < dil.exponents().size(); ++i) {
    if (dil.exponents()[i] != static_cast<double>(i + 1))
      throw std::invalid_argument(
          "curve_maximal: dilation exponents must be (1, 2, ..., d)");
  }
  if (panels == 0)
    throw std::invalid_argument("curve_maximal: panels must be > 0");
  for (double qi : q)
    if (qi == 0.0)
      throw std::invalid_argument("curve_maximal: coefficients must be nonzero");

  const std::size_t d = q.size();
  // Composite midpoint rule in w with `panels` panels, mapped through the
  // dilated curve; matches the box/curve quadrature atoms at equal counts.
  auto atomize = [&](double lambda) {
    const auto s = dil.scales(lambda);
    QuadratureAtoms qa;
    qa.points.resize(d, 0);
    const double wgt = 1.0 / static_cast<double>(panels);
    for (std::size_t k = 0; k < panels; ++k) {
      const double w = (static_cast<double>(k) + 0.5) / panels;
      double wp = 1.0;
      for (std::size_t ax = 0; ax < d; ++ax) {
        wp *= w;
        qa.points.coords[ax].push_back(s[ax] * q[ax] * wp);
      }
      qa.weights.push_back(wgt);
    }
    qa.points.n = panels;
    return qa;
  };
  auto support_box = [&](double lambda) {
    const auto s = dil.scales(lambda);
    measures::Box box{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t ax = 0; ax < d; ++ax) {
      box.lower[ax] = std::min(0.0, s[ax] * q[ax]);
      box.upper[ax] = std::max(0.0, s[ax] * q[ax]);
    }
    return box;
  };
  return sweep_maximal(phi, support_box, atomize, lambda_grid, workers, path);
}

}  // namespace ergolab::maximal
