#include "ergolab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ergolab/kernels.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"

namespace ergolab::fourier {
namespace {

using measures::ProbabilityMeasure;
using Kind = ProbabilityMeasure::Kind;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr std::size_t kMaxPanelsPerAxis = 300000;
constexpr std::size_t kMaxCircleNodes = 2000000;

// 8-point Gauss-Legendre on [-1,1]; with phase <= pi per panel the composite
// rule resolves e^{i w t} to ~1e-10 relative.
constexpr double kGl8X[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kGl8W[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

std::size_t panels_for_phase(double phase_range, std::size_t budget) {
  if (budget > 0)
    return std::clamp<std::size_t>(budget / 8, 4, kMaxPanelsPerAxis);
  const std::size_t p =
      static_cast<std::size_t>(std::ceil(std::abs(phase_range) / kPi)) + 4;
  return std::clamp<std::size_t>(p, 6, kMaxPanelsPerAxis);
}

// integral over [a,b] of e^{-i w t} g(t) dt via composite GL8; g == nullptr
// means g = 1.
std::complex<double> osc_line_integral(
    double a, double b, double w, std::size_t panels,
    const std::function<double(double)>& g) {
  const std::size_t n = panels * 8;
  std::vector<double> phase(n), weights(n);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < 8; ++k) {
      const double t = mid + 0.5 * h * kGl8X[k];
      phase[p * 8 + k] = w * t;
      double wt = 0.5 * h * kGl8W[k];
      if (g) wt *= g(t);
      weights[p * 8 + k] = wt;
    }
  }
  double re = 0.0, im = 0.0;
  kernels::ops().accum_cis_neg(phase.data(), weights.data(), n, &re, &im);
  return {re, im};
}

std::complex<double> cis_neg(double phase) {
  return {std::cos(phase), -std::sin(phase)};
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cutoff_on_sphere(const measures::SphereCutoff& c,
                        std::span<const double> t, double radius) {
  double dot = 0.0;
  for (std::size_t ax = 0; ax < t.size(); ++ax) dot += c.axis[ax] * t[ax];
  const double s = dot / radius - std::cos(c.width);
  if (s <= 0.0) return 0.0;
  double v = 1.0;
  for (int k = 0; k < c.power; ++k) v *= s;
  return v;
}

// ---- per-variant transforms (single pass at a given budget scale) ---------

std::complex<double> transform_box(const ProbabilityMeasure::BoxData& b,
                                   std::span<const double> xi,
                                   std::size_t budget, double scale) {
  std::complex<double> prod = 1.0;
  for (std::size_t ax = 0; ax < xi.size(); ++ax) {
    const double len = b.upper[ax] - b.lower[ax];
    std::size_t panels = panels_for_phase(xi[ax] * len, budget);
    panels = std::max<std::size_t>(2, static_cast<std::size_t>(panels * scale));
    prod *= osc_line_integral(b.lower[ax], b.upper[ax], xi[ax], panels,
                              nullptr) /
            len;
  }
  return prod;
}

std::complex<double> transform_gaussian(
    const ProbabilityMeasure::GaussianData& g, std::span<const double> xi,
    std::size_t budget, double scale) {
  // full declared support box; the discarded tail mass is ~1e-15
  constexpr double kRange = 8.0;
  std::complex<double> prod = 1.0;
  for (std::size_t ax = 0; ax < xi.size(); ++ax) {
    const double a = g.center[ax] - kRange * g.sigma;
    const double b = g.center[ax] + kRange * g.sigma;
    std::size_t panels = panels_for_phase(xi[ax] * (b - a), budget);
    panels = std::max<std::size_t>(2, static_cast<std::size_t>(panels * scale));
    const double c = g.center[ax];
    const double s2 = 2.0 * g.sigma * g.sigma;
    auto w = [c, s2](double t) { return std::exp(-(t - c) * (t - c) / s2); };
    const auto num = osc_line_integral(a, b, xi[ax], panels, w);
    const auto den = osc_line_integral(a, b, 0.0, panels, w);
    prod *= num / den.real();
  }
  return prod;
}

std::complex<double> transform_sphere(const ProbabilityMeasure::SphereData& sp,
                                      std::span<const double> xi,
                                      std::size_t budget, double scale) {
  const std::size_t d = sp.dim;
  const double R = norm2(xi);
  if (d == 1) {
    return 0.5 * (cis_neg(-xi[0] * sp.radius) + cis_neg(xi[0] * sp.radius));
  }
  if (d == 2) {
    std::size_t n =
        budget ? std::clamp<std::size_t>(budget, 64, kMaxCircleNodes)
               : std::clamp<std::size_t>(
                     static_cast<std::size_t>(4.0 * R * sp.radius) + 64, 64,
                     kMaxCircleNodes);
    n = std::max<std::size_t>(32, static_cast<std::size_t>(n * scale));
    std::vector<double> theta(n), ct(n), st(n);
    for (std::size_t i = 0; i < n; ++i)
      theta[i] = (static_cast<double>(i) + 0.5) * kTwoPi / n;
    kernels::ops().sincos(theta.data(), n, st.data(), ct.data());
    std::vector<double> px(n), py(n), phase(n), weights(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = sp.radius * ct[i];
      py[i] = sp.radius * st[i];
    }
    const double* pts[2] = {px.data(), py.data()};
    kernels::ops().dot_phase(pts, 2, n, xi.data(), phase.data());
    double wsum = static_cast<double>(n);
    if (sp.cutoff) {
      wsum = 0.0;
      double p[2];
      for (std::size_t i = 0; i < n; ++i) {
        p[0] = px[i];
        p[1] = py[i];
        weights[i] = cutoff_on_sphere(*sp.cutoff, {p, 2}, sp.radius);
        wsum += weights[i];
      }
    }
    double re = 0.0, im = 0.0;
    kernels::ops().accum_cis_neg(phase.data(), weights.data(), n, &re, &im);
    return std::complex<double>(re, im) / wsum;
  }
  if (d == 3) {
    // Rotate xi to the polar axis (the surface measure is rotation
    // invariant), so the phase depends only on the polar coordinate:
    // <xi, t> = R r z. Azimuthal rings are constant without a cutoff; with
    // one, the ring average of psi enters the z-weight.
    std::size_t panels = panels_for_phase(R * sp.radius, budget);
    panels = std::max<std::size_t>(4, static_cast<std::size_t>(panels * scale));
    const std::size_t nz = panels * 8;
    std::vector<double> phase(nz), weights(nz);
    const double h = 2.0 / static_cast<double>(panels);

    const std::size_t nphi = sp.cutoff ? 64 : 1;
    double u[3] = {0.0, 0.0, 1.0}, e1[3] = {0, 0, 0}, e2[3] = {0, 0, 0};
    if (sp.cutoff) {
      if (R > 0.0)
        for (int i = 0; i < 3; ++i) u[i] = xi[i] / R;
      const int k = std::abs(u[0]) < 0.9 ? 0 : 1;
      double tmp[3] = {0, 0, 0};
      tmp[k] = 1.0;
      const double proj = tmp[0] * u[0] + tmp[1] * u[1] + tmp[2] * u[2];
      for (int i = 0; i < 3; ++i) e1[i] = tmp[i] - proj * u[i];
      const double n1 =
          std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
      for (int i = 0; i < 3; ++i) e1[i] /= n1;
      e2[0] = u[1] * e1[2] - u[2] * e1[1];
      e2[1] = u[2] * e1[0] - u[0] * e1[2];
      e2[2] = u[0] * e1[1] - u[1] * e1[0];
    }

    double wsum = 0.0;
    double p[3];
    for (std::size_t pn = 0; pn < panels; ++pn) {
      const double mid = -1.0 + (static_cast<double>(pn) + 0.5) * h;
      for (int k = 0; k < 8; ++k) {
        const double z = mid + 0.5 * h * kGl8X[k];
        const std::size_t i = pn * 8 + k;
        phase[i] = R * sp.radius * z;
        double wt = 0.5 * h * kGl8W[k];
        if (sp.cutoff) {
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          double psum = 0.0;
          for (std::size_t ip = 0; ip < nphi; ++ip) {
            const double th = (static_cast<double>(ip) + 0.5) * kTwoPi / nphi;
            for (int ax = 0; ax < 3; ++ax)
              p[ax] = sp.radius *
                      (rho * (std::cos(th) * e1[ax] + std::sin(th) * e2[ax]) +
                       z * u[ax]);
            psum += cutoff_on_sphere(*sp.cutoff, {p, 3}, sp.radius);
          }
          wt *= psum / static_cast<double>(nphi);
        }
        weights[i] = wt;
        wsum += wt;
      }
    }
    double re = 0.0, im = 0.0;
    kernels::ops().accum_cis_neg(phase.data(), weights.data(), nz, &re, &im);
    return std::complex<double>(re, im) / wsum;
  }
  throw std::invalid_argument("sphere transform quadrature needs dim <= 3");
}

std::complex<double> transform_curve(const ProbabilityMeasure::CurveData& cd,
                                     std::span<const double> xi,
                                     std::size_t budget, double scale) {
  const std::size_t d = cd.q.size();
  double deriv_bound = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    deriv_bound += std::abs(xi[j] * cd.q[j]) * (static_cast<double>(j) + 1.0);
  std::size_t panels = panels_for_phase(deriv_bound, budget);
  panels = std::max<std::size_t>(2, static_cast<std::size_t>(panels * scale));
  const std::size_t n = panels * 8;
  std::vector<double> phase(n), weights(n);
  const double h = 1.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < 8; ++k) {
      const double w = mid + 0.5 * h * kGl8X[k];
      double ph = 0.0;
      double wp = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        wp *= w;
        ph += xi[j] * cd.q[j] * wp;
      }
      phase[p * 8 + k] = ph;
      weights[p * 8 + k] = 0.5 * h * kGl8W[k];
    }
  }
  double re = 0.0, im = 0.0;
  kernels::ops().accum_cis_neg(phase.data(), weights.data(), n, &re, &im);
  return {re, im};
}

double stable_sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Exact transform of the discretized Brownian pushforward: the truncated
// Cantor measure is uniform on its intervals and the path is linear on each
// grid step, so every overlap piece is a closed-form linear-phase segment.
std::complex<double> transform_brownian(
    const ProbabilityMeasure::BrownianData& bd, std::span<const double> xi) {
  const double res = static_cast<double>(bd.resolution);
  const double mass = 1.0 / static_cast<double>(bd.interval_starts.size());
  std::vector<double> phase, weight;
  phase.reserve(8192);
  weight.reserve(8192);
  for (double a : bd.interval_starts) {
    const double b = a + bd.interval_length;
    std::size_t seg = static_cast<std::size_t>(a * res);
    while (seg < bd.resolution && static_cast<double>(seg) / res < b) {
      const double s0 = std::max(a, static_cast<double>(seg) / res);
      const double s1 = std::min(b, static_cast<double>(seg + 1) / res);
      if (s1 > s0) {
        double base = 0.0, slope = 0.0;
        for (std::size_t ax = 0; ax < bd.dim; ++ax) {
          const double b0 = bd.path[ax][seg];
          base += xi[ax] * b0;
          slope += xi[ax] * (bd.path[ax][seg + 1] - b0) * res;
        }
        const double wmid = 0.5 * (s0 + s1);
        const double wlen = s1 - s0;
        phase.push_back(base +
                        slope * (wmid - static_cast<double>(seg) / res));
        weight.push_back(mass * (wlen / bd.interval_length) *
                         stable_sinc(0.5 * slope * wlen));
      }
      ++seg;
    }
  }
  double re = 0.0, im = 0.0;
  kernels::ops().accum_cis_neg(phase.data(), weight.data(), phase.size(), &re,
                               &im);
  return {re, im};
}

std::complex<double> transform_exact(const ProbabilityMeasure& nu,
                                     std::span<const double> xi) {
  if (nu.kind() == Kind::dirac) {
    double dot = 0.0;
    const auto& p = nu.as_dirac().point;
    for (std::size_t i = 0; i < xi.size(); ++i) dot += xi[i] * p[i];
    return cis_neg(dot);
  }
  const auto& a = nu.as_atomic();
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < a.points.size(); ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) dot += xi[i] * a.points[j][i];
    acc += a.weights[j] * cis_neg(dot);
  }
  return acc;
}

std::complex<double> transform_pass(const ProbabilityMeasure& nu,
                                    std::span<const double> xi,
                                    std::size_t budget, double scale) {
  switch (nu.kind()) {
    case Kind::dirac:
    case Kind::atomic:
      return transform_exact(nu, xi);
    case Kind::lebesgue_box:
      return transform_box(nu.as_box(), xi, budget, scale);
    case Kind::gaussian:
      return transform_gaussian(nu.as_gaussian(), xi, budget, scale);
    case Kind::sphere:
      return transform_sphere(nu.as_sphere(), xi, budget, scale);
    case Kind::curve:
      return transform_curve(nu.as_curve(), xi, budget, scale);
    case Kind::brownian:
      return transform_brownian(nu.as_brownian(), xi);
    case Kind::dilated: {
      const auto& dd = nu.as_dilated();
      const auto lxi = dd.dil.apply(dd.lambda, xi);
      return transform_pass(*dd.inner, lxi, budget, scale);
    }
  }
  throw std::logic_error("unreachable");
}

bool transform_has_zero_error(const ProbabilityMeasure& nu) {
  switch (nu.kind()) {
    case Kind::dirac:
    case Kind::atomic:
    case Kind::brownian:
      return true;
    case Kind::dilated:
      return transform_has_zero_error(*nu.as_dilated().inner);
    default:
      return false;
  }
}

}  // namespace

TransformValue fourier_transform(const ProbabilityMeasure& nu,
                                 std::span<const double> xi,
                                 std::size_t budget, std::uint64_t seed) {
  if (xi.size() != nu.dim())
    throw std::invalid_argument(
        "fourier_transform: frequency dimension mismatch");
  if (!nu.has_quadrature())
    return fourier_transform_mc(nu, xi, budget ? budget : 100000, seed);
  if (transform_has_zero_error(nu))
    return TransformValue{transform_pass(nu, xi, budget, 1.0), 0.0};
  const auto fine = transform_pass(nu, xi, budget, 1.0);
  const auto coarse = transform_pass(nu, xi, budget, 0.5);
  return TransformValue{fine, std::abs(fine - coarse)};
}

TransformValue fourier_transform_mc(const ProbabilityMeasure& nu,
                                    std::span<const double> xi, std::size_t n,
                                    std::uint64_t seed) {
  if (xi.size() != nu.dim())
    throw std::invalid_argument(
        "fourier_transform: frequency dimension mismatch");
  if (n < 2) throw std::invalid_argument("fourier_transform_mc: n must be >= 2");
  constexpr std::size_t kBlock = 4096;
  measures::PointBatch batch;
  batch.resize(nu.dim(), std::min(n, kBlock));
  std::vector<double> phase(std::min(n, kBlock));
  std::vector<const double*> pts(nu.dim());
  double re = 0.0, im = 0.0;
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t count = std::min(kBlock, n - start);
    nu.sample_into(seed, start, count, batch, 0);
    for (std::size_t ax = 0; ax < nu.dim(); ++ax)
      pts[ax] = batch.coords[ax].data();
    kernels::ops().dot_phase(pts.data(), nu.dim(), count, xi.data(),
                             phase.data());
    kernels::ops().accum_cis_neg(phase.data(), nullptr, count, &re, &im);
  }
  const std::complex<double> mean(re / static_cast<double>(n),
                                  im / static_cast<double>(n));
  // each term has unit modulus, so sum |z_i|^2 = n
  const double var =
      std::max(0.0, (static_cast<double>(n) * (1.0 - std::norm(mean))) /
                        (static_cast<double>(n) - 1.0));
  return TransformValue{mean, 3.0 * std::sqrt(var / static_cast<double>(n))};
}

TransformValue fourier_of_dilated(const ProbabilityMeasure& nu,
                                  const Dilation& dil, double lambda,
                                  std::span<const double> xi,
                                  std::size_t budget, std::uint64_t seed) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("fourier_of_dilated: lambda must be positive");
  const auto lxi = dil.apply(lambda, xi);
  return fourier_transform(nu, lxi, budget, seed);
}

// ---- directions ------------------------------------------------------------

std::vector<std::vector<double>> unit_directions(std::size_t d, std::size_t n,
                                                 std::uint64_t seed) {
  if (d == 0 || n == 0)
    throw std::invalid_argument("unit_directions: empty request");
  std::vector<std::vector<double>> dirs;
  if (d == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  const RngStream rs(seed, substream(stream_tag::directions, 0));
  if (d == 2) {
    const double offset = rs.uniform(0);
    dirs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double th = kTwoPi * (static_cast<double>(i) + offset) / n;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  if (d == 3) {
    const double offset = kTwoPi * rs.uniform(0);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    dirs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = golden * static_cast<double>(i) + offset;
      dirs.push_back({rho * std::cos(th), rho * std::sin(th), z});
    }
    return dirs;
  }
  dirs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RngStream rsi(seed, substream(stream_tag::directions, i + 1));
    std::vector<double> v(d);
    double nr2 = 0.0;
    for (std::size_t ax = 0; ax < d; ++ax) {
      v[ax] = rsi.normal_at(ax);
      nr2 += v[ax] * v[ax];
    }
    const double inv = 1.0 / std::sqrt(std::max(nr2, 1e-300));
    for (auto& x : v) x *= inv;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

// ---- decay profile ---------------------------------------------------------

DecayProfile decay_profile(const ProbabilityMeasure& nu,
                           std::vector<double> radii, std::size_t n_directions,
                           std::size_t budget, std::uint64_t seed,
                           int workers) {
  if (radii.empty()) throw std::invalid_argument("decay_profile: empty radii");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw std::invalid_argument(
          "decay_profile: radii must be strictly increasing");
  if (!(radii.front() > 0.0))
    throw std::invalid_argument("decay_profile: radii must be positive");

  const std::size_t d = nu.dim();
  if (n_directions == 0) n_directions = 64 * d;
  const auto dirs = unit_directions(d, n_directions, seed);

  DecayProfile prof;
  prof.radii = std::move(radii);
  prof.sup_modulus.assign(prof.radii.size(), 0.0);
  prof.mean_modulus.assign(prof.radii.size(), 0.0);
  prof.n_directions = dirs.size();
  prof.quadrature_budget = budget;
  prof.seed = seed;
  prof.dim = d;

  parallel_for(prof.radii.size(), workers, [&](std::size_t rid) {
    const double R = prof.radii[rid];
    double sup = 0.0, mean = 0.0;
    std::vector<double> xi(d);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      for (std::size_t ax = 0; ax < d; ++ax) xi[ax] = R * dirs[k][ax];
      const auto tv = fourier_transform(nu, xi, budget, seed);
      const double m = std::min(std::abs(tv.value), 1.0);
      sup = std::max(sup, m);
      mean += m;
    }
    prof.sup_modulus[rid] = sup;
    prof.mean_modulus[rid] = mean / static_cast<double>(dirs.size());
  });
  return prof;
}

std::string DecayProfile::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "radius,sup_modulus,mean_modulus,n_directions\n";
  for (std::size_t i = 0; i < radii.size(); ++i)
    os << radii[i] << ',' << sup_modulus[i] << ',' << mean_modulus[i] << ','
       << n_directions << '\n';
  return os.str();
}

nlohmann::json DecayProfile::to_json() const {
  return nlohmann::json{{"radii", radii},
                        {"sup_modulus", sup_modulus},
                        {"mean_modulus", mean_modulus},
                        {"n_directions", n_directions},
                        {"quadrature_budget", quadrature_budget},
                        {"seed", seed},
                        {"dim", dim}};
}

// ---- dimension estimate ----------------------------------------------------

DimensionEstimate estimate_fourier_dimension(const DecayProfile& profile,
                                             std::size_t first,
                                             std::size_t last) {
  DimensionEstimate est;
  if (last >= profile.radii.size() || first > last || last - first + 1 < 3)
    throw std::invalid_argument(
        "estimate_fourier_dimension: fit window needs >= 3 radii");

  constexpr double kFloor = 1e-14;
  std::vector<double> xs, ys;
  for (std::size_t i = first; i <= last; ++i) {
    const double s = profile.sup_modulus[i];
    if (s > kFloor) {
      xs.push_back(std::log(profile.radii[i]));
      ys.push_back(std::log(s));
    }
  }
  if (xs.size() < 3) {
    est.ok = false;
    est.message = "decay too fast to resolve (sup modulus at machine floor)";
    return est;
  }

  const double n = static_cast<double>(xs.size());
  const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (sxx <= 0.0) {
    est.ok = false;
    est.message = "degenerate fit window";
    return est;
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - ybar - slope * (xs[i] - xbar);
    rss += r * r;
  }
  const double slope_se = std::sqrt(rss / (n - 2.0) / sxx);

  est.slope = slope;
  est.a_hat = std::clamp(-2.0 * slope, 0.0, static_cast<double>(profile.dim));
  est.stderr_a = 2.0 * slope_se;
  est.ok = true;
  return est;
}

double rajchman_defect(const DecayProfile& profile, double tail_fraction) {
  if (profile.radii.empty())
    throw std::invalid_argument("rajchman_defect: empty profile");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
    throw std::invalid_argument(
        "rajchman_defect: tail_fraction must be in (0,1]");
  const std::size_t n = profile.radii.size();
  const std::size_t m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  double mx = 0.0;
  for (std::size_t i = n - m; i < n; ++i)
    mx = std::max(mx, profile.sup_modulus[i]);
  return mx;
}

// ---- Sobolev energy --------------------------------------------------------

SobolevEnergy sobolev_energy(const ProbabilityMeasure& nu, double a,
                             double r_min, double r_max, std::size_t budget,
                             std::uint64_t seed, int workers) {
  const std::size_t d = nu.dim();
  if (!(a > 0.0 && a < static_cast<double>(d)))
    throw std::invalid_argument("sobolev_energy: a must be in (0, d)");
  if (!(r_min >= 1.0) || !(r_max > r_min))
    throw std::invalid_argument("sobolev_energy: need 1 <= r_min < r_max");

  SobolevEnergy out;
  double lo = r_min;
  while (lo < r_max) {
    const double hi = std::min(lo * 10.0, r_max);
    out.decade_lower.push_back(lo);
    out.decade_upper.push_back(hi);
    lo = hi;
  }
  out.increments.assign(out.decade_lower.size(), 0.0);

  const std::size_t n_dirs = d == 1 ? 2 : 16 * d;
  const auto dirs = unit_directions(d, n_dirs, seed);
  const double omega =
      2.0 * std::pow(kPi, 0.5 * static_cast<double>(d)) /
      std::tgamma(0.5 * static_cast<double>(d));
  const std::size_t radial_nodes = std::max<std::size_t>(budget ? budget : 64, 8);

  constexpr double kGl4X[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
  constexpr double kGl4W[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

  parallel_for(out.decade_lower.size(), workers, [&](std::size_t k) {
    const double A = out.decade_lower[k];
    const double B = out.decade_upper[k];
    const std::size_t panels = (radial_nodes + 3) / 4;
    const double la = std::log(A), lb = std::log(B);
    const double h = (lb - la) / static_cast<double>(panels);
    double acc = 0.0;
    std::vector<double> xi(d);
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = la + (static_cast<double>(p) + 0.5) * h;
      for (int g = 0; g < 4; ++g) {
        const double r = std::exp(mid + 0.5 * h * kGl4X[g]);
        double mean = 0.0;
        for (const auto& u : dirs) {
          for (std::size_t ax = 0; ax < d; ++ax) xi[ax] = r * u[ax];
          mean += std::norm(fourier_transform(nu, xi, 0, seed).value);
        }
        mean /= static_cast<double>(dirs.size());
        // d xi = omega r^{d-1} dr, integrand |nu_hat|^2 r^{a-d}, dr = r d(log r)
        acc += 0.5 * h * kGl4W[g] * omega * mean * std::pow(r, a);
      }
    }
    out.increments[k] = acc;
  });
  out.value =
      std::accumulate(out.increments.begin(), out.increments.end(), 0.0);
  return out;
}

double critical_exponent(double a) {
  if (!(a > 0.0))
    throw std::invalid_argument("critical_exponent: a must be positive");
  return (1.0 + a) / a;
}

}  // namespace ergolab::fourier
