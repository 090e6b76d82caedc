#include "ergolab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ergolab/rng.hpp"

namespace ergolab::measures {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWeightSumTol = 1e-12;
constexpr std::size_t kDefaultAtomCap = 400000;
constexpr double kGaussianBoxSigmas = 8.0;   // declared support box
constexpr double kGaussianQuadSigmas = 6.0;  // quadrature/atomization range

// 4-point Gauss-Legendre on [-1,1].
constexpr double kGl4X[4] = {-0.8611363115940526, -0.3399810435848563,
                             0.3399810435848563, 0.8611363115940526};
constexpr double kGl4W[4] = {0.3478548451374538, 0.6521451548625461,
                             0.6521451548625461, 0.3478548451374538};

double sum_weights(const std::vector<double>& w) {
  return std::accumulate(w.begin(), w.end(), 0.0);
}

void check_probability_weights(const std::vector<double>& w) {
  for (double x : w)
    if (!(x >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
  if (std::abs(sum_weights(w) - 1.0) > kWeightSumTol)
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
}

double cutoff_value(const SphereCutoff& c, std::span<const double> t,
                    double radius) {
  double dot = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) dot += c.axis[i] * t[i];
  const double s = dot / radius - std::cos(c.width);
  if (s <= 0.0) return 0.0;
  double v = 1.0;
  for (int k = 0; k < c.power; ++k) v *= s;
  return v;
}

std::vector<double> curve_point(const std::vector<double>& q, double w) {
  std::vector<double> p(q.size());
  double wp = 1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    wp *= w;
    p[i] = q[i] * wp;
  }
  return p;
}

double curve_speed_bound(const std::vector<double>& q) {
  double L = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    L += (static_cast<double>(i) + 1.0) * std::abs(q[i]);
  return L;
}

}  // namespace

// ---- PointBatch ------------------------------------------------------------

void PointBatch::resize(std::size_t d, std::size_t count) {
  dim = d;
  n = count;
  coords.assign(d, std::vector<double>(count, 0.0));
}

std::vector<double> PointBatch::point(std::size_t i) const {
  std::vector<double> p(dim);
  for (std::size_t ax = 0; ax < dim; ++ax) p[ax] = coords[ax][i];
  return p;
}

// ---- construction ----------------------------------------------------------

ProbabilityMeasure::ProbabilityMeasure(std::size_t dim, Payload payload)
    : dim_(dim), payload_(std::move(payload)) {}

ProbabilityMeasure ProbabilityMeasure::dirac(std::vector<double> point) {
  if (point.empty()) throw std::invalid_argument("dirac: empty point");
  const std::size_t d = point.size();
  return ProbabilityMeasure(d, DiracData{std::move(point)});
}

ProbabilityMeasure ProbabilityMeasure::atomic(
    std::vector<std::vector<double>> points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size())
    throw std::invalid_argument("atomic: points/weights size mismatch");
  const std::size_t d = points[0].size();
  for (const auto& p : points)
    if (p.size() != d) throw std::invalid_argument("atomic: ragged points");
  check_probability_weights(weights);
  AtomicData data{std::move(points), std::move(weights), {}};
  data.cumulative.resize(data.weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < data.weights.size(); ++i) {
    acc += data.weights[i];
    data.cumulative[i] = acc;
  }
  data.cumulative.back() = 1.0;
  return ProbabilityMeasure(d, std::move(data));
}

ProbabilityMeasure ProbabilityMeasure::lebesgue_box(std::vector<double> lower,
                                                    std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("box: corner dimension mismatch");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("box: lower corner must be below upper");
  const std::size_t d = lower.size();
  return ProbabilityMeasure(d, BoxData{std::move(lower), std::move(upper)});
}

ProbabilityMeasure ProbabilityMeasure::gaussian(std::vector<double> center,
                                                double sigma) {
  if (center.empty()) throw std::invalid_argument("gaussian: empty center");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  const std::size_t d = center.size();
  return ProbabilityMeasure(d, GaussianData{std::move(center), sigma});
}

ProbabilityMeasure ProbabilityMeasure::sphere(std::size_t dim, double radius) {
  if (dim < 1) throw std::invalid_argument("sphere: dim must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  return ProbabilityMeasure(dim, SphereData{dim, radius, std::nullopt});
}

ProbabilityMeasure ProbabilityMeasure::sphere(std::size_t dim, double radius,
                                              SphereCutoff cutoff) {
  if (dim < 1) throw std::invalid_argument("sphere: dim must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
  if (cutoff.axis.size() != dim)
    throw std::invalid_argument("sphere: cutoff axis dimension mismatch");
  if (!(cutoff.width > 0.0 && cutoff.width <= kPi) || cutoff.power < 1)
    throw std::invalid_argument("sphere: bad cutoff parameters");
  double norm = 0.0;
  for (double x : cutoff.axis) norm += x * x;
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::invalid_argument("sphere: zero cutoff axis");
  for (double& x : cutoff.axis) x /= norm;
  return ProbabilityMeasure(dim, SphereData{dim, radius, std::move(cutoff)});
}

ProbabilityMeasure ProbabilityMeasure::curve(std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("curve: empty coefficients");
  for (double q : coefficients)
    if (q == 0.0 || !std::isfinite(q))
      throw std::invalid_argument("curve: coefficients must be nonzero reals");
  const std::size_t d = coefficients.size();
  return ProbabilityMeasure(d, CurveData{std::move(coefficients)});
}

ProbabilityMeasure ProbabilityMeasure::brownian_image(double ratio, int depth,
                                                      std::size_t dim,
                                                      std::uint64_t path_seed,
                                                      std::size_t resolution) {
  if (!(ratio > 0.0 && ratio <= 0.5))
    throw std::invalid_argument("brownian_image: ratio must be in (0, 1/2]");
  if (depth < 1) throw std::invalid_argument("brownian_image: depth must be >= 1");
  if (dim < 2) throw std::invalid_argument("brownian_image: ambient dim must be >= 2");
  const double interval_length = std::pow(ratio, depth);
  const double required = 4.0 / interval_length;
  if (static_cast<double>(resolution) < required)
    throw std::invalid_argument(
        "brownian_image: resolution " + std::to_string(resolution) +
        " too coarse for depth " + std::to_string(depth) +
        "; need at least " + std::to_string(static_cast<std::size_t>(required) + 1) +
        " path steps");
  if (resolution > (1ull << 26))
    throw std::invalid_argument("brownian_image: resolution too large");

  auto data = std::make_shared<BrownianData>();
  data->ratio = ratio;
  data->depth = depth;
  data->dim = dim;
  data->path_seed = path_seed;
  data->resolution = resolution;
  data->interval_length = interval_length;

  // Standard-normal increments on a uniform grid, linear in between.
  const double sqrt_dt = std::sqrt(1.0 / static_cast<double>(resolution));
  data->path.assign(dim, std::vector<double>(resolution + 1, 0.0));
  for (std::size_t ax = 0; ax < dim; ++ax) {
    RngStream rs(path_seed, substream(stream_tag::brownian_path, ax));
    double acc = 0.0;
    for (std::size_t j = 0; j < resolution; ++j) {
      acc += sqrt_dt * rs.normal_at(j);
      data->path[ax][j + 1] = acc;
    }
  }

  const std::size_t count = 1ull << depth;
  data->interval_starts.resize(count);
  for (std::size_t m = 0; m < count; ++m) {
    double a = 0.0;
    double scale = 1.0;
    for (int lvl = 0; lvl < depth; ++lvl) {
      const std::size_t bit = (m >> (depth - 1 - lvl)) & 1u;
      if (bit) a += (1.0 - ratio) * scale;
      scale *= ratio;
    }
    data->interval_starts[m] = a;
  }
  return ProbabilityMeasure(dim, std::move(data));
}

ProbabilityMeasure ProbabilityMeasure::dilated(const Dilation& dil,
                                               double lambda) const {
  if (dil.dim() != dim_)
    throw std::invalid_argument("dilated: dilation dimension mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("dilated: lambda must be positive");
  const auto s = dil.scales(lambda);
  switch (kind()) {
    case Kind::dirac: {
      auto p = as_dirac().point;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] *= s[i];
      return dirac(std::move(p));
    }
    case Kind::atomic: {
      auto pts = as_atomic().points;
      for (auto& p : pts)
        for (std::size_t i = 0; i < p.size(); ++i) p[i] *= s[i];
      return atomic(std::move(pts), as_atomic().weights);
    }
    case Kind::dilated: {
      const auto& dd = as_dilated();
      if (dd.dil == dil)
        return ProbabilityMeasure(
            dim_, DilatedData{dd.inner, dil, dd.lambda * lambda});
      break;
    }
    default:
      break;
  }
  return ProbabilityMeasure(
      dim_, DilatedData{std::make_shared<ProbabilityMeasure>(*this), dil, lambda});
}

// ---- kind / accessors ------------------------------------------------------

ProbabilityMeasure::Kind ProbabilityMeasure::kind() const {
  struct Visitor {
    Kind operator()(const DiracData&) const { return Kind::dirac; }
    Kind operator()(const AtomicData&) const { return Kind::atomic; }
    Kind operator()(const BoxData&) const { return Kind::lebesgue_box; }
    Kind operator()(const GaussianData&) const { return Kind::gaussian; }
    Kind operator()(const SphereData&) const { return Kind::sphere; }
    Kind operator()(const CurveData&) const { return Kind::curve; }
    Kind operator()(const std::shared_ptr<const BrownianData>&) const {
      return Kind::brownian;
    }
    Kind operator()(const DilatedData&) const { return Kind::dilated; }
  };
  return std::visit(Visitor{}, payload_);
}

namespace {
[[noreturn]] void bad_kind(const char* want) {
  throw std::logic_error(std::string("measure is not of kind ") + want);
}
}  // namespace

const ProbabilityMeasure::DiracData& ProbabilityMeasure::as_dirac() const {
  if (auto* p = std::get_if<DiracData>(&payload_)) return *p;
  bad_kind("dirac");
}
const ProbabilityMeasure::AtomicData& ProbabilityMeasure::as_atomic() const {
  if (auto* p = std::get_if<AtomicData>(&payload_)) return *p;
  bad_kind("atomic");
}
const ProbabilityMeasure::BoxData& ProbabilityMeasure::as_box() const {
  if (auto* p = std::get_if<BoxData>(&payload_)) return *p;
  bad_kind("lebesgue_box");
}
const ProbabilityMeasure::GaussianData& ProbabilityMeasure::as_gaussian() const {
  if (auto* p = std::get_if<GaussianData>(&payload_)) return *p;
  bad_kind("gaussian");
}
const ProbabilityMeasure::SphereData& ProbabilityMeasure::as_sphere() const {
  if (auto* p = std::get_if<SphereData>(&payload_)) return *p;
  bad_kind("sphere");
}
const ProbabilityMeasure::CurveData& ProbabilityMeasure::as_curve() const {
  if (auto* p = std::get_if<CurveData>(&payload_)) return *p;
  bad_kind("curve");
}
const ProbabilityMeasure::BrownianData& ProbabilityMeasure::as_brownian() const {
  if (auto* p = std::get_if<std::shared_ptr<const BrownianData>>(&payload_))
    return **p;
  bad_kind("brownian");
}
const ProbabilityMeasure::DilatedData& ProbabilityMeasure::as_dilated() const {
  if (auto* p = std::get_if<DilatedData>(&payload_)) return *p;
  bad_kind("dilated");
}

bool ProbabilityMeasure::is_exact() const {
  const Kind k = kind();
  if (k == Kind::dirac || k == Kind::atomic) return true;
  if (k == Kind::dilated) return as_dilated().inner->is_exact();
  return false;
}

bool ProbabilityMeasure::has_quadrature() const {
  switch (kind()) {
    case Kind::dirac:
    case Kind::atomic:
      return true;
    case Kind::lebesgue_box:
    case Kind::gaussian:
      return dim_ <= 3;
    case Kind::sphere:
      return dim_ <= 3;
    case Kind::curve:
    case Kind::brownian:
      return true;
    case Kind::dilated:
      return as_dilated().inner->has_quadrature();
  }
  return false;
}

Box ProbabilityMeasure::bounding_box() const {
  switch (kind()) {
    case Kind::dirac:
      return Box{as_dirac().point, as_dirac().point};
    case Kind::atomic: {
      const auto& a = as_atomic();
      Box b{a.points[0], a.points[0]};
      for (const auto& p : a.points)
        for (std::size_t i = 0; i < p.size(); ++i) {
          b.lower[i] = std::min(b.lower[i], p[i]);
          b.upper[i] = std::max(b.upper[i], p[i]);
        }
      return b;
    }
    case Kind::lebesgue_box:
      return Box{as_box().lower, as_box().upper};
    case Kind::gaussian: {
      const auto& g = as_gaussian();
      Box b{g.center, g.center};
      for (std::size_t i = 0; i < dim_; ++i) {
        b.lower[i] -= kGaussianBoxSigmas * g.sigma;
        b.upper[i] += kGaussianBoxSigmas * g.sigma;
      }
      return b;
    }
    case Kind::sphere: {
      const double r = as_sphere().radius;
      return Box{std::vector<double>(dim_, -r), std::vector<double>(dim_, r)};
    }
    case Kind::curve: {
      const auto& q = as_curve().q;
      Box b{std::vector<double>(dim_), std::vector<double>(dim_)};
      for (std::size_t i = 0; i < dim_; ++i) {
        b.lower[i] = std::min(0.0, q[i]);
        b.upper[i] = std::max(0.0, q[i]);
      }
      return b;
    }
    case Kind::brownian: {
      const auto& bd = as_brownian();
      Box b{std::vector<double>(dim_), std::vector<double>(dim_)};
      for (std::size_t ax = 0; ax < dim_; ++ax) {
        const auto [mn, mx] =
            std::minmax_element(bd.path[ax].begin(), bd.path[ax].end());
        b.lower[ax] = *mn;
        b.upper[ax] = *mx;
      }
      return b;
    }
    case Kind::dilated: {
      const auto& dd = as_dilated();
      Box b = dd.inner->bounding_box();
      const auto s = dd.dil.scales(dd.lambda);
      for (std::size_t i = 0; i < dim_; ++i) {
        b.lower[i] *= s[i];
        b.upper[i] *= s[i];
      }
      return b;
    }
  }
  throw std::logic_error("unreachable");
}

// ---- sampling --------------------------------------------------------------

namespace {

// Draw point `index` of the sample stream into out.coords[*][slot].
void sample_one(const ProbabilityMeasure& nu, std::uint64_t seed,
                std::uint64_t index, PointBatch& out, std::size_t slot) {
  using Kind = ProbabilityMeasure::Kind;
  const RngStream rs(seed, substream(stream_tag::sample, index));
  const std::size_t d = nu.dim();
  switch (nu.kind()) {
    case Kind::dirac: {
      const auto& p = nu.as_dirac().point;
      for (std::size_t ax = 0; ax < d; ++ax) out.coords[ax][slot] = p[ax];
      return;
    }
    case Kind::atomic: {
      const auto& a = nu.as_atomic();
      const double u = rs.uniform(0);
      const auto it =
          std::upper_bound(a.cumulative.begin(), a.cumulative.end(), u);
      const std::size_t j = std::min<std::size_t>(
          static_cast<std::size_t>(it - a.cumulative.begin()),
          a.points.size() - 1);
      for (std::size_t ax = 0; ax < d; ++ax)
        out.coords[ax][slot] = a.points[j][ax];
      return;
    }
    case Kind::lebesgue_box: {
      const auto& b = nu.as_box();
      for (std::size_t ax = 0; ax < d; ++ax) {
        const double u = rs.uniform2(ax >> 1)[ax & 1];
        out.coords[ax][slot] = b.lower[ax] + u * (b.upper[ax] - b.lower[ax]);
      }
      return;
    }
    case Kind::gaussian: {
      const auto& g = nu.as_gaussian();
      const double lim = kGaussianBoxSigmas * g.sigma;
      for (std::size_t ax = 0; ax < d; ++ax) {
        const double z = rs.normal_at(ax);
        out.coords[ax][slot] =
            g.center[ax] + std::clamp(z * g.sigma, -lim, lim);
      }
      return;
    }
    case Kind::sphere: {
      const auto& sp = nu.as_sphere();
      // Rejection attempts advance through the stream's counter space;
      // uniforms for the cutoff test live in a disjoint block range.
      std::vector<double> v(d);
      for (std::uint64_t attempt = 0;; ++attempt) {
        double norm2 = 0.0;
        for (std::size_t ax = 0; ax < d; ++ax) {
          v[ax] = rs.normal_at(attempt * d + ax);
          norm2 += v[ax] * v[ax];
        }
        if (norm2 < 1e-24) continue;
        const double scale = sp.radius / std::sqrt(norm2);
        for (std::size_t ax = 0; ax < d; ++ax) v[ax] *= scale;
        if (sp.cutoff) {
          const double pmax =
              std::pow(1.0 - std::cos(sp.cutoff->width), sp.cutoff->power);
          const double accept = cutoff_value(*sp.cutoff, v, sp.radius);
          const double u = rs.uniform((1ull << 32) + attempt);
          if (u * pmax > accept) continue;
        }
        for (std::size_t ax = 0; ax < d; ++ax) out.coords[ax][slot] = v[ax];
        return;
      }
    }
    case Kind::curve: {
      const auto p = curve_point(nu.as_curve().q, rs.uniform(0));
      for (std::size_t ax = 0; ax < d; ++ax) out.coords[ax][slot] = p[ax];
      return;
    }
    case Kind::brownian: {
      const auto& bd = nu.as_brownian();
      const std::uint64_t j =
          rs.uniform_index(0, bd.interval_starts.size());
      const double u = rs.uniform(1);
      const double w = bd.interval_starts[j] + u * bd.interval_length;
      const double x = w * static_cast<double>(bd.resolution);
      std::size_t seg = std::min<std::size_t>(static_cast<std::size_t>(x),
                                              bd.resolution - 1);
      const double frac = x - static_cast<double>(seg);
      for (std::size_t ax = 0; ax < d; ++ax) {
        const double* pa = bd.path[ax].data();
        out.coords[ax][slot] = pa[seg] + frac * (pa[seg + 1] - pa[seg]);
      }
      return;
    }
    case Kind::dilated: {
      const auto& dd = nu.as_dilated();
      sample_one(*dd.inner, seed, index, out, slot);
      const auto s = dd.dil.scales(dd.lambda);
      for (std::size_t ax = 0; ax < d; ++ax) out.coords[ax][slot] *= s[ax];
      return;
    }
  }
}

}  // namespace

void ProbabilityMeasure::sample_into(std::uint64_t seed, std::size_t first,
                                     std::size_t count, PointBatch& out,
                                     std::size_t out_offset) const {
  for (std::size_t i = 0; i < count; ++i)
    sample_one(*this, seed, first + i, out, out_offset + i);
}

PointBatch ProbabilityMeasure::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  PointBatch out;
  out.resize(dim_, n);
  sample_into(seed, 0, n, out, 0);
  return out;
}

// ---- quadrature atoms ------------------------------------------------------

namespace {

void append_atom(QuadratureAtoms& qa, std::span<const double> p, double w) {
  for (std::size_t ax = 0; ax < p.size(); ++ax)
    qa.points.coords[ax].push_back(p[ax]);
  qa.weights.push_back(w);
  qa.points.n = qa.weights.size();
}

QuadratureAtoms atoms_grid_box(const std::vector<double>& lower,
                               const std::vector<double>& upper,
                               double spacing, std::size_t cap,
                               const std::function<double(std::span<const double>)>& density) {
  const std::size_t d = lower.size();
  std::vector<std::size_t> counts(d);
  double total = 1.0;
  for (std::size_t ax = 0; ax < d; ++ax) {
    counts[ax] = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((upper[ax] - lower[ax]) / spacing)));
    total *= static_cast<double>(counts[ax]);
  }
  if (total > static_cast<double>(cap)) {
    const double f = std::pow(static_cast<double>(cap) / total,
                              1.0 / static_cast<double>(d));
    for (auto& c : counts)
      c = std::max<std::size_t>(1, static_cast<std::size_t>(
                                       std::floor(static_cast<double>(c) * f)));
  }
  std::size_t n = 1;
  for (auto c : counts) n *= c;

  QuadratureAtoms qa;
  qa.points.resize(d, 0);
  std::vector<double> p(d);
  std::vector<std::size_t> idx(d, 0);
  double wsum = 0.0;
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (std::size_t ax = d; ax-- > 0;) {
      idx[ax] = rem % counts[ax];
      rem /= counts[ax];
    }
    for (std::size_t ax = 0; ax < d; ++ax) {
      const double step = (upper[ax] - lower[ax]) / static_cast<double>(counts[ax]);
      p[ax] = lower[ax] + (static_cast<double>(idx[ax]) + 0.5) * step;
    }
    const double w = density ? density(p) : 1.0;
    append_atom(qa, p, w);
    wsum += w;
  }
  if (wsum > 0.0)
    for (auto& w : qa.weights) w /= wsum;
  return qa;
}

}  // namespace

QuadratureAtoms ProbabilityMeasure::quadrature_atoms(double target_spacing,
                                                     std::size_t max_atoms) const {
  if (!(target_spacing > 0.0))
    throw std::invalid_argument("quadrature_atoms: spacing must be positive");
  const std::size_t cap = max_atoms ? max_atoms : kDefaultAtomCap;
  const std::size_t d = dim_;

  switch (kind()) {
    case Kind::dirac: {
      QuadratureAtoms qa;
      qa.points.resize(d, 0);
      append_atom(qa, as_dirac().point, 1.0);
      return qa;
    }
    case Kind::atomic: {
      const auto& a = as_atomic();
      QuadratureAtoms qa;
      qa.points.resize(d, 0);
      for (std::size_t i = 0; i < a.points.size(); ++i)
        append_atom(qa, a.points[i], a.weights[i]);
      return qa;
    }
    case Kind::lebesgue_box:
      return atoms_grid_box(as_box().lower, as_box().upper, target_spacing, cap,
                            nullptr);
    case Kind::gaussian: {
      const auto& g = as_gaussian();
      std::vector<double> lo(d), hi(d);
      for (std::size_t ax = 0; ax < d; ++ax) {
        lo[ax] = g.center[ax] - kGaussianQuadSigmas * g.sigma;
        hi[ax] = g.center[ax] + kGaussianQuadSigmas * g.sigma;
      }
      const double s2 = 2.0 * g.sigma * g.sigma;
      auto density = [&](std::span<const double> p) {
        double e = 0.0;
        for (std::size_t ax = 0; ax < d; ++ax) {
          const double dx = p[ax] - g.center[ax];
          e += dx * dx;
        }
        return std::exp(-e / s2);
      };
      return atoms_grid_box(lo, hi, target_spacing, cap, density);
    }
    case Kind::sphere: {
      const auto& sp = as_sphere();
      QuadratureAtoms qa;
      qa.points.resize(d, 0);
      if (d == 1) {
        const double pts[2] = {-sp.radius, sp.radius};
        for (double x : pts) append_atom(qa, std::span<const double>(&x, 1), 0.5);
        return qa;
      }
      if (d == 2) {
        const std::size_t n = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::ceil(2.0 * kPi * sp.radius / target_spacing)),
            16, cap);
        double wsum = 0.0;
        std::vector<double> p(2);
        for (std::size_t i = 0; i < n; ++i) {
          const double th = (static_cast<double>(i) + 0.5) * 2.0 * kPi / n;
          p[0] = sp.radius * std::cos(th);
          p[1] = sp.radius * std::sin(th);
          const double w = sp.cutoff ? cutoff_value(*sp.cutoff, p, sp.radius) : 1.0;
          append_atom(qa, p, w);
          wsum += w;
        }
        for (auto& w : qa.weights) w /= wsum;
        return qa;
      }
      if (d == 3) {
        // Fibonacci lattice; neighbour spacing ~ sqrt(4*pi/n) * r.
        const std::size_t n = std::clamp<std::size_t>(
            static_cast<std::size_t>(
                std::ceil(4.0 * kPi * sp.radius * sp.radius /
                          (target_spacing * target_spacing))),
            64, cap);
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        double wsum = 0.0;
        std::vector<double> p(3);
        for (std::size_t i = 0; i < n; ++i) {
          const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          const double th = golden * static_cast<double>(i);
          p[0] = sp.radius * rho * std::cos(th);
          p[1] = sp.radius * rho * std::sin(th);
          p[2] = sp.radius * z;
          const double w = sp.cutoff ? cutoff_value(*sp.cutoff, p, sp.radius) : 1.0;
          append_atom(qa, p, w);
          wsum += w;
        }
        for (auto& w : qa.weights) w /= wsum;
        return qa;
      }
      throw std::invalid_argument("sphere quadrature atoms need dim <= 3");
    }
    case Kind::curve: {
      const auto& q = as_curve().q;
      const double L = std::max(curve_speed_bound(q), 1e-30);
      const std::size_t n = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::ceil(L / target_spacing)), 8, cap);
      QuadratureAtoms qa;
      qa.points.resize(d, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = (static_cast<double>(i) + 0.5) / n;
        append_atom(qa, curve_point(q, w), 1.0 / static_cast<double>(n));
      }
      return qa;
    }
    case Kind::brownian: {
      const auto& bd = as_brownian();
      const double res = static_cast<double>(bd.resolution);
      const double mass =
          1.0 / static_cast<double>(bd.interval_starts.size());
      QuadratureAtoms qa;
      qa.points.resize(d, 0);
      std::vector<double> p(d);
      for (double a : bd.interval_starts) {
        const double b = a + bd.interval_length;
        std::size_t seg = static_cast<std::size_t>(a * res);
        while (seg < bd.resolution &&
               static_cast<double>(seg) / res < b) {
          const double s0 = std::max(a, static_cast<double>(seg) / res);
          const double s1 = std::min(b, static_cast<double>(seg + 1) / res);
          if (s1 > s0) {
            double v2 = 0.0;
            for (std::size_t ax = 0; ax < d; ++ax) {
              const double dv = (bd.path[ax][seg + 1] - bd.path[ax][seg]) * res;
              v2 += dv * dv;
            }
            const double image_len = (s1 - s0) * std::sqrt(v2);
            const std::size_t sub = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::ceil(image_len / target_spacing)));
            const double dw = (s1 - s0) / static_cast<double>(sub);
            for (std::size_t k = 0; k < sub; ++k) {
              const double w = s0 + (static_cast<double>(k) + 0.5) * dw;
              const double x = w * res;
              const double frac = x - static_cast<double>(seg);
              for (std::size_t ax = 0; ax < d; ++ax)
                p[ax] = bd.path[ax][seg] +
                        frac * (bd.path[ax][seg + 1] - bd.path[ax][seg]);
              append_atom(qa, p, mass * dw / bd.interval_length);
            }
          }
          ++seg;
        }
        if (qa.weights.size() > cap) break;
      }
      // Renormalize away the discretization of interval mass.
      const double wsum = sum_weights(qa.weights);
      if (wsum > 0.0)
        for (auto& w : qa.weights) w /= wsum;
      return qa;
    }
    case Kind::dilated: {
      const auto& dd = as_dilated();
      const auto s = dd.dil.scales(dd.lambda);
      const double smax = *std::max_element(s.begin(), s.end());
      auto qa = dd.inner->quadrature_atoms(target_spacing / smax, max_atoms);
      for (std::size_t ax = 0; ax < d; ++ax)
        for (auto& x : qa.points.coords[ax]) x *= s[ax];
      return qa;
    }
  }
  throw std::logic_error("unreachable");
}

// ---- integration -----------------------------------------------------------

namespace {

using Fn = std::function<std::complex<double>(std::span<const double>)>;

std::complex<double> exact_integral(const ProbabilityMeasure& nu, const Fn& phi) {
  using Kind = ProbabilityMeasure::Kind;
  switch (nu.kind()) {
    case Kind::dirac:
      return phi(nu.as_dirac().point);
    case Kind::atomic: {
      const auto& a = nu.as_atomic();
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < a.points.size(); ++i)
        acc += a.weights[i] * phi(a.points[i]);
      return acc;
    }
    case Kind::dilated: {
      const auto& dd = nu.as_dilated();
      const auto s = dd.dil.scales(dd.lambda);
      auto scaled = [&](std::span<const double> t) {
        std::vector<double> u(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) u[i] = s[i] * t[i];
        return phi(u);
      };
      return exact_integral(*dd.inner, scaled);
    }
    default:
      throw std::logic_error("exact_integral: not an exact kind");
  }
}

// Composite GL4 nodes on [a,b] with `panels` panels.
void gl4_composite(double a, double b, std::size_t panels,
                   std::vector<double>* nodes, std::vector<double>* weights) {
  nodes->clear();
  weights->clear();
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * h;
    for (int k = 0; k < 4; ++k) {
      nodes->push_back(mid + 0.5 * h * kGl4X[k]);
      weights->push_back(0.5 * h * kGl4W[k]);
    }
  }
}

std::complex<double> quad_eval(const ProbabilityMeasure& nu, const Fn& phi,
                               std::size_t order);

// One-shot quadrature pass (no error estimation) at a given order.
std::complex<double> quad_eval(const ProbabilityMeasure& nu, const Fn& phi,
                               std::size_t order) {
  using Kind = ProbabilityMeasure::Kind;
  const std::size_t d = nu.dim();
  switch (nu.kind()) {
    case Kind::dirac:
    case Kind::atomic:
      return exact_integral(nu, phi);
    case Kind::lebesgue_box:
    case Kind::gaussian: {
      std::vector<double> lo(d), hi(d);
      std::function<double(std::span<const double>)> density;
      double norm = 1.0;
      if (nu.kind() == Kind::lebesgue_box) {
        lo = nu.as_box().lower;
        hi = nu.as_box().upper;
        for (std::size_t ax = 0; ax < d; ++ax) norm *= hi[ax] - lo[ax];
      } else {
        const auto& g = nu.as_gaussian();
        for (std::size_t ax = 0; ax < d; ++ax) {
          lo[ax] = g.center[ax] - kGaussianQuadSigmas * g.sigma;
          hi[ax] = g.center[ax] + kGaussianQuadSigmas * g.sigma;
        }
        const double s2 = 2.0 * g.sigma * g.sigma;
        density = [&g, s2, d](std::span<const double> p) {
          double e = 0.0;
          for (std::size_t ax = 0; ax < d; ++ax) {
            const double dx = p[ax] - g.center[ax];
            e += dx * dx;
          }
          return std::exp(-e / s2);
        };
      }
      std::vector<std::vector<double>> nodes(d), weights(d);
      for (std::size_t ax = 0; ax < d; ++ax)
        gl4_composite(lo[ax], hi[ax], order, &nodes[ax], &weights[ax]);
      std::vector<std::size_t> idx(d, 0);
      std::vector<double> p(d);
      std::complex<double> acc = 0.0;
      double wnorm = 0.0;
      const std::size_t per_axis = nodes[0].size();
      std::size_t total = 1;
      for (std::size_t ax = 0; ax < d; ++ax) total *= per_axis;
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double w = 1.0;
        for (std::size_t ax = d; ax-- > 0;) {
          idx[ax] = rem % per_axis;
          rem /= per_axis;
          p[ax] = nodes[ax][idx[ax]];
          w *= weights[ax][idx[ax]];
        }
        if (density) w *= density(p);
        acc += w * phi(p);
        wnorm += w;
      }
      // Normalize: box divides by volume, gaussian by the truncated mass.
      if (nu.kind() == Kind::lebesgue_box) return acc / norm;
      return acc / wnorm;
    }
    case Kind::sphere: {
      const auto& sp = nu.as_sphere();
      if (d == 1) {
        const double a[1] = {-sp.radius}, b[1] = {sp.radius};
        return 0.5 * (phi(std::span<const double>(a, 1)) +
                      phi(std::span<const double>(b, 1)));
      }
      if (d == 2) {
        const std::size_t n = std::max<std::size_t>(16, order * 8);
        std::complex<double> acc = 0.0;
        double wsum = 0.0;
        std::vector<double> p(2);
        for (std::size_t i = 0; i < n; ++i) {
          const double th = (static_cast<double>(i) + 0.5) * 2.0 * kPi / n;
          p[0] = sp.radius * std::cos(th);
          p[1] = sp.radius * std::sin(th);
          const double w = sp.cutoff ? cutoff_value(*sp.cutoff, p, sp.radius) : 1.0;
          acc += w * phi(p);
          wsum += w;
        }
        return acc / wsum;
      }
      if (d == 3) {
        std::vector<double> un, uw;
        gl4_composite(-1.0, 1.0, std::max<std::size_t>(4, order / 4), &un, &uw);
        const std::size_t nphi = std::max<std::size_t>(16, order);
        std::complex<double> acc = 0.0;
        double wsum = 0.0;
        std::vector<double> p(3);
        for (std::size_t iu = 0; iu < un.size(); ++iu) {
          const double z = un[iu];
          const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          for (std::size_t ip = 0; ip < nphi; ++ip) {
            const double th = (static_cast<double>(ip) + 0.5) * 2.0 * kPi / nphi;
            p[0] = sp.radius * rho * std::cos(th);
            p[1] = sp.radius * rho * std::sin(th);
            p[2] = sp.radius * z;
            double w = uw[iu];
            if (sp.cutoff) w *= cutoff_value(*sp.cutoff, p, sp.radius);
            acc += w * phi(p);
            wsum += w;
          }
        }
        return acc / wsum;
      }
      throw std::invalid_argument("sphere quadrature needs dim <= 3");
    }
    case Kind::curve: {
      const auto& q = nu.as_curve().q;
      std::vector<double> wn, ww;
      gl4_composite(0.0, 1.0, std::max<std::size_t>(4, order), &wn, &ww);
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < wn.size(); ++i)
        acc += ww[i] * phi(curve_point(q, wn[i]));
      return acc;
    }
    case Kind::brownian: {
      const auto& bd = nu.as_brownian();
      const double res = static_cast<double>(bd.resolution);
      const double mass = 1.0 / static_cast<double>(bd.interval_starts.size());
      const std::size_t sub = std::clamp<std::size_t>(order / 16, 1, 64);
      std::complex<double> acc = 0.0;
      std::vector<double> p(d);
      for (double a : bd.interval_starts) {
        const double b = a + bd.interval_length;
        std::size_t seg = static_cast<std::size_t>(a * res);
        while (seg < bd.resolution && static_cast<double>(seg) / res < b) {
          const double s0 = std::max(a, static_cast<double>(seg) / res);
          const double s1 = std::min(b, static_cast<double>(seg + 1) / res);
          if (s1 > s0) {
            const double dw = (s1 - s0) / static_cast<double>(sub);
            for (std::size_t k = 0; k < sub; ++k) {
              const double w = s0 + (static_cast<double>(k) + 0.5) * dw;
              const double x = w * res;
              const double frac = x - static_cast<double>(seg);
              for (std::size_t ax = 0; ax < d; ++ax)
                p[ax] = bd.path[ax][seg] +
                        frac * (bd.path[ax][seg + 1] - bd.path[ax][seg]);
              acc += (mass * dw / bd.interval_length) * phi(p);
            }
          }
          ++seg;
        }
      }
      return acc;
    }
    case Kind::dilated: {
      const auto& dd = nu.as_dilated();
      const auto s = dd.dil.scales(dd.lambda);
      auto scaled = [&](std::span<const double> t) {
        std::vector<double> u(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) u[i] = s[i] * t[i];
        return phi(u);
      };
      return quad_eval(*dd.inner, scaled, order);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

Integral ProbabilityMeasure::integrate(const Fn& phi, IntegrationMethod method,
                                       std::size_t budget,
                                       std::uint64_t seed) const {
  if (budget == 0) throw std::invalid_argument("integrate: budget must be positive");
  if (is_exact()) return Integral{exact_integral(*this, phi), 0.0};

  if (method == IntegrationMethod::automatic)
    method = has_quadrature() ? IntegrationMethod::quadrature
                              : IntegrationMethod::monte_carlo;

  if (method == IntegrationMethod::quadrature) {
    if (!has_quadrature())
      throw std::invalid_argument("integrate: no quadrature rule for this variant");
    const std::size_t order = std::max<std::size_t>(budget, 4);
    const std::size_t half = std::max<std::size_t>(order / 2, 2);
    const auto fine = quad_eval(*this, phi, order);
    const auto coarse = quad_eval(*this, phi, half);
    return Integral{fine, std::abs(fine - coarse)};
  }

  // Monte Carlo: block sums keep the association fixed and accurate.
  const std::size_t n = budget;
  constexpr std::size_t kBlock = 4096;
  PointBatch batch;
  batch.resize(dim_, std::min(n, kBlock));
  std::complex<double> total = 0.0;
  double total_mag2 = 0.0;
  std::vector<double> p(dim_);
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t count = std::min(kBlock, n - start);
    sample_into(seed, start, count, batch, 0);
    std::complex<double> bsum = 0.0;
    double bmag2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t ax = 0; ax < dim_; ++ax) p[ax] = batch.coords[ax][i];
      const auto v = phi(p);
      bsum += v;
      bmag2 += std::norm(v);
    }
    total += bsum;
    total_mag2 += bmag2;
  }
  const auto mean = total / static_cast<double>(n);
  double err = 0.0;
  if (n > 1) {
    const double var =
        std::max(0.0, (total_mag2 - static_cast<double>(n) * std::norm(mean)) /
                          (static_cast<double>(n) - 1.0));
    err = 3.0 * std::sqrt(var / static_cast<double>(n));
  }
  return Integral{mean, err};
}

// ---- JSON ------------------------------------------------------------------

nlohmann::json ProbabilityMeasure::to_json() const {
  nlohmann::json j;
  switch (kind()) {
    case Kind::dirac:
      j["type"] = "dirac";
      j["point"] = as_dirac().point;
      break;
    case Kind::atomic:
      j["type"] = "atomic";
      j["points"] = as_atomic().points;
      j["weights"] = as_atomic().weights;
      break;
    case Kind::lebesgue_box:
      j["type"] = "box";
      j["lower"] = as_box().lower;
      j["upper"] = as_box().upper;
      break;
    case Kind::gaussian:
      j["type"] = "gaussian";
      j["center"] = as_gaussian().center;
      j["sigma"] = as_gaussian().sigma;
      break;
    case Kind::sphere: {
      const auto& sp = as_sphere();
      j["type"] = "sphere";
      j["dim"] = sp.dim;
      j["radius"] = sp.radius;
      if (sp.cutoff) {
        j["cutoff"] = {{"axis", sp.cutoff->axis},
                       {"width", sp.cutoff->width},
                       {"power", sp.cutoff->power}};
      }
      break;
    }
    case Kind::curve:
      j["type"] = "curve";
      j["coefficients"] = as_curve().q;
      break;
    case Kind::brownian: {
      const auto& b = as_brownian();
      j["type"] = "brownian";
      j["ratio"] = b.ratio;
      j["depth"] = b.depth;
      j["dim"] = b.dim;
      j["path_seed"] = b.path_seed;
      j["resolution"] = b.resolution;
      break;
    }
    case Kind::dilated: {
      const auto& dd = as_dilated();
      j["type"] = "dilated";
      j["exponents"] = dd.dil.exponents();
      j["lambda"] = dd.lambda;
      j["inner"] = dd.inner->to_json();
      break;
    }
  }
  return j;
}

ProbabilityMeasure ProbabilityMeasure::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "dirac")
    return dirac(j.at("point").get<std::vector<double>>());
  if (type == "atomic")
    return atomic(j.at("points").get<std::vector<std::vector<double>>>(),
                  j.at("weights").get<std::vector<double>>());
  if (type == "box")
    return lebesgue_box(j.at("lower").get<std::vector<double>>(),
                        j.at("upper").get<std::vector<double>>());
  if (type == "gaussian")
    return gaussian(j.at("center").get<std::vector<double>>(),
                    j.at("sigma").get<double>());
  if (type == "sphere") {
    const auto d = j.at("dim").get<std::size_t>();
    const auto r = j.at("radius").get<double>();
    if (j.contains("cutoff")) {
      SphereCutoff c;
      c.axis = j["cutoff"].at("axis").get<std::vector<double>>();
      c.width = j["cutoff"].at("width").get<double>();
      c.power = j["cutoff"].value("power", 2);
      return sphere(d, r, std::move(c));
    }
    return sphere(d, r);
  }
  if (type == "curve")
    return curve(j.at("coefficients").get<std::vector<double>>());
  if (type == "brownian")
    return brownian_image(j.at("ratio").get<double>(), j.at("depth").get<int>(),
                          j.at("dim").get<std::size_t>(),
                          j.at("path_seed").get<std::uint64_t>(),
                          j.at("resolution").get<std::size_t>());
  if (type == "dilated") {
    auto inner = from_json(j.at("inner"));
    Dilation dil(j.at("exponents").get<std::vector<double>>());
    return inner.dilated(dil, j.at("lambda").get<double>());
  }
  throw std::invalid_argument("unknown measure type: " + type);
}

}  // namespace ergolab::measures
