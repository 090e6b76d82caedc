#include "ergolab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ergolab/fourier.hpp"
#include "ergolab/kernels.hpp"
#include "ergolab/maximal.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/rng.hpp"

namespace ergolab::dynamics {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWitnessTol = 1e-9;
constexpr double kNearTol = 1e-6;

double frac(double x) { return x - std::floor(x); }

bool is_zero_mode(const std::vector<long long>& k) {
  for (long long v : k)
    if (v != 0) return false;
  return true;
}

}  // namespace

// ---- TorusAction -----------------------------------------------------------

TorusAction::TorusAction(std::size_t n_, std::size_t d_, std::vector<double> M_)
    : n(n_), d(d_), M(std::move(M_)) {
  if (n == 0 || d == 0 || M.size() != n * d)
    throw std::invalid_argument("TorusAction: M must be n x d");
  for (double v : M)
    if (!std::isfinite(v))
      throw std::invalid_argument("TorusAction: M entries must be finite");
}

TorusAction TorusAction::line_in_2torus() {
  return TorusAction(2, 1, {1.0, std::sqrt(2.0)});
}

TorusAction TorusAction::identity3() {
  return TorusAction(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
}

TorusAction TorusAction::line_in_3torus() {
  return TorusAction(3, 1, {1.0, std::sqrt(2.0), std::sqrt(3.0)});
}

std::vector<double> TorusAction::act(std::span<const double> x,
                                     std::span<const double> t) const {
  if (x.size() != n || t.size() != d)
    throw std::invalid_argument("TorusAction::act: dimension mismatch");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = x[i];
    for (std::size_t j = 0; j < d; ++j) acc += M[i * d + j] * t[j];
    y[i] = frac(acc);
  }
  return y;
}

std::vector<double> TorusAction::m_transpose_k(
    std::span<const long long> k) const {
  if (k.size() != n)
    throw std::invalid_argument("TorusAction::m_transpose_k: mode dimension mismatch");
  std::vector<double> w(d, 0.0);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i)
      w[j] += M[i * d + j] * static_cast<double>(k[i]);
  return w;
}

nlohmann::json TorusAction::to_json() const {
  return nlohmann::json{{"n", n}, {"d", d}, {"M", M}};
}

TorusAction TorusAction::from_json(const nlohmann::json& j) {
  if (j.contains("preset")) {
    const std::string p = j.at("preset").get<std::string>();
    if (p == "line-in-2torus") return line_in_2torus();
    if (p == "identity-3") return identity3();
    if (p == "line-in-3torus") return line_in_3torus();
    throw std::invalid_argument("unknown action preset: " + p);
  }
  return TorusAction(j.at("n").get<std::size_t>(), j.at("d").get<std::size_t>(),
                     j.at("M").get<std::vector<double>>());
}

// ---- TrigObservable --------------------------------------------------------

std::size_t TrigObservable::torus_dim() const {
  if (modes.empty()) throw std::logic_error("TrigObservable: no modes");
  return modes[0].k.size();
}

std::complex<double> TrigObservable::mean() const {
  for (const auto& m : modes)
    if (is_zero_mode(m.k)) return m.c;
  return 0.0;
}

std::complex<double> TrigObservable::eval(std::span<const double> x) const {
  std::complex<double> acc = 0.0;
  for (const auto& m : modes) {
    double dot = 0.0;
    for (std::size_t i = 0; i < m.k.size(); ++i)
      dot += static_cast<double>(m.k[i]) * x[i];
    const double ph = kTwoPi * dot;
    acc += m.c * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return acc;
}

bool TrigObservable::is_real() const {
  for (const auto& m : modes) {
    std::vector<long long> neg(m.k.size());
    for (std::size_t i = 0; i < m.k.size(); ++i) neg[i] = -m.k[i];
    bool found = false;
    for (const auto& o : modes) {
      if (o.k == neg) {
        if (std::abs(o.c - std::conj(m.c)) > 1e-14) return false;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

long long TrigObservable::max_mode_norm() const {
  long long mx = 0;
  for (const auto& m : modes)
    for (long long v : m.k) mx = std::max(mx, std::abs(v));
  return mx;
}

nlohmann::json TrigObservable::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : modes)
    arr.push_back(
        {{"k", m.k}, {"re", m.c.real()}, {"im", m.c.imag()}});
  return nlohmann::json{{"modes", arr}};
}

TrigObservable TrigObservable::from_json(const nlohmann::json& j) {
  TrigObservable f;
  for (const auto& mj : j.at("modes")) {
    Mode m;
    m.k = mj.at("k").get<std::vector<long long>>();
    m.c = {mj.value("re", 0.0), mj.value("im", 0.0)};
    f.modes.push_back(std::move(m));
  }
  if (f.modes.empty())
    throw std::invalid_argument("TrigObservable: needs >= 1 mode");
  const std::size_t n = f.modes[0].k.size();
  for (const auto& m : f.modes)
    if (m.k.size() != n)
      throw std::invalid_argument("TrigObservable: ragged modes");
  return f;
}

TrigObservable random_real_observable(std::size_t n_pairs, long long kmax,
                                      std::size_t torus_dim,
                                      std::uint64_t seed, std::uint64_t index) {
  if (n_pairs == 0 || kmax < 1 || torus_dim == 0)
    throw std::invalid_argument("random_real_observable: bad parameters");
  const RngStream rs(seed, substream(stream_tag::observable, index));
  TrigObservable f;
  std::vector<std::vector<long long>> used;
  std::uint64_t ctr = 0;
  double coeff_sum = 0.0;
  while (f.modes.size() < 2 * n_pairs) {
    std::vector<long long> k(torus_dim);
    bool zero = true;
    for (std::size_t ax = 0; ax < torus_dim; ++ax) {
      const std::uint64_t u =
          rs.uniform_index(ctr++, static_cast<std::uint64_t>(2 * kmax + 1));
      k[ax] = static_cast<long long>(u) - kmax;
      if (k[ax] != 0) zero = false;
    }
    if (zero) continue;
    // canonical representative: first nonzero entry positive
    std::vector<long long> rep = k;
    for (long long v : rep) {
      if (v > 0) break;
      if (v < 0) {
        for (auto& w : rep) w = -w;
        break;
      }
    }
    if (std::find(used.begin(), used.end(), rep) != used.end()) continue;
    used.push_back(rep);
    const auto z = rs.normal2(ctr++);
    const std::complex<double> c(0.5 * z[0], 0.5 * z[1]);
    std::vector<long long> neg(rep.size());
    for (std::size_t ax = 0; ax < rep.size(); ++ax) neg[ax] = -rep[ax];
    f.modes.push_back({rep, c});
    f.modes.push_back({neg, std::conj(c)});
    coeff_sum += 2.0 * std::abs(c);
  }
  if (coeff_sum > 0.0)
    for (auto& m : f.modes) m.c /= coeff_sum;
  return f;
}

void eval_observable_batch(const TrigObservable& f, const PointBatch& x,
                           std::complex<double>* out) {
  const std::size_t n = x.n;
  const std::size_t d = x.dim;
  long long kmax = f.max_mode_norm();
  if (kmax == 0) kmax = 1;
  const std::size_t tab = static_cast<std::size_t>(2 * kmax + 1);

  constexpr std::size_t kBlock = 2048;
  std::vector<double> phase(kBlock), sv(kBlock), cv(kBlock);
  // power table: pw[ax * tab + (k + kmax)][i]
  std::vector<std::vector<std::complex<double>>> pw(
      d * tab, std::vector<std::complex<double>>(kBlock));

  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t count = std::min(kBlock, n - start);
    for (std::size_t ax = 0; ax < d; ++ax) {
      for (std::size_t i = 0; i < count; ++i)
        phase[i] = kTwoPi * x.coords[ax][start + i];
      kernels::ops().sincos(phase.data(), count, sv.data(), cv.data());
      auto& p0 = pw[ax * tab + static_cast<std::size_t>(kmax)];
      for (std::size_t i = 0; i < count; ++i) p0[i] = 1.0;
      for (long long kk = 1; kk <= kmax; ++kk) {
        auto& pos = pw[ax * tab + static_cast<std::size_t>(kmax + kk)];
        auto& prev = pw[ax * tab + static_cast<std::size_t>(kmax + kk - 1)];
        auto& neg = pw[ax * tab + static_cast<std::size_t>(kmax - kk)];
        for (std::size_t i = 0; i < count; ++i) {
          pos[i] = prev[i] * std::complex<double>(cv[i], sv[i]);
          neg[i] = std::conj(pos[i]);
        }
      }
    }
    for (std::size_t i = 0; i < count; ++i) out[start + i] = 0.0;
    for (const auto& m : f.modes) {
      for (std::size_t i = 0; i < count; ++i) {
        std::complex<double> term = m.c;
        for (std::size_t ax = 0; ax < d; ++ax)
          term *= pw[ax * tab + static_cast<std::size_t>(m.k[ax] + kmax)][i];
        out[start + i] += term;
      }
    }
  }
}

// ---- ergodicity certificate --------------------------------------------------

std::string ErgodicityCertificate::describe() const {
  std::ostringstream os;
  switch (status) {
    case ErgodicityStatus::ergodic_up_to:
      os << "ergodic-up-to-" << K;
      break;
    case ErgodicityStatus::non_ergodic: {
      os << "non-ergodic(witness k=(";
      for (std::size_t i = 0; i < witness.size(); ++i)
        os << (i ? "," : "") << witness[i];
      os << "))";
      break;
    }
    case ErgodicityStatus::resonant_near: {
      os << "resonant-near(k=(";
      for (std::size_t i = 0; i < witness.size(); ++i)
        os << (i ? "," : "") << witness[i];
      os << "), residual=" << residual << ")";
      break;
    }
  }
  return os.str();
}

ErgodicityCertificate ergodicity_certificate(const TorusAction& action,
                                             long long K) {
  if (K < 1) throw std::invalid_argument("ergodicity_certificate: K must be >= 1");
  ErgodicityCertificate cert;
  cert.K = K;
  double best_near = kNearTol;
  std::vector<long long> k(action.n, -K);
  for (;;) {
    if (!is_zero_mode(k)) {
      const auto w = action.m_transpose_k(k);
      double r = 0.0;
      for (double v : w) r += v * v;
      r = std::sqrt(r);
      if (r < kWitnessTol) {
        cert.status = ErgodicityStatus::non_ergodic;
        cert.witness = k;
        cert.residual = r;
        return cert;
      }
      if (r < best_near) {
        best_near = r;
        cert.status = ErgodicityStatus::resonant_near;
        cert.witness = k;
        cert.residual = r;
      }
    }
    // next lattice point in lexicographic order
    std::size_t ax = action.n;
    while (ax-- > 0) {
      if (++k[ax] <= K) break;
      k[ax] = -K;
      if (ax == 0) return cert;
    }
    if (ax == static_cast<std::size_t>(-1)) break;
  }
  return cert;
}

// ---- ergodic averages --------------------------------------------------------

namespace {

// nu_hat(-lambda.(2 pi M^T k)); exactly 1 for the zero frequency.
std::complex<double> mode_hat(const TorusAction& action,
                              const ProbabilityMeasure& nu, const Dilation& dil,
                              double lambda, const std::vector<long long>& k,
                              std::size_t budget) {
  const auto w = action.m_transpose_k(k);
  bool zero = true;
  std::vector<double> xi(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    xi[j] = -kTwoPi * w[j];
    if (xi[j] != 0.0) zero = false;
  }
  if (zero) return 1.0;
  return fourier::fourier_of_dilated(nu, dil, lambda, xi, budget).value;
}

}  // namespace

std::complex<double> ergodic_average_closed(const TorusAction& action,
                                            const ProbabilityMeasure& nu,
                                            const Dilation& dil, double lambda,
                                            const TrigObservable& f,
                                            std::span<const double> x,
                                            std::size_t budget) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("ergodic_average: lambda must be positive");
  if (nu.dim() != action.d)
    throw std::invalid_argument("ergodic_average: measure/action dimension mismatch");
  if (x.size() != action.n)
    throw std::invalid_argument("ergodic_average: point dimension mismatch");
  std::complex<double> acc = 0.0;
  for (const auto& m : f.modes) {
    double dot = 0.0;
    for (std::size_t i = 0; i < m.k.size(); ++i)
      dot += static_cast<double>(m.k[i]) * x[i];
    const double ph = kTwoPi * dot;
    acc += m.c * std::complex<double>(std::cos(ph), std::sin(ph)) *
           mode_hat(action, nu, dil, lambda, m.k, budget);
  }
  return acc;
}

McValue ergodic_average_mc(const TorusAction& action,
                           const ProbabilityMeasure& nu, const Dilation& dil,
                           double lambda, const TrigObservable& f,
                           std::span<const double> x, std::size_t budget,
                           std::uint64_t seed) {
  if (budget < 2) throw std::invalid_argument("ergodic_average_mc: budget must be >= 2");
  if (!(lambda > 0.0))
    throw std::invalid_argument("ergodic_average_mc: lambda must be positive");
  if (nu.dim() != action.d || x.size() != action.n)
    throw std::invalid_argument("ergodic_average_mc: dimension mismatch");

  const auto scales = dil.scales(lambda);
  constexpr std::size_t kBlock = 4096;
  measures::PointBatch tbatch, ybatch;
  tbatch.resize(action.d, std::min<std::size_t>(budget, kBlock));
  ybatch.resize(action.n, std::min<std::size_t>(budget, kBlock));
  std::vector<std::complex<double>> vals(std::min<std::size_t>(budget, kBlock));

  std::complex<double> total = 0.0;
  double total_mag2 = 0.0;
  for (std::size_t start = 0; start < budget; start += kBlock) {
    const std::size_t count = std::min(kBlock, budget - start);
    nu.sample_into(seed, start, count, tbatch, 0);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t row = 0; row < action.n; ++row) {
        double acc = x[row];
        for (std::size_t col = 0; col < action.d; ++col)
          acc += action.M[row * action.d + col] * scales[col] *
                 tbatch.coords[col][i];
        ybatch.coords[row][i] = frac(acc);
      }
    }
    eval_observable_batch(f, ybatch, vals.data());
    std::complex<double> bsum = 0.0;
    double bmag = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      bsum += vals[i];
      bmag += std::norm(vals[i]);
    }
    total += bsum;
    total_mag2 += bmag;
  }
  const auto mean = total / static_cast<double>(budget);
  const double var = std::max(
      0.0, (total_mag2 - static_cast<double>(budget) * std::norm(mean)) /
               (static_cast<double>(budget) - 1.0));
  return McValue{mean, 3.0 * std::sqrt(var / static_cast<double>(budget))};
}

// ---- convergence sweep -------------------------------------------------------

ConvergenceSweep convergence_sweep(const TorusAction& action,
                                   const ProbabilityMeasure& nu,
                                   const Dilation& dil,
                                   const std::vector<double>& lambdas,
                                   const TrigObservable& f, std::uint64_t seed,
                                   const SweepOptions& opts) {
  if (lambdas.empty())
    throw std::invalid_argument("convergence_sweep: empty lambda list");
  const long long kmax = f.max_mode_norm();

  ConvergenceSweep sweep;
  sweep.non_rajchman_measure = nu.is_exact();
  if (kmax > 0) {
    const auto cert = ergodicity_certificate(action, kmax);
    if (cert.status == ErgodicityStatus::non_ergodic) {
      // collect f-modes killed by the witness: <k, M t> = 0 for all t
      for (const auto& m : f.modes) {
        if (is_zero_mode(m.k)) continue;
        const auto w = action.m_transpose_k(m.k);
        double r = 0.0;
        for (double v : w) r += v * v;
        if (std::sqrt(r) < kWitnessTol) sweep.stuck_modes.push_back(m.k);
      }
      if (!sweep.stuck_modes.empty() && !opts.override_non_ergodic) {
        std::ostringstream os;
        os << "convergence_sweep: action is " << cert.describe()
           << " and f has an invariant nonconstant mode (";
        for (std::size_t i = 0; i < sweep.stuck_modes[0].size(); ++i)
          os << (i ? "," : "") << sweep.stuck_modes[0][i];
        os << "); pass override_non_ergodic to run anyway";
        throw std::runtime_error(os.str());
      }
    }
  }

  // Haar-sampled base points.
  const std::size_t nx = std::max<std::size_t>(1, opts.x_samples);
  std::vector<std::vector<double>> xs(nx, std::vector<double>(action.n));
  for (std::size_t j = 0; j < nx; ++j) {
    const RngStream rs(seed, substream(stream_tag::base_points, j));
    for (std::size_t ax = 0; ax < action.n; ++ax)
      xs[j][ax] = rs.uniform2(ax >> 1)[ax & 1];
  }

  const std::complex<double> c0 = f.mean();
  sweep.rows.resize(lambdas.size());
  sweep.x_samples = nx;
  parallel_for(lambdas.size(), opts.workers, [&](std::size_t li) {
    const double lambda = lambdas[li];
    // hat factors shared by every x
    std::vector<std::complex<double>> hats(f.modes.size());
    for (std::size_t mi = 0; mi < f.modes.size(); ++mi)
      hats[mi] =
          mode_hat(action, nu, dil, lambda, f.modes[mi].k, opts.budget);
    double dev_max = 0.0, dev_sum = 0.0;
    for (const auto& x : xs) {
      std::complex<double> acc = 0.0;
      for (std::size_t mi = 0; mi < f.modes.size(); ++mi) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          dot += static_cast<double>(f.modes[mi].k[i]) * x[i];
        const double ph = kTwoPi * dot;
        acc += f.modes[mi].c * std::complex<double>(std::cos(ph), std::sin(ph)) *
               hats[mi];
      }
      const double dev = std::abs(acc - c0);
      dev_max = std::max(dev_max, dev);
      dev_sum += dev;
    }
    sweep.rows[li] = {lambda, dev_max, dev_sum / static_cast<double>(nx)};
  });
  return sweep;
}

// ---- smoothing kernels -------------------------------------------------------

SmoothingKernel SmoothingKernel::gaussian(std::size_t d, double sigma) {
  if (d == 0 || !(sigma > 0.0))
    throw std::invalid_argument("SmoothingKernel::gaussian: bad parameters");
  SmoothingKernel k;
  k.dim_ = d;
  k.terms_.push_back({1.0, true, Gauss{sigma}, BoxK{}});
  return k;
}

SmoothingKernel SmoothingKernel::box(std::vector<double> lower,
                                     std::vector<double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw std::invalid_argument("SmoothingKernel::box: corner mismatch");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("SmoothingKernel::box: empty box");
  SmoothingKernel k;
  k.dim_ = lower.size();
  k.terms_.push_back({1.0, false, Gauss{}, BoxK{std::move(lower), std::move(upper)}});
  return k;
}

SmoothingKernel SmoothingKernel::difference(SmoothingKernel a,
                                            SmoothingKernel b) {
  if (a.dim_ != b.dim_)
    throw std::invalid_argument("SmoothingKernel::difference: dimension mismatch");
  SmoothingKernel k;
  k.dim_ = a.dim_;
  k.terms_ = std::move(a.terms_);
  for (auto& t : b.terms_) {
    t.sign = -t.sign;
    k.terms_.push_back(std::move(t));
  }
  return k;
}

namespace {

std::complex<double> box_axis_hat(double lo, double hi, double xi) {
  // (1/(hi-lo)) integral_lo^hi e^{-i xi t} dt, stable near xi = 0
  const double len = hi - lo;
  const double mid = 0.5 * (lo + hi);
  const double arg = 0.5 * xi * len;
  double sinc;
  if (std::abs(arg) < 1e-8)
    sinc = 1.0 - arg * arg / 6.0;
  else
    sinc = std::sin(arg) / arg;
  return std::complex<double>(std::cos(xi * mid), -std::sin(xi * mid)) * sinc;
}

}  // namespace

std::complex<double> SmoothingKernel::hat(std::span<const double> xi) const {
  if (xi.size() != dim_)
    throw std::invalid_argument("SmoothingKernel::hat: dimension mismatch");
  std::complex<double> acc = 0.0;
  for (const auto& t : terms_) {
    if (t.is_gauss) {
      double x2 = 0.0;
      for (double v : xi) x2 += v * v;
      acc += t.sign * std::exp(-0.5 * t.g.sigma * t.g.sigma * x2);
    } else {
      std::complex<double> prod = 1.0;
      for (std::size_t ax = 0; ax < dim_; ++ax)
        prod *= box_axis_hat(t.b.lower[ax], t.b.upper[ax], xi[ax]);
      acc += t.sign * prod;
    }
  }
  return acc;
}

double SmoothingKernel::integral() const {
  double acc = 0.0;
  for (const auto& t : terms_) acc += t.sign;
  return acc;
}

nlohmann::json SmoothingKernel::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms_) {
    if (t.is_gauss)
      arr.push_back({{"type", "gaussian"}, {"sign", t.sign}, {"sigma", t.g.sigma}});
    else
      arr.push_back({{"type", "box"},
                     {"sign", t.sign},
                     {"lower", t.b.lower},
                     {"upper", t.b.upper}});
  }
  return nlohmann::json{{"dim", dim_}, {"terms", arr}};
}

SmoothingKernel SmoothingKernel::from_json(const nlohmann::json& j) {
  // Either a primitive spec or {"difference": [a, b]}.
  if (j.contains("difference")) {
    const auto& arr = j.at("difference");
    if (!arr.is_array() || arr.size() != 2)
      throw std::invalid_argument("kernel difference needs two operands");
    return difference(from_json(arr[0]), from_json(arr[1]));
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian")
    return gaussian(j.at("dim").get<std::size_t>(), j.at("sigma").get<double>());
  if (type == "box")
    return box(j.at("lower").get<std::vector<double>>(),
               j.at("upper").get<std::vector<double>>());
  throw std::invalid_argument("unknown smoothing kernel type: " + type);
}

TrigObservable smooth_observable(const TorusAction& action,
                                 const TrigObservable& f0,
                                 const SmoothingKernel& kernel) {
  if (kernel.dim() != action.d)
    throw std::invalid_argument("smooth_observable: kernel dimension mismatch");
  TrigObservable g;
  for (const auto& m : f0.modes) {
    const auto w = action.m_transpose_k(m.k);
    std::vector<double> xi(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) xi[j] = -kTwoPi * w[j];
    g.modes.push_back({m.k, m.c * kernel.hat(xi)});
  }
  return g;
}

double orbit_maximal(const TorusAction& action, const ProbabilityMeasure& nu,
                     const Dilation& dil,
                     const std::vector<double>& lambda_grid,
                     const TrigObservable& f, std::span<const double> x,
                     std::size_t budget) {
  if (lambda_grid.empty())
    throw std::invalid_argument("orbit_maximal: empty lambda grid");
  double mx = 0.0;
  for (double lambda : lambda_grid)
    mx = std::max(
        mx, std::abs(ergodic_average_closed(action, nu, dil, lambda, f, x,
                                            budget)));
  return mx;
}

// ---- transfer ratio ----------------------------------------------------------

TransferResult transfer_ratio(const TorusAction& action,
                              const ProbabilityMeasure& nu, const Dilation& dil,
                              double p, const TransferParams& params,
                              std::uint64_t seed, int workers) {
  if (!(p >= 1.0)) throw std::invalid_argument("transfer_ratio: p must be >= 1");
  if (params.family_size == 0)
    throw std::invalid_argument("transfer_ratio: empty observable family");
  if (params.lambda_grid.empty())
    throw std::invalid_argument("transfer_ratio: empty lambda grid");
  if (action.d != nu.dim())
    throw std::invalid_argument("transfer_ratio: dimension mismatch");

  const std::size_t d = action.d;

  // grid geometry (cube, centered at the origin)
  std::vector<std::size_t> extents(d, params.grid_nodes);
  std::vector<double> origin(d);
  const double half =
      0.5 * params.grid_spacing * static_cast<double>(params.grid_nodes - 1);
  for (std::size_t ax = 0; ax < d; ++ax) origin[ax] = -half;
  const double window =
      params.window_sigma > 0.0 ? params.window_sigma : half / 3.0;

  // shared lambda/mode hat tables are per-observable; family members are
  // independent tasks
  std::vector<double> torus_ratios(params.family_size, 0.0);
  std::vector<double> grid_ratios(params.family_size, 0.0);

  parallel_for(params.family_size, workers, [&](std::size_t fi) {
    const auto f = random_real_observable(params.modes_per_observable,
                                          params.kmax, action.n, seed, fi);

    // -- torus side: empirical ||Mf||_p / ||f||_p over Haar-sampled x
    std::vector<std::complex<double>> hats;  // [lambda][mode]
    hats.resize(params.lambda_grid.size() * f.modes.size());
    for (std::size_t li = 0; li < params.lambda_grid.size(); ++li)
      for (std::size_t mi = 0; mi < f.modes.size(); ++mi)
        hats[li * f.modes.size() + mi] =
            mode_hat(action, nu, dil, params.lambda_grid[li], f.modes[mi].k,
                     params.conv_budget);

    double sum_mf = 0.0, sum_f = 0.0;
    std::vector<double> x(action.n);
    for (std::size_t j = 0; j < params.x_samples; ++j) {
      const RngStream rs(seed, substream(stream_tag::base_points,
                                         (fi << 32) ^ j));
      for (std::size_t ax = 0; ax < action.n; ++ax)
        x[ax] = rs.uniform2(ax >> 1)[ax & 1];
      // phases per mode
      double mf = 0.0;
      for (std::size_t li = 0; li < params.lambda_grid.size(); ++li) {
        std::complex<double> acc = 0.0;
        for (std::size_t mi = 0; mi < f.modes.size(); ++mi) {
          double dot = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i)
            dot += static_cast<double>(f.modes[mi].k[i]) * x[i];
          const double ph = kTwoPi * dot;
          acc += f.modes[mi].c *
                 std::complex<double>(std::cos(ph), std::sin(ph)) *
                 hats[li * f.modes.size() + mi];
        }
        mf = std::max(mf, std::abs(acc));
      }
      sum_mf += std::pow(mf, p);
      sum_f += std::pow(std::abs(f.eval(x)), p);
    }
    torus_ratios[fi] =
        std::pow(sum_mf / static_cast<double>(params.x_samples), 1.0 / p) /
        std::pow(sum_f / static_cast<double>(params.x_samples), 1.0 / p);

    // -- grid side: Gaussian-windowed orbit trace of the same observable
    const RngStream rsx(seed, substream(stream_tag::base_points,
                                        0xF00D0000ull + fi));
    std::vector<double> x0(action.n);
    for (std::size_t ax = 0; ax < action.n; ++ax)
      x0[ax] = rsx.uniform2(ax >> 1)[ax & 1];

    maximal::GridFunction phi(origin, params.grid_spacing, extents);
    std::vector<double> s(d), y(action.n);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t flat = 0; flat < phi.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t ax = d; ax-- > 0;) {
        idx[ax] = rem % extents[ax];
        rem /= extents[ax];
      }
      double w2 = 0.0;
      for (std::size_t ax = 0; ax < d; ++ax) {
        s[ax] = phi.node_coord(ax, idx[ax]);
        w2 += s[ax] * s[ax];
      }
      for (std::size_t row = 0; row < action.n; ++row) {
        double acc = x0[row];
        for (std::size_t col = 0; col < d; ++col)
          acc += action.M[row * d + col] * s[col];
        y[row] = frac(acc);
      }
      phi.re()[flat] =
          f.eval(y).real() * std::exp(-w2 / (2.0 * window * window));
    }

    const auto S = maximal::maximal_function(phi, nu, dil, params.lambda_grid,
                                             params.conv_budget, seed,
                                             /*workers=*/1);
    grid_ratios[fi] = maximal::lp_norm(S, p) / maximal::lp_norm(phi, p);
  });

  TransferResult out;
  out.torus_constant =
      *std::max_element(torus_ratios.begin(), torus_ratios.end());
  out.grid_constant = *std::max_element(grid_ratios.begin(), grid_ratios.end());
  out.ratio = out.torus_constant / out.grid_constant;
  return out;
}

}  // namespace ergolab::dynamics
