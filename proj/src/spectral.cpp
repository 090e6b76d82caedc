#include "ergolab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ergolab/parallel.hpp"

namespace ergolab::spectral {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMassTol = 1e-12;
constexpr double kResonanceTol = 1e-9;
constexpr double kNearResonanceTol = 1e-6;

bool is_zero_frequency(const std::vector<double>& xi) {
  for (double x : xi)
    if (x != 0.0) return false;
  return true;
}

double dist_to_integer(double x) {
  return std::abs(x - std::round(x));
}

}  // namespace

// ---- SpectralMeasure -------------------------------------------------------

SpectralMeasure::SpectralMeasure(std::vector<std::vector<double>> frequencies,
                                 std::vector<double> weights)
    : frequencies_(std::move(frequencies)), weights_(std::move(weights)) {
  if (frequencies_.empty() || frequencies_.size() != weights_.size())
    throw std::invalid_argument("SpectralMeasure: atoms/weights size mismatch");
  dim_ = frequencies_[0].size();
  int zero_atoms = 0;
  for (const auto& f : frequencies_) {
    if (f.size() != dim_)
      throw std::invalid_argument("SpectralMeasure: ragged frequencies");
    if (is_zero_frequency(f)) ++zero_atoms;
  }
  if (zero_atoms > 1)
    throw std::invalid_argument(
        "SpectralMeasure: at most one atom at the zero frequency");
  for (double w : weights_)
    if (!(w >= 0.0))
      throw std::invalid_argument("SpectralMeasure: weights must be nonnegative");
  total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

SpectralMeasure SpectralMeasure::scaled(double c) const {
  if (!(c >= 0.0))
    throw std::invalid_argument("SpectralMeasure::scaled: c must be >= 0");
  auto w = weights_;
  for (auto& x : w) x *= c;
  return SpectralMeasure(frequencies_, std::move(w));
}

nlohmann::json SpectralMeasure::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t j = 0; j < weights_.size(); ++j)
    atoms.push_back({{"xi", frequencies_[j]}, {"weight", weights_[j]}});
  return nlohmann::json{{"atoms", atoms}};
}

SpectralMeasure SpectralMeasure::from_json(const nlohmann::json& j) {
  std::vector<std::vector<double>> freqs;
  std::vector<double> weights;
  for (const auto& a : j.at("atoms")) {
    freqs.push_back(a.at("xi").get<std::vector<double>>());
    weights.push_back(a.at("weight").get<double>());
  }
  return SpectralMeasure(std::move(freqs), std::move(weights));
}

double projection_mass(const SpectralMeasure& sm) {
  for (std::size_t j = 0; j < sm.size(); ++j)
    if (is_zero_frequency(sm.frequencies()[j])) return sm.weights()[j];
  return 0.0;
}

// ---- mean ergodic identities ----------------------------------------------

NormValue mean_average_norm(const ProbabilityMeasure& rho, const Dilation& dil,
                            double lambda, const SpectralMeasure& sm,
                            std::size_t budget, std::uint64_t seed) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("mean_average_norm: lambda must be positive");
  if (sm.dim() != rho.dim())
    throw std::invalid_argument("mean_average_norm: dimension mismatch");
  NormValue out;
  for (std::size_t j = 0; j < sm.size(); ++j) {
    const auto tv =
        fourier::fourier_of_dilated(rho, dil, lambda, sm.frequencies()[j],
                                    budget, seed);
    out.value += sm.weights()[j] * std::norm(tv.value);
    out.error += sm.weights()[j] *
                 (2.0 * std::abs(tv.value) * tv.error + tv.error * tv.error);
  }
  return out;
}

std::vector<std::pair<double, NormValue>> mean_convergence_curve(
    const ProbabilityMeasure& rho, const Dilation& dil,
    const std::vector<double>& lambdas, const SpectralMeasure& sm,
    std::size_t budget, std::uint64_t seed, int workers) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument(
          "mean_convergence_curve: lambdas must be increasing");

  // Restrict to the nonzero atoms: cross terms vanish in the spectral
  // calculus, so this is exactly ||A_lambda x - Px||^2.
  std::vector<std::vector<double>> freqs;
  std::vector<double> weights;
  for (std::size_t j = 0; j < sm.size(); ++j) {
    if (!is_zero_frequency(sm.frequencies()[j])) {
      freqs.push_back(sm.frequencies()[j]);
      weights.push_back(sm.weights()[j]);
    }
  }

  std::vector<std::pair<double, NormValue>> curve(lambdas.size());
  if (freqs.empty()) {
    for (std::size_t i = 0; i < lambdas.size(); ++i)
      curve[i] = {lambdas[i], NormValue{0.0, 0.0}};
    return curve;
  }
  const SpectralMeasure nonzero(freqs, weights);
  parallel_for(lambdas.size(), workers, [&](std::size_t i) {
    curve[i] = {lambdas[i],
                mean_average_norm(rho, dil, lambdas[i], nonzero, budget, seed)};
  });
  return curve;
}

// ---- lattice side ----------------------------------------------------------

LatticeWeights::LatticeWeights(std::vector<std::vector<long long>> support,
                               std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.empty() || support_.size() != weights_.size())
    throw std::invalid_argument("LatticeWeights: support/weights size mismatch");
  dim_ = support_[0].size();
  for (const auto& k : support_)
    if (k.size() != dim_)
      throw std::invalid_argument("LatticeWeights: ragged support");
  for (double w : weights_)
    if (!(w >= 0.0))
      throw std::invalid_argument("LatticeWeights: weights must be nonnegative");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > kMassTol)
    throw std::invalid_argument("LatticeWeights: weights must sum to 1");
}

std::complex<double> LatticeWeights::transform(
    std::span<const double> theta) const {
  if (theta.size() != dim_)
    throw std::invalid_argument("LatticeWeights::transform: dimension mismatch");
  std::complex<double> acc = 0.0;
  for (std::size_t j = 0; j < support_.size(); ++j) {
    double dot = 0.0;
    for (std::size_t ax = 0; ax < dim_; ++ax)
      dot += static_cast<double>(support_[j][ax]) * theta[ax];
    const double ph = kTwoPi * dot;
    acc += weights_[j] * std::complex<double>(std::cos(ph), -std::sin(ph));
  }
  return acc;
}

double LatticeWeights::l2_norm_sq() const {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return s;
}

nlohmann::json LatticeWeights::to_json() const {
  return nlohmann::json{{"support", support_}, {"weights", weights_}};
}

LatticeWeights LatticeWeights::from_json(const nlohmann::json& j) {
  return LatticeWeights(
      j.at("support").get<std::vector<std::vector<long long>>>(),
      j.at("weights").get<std::vector<double>>());
}

LatticeAutocorrelation autocorrelation(const LatticeWeights& rho) {
  std::map<std::vector<long long>, double> acc;
  const auto& sup = rho.support();
  const auto& w = rho.weights();
  for (std::size_t j = 0; j < sup.size(); ++j) {
    for (std::size_t l = 0; l < sup.size(); ++l) {
      std::vector<long long> lag(rho.dim());
      for (std::size_t ax = 0; ax < rho.dim(); ++ax)
        lag[ax] = sup[j][ax] - sup[l][ax];
      acc[lag] += w[j] * w[l];
    }
  }
  LatticeAutocorrelation out;
  for (auto& [lag, v] : acc) {
    out.lags.push_back(lag);
    out.values.push_back(v);
  }
  return out;
}

double LatticeAutocorrelation::at_zero() const {
  for (std::size_t i = 0; i < lags.size(); ++i) {
    bool zero = true;
    for (long long k : lags[i])
      if (k != 0) zero = false;
    if (zero) return values[i];
  }
  return 0.0;
}

double LatticeAutocorrelation::total() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

// ---- torus spectral measure -------------------------------------------------

TorusSpectralMeasure::TorusSpectralMeasure(
    std::vector<std::vector<double>> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.empty() || atoms_.size() != weights_.size())
    throw std::invalid_argument(
        "TorusSpectralMeasure: atoms/weights size mismatch");
  dim_ = atoms_[0].size();
  for (auto& th : atoms_) {
    if (th.size() != dim_)
      throw std::invalid_argument("TorusSpectralMeasure: ragged atoms");
    for (double& x : th) {
      x -= std::floor(x);  // represent on [0,1)^d
    }
  }
  for (double w : weights_)
    if (!(w >= 0.0))
      throw std::invalid_argument(
          "TorusSpectralMeasure: weights must be nonnegative");
}

double TorusSpectralMeasure::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

nlohmann::json TorusSpectralMeasure::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t j = 0; j < weights_.size(); ++j)
    atoms.push_back({{"theta", atoms_[j]}, {"weight", weights_[j]}});
  return nlohmann::json{{"atoms", atoms}};
}

TorusSpectralMeasure TorusSpectralMeasure::from_json(const nlohmann::json& j) {
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  for (const auto& a : j.at("atoms")) {
    atoms.push_back(a.at("theta").get<std::vector<double>>());
    weights.push_back(a.at("weight").get<double>());
  }
  return TorusSpectralMeasure(std::move(atoms), std::move(weights));
}

double zd_average_norm(const LatticeWeights& rho, std::uint64_t n,
                       const TorusSpectralMeasure& tsm) {
  if (rho.dim() != tsm.dim())
    throw std::invalid_argument("zd_average_norm: dimension mismatch");
  double acc = 0.0;
  std::vector<double> ntheta(tsm.dim());
  for (std::size_t j = 0; j < tsm.atoms().size(); ++j) {
    // n*theta mod 1 keeps phases small; rho_hat has period 1 per coordinate.
    for (std::size_t ax = 0; ax < tsm.dim(); ++ax) {
      const double x = static_cast<double>(n) * tsm.atoms()[j][ax];
      ntheta[ax] = x - std::floor(x);
    }
    acc += tsm.weights()[j] * std::norm(rho.transform(ntheta));
  }
  return acc;
}

CesaroResult zd_cesaro(const LatticeWeights& rho,
                       const TorusSpectralMeasure& tsm, std::uint64_t N) {
  if (N < 1) throw std::invalid_argument("zd_cesaro: N must be >= 1");
  if (rho.dim() != tsm.dim())
    throw std::invalid_argument("zd_cesaro: dimension mismatch");

  CesaroResult out;
  double acc = 0.0;
  for (std::uint64_t n = 0; n < N; ++n) acc += zd_average_norm(rho, n, tsm);
  out.cesaro_mean = acc / static_cast<double>(N);

  const auto ac = autocorrelation(rho);
  double predicted = 0.0;
  for (std::size_t i = 0; i < ac.lags.size(); ++i) {
    // nu_x(E_k): atoms theta with <k, theta> integer (within tolerance).
    double mass = 0.0;
    bool near = false;
    for (std::size_t j = 0; j < tsm.atoms().size(); ++j) {
      double dot = 0.0;
      for (std::size_t ax = 0; ax < tsm.dim(); ++ax)
        dot += static_cast<double>(ac.lags[i][ax]) * tsm.atoms()[j][ax];
      const double dist = dist_to_integer(dot);
      if (dist <= kResonanceTol)
        mass += tsm.weights()[j];
      else if (dist <= kNearResonanceTol)
        near = true;
    }
    if (near) out.near_resonances.push_back(ac.lags[i]);
    predicted += ac.values[i] * mass;
  }
  out.predicted_limit = predicted;
  out.lower_bound = rho.l2_norm_sq() * tsm.total_mass();
  return out;
}

}  // namespace ergolab::spectral
