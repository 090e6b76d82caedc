#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ergolab/fourier.hpp"
#include "ergolab/measure.hpp"
#include "json.hpp"

namespace ergolab::spectral {

using measures::Dilation;
using measures::ProbabilityMeasure;

// Finite atomic spectral measure of a vector under a unitary R^d
// representation; total mass = ||x||^2, zero-frequency mass = ||Px||^2.
class SpectralMeasure {
 public:
  SpectralMeasure(std::vector<std::vector<double>> frequencies,
                  std::vector<double> weights);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<std::vector<double>>& frequencies() const {
    return frequencies_;
  }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }

  SpectralMeasure scaled(double c) const;

  nlohmann::json to_json() const;
  static SpectralMeasure from_json(const nlohmann::json& j);

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> frequencies_;
  std::vector<double> weights_;
  double total_mass_;
};

// Weight at the zero frequency = ||Px||^2.
double projection_mass(const SpectralMeasure& sm);

struct NormValue {
  double value = 0.0;
  double error = 0.0;  // propagated transform error estimates
};

// ||A_lambda x||^2 = sum_j w_j |rho_hat(lambda.xi_j)|^2.
NormValue mean_average_norm(const ProbabilityMeasure& rho, const Dilation& dil,
                            double lambda, const SpectralMeasure& sm,
                            std::size_t budget = 0, std::uint64_t seed = 0);

// ||A_lambda x - Px||^2 per lambda (nonzero atoms only; cross terms vanish).
std::vector<std::pair<double, NormValue>> mean_convergence_curve(
    const ProbabilityMeasure& rho, const Dilation& dil,
    const std::vector<double>& lambdas, const SpectralMeasure& sm,
    std::size_t budget = 0, std::uint64_t seed = 0, int workers = 0);

// Probability weights on a finite subset of Z^d.
class LatticeWeights {
 public:
  LatticeWeights(std::vector<std::vector<long long>> support,
                 std::vector<double> weights);

  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<long long>>& support() const {
    return support_;
  }
  const std::vector<double>& weights() const { return weights_; }

  // rho_hat(theta) = sum_k rho_k e^{-2 pi i <k, theta>}
  std::complex<double> transform(std::span<const double> theta) const;

  double l2_norm_sq() const;

  nlohmann::json to_json() const;
  static LatticeWeights from_json(const nlohmann::json& j);

 private:
  std::size_t dim_;
  std::vector<std::vector<long long>> support_;
  std::vector<double> weights_;
};

// Signed-index autocorrelation map (rho * rho_check)_k on Z^d; symmetric,
// total sum 1, value at 0 equals ||rho||_{l^2}^2.
struct LatticeAutocorrelation {
  std::vector<std::vector<long long>> lags;  // sorted lexicographically
  std::vector<double> values;

  double at_zero() const;
  double total() const;
};

LatticeAutocorrelation autocorrelation(const LatticeWeights& rho);

// Atomic spectral measure on the torus T^d.
class TorusSpectralMeasure {
 public:
  TorusSpectralMeasure(std::vector<std::vector<double>> atoms,
                       std::vector<double> weights);

  std::size_t dim() const { return dim_; }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const;

  nlohmann::json to_json() const;
  static TorusSpectralMeasure from_json(const nlohmann::json& j);

 private:
  std::size_t dim_;
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
};

// ||A_n x||^2 = sum_j w_j |rho_hat(n theta_j)|^2 (exact arithmetic).
double zd_average_norm(const LatticeWeights& rho, std::uint64_t n,
                       const TorusSpectralMeasure& tsm);

struct CesaroResult {
  double cesaro_mean = 0.0;
  double predicted_limit = 0.0;
  double lower_bound = 0.0;
  // lags whose resonance set E_k contains at least one atom within 1e-6 but
  // not within the 1e-9 membership tolerance (near-resonant configs).
  std::vector<std::vector<long long>> near_resonances;
};

// Cesaro mean over n = 0..N-1 of ||A_n x||^2, the proof's predicted limit
// sum_k (rho*rho_check)_k nu_x(E_k), and the bound ||rho||_{l2}^2 ||x||^2.
CesaroResult zd_cesaro(const LatticeWeights& rho,
                       const TorusSpectralMeasure& tsm, std::uint64_t N);

}  // namespace ergolab::spectral
