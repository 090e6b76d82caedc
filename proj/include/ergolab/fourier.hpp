#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergolab/measure.hpp"
#include "json.hpp"

namespace ergolab::fourier {

using measures::Dilation;
using measures::ProbabilityMeasure;

struct TransformValue {
  std::complex<double> value;
  double error = 0.0;
};

// nu_hat(xi) = integral of e^{-i<xi,t>} d nu(t). Exact for dirac/atomic;
// frequency-scaled quadrature for box/gaussian/sphere(d<=3)/curve; exact
// piecewise-linear-phase summation for brownian images. budget = 0 picks the
// automatic node count (scaled with |xi|, hard-capped); budget > 0 overrides
// the total node target.
TransformValue fourier_transform(const ProbabilityMeasure& nu,
                                 std::span<const double> xi,
                                 std::size_t budget = 0,
                                 std::uint64_t seed = 0);

// Monte Carlo route (n samples); used as an independent cross-check.
TransformValue fourier_transform_mc(const ProbabilityMeasure& nu,
                                    std::span<const double> xi, std::size_t n,
                                    std::uint64_t seed);

// nu_hat(lambda.xi), via the dual dilation identity <xi, lambda.t> = <lambda.xi, t>.
TransformValue fourier_of_dilated(const ProbabilityMeasure& nu,
                                  const Dilation& dil, double lambda,
                                  std::span<const double> xi,
                                  std::size_t budget = 0,
                                  std::uint64_t seed = 0);

// Per-shell envelope of |nu_hat| over sampled unit directions.
struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> sup_modulus;
  std::vector<double> mean_modulus;
  std::size_t n_directions = 0;
  std::size_t quadrature_budget = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Low-discrepancy directions for d <= 3 (seeded offset), pseudo-random above.
std::vector<std::vector<double>> unit_directions(std::size_t d, std::size_t n,
                                                 std::uint64_t seed);

DecayProfile decay_profile(const ProbabilityMeasure& nu,
                           std::vector<double> radii, std::size_t n_directions,
                           std::size_t budget, std::uint64_t seed,
                           int workers = 0);

struct DimensionEstimate {
  double a_hat = 0.0;
  double stderr_a = 0.0;
  double slope = 0.0;
  bool ok = false;
  std::string message;
};

// Least-squares slope of log sup_modulus vs log radius over the inclusive
// index window; a_hat = clamp(-2*slope, 0, d).
DimensionEstimate estimate_fourier_dimension(const DecayProfile& profile,
                                             std::size_t first,
                                             std::size_t last);

// Max of sup_modulus over the outermost tail_fraction of the radii.
double rajchman_defect(const DecayProfile& profile, double tail_fraction);

struct SobolevEnergy {
  double value = 0.0;
  std::vector<double> decade_lower;
  std::vector<double> decade_upper;
  std::vector<double> increments;
};

// Truncated energy integral over r_min <= |xi| <= r_max of |nu_hat|^2 |xi|^{a-d},
// decade by decade. Radial sampling is budget-driven, so at high frequency the
// increments carry sampling noise; they are trend diagnostics, not verdicts.
SobolevEnergy sobolev_energy(const ProbabilityMeasure& nu, double a,
                             double r_min, double r_max, std::size_t budget,
                             std::uint64_t seed, int workers = 0);

// p_a = (1 + a) / a.
double critical_exponent(double a);

}  // namespace ergolab::fourier
