#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ergolab/dilation.hpp"
#include "json.hpp"

namespace ergolab::measures {

struct Box {
  std::vector<double> lower, upper;
  std::size_t dim() const { return lower.size(); }
};

// Structure-of-arrays point storage; coords[axis][i].
struct PointBatch {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<std::vector<double>> coords;

  void resize(std::size_t d, std::size_t count);
  std::vector<double> point(std::size_t i) const;
};

// Atomic approximation of a measure, used for grid convolution and as
// deterministic quadrature nodes.
struct QuadratureAtoms {
  PointBatch points;
  std::vector<double> weights;
};

struct Integral {
  std::complex<double> value;
  double error = 0.0;  // 3x standard error (MC) or refinement delta (quadrature)
};

enum class IntegrationMethod { automatic, monte_carlo, quadrature };

// Polynomial cap bump on the sphere: psi(t) = max(0, <t,axis>/r - cos(width))^power,
// normalized so the weighted surface measure stays a probability measure.
struct SphereCutoff {
  std::vector<double> axis;
  double width = 1.0;
  int power = 2;
};

// Tagged representation of a probability measure on R^d. All sampling is
// counter-based: point i draws from its own substream of (seed, i), so
// sample sets are independent of how index ranges are partitioned.
class ProbabilityMeasure {
 public:
  enum class Kind {
    dirac,
    atomic,
    lebesgue_box,
    gaussian,
    sphere,
    curve,
    brownian,
    dilated
  };

  static ProbabilityMeasure dirac(std::vector<double> point);
  static ProbabilityMeasure atomic(std::vector<std::vector<double>> points,
                                   std::vector<double> weights);
  static ProbabilityMeasure lebesgue_box(std::vector<double> lower,
                                         std::vector<double> upper);
  static ProbabilityMeasure gaussian(std::vector<double> center, double sigma);
  static ProbabilityMeasure sphere(std::size_t dim, double radius);
  static ProbabilityMeasure sphere(std::size_t dim, double radius,
                                   SphereCutoff cutoff);
  // Pushforward of Lebesgue on [0,1] under w -> (q_1 w, ..., q_d w^d).
  static ProbabilityMeasure curve(std::vector<double> coefficients);
  // Pushforward of the depth-truncated Cantor measure (contraction `ratio`)
  // under a sampled Brownian path, piecewise linear at `resolution` steps.
  static ProbabilityMeasure brownian_image(double ratio, int depth,
                                           std::size_t dim,
                                           std::uint64_t path_seed,
                                           std::size_t resolution);

  // nu_lambda with integral phi d(nu_lambda) = integral phi(lambda.t) d nu(t).
  // Dirac/atomic atoms move exactly; other variants get a composing wrapper.
  ProbabilityMeasure dilated(const Dilation& dil, double lambda) const;

  Kind kind() const;
  std::size_t dim() const { return dim_; }
  Box bounding_box() const;
  bool is_exact() const;  // integrals evaluate exactly (dirac/atomic)
  bool has_quadrature() const;

  PointBatch sample(std::size_t n, std::uint64_t seed) const;
  // Fills out.coords[*][out_offset + 0 .. count) with points first..first+count.
  void sample_into(std::uint64_t seed, std::size_t first, std::size_t count,
                   PointBatch& out, std::size_t out_offset) const;

  Integral integrate(
      const std::function<std::complex<double>(std::span<const double>)>& phi,
      IntegrationMethod method = IntegrationMethod::automatic,
      std::size_t budget = 0, std::uint64_t seed = 0) const;

  // target_spacing: requested max gap between neighbouring atoms along the
  // support; max_atoms caps the count (0 = default cap).
  QuadratureAtoms quadrature_atoms(double target_spacing,
                                   std::size_t max_atoms = 0) const;

  // --- variant payloads --------------------------------------------------
  struct DiracData {
    std::vector<double> point;
  };
  struct AtomicData {
    std::vector<std::vector<double>> points;
    std::vector<double> weights;
    std::vector<double> cumulative;
  };
  struct BoxData {
    std::vector<double> lower, upper;
  };
  struct GaussianData {
    std::vector<double> center;
    double sigma;
  };
  struct SphereData {
    std::size_t dim;
    double radius;
    std::optional<SphereCutoff> cutoff;
  };
  struct CurveData {
    std::vector<double> q;
  };
  struct BrownianData {
    double ratio;
    int depth;
    std::size_t dim;
    std::uint64_t path_seed;
    std::size_t resolution;
    std::vector<std::vector<double>> path;  // [axis][node], times j/resolution
    std::vector<double> interval_starts;    // sorted Cantor interval starts
    double interval_length;
  };
  struct DilatedData {
    std::shared_ptr<const ProbabilityMeasure> inner;
    Dilation dil;
    double lambda;
  };

  const DiracData& as_dirac() const;
  const AtomicData& as_atomic() const;
  const BoxData& as_box() const;
  const GaussianData& as_gaussian() const;
  const SphereData& as_sphere() const;
  const CurveData& as_curve() const;
  const BrownianData& as_brownian() const;
  const DilatedData& as_dilated() const;

  nlohmann::json to_json() const;
  static ProbabilityMeasure from_json(const nlohmann::json& j);

 private:
  using Payload =
      std::variant<DiracData, AtomicData, BoxData, GaussianData, SphereData,
                   CurveData, std::shared_ptr<const BrownianData>, DilatedData>;

  ProbabilityMeasure(std::size_t dim, Payload payload);

  std::size_t dim_;
  Payload payload_;
};

// Spec operation names, thin wrappers over the class API.
inline std::vector<double> apply_dilation(const Dilation& dil, double lambda,
                                          std::span<const double> t) {
  return dil.apply(lambda, t);
}
inline ProbabilityMeasure dilate_pushforward(const ProbabilityMeasure& nu,
                                             const Dilation& dil,
                                             double lambda) {
  return nu.dilated(dil, lambda);
}
inline ProbabilityMeasure make_curve_measure(std::vector<double> q) {
  return ProbabilityMeasure::curve(std::move(q));
}
inline ProbabilityMeasure make_brownian_image(double cantor_ratio, int depth,
                                              std::size_t d,
                                              std::uint64_t seed,
                                              std::size_t resolution) {
  return ProbabilityMeasure::brownian_image(cantor_ratio, depth, d, seed,
                                            resolution);
}

}  // namespace ergolab::measures
