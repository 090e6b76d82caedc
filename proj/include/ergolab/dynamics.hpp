#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergolab/measure.hpp"
#include "json.hpp"

namespace ergolab::dynamics {

using measures::Dilation;
using measures::PointBatch;
using measures::ProbabilityMeasure;

// Translation flow T_t x = x + M t mod 1 on the n-torus, acting from R^d.
struct TorusAction {
  std::size_t n = 0;  // torus dimension
  std::size_t d = 0;  // acting dimension
  std::vector<double> M;  // row-major n x d

  TorusAction(std::size_t n_, std::size_t d_, std::vector<double> M_);

  // Shipped ergodic exemplars.
  static TorusAction line_in_2torus();  // n=2, d=1, M = (1; sqrt2)
  static TorusAction identity3();       // n=d=3, M = I
  static TorusAction line_in_3torus();  // n=3, d=1, M = (1; sqrt2; sqrt3)

  std::vector<double> act(std::span<const double> x,
                          std::span<const double> t) const;
  // M^T k in R^d for an integer mode k in Z^n.
  std::vector<double> m_transpose_k(std::span<const long long> k) const;

  nlohmann::json to_json() const;
  static TorusAction from_json(const nlohmann::json& j);
};

// Finite trigonometric polynomial sum_k c_k e^{2 pi i <k, x>} on the n-torus.
struct TrigObservable {
  struct Mode {
    std::vector<long long> k;
    std::complex<double> c;
  };
  std::vector<Mode> modes;

  std::size_t torus_dim() const;
  std::complex<double> mean() const;  // coefficient at k = 0
  std::complex<double> eval(std::span<const double> x) const;
  bool is_real() const;
  long long max_mode_norm() const;  // max ||k||_inf over modes

  nlohmann::json to_json() const;
  static TrigObservable from_json(const nlohmann::json& j);
};

// Real-valued random observable: n_pairs conjugate mode pairs with nonzero
// frequencies ||k||_inf <= kmax, coefficients normalized to sum |c_k| = 1.
TrigObservable random_real_observable(std::size_t n_pairs, long long kmax,
                                      std::size_t torus_dim,
                                      std::uint64_t seed, std::uint64_t index);

// Batch evaluation of f at the points of a PointBatch (torus coords).
void eval_observable_batch(const TrigObservable& f, const PointBatch& x,
                           std::complex<double>* out);

enum class ErgodicityStatus { ergodic_up_to, non_ergodic, resonant_near };

struct ErgodicityCertificate {
  ErgodicityStatus status = ErgodicityStatus::ergodic_up_to;
  long long K = 0;
  std::vector<long long> witness;  // k with M^T k = 0 (or near)
  double residual = 0.0;

  std::string describe() const;
};

// Scans 0 < ||k||_inf <= K for kernel vectors of M^T. ||M^T k|| < 1e-9 is a
// non-ergodicity witness, < 1e-6 a near-resonance.
ErgodicityCertificate ergodicity_certificate(const TorusAction& action,
                                             long long K);

// A_lambda f(x) = integral f(T_{lambda.t} x) d nu(t), via the closed form
// sum_k c_k e^{2 pi i <k,x>} nu_hat(-lambda.(2 pi M^T k)).
std::complex<double> ergodic_average_closed(const TorusAction& action,
                                            const ProbabilityMeasure& nu,
                                            const Dilation& dil, double lambda,
                                            const TrigObservable& f,
                                            std::span<const double> x,
                                            std::size_t budget = 0);

struct McValue {
  std::complex<double> value;
  double stderr3 = 0.0;  // 3x standard error
};

McValue ergodic_average_mc(const TorusAction& action,
                           const ProbabilityMeasure& nu, const Dilation& dil,
                           double lambda, const TrigObservable& f,
                           std::span<const double> x, std::size_t budget,
                           std::uint64_t seed);

struct SweepRow {
  double lambda = 0.0;
  double deviation_max = 0.0;
  double deviation_mean = 0.0;
};

struct ConvergenceSweep {
  std::vector<SweepRow> rows;
  std::size_t x_samples = 0;
  // invariant nonconstant modes hit by a non-ergodicity witness (only
  // populated when running with override)
  std::vector<std::vector<long long>> stuck_modes;
  // purely atomic nu: |nu_hat| does not decay, so deviations cannot vanish
  bool non_rajchman_measure = false;
};

struct SweepOptions {
  std::size_t x_samples = 64;
  std::size_t budget = 0;       // transform budget
  bool override_non_ergodic = false;
  int workers = 0;
};

// Worst-case |A_lambda f(x) - c_0| over Haar-sampled x, per lambda. Refuses
// (throws) when an exact non-ergodicity witness is a mode of f, unless
// overridden; the sweep then reports the stuck modes.
ConvergenceSweep convergence_sweep(const TorusAction& action,
                                   const ProbabilityMeasure& nu,
                                   const Dilation& dil,
                                   const std::vector<double>& lambdas,
                                   const TrigObservable& f, std::uint64_t seed,
                                   const SweepOptions& opts = {});

// Smoothing profiles with closed-form transforms.
class SmoothingKernel {
 public:
  static SmoothingKernel gaussian(std::size_t d, double sigma);
  static SmoothingKernel box(std::vector<double> lower,
                             std::vector<double> upper);
  static SmoothingKernel difference(SmoothingKernel a, SmoothingKernel b);

  std::size_t dim() const { return dim_; }
  // phi_hat(xi) = integral e^{-i <xi,s>} phi(s) ds
  std::complex<double> hat(std::span<const double> xi) const;
  double integral() const;  // phi_hat(0)

  static SmoothingKernel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  struct Gauss {
    double sigma;
  };
  struct BoxK {
    std::vector<double> lower, upper;
  };
  SmoothingKernel() = default;

  std::size_t dim_ = 0;
  // difference chain: sum of signed primitive kernels
  struct Term {
    double sign;
    bool is_gauss;
    Gauss g;
    BoxK b;
  };
  std::vector<Term> terms_;
};

// f(x) = integral f0(T_s x) phi(s) ds, exact in the trig model: the mode
// coefficients become c_k * phi_hat(-2 pi M^T k).
TrigObservable smooth_observable(const TorusAction& action,
                                 const TrigObservable& f0,
                                 const SmoothingKernel& kernel);

// Grid-restricted Mf(x) = max over the lambda grid of |A_lambda f(x)|.
double orbit_maximal(const TorusAction& action, const ProbabilityMeasure& nu,
                     const Dilation& dil,
                     const std::vector<double>& lambda_grid,
                     const TrigObservable& f, std::span<const double> x,
                     std::size_t budget = 0);

struct TransferParams {
  std::size_t family_size = 8;
  std::size_t modes_per_observable = 4;  // conjugate pairs
  long long kmax = 1;
  std::size_t x_samples = 512;
  std::vector<double> lambda_grid;
  // grid side
  std::size_t grid_nodes = 4096;  // per axis
  double grid_spacing = 0.01;
  double window_sigma = 0.0;  // 0 = auto from grid extent
  std::size_t conv_budget = 0;
};

struct TransferResult {
  double torus_constant = 0.0;
  double grid_constant = 0.0;
  double ratio = 0.0;
};

// Empirical Calderon-transfer check: the torus maximal constant over a random
// trig family against the grid maximal constant over Gaussian-windowed orbit
// traces of the same family.
TransferResult transfer_ratio(const TorusAction& action,
                              const ProbabilityMeasure& nu, const Dilation& dil,
                              double p, const TransferParams& params,
                              std::uint64_t seed, int workers = 0);

}  // namespace ergolab::dynamics
