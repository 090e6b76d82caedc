#pragma once

#include <cstdint>
#include <vector>

#include "ergolab/grid.hpp"
#include "ergolab/measure.hpp"

namespace ergolab::maximal {

using measures::Dilation;
using measures::ProbabilityMeasure;

// Evaluation routes for D_lambda phi = phi * nu_lambda on a grid. The measure
// is atomized at a density tied to the grid spacing; all routes then compute
// the same discrete operator:
//   direct_points - per-node sum over atoms with multilinear reads (reference)
//   direct_taps   - atoms rasterized to a tap stencil, explicit convolution
//   fft           - same taps convolved via FFTW (r2c/c2r, FFTW_ESTIMATE)
// automatic picks taps for small stencils and FFT for large ones.
enum class ConvPath { automatic, direct_points, direct_taps, fft };

// x -> integral phi(x - lambda.t) d nu(t) at the grid nodes. budget overrides
// the atom-count cap (0 = default).
GridFunction dilated_convolution(const GridFunction& phi,
                                 const ProbabilityMeasure& nu,
                                 const Dilation& dil, double lambda,
                                 std::size_t budget = 0,
                                 std::uint64_t seed = 0,
                                 ConvPath path = ConvPath::automatic);

// Pointwise max over the lambda grid of |D_lambda phi|.
GridFunction maximal_function(const GridFunction& phi,
                              const ProbabilityMeasure& nu, const Dilation& dil,
                              const std::vector<double>& lambda_grid,
                              std::size_t budget = 0, std::uint64_t seed = 0,
                              int workers = 0,
                              ConvPath path = ConvPath::automatic);

// sup over the alpha grid of alpha^p * measure{S_phi > alpha} / ||phi||_p^p,
// with measure = h^d * node count.
double weak_type_ratio(const GridFunction& S_phi, const GridFunction& phi,
                       double p, const std::vector<double>& alpha_grid);

std::vector<double> default_alpha_grid(double sup, std::size_t count = 64,
                                       double alpha_min = 1e-3);

// Log-spaced lambda grid.
std::vector<double> log_lambda_grid(double lo, double hi, std::size_t count);

// Stein-Wainger curve maximal operator: sup over lambda of
// | integral_0^1 phi(s - lambda.q(w)) dw | with the (1,...,d) dilation.
// The w-integral uses `panels` composite panels (default 1000).
GridFunction curve_maximal(const GridFunction& phi,
                           const std::vector<double>& q, const Dilation& dil,
                           const std::vector<double>& lambda_grid,
                           std::size_t panels = 1000, int workers = 0,
                           ConvPath path = ConvPath::automatic);

}  // namespace ergolab::maximal
