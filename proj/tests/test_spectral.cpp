#include <cmath>
#include <random>

#include "doctest.h"
#include "ergolab/spectral.hpp"
#include "oracles.hpp"

using namespace ergolab;
using namespace ergolab::spectral;
using measures::Dilation;
using measures::ProbabilityMeasure;

namespace {

ProbabilityMeasure unit_box(std::size_t d) {
  return ProbabilityMeasure::lebesgue_box(std::vector<double>(d, 0.0),
                                          std::vector<double>(d, 1.0));
}

// Random atomic tsm whose atoms stay clear of every resonance set of rho's
// lag vectors, so the Cesaro averages converge at the 1/N rate.
TorusSpectralMeasure random_nonresonant_tsm(const LatticeWeights& rho,
                                            std::size_t n_atoms,
                                            std::mt19937_64& gen) {
  const auto ac = autocorrelation(rho);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  while (atoms.size() < n_atoms) {
    std::vector<double> theta(rho.dim());
    for (auto& x : theta) x = u(gen);
    bool good = true;
    for (const auto& lag : ac.lags) {
      bool zero = true;
      for (long long v : lag) zero = zero && v == 0;
      if (zero) continue;
      double dot = 0.0;
      for (std::size_t ax = 0; ax < theta.size(); ++ax)
        dot += static_cast<double>(lag[ax]) * theta[ax];
      if (std::abs(dot - std::round(dot)) < 0.02) {
        good = false;
        break;
      }
    }
    if (good) {
      atoms.push_back(theta);
      weights.push_back(u(gen) + 0.1);
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (auto& w : weights) w /= total;
  return TorusSpectralMeasure(std::move(atoms), std::move(weights));
}

}  // namespace

TEST_CASE("spectral measure invariants and projection mass") {
  const SpectralMeasure sm({{0.0, 0.0}, {1.0, 2.0}}, {0.3, 0.7});
  CHECK(sm.total_mass() == doctest::Approx(1.0));
  CHECK(projection_mass(sm) == doctest::Approx(0.3));

  const SpectralMeasure no_zero({{1.0}}, {0.9});
  CHECK(projection_mass(no_zero) == 0.0);

  const SpectralMeasure only_zero({{0.0}}, {1.0});
  CHECK(projection_mass(only_zero) == doctest::Approx(1.0));

  CHECK_THROWS_AS(SpectralMeasure({{0.0}, {0.0}}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SpectralMeasure({{1.0}}, {-0.5}), std::invalid_argument);
}

TEST_CASE("mean_average_norm worked examples") {
  const auto box = unit_box(1);
  const Dilation std1 = Dilation::standard(1);

  // sm concentrated at zero: every probability rho gives exactly 1
  const SpectralMeasure zero_sm({{0.0}}, {1.0});
  for (double lambda : {0.5, 1.0, 100.0}) {
    const auto nv = mean_average_norm(box, std1, lambda, zero_sm);
    CHECK(nv.value == doctest::Approx(1.0).epsilon(1e-12));
  }

  const SpectralMeasure sm2pi({{2.0 * oracles::kPi}}, {1.0});
  CHECK(mean_average_norm(box, std1, 1.0, sm2pi).value < 1e-18);

  const auto half = mean_average_norm(box, std1, 0.5, sm2pi);
  CHECK(half.value == doctest::Approx(4.0 / (oracles::kPi * oracles::kPi))
                          .epsilon(1e-9));
}

TEST_CASE("anisotropic example: one-dimensional sinc factor at lambda^2") {
  const auto box2 = unit_box(2);
  const Dilation dil({1.0, 2.0});
  const SpectralMeasure sm({{0.0, 1.0}}, {1.0});
  for (double lambda : {2.0, 5.0, 17.0}) {
    const auto nv = mean_average_norm(box2, dil, lambda, sm);
    const double l2 = lambda * lambda;
    const double expected = (2.0 - 2.0 * std::cos(l2)) / (l2 * l2);
    CHECK(nv.value == doctest::Approx(expected).epsilon(1e-8));
    CHECK(nv.value <= 4.0 / (l2 * l2) + 1e-12);
  }
}

TEST_CASE("mean convergence curve: Rajchman decay and the Dirac obstruction") {
  const auto box = unit_box(1);
  const Dilation std1 = Dilation::standard(1);
  const SpectralMeasure sm({{0.0}, {2.0 * oracles::kPi}}, {0.5, 0.5});
  const std::vector<double> lambdas = {1.3, 4.7, 16.9, 77.7, 311.0, 1000.0};
  const auto curve = mean_convergence_curve(box, std1, lambdas, sm);
  REQUIRE(curve.size() == lambdas.size());
  // monotone-trend decrease: each decade threshold is eventually beaten
  for (double eps : {1e-1, 1e-2}) {
    bool achieved = false;
    for (const auto& [lambda, nv] : curve) achieved |= nv.value < eps;
    CHECK(achieved);
  }
  CHECK(curve.back().second.value < curve.front().second.value);
  CHECK(curve.back().second.value <= 1e-5);
  // the sinc envelope 0.5 * (2 / (2 pi lambda))^2 dominates every point
  for (const auto& [lambda, nv] : curve) {
    const double env = 0.5 * std::pow(1.0 / (oracles::kPi * lambda), 2);
    CHECK(nv.value <= env + 1e-12);
  }

  // non-Rajchman rho: |rho_hat| = 1 everywhere, curve is flat at the
  // nonzero mass
  const auto dirac = ProbabilityMeasure::dirac({0.7});
  const auto flat = mean_convergence_curve(dirac, std1, lambdas, sm);
  for (const auto& [lambda, nv] : flat)
    CHECK(nv.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scaling spectral weights scales every norm output linearly") {
  const auto box = unit_box(1);
  const Dilation std1 = Dilation::standard(1);
  const SpectralMeasure sm({{0.0}, {3.0}, {7.0}}, {0.25, 0.5, 0.25});
  const auto scaled = sm.scaled(3.5);
  for (double lambda : {0.7, 4.0}) {
    const auto a = mean_average_norm(box, std1, lambda, sm);
    const auto b = mean_average_norm(box, std1, lambda, scaled);
    CHECK(b.value == doctest::Approx(3.5 * a.value).epsilon(1e-12));
  }
  CHECK(projection_mass(scaled) == doctest::Approx(3.5 * 0.25));
}

TEST_CASE("autocorrelation worked examples") {
  // delta_0
  const LatticeWeights d0({{0}}, {1.0});
  const auto a0 = autocorrelation(d0);
  REQUIRE(a0.lags.size() == 1);
  CHECK(a0.values[0] == doctest::Approx(1.0));

  // uniform on {0,1}
  const LatticeWeights u2({{0}, {1}}, {0.5, 0.5});
  const auto a2 = autocorrelation(u2);
  REQUIRE(a2.lags.size() == 3);
  CHECK(a2.at_zero() == doctest::Approx(0.5));
  CHECK(a2.total() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < a2.lags.size(); ++i)
    if (a2.lags[i][0] != 0) CHECK(a2.values[i] == doctest::Approx(0.25));

  // uniform on {0,1,2}
  const LatticeWeights u3({{0}, {1}, {2}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto a3 = autocorrelation(u3);
  REQUIRE(a3.lags.size() == 5);
  CHECK(a3.at_zero() == doctest::Approx(1.0 / 3));
  for (std::size_t i = 0; i < a3.lags.size(); ++i) {
    const long long k = a3.lags[i][0];
    if (std::abs(k) == 1) CHECK(a3.values[i] == doctest::Approx(2.0 / 9));
    if (std::abs(k) == 2) CHECK(a3.values[i] == doctest::Approx(1.0 / 9));
  }
  CHECK(a3.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("autocorrelation symmetry and normalization on random weights") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_int_distribution<long long> ki(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + trial % 2;
    std::vector<std::vector<long long>> sup;
    std::vector<double> w;
    for (int i = 0; i < 5; ++i) {
      std::vector<long long> k(d);
      for (auto& v : k) v = ki(gen);
      if (std::find(sup.begin(), sup.end(), k) != sup.end()) continue;
      sup.push_back(k);
      w.push_back(u(gen));
    }
    double tot = 0.0;
    for (double x : w) tot += x;
    for (auto& x : w) x /= tot;
    const LatticeWeights rho(sup, w);
    const auto ac = autocorrelation(rho);
    CHECK(ac.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ac.at_zero() == doctest::Approx(rho.l2_norm_sq()).epsilon(1e-12));
    for (std::size_t i = 0; i < ac.lags.size(); ++i) {
      std::vector<long long> neg(ac.lags[i].size());
      for (std::size_t ax = 0; ax < neg.size(); ++ax) neg[ax] = -ac.lags[i][ax];
      const auto it = std::find(ac.lags.begin(), ac.lags.end(), neg);
      REQUIRE(it != ac.lags.end());
      CHECK(ac.values[static_cast<std::size_t>(it - ac.lags.begin())] ==
            doctest::Approx(ac.values[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("zd_average_norm worked examples") {
  const TorusSpectralMeasure tsm_half({{0.5}}, {1.0});
  const LatticeWeights d0({{0}}, {1.0});
  for (std::uint64_t n : {1ull, 7ull, 100ull})
    CHECK(zd_average_norm(d0, n, tsm_half) == doctest::Approx(1.0));

  const LatticeWeights u2({{0}, {1}}, {0.5, 0.5});
  CHECK(zd_average_norm(u2, 1, tsm_half) == doctest::Approx(0.0));
  CHECK(zd_average_norm(u2, 2, tsm_half) == doctest::Approx(1.0));
}

TEST_CASE("zd_cesaro worked examples") {
  // rho = delta_0: all three outputs equal the total mass
  const LatticeWeights d0({{0}}, {1.0});
  const TorusSpectralMeasure tsm({{0.3}}, {2.0});
  const auto r0 = zd_cesaro(d0, tsm, 100);
  CHECK(r0.cesaro_mean == doctest::Approx(2.0));
  CHECK(r0.predicted_limit == doctest::Approx(2.0));
  CHECK(r0.lower_bound == doctest::Approx(2.0));

  // uniform{0,2} with atom 1/2: E_{+-2} contains it, predicted = 1
  const LatticeWeights u02({{0}, {2}}, {0.5, 0.5});
  const TorusSpectralMeasure half({{0.5}}, {1.0});
  const auto r1 = zd_cesaro(u02, half, 10000);
  CHECK(r1.predicted_limit == doctest::Approx(1.0));
  CHECK(std::abs(r1.cesaro_mean - 1.0) < 1e-3);

  // uniform{0,1} with the irrational atom sqrt(2)-1: only E_0 contributes
  const LatticeWeights u01({{0}, {1}}, {0.5, 0.5});
  const TorusSpectralMeasure irr({{std::sqrt(2.0) - 1.0}}, {1.0});
  const auto r2 = zd_cesaro(u01, irr, 100000);
  CHECK(r2.predicted_limit == doctest::Approx(0.5));
  CHECK(r2.lower_bound == doctest::Approx(0.5));
  CHECK(std::abs(r2.cesaro_mean - 0.5) < 1e-3);
}

TEST_CASE("cesaro error shrinks with N for non-resonant atoms") {
  const LatticeWeights u01({{0}, {1}}, {0.5, 0.5});
  const TorusSpectralMeasure irr({{std::sqrt(2.0) - 1.0}}, {1.0});
  double prev = 1e9;
  for (std::uint64_t N : {1000ull, 10000ull, 100000ull}) {
    const auto r = zd_cesaro(u01, irr, N);
    const double err = std::abs(r.cesaro_mean - r.predicted_limit);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("predicted limit dominates the l2 lower bound on random configs") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::uniform_int_distribution<long long> ki(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + trial % 2;
    std::vector<std::vector<long long>> sup;
    std::vector<double> w;
    while (sup.size() < 3) {
      std::vector<long long> k(d);
      for (auto& v : k) v = ki(gen);
      if (std::find(sup.begin(), sup.end(), k) != sup.end()) continue;
      sup.push_back(k);
      w.push_back(u(gen));
    }
    double tot = 0.0;
    for (double x : w) tot += x;
    for (auto& x : w) x /= tot;
    const LatticeWeights rho(sup, w);
    const auto tsm = random_nonresonant_tsm(rho, 1 + trial % 3, gen);
    const auto r = zd_cesaro(rho, tsm, 2000);
    CHECK(r.predicted_limit >= r.lower_bound - 1e-12);
    CHECK(r.near_resonances.empty());
  }
}

TEST_CASE("lattice weights and tsm JSON round trips") {
  const LatticeWeights rho({{0, 1}, {2, -1}}, {0.25, 0.75});
  CHECK(LatticeWeights::from_json(rho.to_json()).to_json() == rho.to_json());
  const TorusSpectralMeasure tsm({{0.25, 0.75}}, {1.5});
  CHECK(TorusSpectralMeasure::from_json(tsm.to_json()).to_json() ==
        tsm.to_json());
  const SpectralMeasure sm({{0.0}, {1.0}}, {0.5, 0.5});
  CHECK(SpectralMeasure::from_json(sm.to_json()).to_json() == sm.to_json());
}
