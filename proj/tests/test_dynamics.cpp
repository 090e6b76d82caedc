#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "ergolab/dynamics.hpp"
#include "ergolab/rng.hpp"
#include "oracles.hpp"

using namespace ergolab;
using namespace ergolab::dynamics;
using measures::Dilation;
using measures::ProbabilityMeasure;

namespace {

ProbabilityMeasure unit_box(std::size_t d) {
  return ProbabilityMeasure::lebesgue_box(std::vector<double>(d, 0.0),
                                          std::vector<double>(d, 1.0));
}

TrigObservable single_mode(std::vector<long long> k,
                           std::complex<double> c = {1.0, 0.0}) {
  TrigObservable f;
  f.modes.push_back({std::move(k), c});
  return f;
}

}  // namespace

TEST_CASE("act: wraparound and worked examples") {
  const TorusAction a(1, 1, {1.0});
  CHECK(a.act(std::vector<double>{0.25}, std::vector<double>{0.5})[0] ==
        doctest::Approx(0.75));
  CHECK(a.act(std::vector<double>{0.9}, std::vector<double>{0.2})[0] ==
        doctest::Approx(0.1));

  const TorusAction b(2, 1, {0.3, 0.7});
  const auto y = b.act(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0});
  CHECK(y[0] == doctest::Approx(0.3));
  CHECK(y[1] == doctest::Approx(0.7));
}

TEST_CASE("cocycle law act(act(x,s),t) = act(x,s+t)") {
  const auto action = TorusAction::identity3();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0), x01(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x = {x01(gen), x01(gen), x01(gen)};
    std::vector<double> s = {u(gen), u(gen), u(gen)};
    std::vector<double> t = {u(gen), u(gen), u(gen)};
    std::vector<double> st(3);
    for (int i = 0; i < 3; ++i) st[i] = s[i] + t[i];
    const auto a = action.act(action.act(x, s), t);
    const auto b = action.act(x, st);
    for (int i = 0; i < 3; ++i) {
      double diff = std::abs(a[i] - b[i]);
      diff = std::min(diff, 1.0 - diff);  // distance on the circle
      CHECK(diff < 1e-12);
    }
  }
}

TEST_CASE("measure preservation: KS uniformity of translated Haar samples") {
  const auto action = TorusAction::line_in_2torus();
  const std::size_t n = 100000;
  const std::vector<double> t = {0.37};
  std::vector<std::vector<double>> coords(2, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const RngStream rs(4242, substream(stream_tag::base_points, i));
    const std::vector<double> x = {rs.uniform2(0)[0], rs.uniform2(0)[1]};
    const auto y = action.act(x, t);
    coords[0][i] = y[0];
    coords[1][i] = y[1];
  }
  // 1% critical value for the KS statistic is 1.63 / sqrt(n)
  const double crit = 1.63 / std::sqrt(static_cast<double>(n));
  CHECK(oracles::ks_uniform(coords[0]) < crit);
  CHECK(oracles::ks_uniform(coords[1]) < crit);
}

TEST_CASE("ergodicity certificate verdicts") {
  const auto erg = ergodicity_certificate(TorusAction::line_in_2torus(), 50);
  CHECK(erg.status == ErgodicityStatus::ergodic_up_to);
  CHECK(erg.describe() == "ergodic-up-to-50");

  const TorusAction bad(2, 1, {1.0, 1.0});
  const auto non = ergodicity_certificate(bad, 2);
  CHECK(non.status == ErgodicityStatus::non_ergodic);
  REQUIRE(non.witness.size() == 2);
  CHECK(non.witness[0] + non.witness[1] == 0);  // k = +-(1,-1)
  CHECK(non.witness[0] != 0);

  const auto id = ergodicity_certificate(TorusAction(2, 2, {1, 0, 0, 1}), 10);
  CHECK(id.status == ErgodicityStatus::ergodic_up_to);

  CHECK_THROWS_AS(ergodicity_certificate(bad, 0), std::invalid_argument);
}

TEST_CASE("ergodic averages: constants, box zero, and the sinc modulus") {
  const TorusAction a(1, 1, {1.0});
  const auto box = unit_box(1);
  const Dilation std1 = Dilation::standard(1);

  TrigObservable constant;
  constant.modes.push_back({{0}, {2.0, 0.0}});
  for (double lambda : {0.5, 1.0, 50.0}) {
    const auto v = ergodic_average_closed(a, box, std1, lambda, constant,
                                          std::vector<double>{0.33});
    CHECK(std::abs(v - std::complex<double>(2.0, 0.0)) < 1e-12);
  }

  const auto f = single_mode({1});
  const auto z = ergodic_average_closed(a, box, std1, 1.0, f,
                                        std::vector<double>{0.1});
  CHECK(std::abs(z) < 1e-10);

  const auto half = ergodic_average_closed(a, box, std1, 0.5, f,
                                           std::vector<double>{0.1});
  CHECK(std::abs(half) == doctest::Approx(2.0 / oracles::kPi).epsilon(1e-9));

  const auto mc = ergodic_average_mc(a, box, std1, 0.5, f,
                                     std::vector<double>{0.1}, 100000, 5);
  CHECK(std::abs(mc.value - half) < 0.01);
}

TEST_CASE("closed form vs Monte Carlo within 3 sigma in >= 99% of trials") {
  const auto action = TorusAction::identity3();
  const auto sphere = ProbabilityMeasure::sphere(3, 1.0);
  const Dilation std3 = Dilation::standard(3);
  const std::size_t trials = 300;
  std::size_t hits = 0;
  for (std::size_t tr = 0; tr < trials; ++tr) {
    const auto f = random_real_observable(4, 2, 3, 900, tr);
    const RngStream rs(901, substream(stream_tag::base_points, tr));
    const std::vector<double> x = {rs.uniform2(0)[0], rs.uniform2(0)[1],
                                   rs.uniform2(1)[0]};
    const double lambda = 0.5 + 3.0 * rs.uniform2(1)[1];
    const auto closed =
        ergodic_average_closed(action, sphere, std3, lambda, f, x);
    const auto mc =
        ergodic_average_mc(action, sphere, std3, lambda, f, x, 2000, tr);
    if (std::abs(mc.value - closed) <= mc.stderr3 + 1e-9) ++hits;
  }
  CHECK(hits >= trials * 99 / 100);
}

TEST_CASE("convergence sweep: deviation decays for the ergodic sphere flow") {
  const auto action = TorusAction::identity3();
  const auto sphere = ProbabilityMeasure::sphere(3, 1.0);
  const Dilation std3 = Dilation::standard(3);
  const auto f = random_real_observable(5, 2, 3, 31, 0);
  SweepOptions opts;
  opts.x_samples = 16;
  const auto sweep = convergence_sweep(action, sphere, std3,
                                       {1.0, 10.0, 100.0, 1000.0, 10000.0}, f,
                                       77, opts);
  REQUIRE(sweep.rows.size() == 5);
  CHECK(sweep.rows.back().deviation_max < 1e-2);
  CHECK(sweep.rows.back().deviation_max < sweep.rows.front().deviation_max);
  // single-mode deviation follows the |sin(lambda g)/(lambda g)| closed form
  const auto one = single_mode({1, 0, 0}, {0.5, 0.0});
  const auto s1 = convergence_sweep(action, sphere, std3, {7.0}, one, 77, opts);
  const double g = 2.0 * oracles::kPi;
  CHECK(s1.rows[0].deviation_max ==
        doctest::Approx(0.5 * std::abs(std::sin(7.0 * g) / (7.0 * g)))
            .epsilon(1e-6));
}

TEST_CASE("convergence sweep refuses non-ergodic invariant modes") {
  const TorusAction bad(2, 1, {1.0, 1.0});
  const auto box = unit_box(1);
  const Dilation std1 = Dilation::standard(1);
  const auto stuck = single_mode({1, -1});  // invariant: M^T k = 0
  CHECK_THROWS_WITH_AS(
      convergence_sweep(bad, box, std1, {1.0, 10.0}, stuck, 1, {}),
      doctest::Contains("invariant nonconstant mode"), std::runtime_error);

  SweepOptions ov;
  ov.override_non_ergodic = true;
  ov.x_samples = 8;
  const auto sweep = convergence_sweep(bad, box, std1, {1.0, 10.0, 100.0},
                                       stuck, 1, ov);
  REQUIRE(sweep.stuck_modes.size() == 1);
  CHECK(sweep.stuck_modes[0] == std::vector<long long>{1, -1});
  // the stuck mode never converges: deviation stays at |f(x)| scale
  CHECK(sweep.rows.back().deviation_max > 0.5);

  // a Dirac measure off the origin: flagged non-Rajchman, flat deviations
  const auto dirac = ProbabilityMeasure::dirac({0.7});
  const auto good = TorusAction::line_in_2torus();
  const auto f = single_mode({1, 0});
  const auto s =
      convergence_sweep(good, dirac, std1, {1.0, 10.0, 100.0}, f, 2, ov);
  CHECK(s.non_rajchman_measure);
  CHECK(s.rows.back().deviation_max ==
        doctest::Approx(1.0).epsilon(1e-9));  // |nu_hat| = 1
  const auto sbox =
      convergence_sweep(good, box, std1, {1.0, 10.0}, f, 2, ov);
  CHECK(!sbox.non_rajchman_measure);
}

TEST_CASE("smoothing kernels: closed-form transforms") {
  const auto g = SmoothingKernel::gaussian(2, 0.7);
  CHECK(g.integral() == doctest::Approx(1.0));
  const std::vector<double> xi = {1.3, -0.4};
  CHECK(std::abs(g.hat(xi) - std::exp(-0.5 * 0.49 * (1.69 + 0.16))) < 1e-12);

  const auto b = SmoothingKernel::box({0.0}, {1.0});
  CHECK(b.integral() == doctest::Approx(1.0));
  // phi_hat(-2 pi) = 0 for the unit box
  CHECK(std::abs(b.hat(std::vector<double>{-2.0 * oracles::kPi})) < 1e-12);

  const auto diff = SmoothingKernel::difference(SmoothingKernel::box({0.0}, {1.0}),
                                                SmoothingKernel::box({1.0}, {2.0}));
  CHECK(diff.integral() == doctest::Approx(0.0));
  CHECK(std::abs(diff.hat(std::vector<double>{0.0})) < 1e-12);
}

TEST_CASE("smooth_observable: exact mode arithmetic") {
  const TorusAction a(1, 1, {1.0});

  // unit-mass kernel preserves the constant mode
  TrigObservable ones;
  ones.modes.push_back({{0}, {1.0, 0.0}});
  const auto sm = smooth_observable(a, ones, SmoothingKernel::gaussian(1, 0.5));
  CHECK(std::abs(sm.modes[0].c - std::complex<double>(1.0, 0.0)) < 1e-14);

  // box[0,1] - box[1,2] kills the k=1 mode exactly
  const auto diff = SmoothingKernel::difference(
      SmoothingKernel::box({0.0}, {1.0}), SmoothingKernel::box({1.0}, {2.0}));
  const auto killed = smooth_observable(a, single_mode({1}), diff);
  CHECK(std::abs(killed.modes[0].c) < 1e-12);

  // modes transform by exactly c_k * phi_hat(-2 pi M^T k)
  const auto action = TorusAction::line_in_2torus();
  const auto f = random_real_observable(3, 2, 2, 5, 1);
  const auto kern = SmoothingKernel::gaussian(1, 0.3);
  const auto g = smooth_observable(action, f, kern);
  REQUIRE(g.modes.size() == f.modes.size());
  for (std::size_t i = 0; i < f.modes.size(); ++i) {
    const auto w = action.m_transpose_k(f.modes[i].k);
    const std::vector<double> xi = {-2.0 * oracles::kPi * w[0]};
    CHECK(std::abs(g.modes[i].c - f.modes[i].c * kern.hat(xi)) < 1e-14);
  }
}

TEST_CASE("density lemma: smoothed averages vanish along the lambda ladder") {
  const auto action = TorusAction::identity3();
  const auto sphere = ProbabilityMeasure::sphere(3, 1.0);
  const Dilation std3 = Dilation::standard(3);
  const auto diff = SmoothingKernel::difference(
      SmoothingKernel::gaussian(3, 0.5), SmoothingKernel::gaussian(3, 1.0));
  const auto f0 = random_real_observable(5, 2, 3, 8, 0);
  const auto f = smooth_observable(action, f0, diff);
  const std::vector<double> x = {0.21, 0.43, 0.65};
  double prev = 1e9;
  for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
    const double v =
        std::abs(ergodic_average_closed(action, sphere, std3, lambda, f, x));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("orbit maximal dominates every grid value") {
  const auto action = TorusAction::identity3();
  const auto sphere = ProbabilityMeasure::sphere(3, 1.0);
  const Dilation std3 = Dilation::standard(3);
  const auto f = random_real_observable(4, 2, 3, 12, 0);
  const std::vector<double> grid = {0.1, 0.5, 1.0, 3.0, 9.0};
  const std::vector<double> x = {0.11, 0.52, 0.93};
  const double M = orbit_maximal(action, sphere, std3, grid, f, x);
  for (double lambda : grid)
    CHECK(M >= std::abs(ergodic_average_closed(action, sphere, std3, lambda,
                                               f, x)) -
                   1e-12);

  TrigObservable constant;
  constant.modes.push_back({{0, 0, 0}, {-1.5, 0.0}});
  CHECK(orbit_maximal(action, sphere, std3, grid, constant, x) ==
        doctest::Approx(1.5));
}

TEST_CASE("empirical maximal norm ratio is stable under grid refinement x2") {
  const auto action = TorusAction::identity3();
  const auto sphere = ProbabilityMeasure::sphere(3, 1.0);
  const Dilation std3 = Dilation::standard(3);
  const auto f = random_real_observable(10, 3, 3, 44, 0);  // 20 modes
  const double p = 1.6;
  std::vector<double> ratios;
  for (std::size_t count : {48u, 96u}) {
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i)
      grid[i] = 0.05 * std::pow(10.0 / 0.05, static_cast<double>(i) /
                                                 static_cast<double>(count - 1));
    double sum_mf = 0.0, sum_f = 0.0;
    const std::size_t nx = 300;
    for (std::size_t j = 0; j < nx; ++j) {
      const RngStream rs(45, substream(stream_tag::base_points, j));
      const std::vector<double> x = {rs.uniform2(0)[0], rs.uniform2(0)[1],
                                     rs.uniform2(1)[0]};
      sum_mf += std::pow(orbit_maximal(action, sphere, std3, grid, f, x), p);
      sum_f += std::pow(std::abs(f.eval(x)), p);
    }
    ratios.push_back(std::pow(sum_mf / sum_f, 1.0 / p));
  }
  CHECK(std::isfinite(ratios[0]));
  CHECK(std::isfinite(ratios[1]));
  CHECK(std::abs(ratios[1] - ratios[0]) <= 0.2 * ratios[0]);
}

TEST_CASE("transfer ratio: Dirac gives identity operators on both sides") {
  const auto action = TorusAction::line_in_2torus();
  const auto dirac = ProbabilityMeasure::dirac({0.0});
  const Dilation std1 = Dilation::standard(1);
  TransferParams params;
  params.family_size = 3;
  params.modes_per_observable = 2;
  params.kmax = 1;
  params.x_samples = 200;
  params.lambda_grid = {0.1, 1.0, 10.0};
  params.grid_nodes = 2048;
  params.grid_spacing = 0.05;
  const auto r = dynamics::transfer_ratio(action, dirac, std1, 2.0, params, 3);
  CHECK(r.torus_constant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.grid_constant == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("random observables are real with unit coefficient mass") {
  for (std::uint64_t idx = 0; idx < 5; ++idx) {
    const auto f = random_real_observable(10, 3, 3, 123, idx);
    CHECK(f.modes.size() == 20);
    CHECK(f.is_real());
    CHECK(std::abs(f.mean()) < 1e-15);
    double mass = 0.0;
    for (const auto& m : f.modes) mass += std::abs(m.c);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.max_mode_norm() <= 3);
    // real-valued on sampled points
    const RngStream rs(5, substream(stream_tag::base_points, idx));
    const std::vector<double> x = {rs.uniform2(0)[0], rs.uniform2(0)[1],
                                   rs.uniform2(1)[0]};
    CHECK(std::abs(f.eval(x).imag()) < 1e-14);
  }
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
  const auto f = random_real_observable(6, 3, 2, 77, 0);
  measures::PointBatch batch;
  batch.resize(2, 257);
  const RngStream rs(9, substream(stream_tag::base_points, 0));
  for (std::size_t i = 0; i < batch.n; ++i) {
    batch.coords[0][i] = rs.uniform2(2 * i)[0];
    batch.coords[1][i] = rs.uniform2(2 * i)[1];
  }
  std::vector<std::complex<double>> out(batch.n);
  eval_observable_batch(f, batch, out.data());
  for (std::size_t i = 0; i < batch.n; ++i) {
    const auto direct = f.eval(batch.point(i));
    CHECK(std::abs(out[i] - direct) < 1e-12);
  }
}
