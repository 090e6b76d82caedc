#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ergolab/kernels.hpp"

using namespace ergolab;

namespace {

std::vector<double> random_vec(std::size_t n, double lo, double hi,
                               unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

}  // namespace

TEST_CASE("avx2 table is present on this host") {
  // The equivalence suite below is vacuous without it; fail loudly if the
  // build machine changes.
  REQUIRE(kernels::avx2_ops() != nullptr);
}

TEST_CASE("vector sincos matches libm across magnitudes") {
  const auto* avx2 = kernels::avx2_ops();
  REQUIRE(avx2);
  for (double mag : {1.0, 10.0, 1e3, 1e5, 9e5}) {
    const auto x = random_vec(1027, -mag, mag, 42);
    std::vector<double> s(x.size()), c(x.size());
    avx2->sincos(x.data(), x.size(), s.data(), c.data());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(s[i] - std::sin(x[i])) < 5e-14);
      CHECK(std::abs(c[i] - std::cos(x[i])) < 5e-14);
    }
  }
}

TEST_CASE("vector sincos falls back to libm beyond the reduction range") {
  const auto* avx2 = kernels::avx2_ops();
  REQUIRE(avx2);
  const std::vector<double> x = {1e7, -3e8, 2.5, 1e12};
  std::vector<double> s(x.size()), c(x.size());
  avx2->sincos(x.data(), x.size(), s.data(), c.data());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(s[i] == doctest::Approx(std::sin(x[i])).epsilon(1e-12));
    CHECK(c[i] == doctest::Approx(std::cos(x[i])).epsilon(1e-12));
  }
}

TEST_CASE("scalar and avx2 kernels agree") {
  const auto& sc = kernels::scalar_ops();
  const auto* avx2 = kernels::avx2_ops();
  REQUIRE(avx2);

  const std::size_t n = 4097;  // odd to exercise tails
  const auto a = random_vec(n, -3.0, 3.0, 1);
  const auto b = random_vec(n, -2.0, 2.0, 2);
  const auto w = random_vec(n, 0.0, 1.0, 3);
  const auto phase = random_vec(n, -1e4, 1e4, 4);

  SUBCASE("dot_phase") {
    const double* pts[2] = {a.data(), b.data()};
    const double xi[2] = {1.25, -0.75};
    std::vector<double> p1(n), p2(n);
    sc.dot_phase(pts, 2, n, xi, p1.data());
    avx2->dot_phase(pts, 2, n, xi, p2.data());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-14));
  }

  SUBCASE("accum_cis_neg") {
    double r1 = 0, i1 = 0, r2 = 0, i2 = 0;
    sc.accum_cis_neg(phase.data(), w.data(), n, &r1, &i1);
    avx2->accum_cis_neg(phase.data(), w.data(), n, &r2, &i2);
    CHECK(std::abs(r1 - r2) < 1e-10);
    CHECK(std::abs(i1 - i2) < 1e-10);
    double r3 = 0, i3 = 0, r4 = 0, i4 = 0;
    sc.accum_cis_neg(phase.data(), nullptr, n, &r3, &i3);
    avx2->accum_cis_neg(phase.data(), nullptr, n, &r4, &i4);
    CHECK(std::abs(r3 - r4) < 1e-10);
    CHECK(std::abs(i3 - i4) < 1e-10);
  }

  SUBCASE("reductions") {
    CHECK(sc.reduce_max_abs(a.data(), n) == avx2->reduce_max_abs(a.data(), n));
    CHECK(sc.count_above(a.data(), n, 0.5) == avx2->count_above(a.data(), n, 0.5));
    for (double p : {1.0, 2.0, 1.6}) {
      const double s1 = sc.sum_abs_pow(a.data(), b.data(), n, p);
      const double s2 = avx2->sum_abs_pow(a.data(), b.data(), n, p);
      CHECK(s1 == doctest::Approx(s2).epsilon(1e-12));
      const double s3 = sc.sum_abs_pow(a.data(), nullptr, n, p);
      const double s4 = avx2->sum_abs_pow(a.data(), nullptr, n, p);
      CHECK(s3 == doctest::Approx(s4).epsilon(1e-12));
    }
  }

  SUBCASE("max_abs_update") {
    auto d1 = random_vec(n, 0.0, 1.0, 5);
    auto d2 = d1;
    sc.max_abs_update(d1.data(), a.data(), b.data(), n);
    avx2->max_abs_update(d2.data(), a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-15));
  }

  SUBCASE("tap_axpy") {
    auto d1 = random_vec(n, -1.0, 1.0, 6);
    auto d2 = d1;
    sc.tap_axpy(d1.data(), a.data(), n, 0.37);
    avx2->tap_axpy(d2.data(), a.data(), n, 0.37);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-15));
  }
}

TEST_CASE("forced isa switches the active table") {
  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  kernels::clear_forced_isa();
  if (kernels::isa_available(kernels::Isa::avx2))
    CHECK(kernels::active_isa() == kernels::Isa::avx2);
}
