// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/linalg.hpp"
#include "oracles.hpp"

using namespace mdrc;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  return sample_gaussian_matrix(rows, cols, seed);
}

double reconstruction_error(const RqFactors& rq, const Matrix& h) {
  return (rq.r * rq.u - h).frobenius_norm();
}

}  // namespace

TEST_CASE("rq of the identity is trivial") {
  RqFactors rq = rq_decompose(Matrix::identity(4));
  CHECK((rq.r - Matrix::identity(4)).max_abs() < 1e-12);
  CHECK((rq.u - Matrix::identity(4)).max_abs() < 1e-12);
}

TEST_CASE("rq matches the Gram-Schmidt oracle on a 2x2 instance") {
  Matrix h = Matrix::from_rows({{0.0, 2.0}, {3.0, 0.0}});
  RqFactors rq = rq_decompose(h);
  CHECK(reconstruction_error(rq, h) < 1e-10);
  CHECK(rq.r(1, 0) == 0.0);
  CHECK(std::fabs(std::fabs(rq.r(0, 0) * rq.r(1, 1)) - 6.0) < 1e-10);

  oracles::GsRq gs = oracles::gs_rq(h);
  CHECK(std::fabs(rq.r(0, 0) - gs.r(0, 0)) < 1e-10);
  CHECK(std::fabs(rq.r(1, 1) - gs.r(1, 1)) < 1e-10);
}

TEST_CASE("rq diagonal product reproduces the LU determinant of h h^T") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Matrix h = random_matrix(4, 6, seed);
    RqFactors rq = rq_decompose(h);
    double prod = 1.0;
    for (std::size_t n = 0; n < 4; ++n) prod *= rq.r(n, n) * rq.r(n, n);
    double det = oracles::lu_det(h.gram());
    CHECK(std::fabs(prod - det) <= 1e-8 * std::fabs(det));
  }
}

TEST_CASE("rq invariants on random full-rank inputs") {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    Matrix h = random_matrix(3, 5, seed);
    RqFactors rq = rq_decompose(h);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(rq.r(i, i) >= 0.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(std::fabs(rq.r(i, j)) <= 1e-10);
    }
    CHECK((rq.u * rq.u.transposed() - Matrix::identity(3)).frobenius_norm() < 1e-8);
    CHECK(reconstruction_error(rq, h) <= 1e-8 * h.frobenius_norm());
  }
}

TEST_CASE("rq rejects rank-deficient input") {
  Matrix h(2, 3);
  h(0, 0) = 1.0;
  h(0, 1) = 2.0;
  h(0, 2) = -1.0;
  for (std::size_t j = 0; j < 3; ++j) h(1, j) = 2.0 * h(0, j);
  CHECK_THROWS_AS(rq_decompose(h), Error);
}

TEST_CASE("logdet of simple matrices") {
  CHECK(logdet_psd(Matrix::identity(3)).log2_det == doctest::Approx(0.0));
  Matrix d(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CHECK(logdet_psd(d).log2_det == doctest::Approx(3.0));
}

TEST_CASE("logdet matches the LU oracle on random Gram matrices") {
  for (std::uint64_t seed = 7; seed < 27; ++seed) {
    Matrix b = random_matrix(4, 4, seed);
    double expect = 2.0 * std::log2(std::fabs(oracles::lu_det(b)));
    double got = logdet_psd(b.gram()).log2_det;
    CHECK(std::fabs(got - expect) < 1e-8 * std::max(1.0, std::fabs(expect)));
  }
}

TEST_CASE("logdet scaling identity") {
  for (std::uint64_t seed = 3; seed < 13; ++seed) {
    Matrix a = random_matrix(3, 3, seed).gram();
    for (double c : {0.5, 2.0, 13.0}) {
      double lhs = logdet_psd(a.scaled(c)).log2_det;
      double rhs = 3.0 * std::log2(c) + logdet_psd(a).log2_det;
      CHECK(std::fabs(lhs - rhs) < 1e-8);
    }
  }
}

TEST_CASE("logdet error paths") {
  Matrix asym(2, 2);
  asym(0, 1) = 1.0;  // not symmetric
  CHECK_THROWS_AS(logdet_psd(asym), Error);

  Matrix neg(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(logdet_psd(neg), Error);

  Matrix tiny(2, 2);
  tiny(0, 0) = 1.0;
  tiny(1, 1) = 1e-16;  // clamped, flagged
  LogDetResult res = logdet_psd(tiny);
  CHECK(res.degenerate);
}

TEST_CASE("waterfill examples") {
  WaterfillResult equal = waterfill({1.0, 1.0}, 2.0, 1.0);
  CHECK(equal.powers[0] == doctest::Approx(1.0));
  CHECK(equal.powers[1] == doctest::Approx(1.0));

  WaterfillResult solo = waterfill({1.0}, 5.0, 1.0);
  CHECK(solo.powers[0] == doctest::Approx(5.0));

  WaterfillResult uneven = waterfill({4.0, 1.0}, 1.0, 1.0);
  CHECK(uneven.powers[0] == doctest::Approx(0.875).epsilon(1e-6));
  CHECK(uneven.powers[1] == doctest::Approx(0.125).epsilon(1e-6));
  double grid = oracles::waterfill_grid_2ch(4.0, 1.0, 1.0, 1.0, 1000000);
  CHECK(std::fabs(uneven.value_bits - grid) < 1e-6);
  CHECK(uneven.value_bits >= grid - 1e-9);
}

TEST_CASE("waterfill respects the budget and is monotone in it") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> gains(3);
    for (double& g : gains) g = std::exp(rng.normal());
    double p1 = 0.5 + rng.uniform01() * 3.0;
    WaterfillResult lo = waterfill(gains, p1, 1.0);
    WaterfillResult hi = waterfill(gains, p1 * 1.5, 1.0);
    double used = 0.0;
    for (double p : lo.powers) {
      CHECK(p >= 0.0);
      used += p;
    }
    CHECK(used <= p1 * (1.0 + 1e-10));
    CHECK(used >= p1 * (1.0 - 1e-10));  // budget is tight
    CHECK(hi.value_bits >= lo.value_bits - 1e-12);
  }
}

TEST_CASE("waterfill error paths") {
  CHECK_THROWS_AS(waterfill({}, 1.0, 1.0), Error);
  CHECK_THROWS_AS(waterfill({0.0, -1.0}, 1.0, 1.0), Error);
}

TEST_CASE("gaussian sampling is deterministic per seed") {
  Matrix a = sample_gaussian_matrix(4, 4, 42);
  Matrix b = sample_gaussian_matrix(4, 4, 42);
  CHECK((a - b).max_abs() == 0.0);
  CHECK(a.all_finite());
  Matrix c = sample_gaussian_matrix(4, 4, 43);
  CHECK((a - c).max_abs() > 0.0);
}

TEST_CASE("gaussian sampling moments over 1e5 draws") {
  Rng rng(2024);
  const int n = 100000;
  double mean = 0.0, m2 = 0.0;
  for (int i = 1; i <= n; ++i) {
    double x = rng.normal();
    double d = x - mean;
    mean += d / i;
    m2 += d * (x - mean);
  }
  double var = m2 / (n - 1);
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("chi-square sampler mean and variance") {
  Rng rng(515);
  for (double dof : {1.0, 4.0, 9.0}) {
    const int n = 50000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= n; ++i) {
      double x = rng.chi_square(dof);
      double d = x - mean;
      mean += d / i;
      m2 += d * (x - mean);
    }
    double var = m2 / (n - 1);
    CHECK(std::fabs(mean - dof) < 5.0 * std::sqrt(2.0 * dof / n) + 0.01);
    CHECK(std::fabs(var - 2.0 * dof) < 0.25 * 2.0 * dof);
  }
}

TEST_CASE("sum of log gains equals the Gram log-determinant") {
  for (std::uint64_t seed = 11; seed < 31; ++seed) {
    Matrix h = random_matrix(4, 4, seed);
    RqFactors rq = rq_decompose(h);
    double sum = 0.0;
    for (std::size_t n = 0; n < 4; ++n) sum += std::log2(rq.r(n, n) * rq.r(n, n));
    double logdet = logdet_psd(h.gram()).log2_det;
    CHECK(std::fabs(sum - logdet) < 1e-6);
  }
}
