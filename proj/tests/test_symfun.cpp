#include "doctest.h"

#include <cmath>

#include "gardingkit/rng.hpp"
#include "gardingkit/symfun.hpp"
#include "support/enum_oracle.hpp"

using gk::CurvatureVector;
using gk::DirectionVector;
using gk::Rng;
namespace sym = gk::sym;

namespace {

CurvatureVector cv(std::vector<double> v) { return CurvatureVector(std::move(v)); }

std::vector<double> random_point(Rng& rng, int n, double lo = -3.0, double hi = 3.0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("sigma values match subset enumeration for n <= 8") {
  Rng rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 7);
    const auto vals = random_point(rng, n);
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    for (int j = 0; j <= n; ++j) {
      const double expect = oracle::sigma_enum(vals, j);
      CHECK(std::abs(b.sigma(j) - expect) <=
            1e-12 * std::max({1.0, std::abs(expect), std::abs(b.sigma(j))}));
    }
  }
}

TEST_CASE("minors are the sigmas of the reduced index sets") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 4);
    const auto vals = random_point(rng, n);
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= n - 1; ++j)
        CHECK(b.minor1(i, j) ==
              doctest::Approx(oracle::sigma_enum_excluding(vals, j, {i})).epsilon(1e-12));
    for (int i = 0; i < n; ++i)
      for (int p = i + 1; p < n; ++p)
        for (int j = 0; j <= n - 2; ++j)
          CHECK(b.minor2(i, p, j) ==
                doctest::Approx(oracle::sigma_enum_excluding(vals, j, {i, p})).epsilon(1e-12));
  }
}

TEST_CASE("worked values: kappa = (3,2,1) and the all-ones point") {
  const sym::SymBundle ones = sym::build_bundle(cv({1, 1, 1}));
  CHECK(ones.sigma(1) == doctest::Approx(3.0));
  CHECK(ones.sigma(2) == doctest::Approx(3.0));
  CHECK(ones.sigma(3) == doctest::Approx(1.0));

  const sym::SymBundle b = sym::build_bundle(cv({3, 2, 1}));
  CHECK(b.sigma(2) == doctest::Approx(11.0));
  CHECK(b.minor1(1, 1) == doctest::Approx(4.0));   // sigma_1(kappa|2)
  CHECK(b.minor2(0, 2, 1) == doctest::Approx(2.0));  // sigma_1(kappa|1,3)
  CHECK(sym::quotient_q(b, 3) == doctest::Approx(6.0 / 11.0));
  CHECK(sym::normalized_pk(b, 2) == doctest::Approx(11.0 / 3.0));
}

TEST_CASE("build_bundle rejects n < 2") {
  CHECK_THROWS_AS(CurvatureVector({1.0}), gk::InvalidInput);
}

TEST_CASE("recursion sigma_j = kappa_i sigma_{j-1}(k|i) + sigma_j(k|i)") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    const auto vals = random_point(rng, n);
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    for (int i = 0; i < n; ++i)
      for (int j = 1; j <= n; ++j) {
        const double lhs = b.sigma(j);
        const double rhs = vals[static_cast<std::size_t>(i)] * b.minor1(i, j - 1) + b.minor1(i, j);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
      }
  }
}

TEST_CASE("normalized P_k on the diagonal equals c^k") {
  for (double c : {0.5, 1.0, 2.0, -0.75}) {
    const sym::SymBundle b = sym::build_bundle(cv({c, c, c, c, c}));
    for (int k = 1; k <= 5; ++k)
      CHECK(sym::normalized_pk(b, k) == doctest::Approx(std::pow(c, k)).epsilon(1e-12));
  }
  const sym::SymBundle one_hot = sym::build_bundle(cv({1, 0, 0, 0}));
  CHECK(sym::normalized_pk(one_hot, 2) == doctest::Approx(0.0));
  CHECK_THROWS_AS(sym::normalized_pk(one_hot, 5), gk::InvalidInput);
  CHECK_THROWS_AS(sym::normalized_pk(one_hot, 0), gk::InvalidInput);
}

TEST_CASE("gamma_k membership is strict") {
  CHECK(sym::in_gamma_k(sym::build_bundle(cv({1, 1, 1})), 3));
  CHECK_FALSE(sym::in_gamma_k(sym::build_bundle(cv({1, 1, -1})), 2));  // sigma_2 = -1
  // boundary: sigma_2 = 0 exactly
  CHECK_FALSE(sym::in_gamma_k(sym::build_bundle(cv({2, 2, -1})), 2));
}

TEST_CASE("quotients: diagonal point and degenerate denominator") {
  const sym::SymBundle b = sym::build_bundle(cv({1, 1, 1}));
  CHECK(sym::quotient_q(b, 1) == doctest::Approx(3.0));  // q_1 = n c
  CHECK(sym::quotient_q(b, 2) == doctest::Approx(1.0));
  // sigma_1 = 0 makes q_2 degenerate
  const sym::SymBundle z = sym::build_bundle(cv({1, -1}));
  CHECK_THROWS_AS(sym::quotient_q(z, 2), gk::DivisionDegeneracy);
}

TEST_CASE("first and second derivatives match finite differences") {
  Rng rng(5150);
  int checked = 0;
  while (checked < 1000) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const auto vals = random_point(rng, n);
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    const int j = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    auto sigma_fn = [j](const std::vector<double>& x) { return oracle::sigma_enum(x, j); };
    const int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const double fd = oracle::fd_partial(sigma_fn, vals, i, 1e-6);
    const double an = b.dsigma(j, i);
    CHECK(std::abs(an - fd) <= 1e-5 * std::max({1.0, std::abs(an), std::abs(fd)}));
    const int p = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const double fd2 = oracle::fd_second(sigma_fn, vals, i, p, 1e-4);
    const double an2 = b.d2sigma(j, i, p);
    CHECK(std::abs(an2 - fd2) <= 1e-5 * std::max({1.0, std::abs(an2), std::abs(fd2)}));
    ++checked;
  }
}

TEST_CASE("directional Hessians: multilinearity and closed forms") {
  // coordinate directions annihilate d2 sigma_m
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const auto vals = random_point(rng, n);
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    const int m = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const int i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    CHECK(sym::dir_hess(sym::Form::sigma, m, b, DirectionVector::axis(n, i)) == 0.0);
  }

  // q_2 at (2,1) along e_1: -2/27 by hand
  const sym::SymBundle b21 = sym::build_bundle(cv({2, 1}));
  CHECK(sym::dir_hess(sym::Form::quotient, 2, b21, DirectionVector::axis(2, 0)) ==
        doctest::Approx(-2.0 / 27.0).epsilon(1e-12));

  // log sigma_1 at (1,1) along (1,-1): -(xi_1+xi_2)^2 / sigma_1^2 = 0
  const sym::SymBundle b11 = sym::build_bundle(cv({1, 1}));
  CHECK(sym::dir_hess(sym::Form::log_sigma, 1, b11, DirectionVector({1, -1})) ==
        doctest::Approx(0.0));
}

TEST_CASE("directional Hessians of q_m and log sigma_m match finite differences") {
  Rng rng(4242);
  int checked = 0;
  while (checked < 300) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 4);
    auto vals = random_point(rng, n, 0.2, 3.0);  // positive cone: all forms defined
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    const int m = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (auto& x : xi) x = rng.uniform(-1.0, 1.0);

    auto q_fn = [m](const std::vector<double>& x) {
      return oracle::sigma_enum(x, m) / oracle::sigma_enum(x, m - 1);
    };
    auto log_fn = [m](const std::vector<double>& x) {
      return std::log(oracle::sigma_enum(x, m));
    };
    const double an_q = sym::dir_hess(sym::Form::quotient, m, b, DirectionVector(xi));
    const double fd_q = oracle::fd_dir_hess(q_fn, vals, xi, 1e-4);
    CHECK(std::abs(an_q - fd_q) <= 2e-5 * std::max({1.0, std::abs(an_q), std::abs(fd_q)}));
    const double an_l = sym::dir_hess(sym::Form::log_sigma, m, b, DirectionVector(xi));
    const double fd_l = oracle::fd_dir_hess(log_fn, vals, xi, 1e-4);
    CHECK(std::abs(an_l - fd_l) <= 2e-5 * std::max({1.0, std::abs(an_l), std::abs(fd_l)}));
    ++checked;
  }
}

TEST_CASE("q_2 second derivative identity: worked value and random residuals") {
  // kappa = (2,1), xi = e_1: both sides equal 2/27
  const sym::SymBundle b21 = sym::build_bundle(cv({2, 1}));
  CHECK(sym::hs_q2_residual(b21, DirectionVector::axis(2, 0)) <= 1e-12);
  CHECK(-sym::dir_hess(sym::Form::quotient, 2, b21, DirectionVector::axis(2, 0)) ==
        doctest::Approx(2.0 / 27.0).epsilon(1e-12));

  // xi parallel to kappa on the diagonal: the form vanishes
  const sym::SymBundle bd = sym::build_bundle(cv({2, 2, 2, 2}));
  CHECK(std::abs(sym::dir_hess(sym::Form::quotient, 2, bd, DirectionVector({2, 2, 2, 2}))) <=
        1e-12);

  Rng rng(31337);
  int checked = 0;
  while (checked < 2000) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 6);
    auto vals = random_point(rng, n);
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    if (!sym::in_gamma_k_values(vals, 2)) continue;
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (auto& x : xi) x = rng.uniform(-1.0, 1.0);
    CHECK(sym::hs_q2_residual(cv(vals), DirectionVector(xi)) <= 1e-10);
    ++checked;
  }
  CHECK_THROWS_AS(sym::hs_q2_residual(cv({-1.0, -2.0}), DirectionVector({1, 0})),
                  gk::ConeViolation);
}

TEST_CASE("Maclaurin chain on random Gamma_k samples") {
  Rng rng(8);
  int checked = 0;
  while (checked < 2000) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 4);
    auto vals = random_point(rng, n, -1.0, 3.0);
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    const int k = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    if (!sym::in_gamma_k_values(vals, k)) continue;
    CHECK(sym::maclaurin_violation(sym::build_bundle(cv(vals)), k) <= 1e-10);
    ++checked;
  }
}

TEST_CASE("quotient Hessian matrix agrees with the directional form") {
  Rng rng(606);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.next_u64() % 3);
    auto vals = random_point(rng, n, 0.3, 2.5);
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    const sym::SymBundle b = sym::build_bundle(cv(vals));
    const int m = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - 1));
    const auto H = sym::quotient_hessian(b, m);
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (auto& x : xi) x = rng.uniform(-1.0, 1.0);
    double quad = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        quad += H[static_cast<std::size_t>(p * n + q)] * xi[static_cast<std::size_t>(p)] *
                xi[static_cast<std::size_t>(q)];
    const double dh = sym::dir_hess(sym::Form::quotient, m, b, DirectionVector(xi));
    CHECK(std::abs(quad - dh) <= 1e-10 * std::max({1.0, std::abs(quad), std::abs(dh)}));
  }
}
