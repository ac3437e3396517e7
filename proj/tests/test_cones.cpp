#include "doctest.h"

#include <cmath>
#include <string>

#include "gardingkit/cones.hpp"
#include "gardingkit/symfun.hpp"

using gk::CurvatureVector;
using gk::DirectionVector;
using gk::Rng;
namespace cones = gk::cones;
namespace sym = gk::sym;

TEST_CASE("interior stratum: sorted Gamma_k points above -A") {
  cones::SampleSpec spec;
  spec.n = 4;
  spec.k = 2;
  spec.A = 1.0;
  spec.seed = 7;
  spec.count = 3;
  const auto run = cones::sample(spec);
  REQUIRE(run.samples.size() == 3);
  for (const auto& kv : run.samples) {
    CHECK(kv.is_sorted());
    CHECK(kv.values().back() >= -1.0);
    const auto b = sym::build_bundle(kv);
    CHECK(b.sigma(1) > 0.0);
    CHECK(b.sigma(2) > 0.0);
  }
  CHECK(run.stats.attempts >= 3);
}

TEST_CASE("streams are deterministic and per-trial addressable") {
  cones::SampleSpec spec;
  spec.n = 6;
  spec.k = 3;
  spec.seed = 99;
  spec.count = 50;
  const auto a = cones::sample(spec);
  const auto b = cones::sample(spec);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i].values() == b.samples[i].values());  // bit-identical
  // sample_one(spec, i) is the i-th element of the stream
  for (long i : {0L, 7L, 49L})
    CHECK(cones::sample_one(spec, i).values() ==
          a.samples[static_cast<std::size_t>(i)].values());
}

TEST_CASE("gap stratum honors its thresholds") {
  cones::SampleSpec spec;
  spec.n = 6;
  spec.k = 3;
  spec.stratum = cones::Gap{1, 10.0};
  spec.count = 40;
  const auto run = cones::sample(spec);
  for (const auto& kv : run.samples) {
    CHECK(kv[0] >= 100.0);
    CHECK(kv[1] <= 10.0);
    CHECK(sym::in_gamma_k_values(kv.values(), 3));
  }
}

TEST_CASE("huge-kappa_1 stratum pins the top entry") {
  cones::SampleSpec spec;
  spec.n = 6;
  spec.k = 3;
  spec.stratum = cones::HugeKappa1{2.0};  // kappa_1 >= 2^4 = 16
  spec.count = 40;
  const auto run = cones::sample(spec);
  for (const auto& kv : run.samples) {
    CHECK(kv[0] >= 16.0);
    CHECK(kv[0] <= 32.0);
    CHECK(kv.values().back() > -spec.A);
    CHECK(sym::in_gamma_k_values(kv.values(), 3));
  }
}

TEST_CASE("near-boundary stratum lands inside with a small margin") {
  cones::SampleSpec spec;
  spec.n = 5;
  spec.k = 3;
  spec.stratum = cones::NearBoundary{1e-3};
  spec.count = 25;
  const auto run = cones::sample(spec);
  for (const auto& kv : run.samples) {
    const auto s = sym::sigmas_upto(kv.values(), 3);
    for (int j = 1; j <= 3; ++j) CHECK(s[static_cast<std::size_t>(j)] > 0.0);
    const double top = std::max(1.0, kv[0]);
    double margin = 1e9;
    double scale = 1.0;
    for (int j = 1; j <= 3; ++j) {
      scale *= top;
      margin = std::min(margin, s[static_cast<std::size_t>(j)] / (sym::binom(5, j) * scale));
    }
    CHECK(margin <= 1e-3);
  }
}

TEST_CASE("empirically empty stratum raises SamplerExhausted naming it") {
  cones::SampleSpec spec;
  spec.n = 4;
  spec.k = 2;
  spec.stratum = cones::NearBoundary{0.0};  // strict interior can never reach margin 0
  spec.count = 1;
  spec.retry_cap = 200;
  try {
    cones::sample(spec);
    FAIL("expected SamplerExhausted");
  } catch (const gk::SamplerExhausted& e) {
    CHECK(std::string(e.what()).find("near_boundary") != std::string::npos);
  }
}

TEST_CASE("spec validation errors") {
  cones::SampleSpec spec;
  spec.n = 4;
  spec.k = 5;
  CHECK_THROWS_AS(cones::sample(spec), gk::InvalidInput);
  spec.k = 3;
  spec.stratum = cones::Gap{3, 10.0};  // l must be <= k-1
  CHECK_THROWS_AS(cones::sample(spec), gk::InvalidInput);
  spec.stratum = cones::Gap{1, 0.5};  // M must exceed 1
  CHECK_THROWS_AS(cones::sample(spec), gk::InvalidInput);
}

TEST_CASE("tail projection makes the trailing blocks orthogonal") {
  Rng rng(5);
  const CurvatureVector kappa = CurvatureVector::sorted_descending({9.0, 5.0, 2.0, 1.0, -0.5});
  DirectionVector xi = cones::random_unit_direction(rng, 5);
  cones::project_tail_perp(xi, kappa, 2);
  double dot = 0.0;
  for (int i = 2; i < 5; ++i) dot += xi[i] * kappa[i];
  CHECK(std::abs(dot) <= 1e-12);
}

TEST_CASE("structured directions include the axes and kappa itself") {
  const CurvatureVector kappa = CurvatureVector::sorted_descending({3.0, 2.0, 1.0});
  const auto dirs = cones::structured_directions(kappa, 1);
  REQUIRE(dirs.size() >= 4);
  CHECK(dirs[0][0] == 1.0);
  CHECK(dirs[3][0] == doctest::Approx(3.0 / std::sqrt(14.0)));
}

TEST_CASE("adversarial refinement improves the objective inside the stratum") {
  const auto objective = [](const CurvatureVector& kv, const DirectionVector&) {
    return -kv[0];  // drives kappa_1 down toward the admissibility edge
  };
  const auto admissible = [](const CurvatureVector& kv) {
    return sym::in_gamma_k_values(kv.values(), 2) && kv.values().back() >= -1.0;
  };
  const CurvatureVector start = CurvatureVector::sorted_descending({4.0, 2.0, 1.0});
  cones::RefineOptions opt;
  opt.sweeps = 4;
  opt.restarts = 1;
  Rng rng(17);
  const auto res =
      cones::adversarial_refine(start, DirectionVector(), objective, admissible, rng, opt);
  CHECK(res.violation >= -4.0);
  CHECK(admissible(res.kappa));
  // determinism: same inputs, same outcome
  Rng rng2(17);
  const auto res2 =
      cones::adversarial_refine(start, DirectionVector(), objective, admissible, rng2, opt);
  CHECK(res.violation == res2.violation);
  CHECK(res.kappa.values() == res2.kappa.values());
}

TEST_CASE("degenerate start on the cone boundary is projected inward") {
  const auto objective = [](const CurvatureVector& kv, const DirectionVector&) {
    return -sym::build_bundle(kv).sigma(2);
  };
  const auto admissible = [](const CurvatureVector& kv) {
    return sym::in_gamma_k_values(kv.values(), 2);
  };
  // sigma_2 = 0 exactly: outside the open cone
  const CurvatureVector boundary = CurvatureVector::sorted_descending({2.0, 2.0, -1.0});
  REQUIRE_FALSE(admissible(boundary));
  Rng rng(3);
  const auto res =
      cones::adversarial_refine(boundary, DirectionVector(), objective, admissible, rng, {});
  CHECK(admissible(res.kappa));
}

TEST_CASE("acceptance statistics are reported") {
  cones::SampleSpec spec;
  spec.n = 5;
  spec.k = 4;  // tighter cone: rejections expected
  spec.count = 50;
  const auto run = cones::sample(spec);
  CHECK(run.stats.attempts >= run.stats.rejected + 50);
  CHECK(run.stats.acceptance_rate() > 0.0);
  CHECK(run.stats.acceptance_rate() <= 1.0);
}
