#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gardingkit/rng.hpp"
#include "gardingkit/types.hpp"

namespace gk::cones {

struct Interior {};

/// Points driven onto the cone boundary by bisection, then backed off so the
/// relative margin min_j sigma_j / (C(n,j) max(1,kappa_1)^j) is below `margin`.
struct NearBoundary {
  double margin = 1e-3;
};

/// kappa_l >= M^2 and kappa_{l+1} <= M (spectral-gap stratum).
struct Gap {
  int l = 1;
  double M = 8.0;
};

/// kappa_1 pinned to N^{2^{k-1}} (1 + U[0,1]); box rejection cannot reach it.
struct HugeKappa1 {
  double N = 2.0;
};

using Stratum = std::variant<Interior, NearBoundary, Gap, HugeKappa1>;

std::string stratum_name(const Stratum& s);

struct SampleSpec {
  int n = 4;
  int k = 2;
  double A = 1.0;      // semi-convexity bound: kappa_i >= -A
  double B = 3.0;      // box upper edge
  Stratum stratum = Interior{};
  std::uint64_t seed = 42;
  long count = 100;
  long retry_cap = 1'000'000;  // per emitted sample
};

struct SampleStats {
  long attempts = 0;
  long rejected = 0;
  double acceptance_rate() const {
    return attempts > 0 ? static_cast<double>(attempts - rejected) / static_cast<double>(attempts)
                        : 0.0;
  }
};

struct SampleRun {
  std::vector<CurvatureVector> samples;
  SampleStats stats;
};

/// One sample, a pure function of (spec, index). Throws SamplerExhausted when
/// the retry cap is hit.
CurvatureVector sample_one(const SampleSpec& spec, long index, SampleStats* stats = nullptr);

/// The full stream for spec.count trials; deterministic in spec.seed.
SampleRun sample(const SampleSpec& spec);

/// Uniform direction on the unit sphere in R^n.
DirectionVector random_unit_direction(Rng& rng, int n);

/// The structured directions the proofs single out: coordinate axes, kappa
/// itself, and (when 0 < l < n) a direction whose trailing block is projected
/// orthogonal to the trailing block of kappa.
std::vector<DirectionVector> structured_directions(const CurvatureVector& kappa, int l = 0);

/// Project the trailing components (l..n) of xi orthogonal to the trailing
/// components of kappa, in place. No-op when the kappa tail vanishes.
void project_tail_perp(DirectionVector& xi, const CurvatureVector& kappa, int l);

using Objective = std::function<double(const CurvatureVector&, const DirectionVector&)>;
using Admissible = std::function<bool(const CurvatureVector&)>;

struct RefineOptions {
  int sweeps = 2;
  int restarts = 1;
  double step = 0.25;
  long max_evals = 4000;
};

struct RefineResult {
  CurvatureVector kappa;
  DirectionVector xi;
  double violation = 0.0;
  long evals = 0;
};

/// Coordinate-ascent / random-restart maximization of a violation functional,
/// projected back into the admissible stratum after every trial move. The
/// initial point must evaluate; failures there propagate with the witness in
/// the message. Failed trial moves are treated as rejected moves.
RefineResult adversarial_refine(const CurvatureVector& kappa0, const DirectionVector& xi0,
                                const Objective& objective, const Admissible& admissible,
                                Rng& rng, const RefineOptions& opt = {});

}  // namespace gk::cones
