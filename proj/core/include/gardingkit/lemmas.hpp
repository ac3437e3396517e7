#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gardingkit/types.hpp"

namespace gk::lemmas {

enum class Verdict { holds, violated, inconclusive };

std::string to_string(Verdict v);

struct Witness {
  std::vector<double> kappa;
  std::vector<double> xi;
  nlohmann::json params = nlohmann::json::object();
};

struct LemmaReport {
  std::string lemma;
  int n = 0;
  int k = 0;
  double A = 0.0;
  std::uint64_t seed = 0;
  long trials = 0;
  Verdict verdict = Verdict::inconclusive;
  double worst_violation = 0.0;  // normalized; negative means margin
  double tolerance = 0.0;
  Witness witness;
  std::optional<double> empirical_constant;
  long skipped = 0;
  double wall_ms = 0.0;

  /// Timing is process noise; the CLI writes report files without it so a
  /// re-run reproduces them byte for byte.
  nlohmann::json to_json(bool include_timing = true) const;
};

struct CheckConfig {
  int n = 6;
  int k = 3;
  double A = 1.0;
  double B = 3.0;  // sampler box upper edge
  std::uint64_t seed = 42;
  long trials = 10000;
  int xi_per_sample = 4;
  bool refine = true;       // light per-sample ascent plus a deep pass on the worst
  int deep_refine_top = 16;

  // lemma-specific knobs
  double epsilon = 0.1;        // lu
  double ladder_max = 64.0;    // lu: largest N tried
  double N = 3.0;              // gap_index
  double sigma_lo = 1.0;       // pinned-sigma strata
  double sigma_hi = 2.0;
  std::vector<double> kappa1_scales = {1e1, 1e2, 1e3};  // escalation layers
  double delta0 = 0.25;        // perp_lower_bound: |kappa_n| floor
  double gap_M = 8.0;          // perp_lower_bound: N_2 in the gap stratum
};

/// The twelve checkers, one per cone lemma, plus the Maclaurin chain.
LemmaReport check_sum_identities(const CheckConfig& cfg);
LemmaReport check_partial_ordering(const CheckConfig& cfg);
LemmaReport check_top_partial(const CheckConfig& cfg);
LemmaReport check_quotient_concavity(const CheckConfig& cfg);
LemmaReport check_product_bound(const CheckConfig& cfg);
LemmaReport check_kappa_signs(const CheckConfig& cfg);
LemmaReport check_semiconvex(const CheckConfig& cfg);
LemmaReport check_kappak_upper(const CheckConfig& cfg);
LemmaReport check_lu(const CheckConfig& cfg);
LemmaReport check_gap_index(const CheckConfig& cfg);
LemmaReport check_hs_recursion(const CheckConfig& cfg);
LemmaReport check_perp_lower_bound(const CheckConfig& cfg);
LemmaReport check_maclaurin(const CheckConfig& cfg);

/// Ids of the twelve lemma checkers, in suite order ("maclaurin" is extra and
/// runs on request or in the acceptance suite).
const std::vector<std::string>& all_lemma_ids();

/// Dispatch by id; throws InvalidInput for unknown ids.
LemmaReport run_lemma(const std::string& id, const CheckConfig& cfg);

/// Re-evaluates the violation functional of `report.lemma` at the stored
/// witness; used to assert that witnesses reproduce worst_violation.
double reevaluate_witness(const LemmaReport& report);

/// Both sides of the quotient recursion bound at one point, plus the
/// residual of the exact denominator identity.
struct RecursionSides {
  double lhs = 0.0;  // -d2_xi q_{k+1}
  double rhs = 0.0;  // recursion lower bound
  double identity_residual = 0.0;
  bool degenerate = false;
};
RecursionSides hs_recursion_sides(const CurvatureVector& kappa, const DirectionVector& xi,
                                  int k);

/// Both sides of the perp-projection lower bound with the undetermined
/// constant factored out of the right side.
struct PerpSides {
  double lhs = 0.0;      // -sigma_{k-1} d2_lambda q_k
  double rhs_sum = 0.0;  // sum of reduced-product perp terms
};
PerpSides perp_bound_sides(const CurvatureVector& kappa, const DirectionVector& lambda,
                           int k);

}  // namespace gk::lemmas
