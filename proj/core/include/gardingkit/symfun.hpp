#pragma once

#include <span>
#include <vector>

#include "gardingkit/types.hpp"

namespace gk::sym {

/// Exact binomial coefficient as a double (n small enough that the value is
/// exactly representable).
double binom(int n, int k);

/// sigma_0..sigma_jmax of the given values via the coefficient recurrence of
/// prod_i (1 + x_i t). One pass, additions of like-signed products only.
void esf_into(std::span<const double> values, std::span<double> out);

/// sigma_0..sigma_k only (cheap cone checks in hot loops).
std::vector<double> sigmas_upto(std::span<const double> values, int k);

/// sigma_j(values) > 0 for all 1 <= j <= k, strict.
bool in_gamma_k_values(std::span<const double> values, int k);

/// All sigma_j, the single minors sigma_j(kappa|i) and the pair minors
/// sigma_j(kappa|i,p) of one curvature vector. Minors are computed by direct
/// re-expansion over the reduced index set, never by dividing out a factor.
class SymBundle {
 public:
  explicit SymBundle(const CurvatureVector& kappa);

  int n() const { return n_; }
  const std::vector<double>& kappa() const { return kappa_; }

  /// sigma_j(kappa); 0 outside [0, n] (so sigma_{n+1} reads as 0).
  double sigma(int j) const {
    return (j < 0 || j > n_) ? 0.0 : sigma_[static_cast<std::size_t>(j)];
  }

  /// sigma_j(kappa|i); 0 outside [0, n-1].
  double minor1(int i, int j) const {
    if (j < 0 || j > n_ - 1) return 0.0;
    return minor1_[static_cast<std::size_t>(i * n_ + j)];
  }

  /// sigma_j(kappa|i,p), i != p; 0 outside [0, n-2].
  double minor2(int i, int p, int j) const;

  /// First derivative d sigma_j / d kappa_i = sigma_{j-1}(kappa|i).
  double dsigma(int j, int i) const { return minor1(i, j - 1); }

  /// Second derivative d^2 sigma_j / d kappa_p d kappa_q. Diagonal entries
  /// are exactly 0 by multilinearity.
  double d2sigma(int j, int p, int q) const {
    return p == q ? 0.0 : minor2(p, q, j - 2);
  }

 private:
  int n_ = 0;
  std::vector<double> kappa_;
  std::vector<double> sigma_;   // [0..n]
  std::vector<double> minor1_;  // i*n + j, j in [0, n-1]
  std::vector<double> minor2_;  // pair-major, j in [0, n-2]
};

SymBundle build_bundle(const CurvatureVector& kappa);

/// P_k = sigma_k / C(n,k), 1 <= k <= n.
double normalized_pk(const SymBundle& bundle, int k);

/// Strict test sigma_j > 0 for all 1 <= j <= k; boundary points are outside.
bool in_gamma_k(const SymBundle& bundle, int k);

/// q_m = sigma_m / sigma_{m-1}; throws DivisionDegeneracy on a zero denominator.
double quotient_q(const SymBundle& bundle, int m);

/// Which function of kappa a directional derivative acts on.
enum class Form { sigma, quotient, log_sigma };

/// Directional derivative d_xi f along xi.
double dir_deriv(const SymBundle& bundle, int m, const DirectionVector& xi);

/// Analytic quadratic form d^2_xi f(kappa). For quotients and logs the chain
/// rule is applied to the pair-minor Hessian of sigma.
double dir_hess(Form form, int m, const SymBundle& bundle, const DirectionVector& xi);
double dir_hess(Form form, int m, const CurvatureVector& kappa, const DirectionVector& xi);

/// d^2_xi q_m together with the sum of the absolute values of the chain-rule
/// terms; the magnitude is the natural roundoff scale of the result.
struct ScaledValue {
  double value = 0.0;
  double magnitude = 0.0;
};
ScaledValue dir_hess_quotient_scaled(const SymBundle& bundle, int m,
                                     const DirectionVector& xi);

/// Dense Hessian of q_m as a row-major n*n matrix (eigenvalue oracle route).
std::vector<double> quotient_hessian(const SymBundle& bundle, int m);

/// |LHS - RHS| of the exact identity for -d^2_xi q_2, where the LHS is the
/// analytic quadratic form negated and the RHS is the explicit weighted sum
/// sum_i (xi_i - kappa_i sigma_1(xi)/sigma_1)^2 / sigma_1.
double hs_q2_residual(const SymBundle& bundle, const DirectionVector& xi);
double hs_q2_residual(const CurvatureVector& kappa, const DirectionVector& xi);

/// Worst normalized violation of the chain P_1 >= P_2^{1/2} >= ... >= P_k^{1/k};
/// negative means the chain holds with margin. Requires all P_j > 0, j <= k.
double maclaurin_violation(const SymBundle& bundle, int k);

}  // namespace gk::sym
