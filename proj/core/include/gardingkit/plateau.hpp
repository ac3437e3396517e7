#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace gk::plateau {

struct NewtonParams {
  double tol = 1e-10;      // max-norm of the residual
  int max_iters = 50;
  double damping_floor = 0x1.0p-20;
};

enum class Init { cap, flat, previous };

struct SolverConfig {
  int n = 6;
  int k = 3;
  double sigma = 0.125;  // target P_k in (0,1)
  double R = 1.0;
  std::vector<double> eps_schedule = {0.2, 0.1, 0.05, 0.025};
  int grid = 2048;  // intervals; grid+1 nodes
  NewtonParams newton;
  Init init = Init::cap;

  void validate() const;  // throws InvalidInput
  nlohmann::json to_json() const;
};

/// Equidistant-sphere profile u(r) = sqrt(rho^2 - r^2) - d. All hyperbolic
/// principal curvatures equal d/rho, the closed-form solver oracle.
struct Cap {
  double rho = 0.0;
  double d = 0.0;
  double u(double r) const;
  double du(double r) const;
  double ddu(double r) const;
};

/// The cap with d/rho = sigma^{1/k} through u(R) = eps.
Cap cap_through(int k, double sigma, double R, double eps);

struct RadialProfile {
  double epsilon = 0.0;
  std::vector<double> r, u;
  std::vector<double> kappa_rad, kappa_ang, nu, Q;
  bool converged = false;
  bool elliptic = true;  // kappa in Gamma_k at every interior node
  int iters = 0;
  double max_residual = 0.0;
};

/// P_k of the two-value spectrum (kappa_rad once, kappa_ang with multiplicity
/// n-1) and its analytic partials.
double two_value_pk(double k_rad, double k_ang, int n, int k);
double two_value_pk_drad(double k_rad, double k_ang, int n, int k);
double two_value_pk_dang(double k_rad, double k_ang, int n, int k);

/// Per-node residual of the collocation system: interior rows carry
/// P_k(kappa) - sigma, row 0 the symmetry condition u'(0) = 0, row M the
/// boundary height u(R) = eps. elliptic_ok reports whether kappa stayed in
/// Gamma_k at every interior node.
std::vector<double> residual(const std::vector<double>& u, const SolverConfig& cfg,
                             double eps, bool* elliptic_ok = nullptr);

/// Dense Jacobian column d residual / d u_j, for the column cross-check.
std::vector<double> jacobian_column(const std::vector<double>& u, const SolverConfig& cfg,
                                    double eps, int j);

struct SolveOutcome {
  std::vector<RadialProfile> profiles;  // one per epsilon, converged or not
  bool all_converged = false;
  std::string failure;  // empty when all converged
};

/// Damped Newton continuation along the epsilon schedule, warm-started from
/// the previous converged profile.
SolveOutcome solve(const SolverConfig& cfg);

struct AprioriRow {
  double epsilon = 0.0;
  double max_abs_kappa = 0.0;
  double min_nu = 0.0;
  double min_kappa = 0.0;
  double max_Q = 0.0;
};

struct AprioriReport {
  std::vector<AprioriRow> rows;
  bool holds = false;
  double kappa_ratio = 0.0;   // last-to-first max|kappa| ratio
  double inv_nu_ratio = 0.0;  // last-to-first 1/min(nu) ratio
  double semiconvex_margin = 0.0;  // min kappa + A over the schedule

  nlohmann::json to_json() const;
};

/// Uniformity of the curvature and gradient bounds along the schedule; needs
/// at least two converged profiles (InsufficientData otherwise).
AprioriReport verify_apriori(const std::vector<RadialProfile>& profiles,
                             const SolverConfig& cfg, double A);

/// CSV columns: r, u, kappa_rad, kappa_ang, nu, Q.
void write_profile_csv(std::ostream& out, const RadialProfile& profile);

nlohmann::json summary_json(const SolverConfig& cfg, const SolveOutcome& outcome,
                            const AprioriReport* apriori);

}  // namespace gk::plateau
