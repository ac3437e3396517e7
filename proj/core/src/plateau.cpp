#include "gardingkit/plateau.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "gardingkit/errors.hpp"
#include "gardingkit/symfun.hpp"

namespace gk::plateau {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

struct NodeCurv {
  double rad = 0.0;
  double ang = 0.0;
  double nu = 0.0;
};

// Curvatures from the three-point stencil around node i (solver-internal
// path, independent of the hygeo implementation).
NodeCurv stencil_curvatures(double um, double uc, double up, double r, double h) {
  const double du = (up - um) / (2.0 * h);
  const double ddu = (up - 2.0 * uc + um) / (h * h);
  const double w2 = 1.0 + du * du;
  const double w = std::sqrt(w2);
  NodeCurv c;
  c.nu = 1.0 / w;
  c.rad = uc * ddu / (w2 * w) + c.nu;
  c.ang = uc * du / (r * w) + c.nu;
  return c;
}

}  // namespace

void SolverConfig::validate() const {
  if (n < 2) throw InvalidInput("solve: need n >= 2");
  if (k < 1 || k > n) throw InvalidInput("solve: need 1 <= k <= n");
  if (!(sigma > 0.0) || !(sigma < 1.0)) throw InvalidInput("solve: need sigma in (0,1)");
  if (!(R > 0.0)) throw InvalidInput("solve: need R > 0");
  if (grid < 8) throw InvalidInput("solve: need at least 8 grid intervals");
  if (eps_schedule.empty()) throw InvalidInput("solve: empty epsilon schedule");
  double prev = std::numeric_limits<double>::infinity();
  for (double e : eps_schedule) {
    if (!(e > 0.0)) throw InvalidInput("solve: epsilon values must be > 0");
    if (!(e < prev)) throw InvalidInput("solve: epsilon schedule must decrease");
    prev = e;
  }
  if (!(newton.tol > 0.0)) throw InvalidInput("solve: newton.tol must be > 0");
}

nlohmann::json SolverConfig::to_json() const {
  return {{"n", n},
          {"k", k},
          {"sigma", sigma},
          {"R", R},
          {"eps_schedule", eps_schedule},
          {"grid", grid},
          {"newton", {{"tol", newton.tol}, {"max_iters", newton.max_iters}}},
          {"init", init == Init::cap ? "cap" : (init == Init::flat ? "flat" : "previous")}};
}

double Cap::u(double r) const { return std::sqrt(rho * rho - r * r) - d; }
double Cap::du(double r) const { return -r / std::sqrt(rho * rho - r * r); }
double Cap::ddu(double r) const {
  const double s = std::sqrt(rho * rho - r * r);
  return -rho * rho / (s * s * s);
}

Cap cap_through(int k, double sigma, double R, double eps) {
  if (!(sigma > 0.0) || !(sigma < 1.0)) throw InvalidInput("cap_through: sigma in (0,1)");
  const double c = std::pow(sigma, 1.0 / static_cast<double>(k));
  const double one_c2 = 1.0 - c * c;
  const double rho =
      (c * eps + std::sqrt(c * c * eps * eps + one_c2 * (R * R + eps * eps))) / one_c2;
  return {rho, c * rho};
}

double two_value_pk(double k_rad, double k_ang, int n, int k) {
  return (sym::binom(n - 1, k) * ipow(k_ang, k) +
          sym::binom(n - 1, k - 1) * k_rad * ipow(k_ang, k - 1)) /
         sym::binom(n, k);
}

double two_value_pk_drad(double /*k_rad*/, double k_ang, int n, int k) {
  return sym::binom(n - 1, k - 1) * ipow(k_ang, k - 1) / sym::binom(n, k);
}

double two_value_pk_dang(double k_rad, double k_ang, int n, int k) {
  double v = k * sym::binom(n - 1, k) * ipow(k_ang, k - 1);
  if (k >= 2) v += (k - 1) * sym::binom(n - 1, k - 1) * k_rad * ipow(k_ang, k - 2);
  return v / sym::binom(n, k);
}

namespace {

bool node_in_gamma(double k_rad, double k_ang, int n, int k) {
  std::vector<double> kv(static_cast<std::size_t>(n), k_ang);
  kv[0] = k_rad;
  return sym::in_gamma_k_values(kv, k);
}

}  // namespace

std::vector<double> residual(const std::vector<double>& u, const SolverConfig& cfg,
                             double eps, bool* elliptic_ok) {
  const int M = cfg.grid;
  if (static_cast<int>(u.size()) != M + 1)
    throw InvalidInput("residual: profile size must be grid + 1");
  const double h = cfg.R / M;
  std::vector<double> F(static_cast<std::size_t>(M) + 1, 0.0);
  bool elliptic = true;
  F[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);  // u'(0) = 0
  for (int i = 1; i < M; ++i) {
    const double r = h * i;
    const NodeCurv c = stencil_curvatures(u[static_cast<std::size_t>(i - 1)],
                                          u[static_cast<std::size_t>(i)],
                                          u[static_cast<std::size_t>(i + 1)], r, h);
    F[static_cast<std::size_t>(i)] = two_value_pk(c.rad, c.ang, cfg.n, cfg.k) - cfg.sigma;
    elliptic = elliptic && node_in_gamma(c.rad, c.ang, cfg.n, cfg.k);
  }
  F[static_cast<std::size_t>(M)] = u[static_cast<std::size_t>(M)] - eps;
  if (elliptic_ok) *elliptic_ok = elliptic;
  return F;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool positive_interior(const std::vector<double>& u) {
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    if (!(u[i] > 0.0)) return false;
  return u.back() > 0.0;
}

// Analytic dP_k composed with central finite-difference sensitivities of
// (kappa_rad, kappa_ang) in the three stencil heights.
Eigen::SparseMatrix<double> assemble_jacobian(const std::vector<double>& u,
                                              const SolverConfig& cfg) {
  const int M = cfg.grid;
  const double h = cfg.R / M;
  Eigen::SparseMatrix<double> J(M + 1, M + 1);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(3 * static_cast<std::size_t>(M) + 4);
  trips.emplace_back(0, 0, -3.0 / (2.0 * h));
  trips.emplace_back(0, 1, 4.0 / (2.0 * h));
  trips.emplace_back(0, 2, -1.0 / (2.0 * h));
  for (int i = 1; i < M; ++i) {
    const double r = h * i;
    double st[3] = {u[static_cast<std::size_t>(i - 1)], u[static_cast<std::size_t>(i)],
                    u[static_cast<std::size_t>(i + 1)]};
    const NodeCurv c0 = stencil_curvatures(st[0], st[1], st[2], r, h);
    const double dp_rad = two_value_pk_drad(c0.rad, c0.ang, cfg.n, cfg.k);
    const double dp_ang = two_value_pk_dang(c0.rad, c0.ang, cfg.n, cfg.k);
    for (int s = 0; s < 3; ++s) {
      const double delta = 1e-7 * std::max(1.0, std::abs(st[s]));
      double save = st[s];
      st[s] = save + delta;
      const NodeCurv cp = stencil_curvatures(st[0], st[1], st[2], r, h);
      st[s] = save - delta;
      const NodeCurv cm = stencil_curvatures(st[0], st[1], st[2], r, h);
      st[s] = save;
      const double drad = (cp.rad - cm.rad) / (2.0 * delta);
      const double dang = (cp.ang - cm.ang) / (2.0 * delta);
      trips.emplace_back(i, i - 1 + s, dp_rad * drad + dp_ang * dang);
    }
  }
  trips.emplace_back(M, M, 1.0);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

RadialProfile make_profile(const std::vector<double>& u, const SolverConfig& cfg, double eps) {
  const int M = cfg.grid;
  const double h = cfg.R / M;
  RadialProfile p;
  p.epsilon = eps;
  p.r.resize(static_cast<std::size_t>(M) + 1);
  p.u = u;
  p.kappa_rad.resize(static_cast<std::size_t>(M) + 1);
  p.kappa_ang.resize(static_cast<std::size_t>(M) + 1);
  p.nu.resize(static_cast<std::size_t>(M) + 1);
  p.Q.resize(static_cast<std::size_t>(M) + 1);
  for (int i = 0; i <= M; ++i) {
    const std::size_t id = static_cast<std::size_t>(i);
    p.r[id] = h * i;
    NodeCurv c;
    if (i == 0) {
      // symmetry row: u' = 0, angular curvature continued by its limit
      const double ddu = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
      c.nu = 1.0;
      c.rad = u[0] * ddu + 1.0;
      c.ang = c.rad;
    } else if (i == M) {
      const double du =
          (3.0 * u[id] - 4.0 * u[id - 1] + u[id - 2]) / (2.0 * h);
      const double ddu =
          (2.0 * u[id] - 5.0 * u[id - 1] + 4.0 * u[id - 2] - u[id - 3]) / (h * h);
      const double w2 = 1.0 + du * du;
      const double w = std::sqrt(w2);
      c.nu = 1.0 / w;
      c.rad = u[id] * ddu / (w2 * w) + c.nu;
      c.ang = u[id] * du / (p.r[id] * w) + c.nu;
    } else {
      c = stencil_curvatures(u[id - 1], u[id], u[id + 1], p.r[id], h);
    }
    p.kappa_rad[id] = c.rad;
    p.kappa_ang[id] = c.ang;
    p.nu[id] = c.nu;
    const double k1 = std::max(c.rad, c.ang);
    p.Q[id] = (k1 > 0.0 && c.nu > 0.0)
                  ? std::log(k1) - 4.0 * std::log(c.nu)
                  : std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

}  // namespace

std::vector<double> jacobian_column(const std::vector<double>& u, const SolverConfig& cfg,
                                    double eps, int j) {
  const Eigen::SparseMatrix<double> J = assemble_jacobian(u, cfg);
  (void)eps;
  std::vector<double> col(u.size(), 0.0);
  for (Eigen::SparseMatrix<double>::InnerIterator it(J, j); it; ++it)
    col[static_cast<std::size_t>(it.row())] = it.value();
  return col;
}

SolveOutcome solve(const SolverConfig& cfg) {
  cfg.validate();
  const int M = cfg.grid;
  const double h = cfg.R / M;
  SolveOutcome outcome;

  std::vector<double> u(static_cast<std::size_t>(M) + 1, 0.0);
  bool have_previous = false;

  for (std::size_t step = 0; step < cfg.eps_schedule.size(); ++step) {
    const double eps = cfg.eps_schedule[step];
    if (!have_previous) {
      if (cfg.init == Init::flat) {
        std::fill(u.begin(), u.end(), eps);
      } else {  // cap initializer; Init::previous means cap at the first level
        const Cap cap = cap_through(cfg.k, cfg.sigma, cfg.R, eps);
        for (int i = 0; i <= M; ++i) u[static_cast<std::size_t>(i)] = cap.u(h * i);
      }
    }
    // warm start: the previous profile carries over verbatim; the boundary
    // residual row u(R) - eps drives the height down smoothly

    bool converged = false;
    bool elliptic = true;
    int iters = 0;
    std::vector<double> F = residual(u, cfg, eps, &elliptic);
    double fnorm = max_abs(F);
    for (; iters < cfg.newton.max_iters; ++iters) {
      if (fnorm <= cfg.newton.tol && elliptic && positive_interior(u)) {
        converged = true;
        break;
      }
      Eigen::SparseMatrix<double> J = assemble_jacobian(u, cfg);
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.analyzePattern(J);
      lu.factorize(J);
      if (lu.info() != Eigen::Success) break;
      Eigen::VectorXd rhs(M + 1);
      for (int i = 0; i <= M; ++i) rhs(i) = -F[static_cast<std::size_t>(i)];
      const Eigen::VectorXd du = lu.solve(rhs);

      double lambda = 1.0;
      bool accepted = false;
      std::vector<double> trial(u.size());
      while (lambda >= cfg.newton.damping_floor) {
        for (int i = 0; i <= M; ++i)
          trial[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] + lambda * du(i);
        if (positive_interior(trial)) {
          bool trial_elliptic = true;
          std::vector<double> Ft = residual(trial, cfg, eps, &trial_elliptic);
          const double tnorm = max_abs(Ft);
          // a step must reduce the residual; leaving the cone from an
          // elliptic iterate also backtracks, but a non-elliptic iterate may
          // keep moving under damping until the flag clears
          if (tnorm < fnorm && (trial_elliptic || !elliptic)) {
            u = trial;
            F = std::move(Ft);
            fnorm = tnorm;
            elliptic = trial_elliptic;
            accepted = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!accepted) break;
    }
    if (fnorm <= cfg.newton.tol && elliptic && positive_interior(u)) converged = true;

    RadialProfile prof = make_profile(u, cfg, eps);
    prof.converged = converged;
    prof.elliptic = elliptic;
    prof.iters = iters;
    prof.max_residual = fnorm;
    outcome.profiles.push_back(std::move(prof));
    if (!converged) {
      std::ostringstream os;
      os << "newton failed at epsilon = " << eps << " after " << iters
         << " iterations (max residual " << fnorm << (elliptic ? ")" : ", ellipticity lost)");
      outcome.failure = os.str();
      outcome.all_converged = false;
      return outcome;
    }
    have_previous = true;
  }
  outcome.all_converged = true;
  return outcome;
}

AprioriReport verify_apriori(const std::vector<RadialProfile>& profiles,
                             const SolverConfig& cfg, double A) {
  (void)cfg;
  std::vector<const RadialProfile*> conv;
  for (const auto& p : profiles)
    if (p.converged) conv.push_back(&p);
  if (conv.size() < 2)
    throw InsufficientData("verify_apriori: need at least two converged profiles");

  AprioriReport rep;
  for (const auto* p : conv) {
    AprioriRow row;
    row.epsilon = p->epsilon;
    row.min_nu = std::numeric_limits<double>::infinity();
    row.min_kappa = std::numeric_limits<double>::infinity();
    row.max_Q = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p->u.size(); ++i) {
      row.max_abs_kappa =
          std::max({row.max_abs_kappa, std::abs(p->kappa_rad[i]), std::abs(p->kappa_ang[i])});
      row.min_kappa = std::min({row.min_kappa, p->kappa_rad[i], p->kappa_ang[i]});
      row.min_nu = std::min(row.min_nu, p->nu[i]);
      if (!std::isnan(p->Q[i])) row.max_Q = std::max(row.max_Q, p->Q[i]);
    }
    rep.rows.push_back(row);
  }
  const auto& first = rep.rows.front();
  const auto& last = rep.rows.back();
  rep.kappa_ratio = last.max_abs_kappa / first.max_abs_kappa;
  rep.inv_nu_ratio = first.min_nu / last.min_nu;
  rep.semiconvex_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows)
    rep.semiconvex_margin = std::min(rep.semiconvex_margin, row.min_kappa + A);
  rep.holds = rep.kappa_ratio <= 1.5 && rep.inv_nu_ratio <= 1.5;
  return rep;
}

nlohmann::json AprioriReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows)
    rows_json.push_back({{"epsilon", row.epsilon},
                         {"max_abs_kappa", row.max_abs_kappa},
                         {"min_nu", row.min_nu},
                         {"min_kappa", row.min_kappa},
                         {"max_Q", row.max_Q}});
  return {{"rows", rows_json},
          {"kappa_ratio", kappa_ratio},
          {"inv_nu_ratio", inv_nu_ratio},
          {"semiconvex_margin", semiconvex_margin},
          {"holds", holds}};
}

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
  out << "r,u,kappa_rad,kappa_ang,nu,Q\n";
  for (std::size_t i = 0; i < profile.u.size(); ++i)
    out << fmt(profile.r[i]) << ',' << fmt(profile.u[i]) << ',' << fmt(profile.kappa_rad[i])
        << ',' << fmt(profile.kappa_ang[i]) << ',' << fmt(profile.nu[i]) << ','
        << fmt(profile.Q[i]) << '\n';
}

nlohmann::json summary_json(const SolverConfig& cfg, const SolveOutcome& outcome,
                            const AprioriReport* apriori) {
  nlohmann::json per_eps = nlohmann::json::array();
  for (const auto& p : outcome.profiles) {
    double max_abs_kappa = 0.0, min_nu = std::numeric_limits<double>::infinity();
    double min_kappa = min_nu, max_Q = -min_nu;
    for (std::size_t i = 0; i < p.u.size(); ++i) {
      max_abs_kappa = std::max({max_abs_kappa, std::abs(p.kappa_rad[i]), std::abs(p.kappa_ang[i])});
      min_kappa = std::min({min_kappa, p.kappa_rad[i], p.kappa_ang[i]});
      min_nu = std::min(min_nu, p.nu[i]);
      if (!std::isnan(p.Q[i])) max_Q = std::max(max_Q, p.Q[i]);
    }
    per_eps.push_back({{"epsilon", p.epsilon},
                       {"converged", p.converged},
                       {"elliptic", p.elliptic},
                       {"iters", p.iters},
                       {"max_residual", p.max_residual},
                       {"max_abs_kappa", max_abs_kappa},
                       {"min_nu", min_nu},
                       {"min_kappa", min_kappa},
                       {"max_Q", max_Q}});
  }
  nlohmann::json j{{"config", cfg.to_json()},
                   {"per_epsilon", per_eps},
                   {"all_converged", outcome.all_converged}};
  if (!outcome.failure.empty()) j["failure"] = outcome.failure;
  j["apriori"] = apriori ? apriori->to_json() : nlohmann::json(nullptr);
  j["verdict"] = outcome.all_converged && apriori && apriori->holds ? "holds" : "failed";
  return j;
}

}  // namespace gk::plateau
