#include "gardingkit/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gk::sym {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

void esf_into(std::span<const double> values, std::span<double> out) {
  const int m = static_cast<int>(values.size());
  const int jmax = static_cast<int>(out.size()) - 1;
  std::fill(out.begin(), out.end(), 0.0);
  out[0] = 1.0;
  for (int i = 0; i < m; ++i) {
    const double x = values[static_cast<std::size_t>(i)];
    const int hi = std::min(i + 1, jmax);
    for (int j = hi; j >= 1; --j)
      out[static_cast<std::size_t>(j)] += x * out[static_cast<std::size_t>(j - 1)];
  }
}

std::vector<double> sigmas_upto(std::span<const double> values, int k) {
  std::vector<double> out(static_cast<std::size_t>(k) + 1, 0.0);
  esf_into(values, out);
  return out;
}

bool in_gamma_k_values(std::span<const double> values, int k) {
  const auto s = sigmas_upto(values, k);
  for (int j = 1; j <= k; ++j)
    if (!(s[static_cast<std::size_t>(j)] > 0.0)) return false;
  return true;
}

SymBundle::SymBundle(const CurvatureVector& kappa)
    : n_(kappa.n()), kappa_(kappa.values()) {
  if (n_ < 2) throw InvalidInput("SymBundle: need n >= 2");
  const std::size_t un = static_cast<std::size_t>(n_);

  sigma_.assign(un + 1, 0.0);
  esf_into(kappa_, sigma_);

  minor1_.assign(un * un, 0.0);
  std::vector<double> reduced(un - 1);
  for (int i = 0; i < n_; ++i) {
    int w = 0;
    for (int j = 0; j < n_; ++j)
      if (j != i) reduced[static_cast<std::size_t>(w++)] = kappa_[static_cast<std::size_t>(j)];
    esf_into(reduced, std::span<double>(minor1_.data() + static_cast<std::size_t>(i) * un, un));
  }

  // Pair minors, packed by pair index over i < p.
  minor2_.assign(un * (un - 1) / 2 * (un - 1), 0.0);
  std::vector<double> reduced2(un - 2);
  std::size_t pair = 0;
  for (int i = 0; i < n_; ++i) {
    for (int p = i + 1; p < n_; ++p, ++pair) {
      int w = 0;
      for (int j = 0; j < n_; ++j)
        if (j != i && j != p) reduced2[static_cast<std::size_t>(w++)] = kappa_[static_cast<std::size_t>(j)];
      esf_into(reduced2,
               std::span<double>(minor2_.data() + pair * (un - 1), un - 1));
    }
  }
}

double SymBundle::minor2(int i, int p, int j) const {
  if (i == p) throw InvalidInput("SymBundle::minor2: indices must differ");
  if (j < 0 || j > n_ - 2) return 0.0;
  if (i > p) std::swap(i, p);
  // pair index of (i, p) with i < p in row-major upper-triangular order
  const std::size_t pair =
      static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) -
      static_cast<std::size_t>(i) * static_cast<std::size_t>(i + 1) / 2 +
      static_cast<std::size_t>(p - i - 1);
  return minor2_[pair * static_cast<std::size_t>(n_ - 1) + static_cast<std::size_t>(j)];
}

SymBundle build_bundle(const CurvatureVector& kappa) { return SymBundle(kappa); }

double normalized_pk(const SymBundle& bundle, int k) {
  if (k < 1 || k > bundle.n())
    throw InvalidInput("normalized_pk: k = " + std::to_string(k) + " out of [1, n]");
  return bundle.sigma(k) / binom(bundle.n(), k);
}

bool in_gamma_k(const SymBundle& bundle, int k) {
  if (k < 1 || k > bundle.n())
    throw InvalidInput("in_gamma_k: k = " + std::to_string(k) + " out of [1, n]");
  for (int j = 1; j <= k; ++j)
    if (!(bundle.sigma(j) > 0.0)) return false;
  return true;
}

double quotient_q(const SymBundle& bundle, int m) {
  if (m < 1 || m > bundle.n())
    throw InvalidInput("quotient_q: m = " + std::to_string(m) + " out of [1, n]");
  const double denom = bundle.sigma(m - 1);
  if (denom == 0.0) throw DivisionDegeneracy("quotient_q: sigma_{m-1} = 0");
  return bundle.sigma(m) / denom;
}

double dir_deriv(const SymBundle& bundle, int m, const DirectionVector& xi) {
  double s = 0.0;
  for (int i = 0; i < bundle.n(); ++i) s += bundle.dsigma(m, i) * xi[i];
  return s;
}

namespace {

double dir_hess_sigma(const SymBundle& bundle, int m, const DirectionVector& xi) {
  if (m < 2) return 0.0;
  double s = 0.0;
  for (int p = 0; p < bundle.n(); ++p)
    for (int q = p + 1; q < bundle.n(); ++q)
      s += 2.0 * bundle.minor2(p, q, m - 2) * xi[p] * xi[q];
  return s;
}

}  // namespace

ScaledValue dir_hess_quotient_scaled(const SymBundle& bundle, int m,
                                     const DirectionVector& xi) {
  if (m < 1 || m > bundle.n())
    throw InvalidInput("dir_hess quotient: m out of [1, n]");
  if (m == 1) return {0.0, 0.0};  // q_1 = sigma_1 is linear
  const double f = bundle.sigma(m), g = bundle.sigma(m - 1);
  if (g == 0.0) throw DivisionDegeneracy("dir_hess quotient: sigma_{m-1} = 0");
  const double df = dir_deriv(bundle, m, xi), dg = dir_deriv(bundle, m - 1, xi);
  const double d2f = dir_hess_sigma(bundle, m, xi), d2g = dir_hess_sigma(bundle, m - 1, xi);
  const double t1 = d2f / g;
  const double t2 = -2.0 * df * dg / (g * g);
  const double t3 = -f * d2g / (g * g);
  const double t4 = 2.0 * f * dg * dg / (g * g * g);
  return {t1 + t2 + t3 + t4,
          std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4)};
}

double dir_hess(Form form, int m, const SymBundle& bundle, const DirectionVector& xi) {
  if (bundle.n() != xi.n()) throw InvalidInput("dir_hess: dimension mismatch");
  switch (form) {
    case Form::sigma:
      if (m < 0 || m > bundle.n()) throw InvalidInput("dir_hess sigma: m out of range");
      return dir_hess_sigma(bundle, m, xi);
    case Form::quotient:
      return dir_hess_quotient_scaled(bundle, m, xi).value;
    case Form::log_sigma: {
      const double f = bundle.sigma(m);
      if (f == 0.0) throw DivisionDegeneracy("dir_hess log_sigma: sigma_m = 0");
      const double df = dir_deriv(bundle, m, xi);
      return dir_hess_sigma(bundle, m, xi) / f - (df / f) * (df / f);
    }
  }
  throw InvalidInput("dir_hess: unknown form");
}

double dir_hess(Form form, int m, const CurvatureVector& kappa, const DirectionVector& xi) {
  require_same_dim(kappa, xi);
  return dir_hess(form, m, build_bundle(kappa), xi);
}

std::vector<double> quotient_hessian(const SymBundle& bundle, int m) {
  const int n = bundle.n();
  std::vector<double> H(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  if (m == 1) return H;
  const double f = bundle.sigma(m), g = bundle.sigma(m - 1);
  if (g == 0.0) throw DivisionDegeneracy("quotient_hessian: sigma_{m-1} = 0");
  for (int p = 0; p < n; ++p) {
    const double fp = bundle.dsigma(m, p), gp = bundle.dsigma(m - 1, p);
    for (int q = 0; q < n; ++q) {
      const double fq = bundle.dsigma(m, q), gq = bundle.dsigma(m - 1, q);
      const double fpq = bundle.d2sigma(m, p, q), gpq = bundle.d2sigma(m - 1, p, q);
      H[static_cast<std::size_t>(p * n + q)] = fpq / g - (fp * gq + fq * gp) / (g * g) -
                                               f * gpq / (g * g) +
                                               2.0 * f * gp * gq / (g * g * g);
    }
  }
  return H;
}

double hs_q2_residual(const SymBundle& bundle, const DirectionVector& xi) {
  if (bundle.n() != xi.n()) throw InvalidInput("hs_q2_residual: dimension mismatch");
  const double s1 = bundle.sigma(1);
  if (!(s1 > 0.0)) throw ConeViolation("hs_q2_residual: sigma_1 <= 0");
  const double lhs = -dir_hess(Form::quotient, 2, bundle, xi);
  double s1xi = 0.0;
  for (int i = 0; i < bundle.n(); ++i) s1xi += xi[i];
  double rhs = 0.0;
  for (int i = 0; i < bundle.n(); ++i) {
    const double t = xi[i] - bundle.kappa()[static_cast<std::size_t>(i)] * s1xi / s1;
    rhs += t * t;
  }
  rhs /= s1;
  return std::abs(lhs - rhs);
}

double hs_q2_residual(const CurvatureVector& kappa, const DirectionVector& xi) {
  require_same_dim(kappa, xi);
  return hs_q2_residual(build_bundle(kappa), xi);
}

double maclaurin_violation(const SymBundle& bundle, int k) {
  if (k < 1 || k > bundle.n()) throw InvalidInput("maclaurin_violation: k out of [1, n]");
  double worst = -std::numeric_limits<double>::infinity();
  double prev = normalized_pk(bundle, 1);
  if (!(prev > 0.0)) throw ConeViolation("maclaurin_violation: P_1 <= 0");
  for (int j = 2; j <= k; ++j) {
    const double pj = normalized_pk(bundle, j);
    if (!(pj > 0.0)) throw ConeViolation("maclaurin_violation: P_j <= 0");
    const double root = std::pow(pj, 1.0 / static_cast<double>(j));
    const double scale = std::max(std::abs(prev), std::abs(root));
    worst = std::max(worst, (root - prev) / std::max(scale, 1e-300));
    prev = root;
  }
  return worst;
}

}  // namespace gk::sym
