#include "gardingkit/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gardingkit/symfun.hpp"

namespace gk::cones {

std::string stratum_name(const Stratum& s) {
  if (std::holds_alternative<Interior>(s)) return "interior";
  if (std::holds_alternative<NearBoundary>(s)) return "near_boundary";
  if (const auto* g = std::get_if<Gap>(&s)) {
    std::ostringstream os;
    os << "gap(l=" << g->l << ",M=" << g->M << ")";
    return os.str();
  }
  const auto* h = std::get_if<HugeKappa1>(&s);
  std::ostringstream os;
  os << "huge_kappa1(N=" << h->N << ")";
  return os.str();
}

namespace {

void validate_spec(const SampleSpec& spec) {
  if (spec.n < 2) throw InvalidInput("sample: need n >= 2");
  if (spec.k < 1 || spec.k > spec.n) throw InvalidInput("sample: need 1 <= k <= n");
  if (!(spec.A > 0.0) || !(spec.B > 0.0)) throw InvalidInput("sample: need A > 0, B > 0");
  if (spec.count < 1) throw InvalidInput("sample: need count >= 1");
  if (const auto* g = std::get_if<Gap>(&spec.stratum)) {
    if (g->l < 1 || g->l > spec.k - 1)
      throw InvalidInput("sample: gap stratum needs 1 <= l <= k-1");
    if (!(g->M > 1.0)) throw InvalidInput("sample: gap stratum needs M > 1");
  }
  if (const auto* h = std::get_if<HugeKappa1>(&spec.stratum)) {
    if (!(h->N > 1.0)) throw InvalidInput("sample: huge_kappa1 stratum needs N > 1");
  }
}

std::vector<double> draw_box(Rng& rng, int count, double lo, double hi) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (auto& x : v) x = rng.uniform(lo, hi);
  std::sort(v.begin(), v.end(), std::greater<double>());
  return v;
}

// Relative distance of kappa to the cone boundary, in the scale-free units
// sigma_j / (C(n,j) max(1, kappa_1)^j).
double cone_margin(const std::vector<double>& sorted, int k) {
  const int n = static_cast<int>(sorted.size());
  const auto s = sym::sigmas_upto(sorted, k);
  const double top = std::max(1.0, std::abs(sorted.front()));
  double m = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (int j = 1; j <= k; ++j) {
    scale *= top;
    m = std::min(m, s[static_cast<std::size_t>(j)] / (sym::binom(n, j) * scale));
  }
  return m;
}

bool try_interior(Rng& rng, const SampleSpec& spec, std::vector<double>& out) {
  out = draw_box(rng, spec.n, -spec.A, spec.B);
  return sym::in_gamma_k_values(out, spec.k);
}

bool try_near_boundary(Rng& rng, const SampleSpec& spec, double margin,
                       std::vector<double>& out) {
  if (!try_interior(rng, spec, out)) return false;
  // Walk along -(1,...,1): sigma_1 decreases linearly, so the ray certainly
  // exits the cone before t_hi. Bisect to the exit and keep the inside end.
  const auto s = sym::sigmas_upto(out, 1);
  const double t_hi = s[1] / static_cast<double>(spec.n) + 1.0;
  auto shifted = [&](double t) {
    std::vector<double> v = out;
    for (auto& x : v) x -= t;
    return v;
  };
  double lo = 0.0, hi = t_hi;
  if (sym::in_gamma_k_values(shifted(hi), spec.k)) return false;  // should not happen
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * t_hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sym::in_gamma_k_values(shifted(mid), spec.k) ? lo : hi) = mid;
  }
  out = shifted(lo);
  if (out.back() < -spec.A) return false;
  return sym::in_gamma_k_values(out, spec.k) && cone_margin(out, spec.k) <= margin;
}

bool try_gap(Rng& rng, const SampleSpec& spec, const Gap& g, std::vector<double>& out) {
  std::vector<double> head = draw_box(rng, g.l, g.M * g.M, 10.0 * g.M * g.M);
  std::vector<double> tail = draw_box(rng, spec.n - g.l, -spec.A, std::min(spec.B, g.M));
  out = std::move(head);
  out.insert(out.end(), tail.begin(), tail.end());
  return sym::in_gamma_k_values(out, spec.k);
}

bool try_huge(Rng& rng, const SampleSpec& spec, const HugeKappa1& h, std::vector<double>& out) {
  const double k1 = std::pow(h.N, std::exp2(spec.k - 1)) * (1.0 + rng.uniform01());
  std::vector<double> tail = draw_box(rng, spec.n - 1, -spec.A, spec.B);
  if (!tail.empty() && tail.front() > k1) return false;
  out.clear();
  out.push_back(k1);
  out.insert(out.end(), tail.begin(), tail.end());
  if (!(out.back() > -spec.A)) return false;  // strict lower bound here
  return sym::in_gamma_k_values(out, spec.k);
}

}  // namespace

CurvatureVector sample_one(const SampleSpec& spec, long index, SampleStats* stats) {
  validate_spec(spec);
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(index)));
  std::vector<double> v;
  for (long attempt = 0; attempt < spec.retry_cap; ++attempt) {
    if (stats) ++stats->attempts;
    bool ok = false;
    if (std::holds_alternative<Interior>(spec.stratum)) {
      ok = try_interior(rng, spec, v);
    } else if (const auto* nb = std::get_if<NearBoundary>(&spec.stratum)) {
      ok = try_near_boundary(rng, spec, nb->margin, v);
    } else if (const auto* g = std::get_if<Gap>(&spec.stratum)) {
      ok = try_gap(rng, spec, *g, v);
    } else {
      ok = try_huge(rng, spec, std::get<HugeKappa1>(spec.stratum), v);
    }
    if (ok) return CurvatureVector(std::move(v), true);
    if (stats) ++stats->rejected;
  }
  std::ostringstream os;
  os << "sampler exhausted: stratum " << stratum_name(spec.stratum) << " produced no point in "
     << spec.retry_cap << " attempts (n=" << spec.n << ", k=" << spec.k << ", A=" << spec.A
     << ", B=" << spec.B << ")";
  throw SamplerExhausted(os.str());
}

SampleRun sample(const SampleSpec& spec) {
  validate_spec(spec);
  SampleRun run;
  run.samples.reserve(static_cast<std::size_t>(spec.count));
  for (long i = 0; i < spec.count; ++i)
    run.samples.push_back(sample_one(spec, i, &run.stats));
  return run;
}

DirectionVector random_unit_direction(Rng& rng, int n) {
  std::vector<double> c(static_cast<std::size_t>(n));
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : c) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : c) x *= inv;
  return DirectionVector(std::move(c));
}

void project_tail_perp(DirectionVector& xi, const CurvatureVector& kappa, int l) {
  const int n = kappa.n();
  double dot = 0.0, norm2 = 0.0;
  for (int i = l; i < n; ++i) {
    dot += xi[i] * kappa[i];
    norm2 += kappa[i] * kappa[i];
  }
  if (norm2 <= 0.0) return;
  const double c = dot / norm2;
  for (int i = l; i < n; ++i) xi[i] -= c * kappa[i];
}

std::vector<DirectionVector> structured_directions(const CurvatureVector& kappa, int l) {
  const int n = kappa.n();
  std::vector<DirectionVector> dirs;
  for (int i = 0; i < n; ++i) dirs.push_back(DirectionVector::axis(n, i));
  DirectionVector along(kappa.values());
  if (along.norm() > 0.0) {
    along.normalize();
    dirs.push_back(along);
  }
  if (l > 0 && l < n) {
    DirectionVector ones(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    project_tail_perp(ones, kappa, l);
    if (ones.norm() > 1e-12) {
      ones.normalize();
      dirs.push_back(ones);
    }
  }
  return dirs;
}

RefineResult adversarial_refine(const CurvatureVector& kappa0, const DirectionVector& xi0,
                                const Objective& objective, const Admissible& admissible,
                                Rng& rng, const RefineOptions& opt) {
  CurvatureVector start = kappa0;
  if (!admissible(start)) {
    // degenerate start (cone boundary): project inward along (1,...,1)
    double scale = 1.0;
    for (int i = 0; i < start.n(); ++i) scale = std::max(scale, std::abs(start[i]));
    double delta = 1e-9 * scale;
    bool ok = false;
    for (int step = 0; step < 64 && !ok; ++step, delta *= 2.0) {
      std::vector<double> vals = kappa0.values();
      for (auto& v : vals) v += delta;
      CurvatureVector cand = CurvatureVector::sorted_descending(std::move(vals));
      if (admissible(cand)) {
        start = cand;
        ok = true;
      }
    }
    if (!ok)
      throw SamplerExhausted(
          "adversarial_refine: start point not in the admissible stratum and inward "
          "projection failed");
  }
  const CurvatureVector& kappa_start = start;

  long evals = 0;
  auto eval = [&](const CurvatureVector& k, const DirectionVector& x,
                  double* out) -> bool {
    if (evals >= opt.max_evals) return false;
    ++evals;
    try {
      *out = objective(k, x);
      return std::isfinite(*out);
    } catch (const Error&) {
      return false;
    }
  };

  double best_v = 0.0;
  {
    std::ostringstream os;
    try {
      ++evals;
      best_v = objective(kappa_start, xi0);
    } catch (const Error& e) {
      os << e.what() << " [witness kappa = (";
      for (int i = 0; i < kappa_start.n(); ++i) os << (i ? "," : "") << kappa_start[i];
      os << ")]";
      throw InvalidInput(os.str());
    }
  }
  CurvatureVector best_k = kappa_start;
  DirectionVector best_x = xi0;

  for (int restart = 0; restart <= opt.restarts; ++restart) {
    CurvatureVector cur_k = best_k;
    DirectionVector cur_x = best_x;
    double cur_v = best_v;
    if (restart > 0) {
      // jitter around the incumbent; rejected if it leaves the stratum
      std::vector<double> vals = best_k.values();
      for (auto& v : vals) v *= 1.0 + 0.05 * (rng.uniform01() - 0.5);
      CurvatureVector cand = CurvatureVector::sorted_descending(std::move(vals));
      double v = 0.0;
      if (admissible(cand) && eval(cand, cur_x, &v)) {
        cur_k = cand;
        cur_v = v;
      }
    }

    double step = opt.step;
    for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
      bool improved = false;
      for (int i = 0; i < cur_k.n(); ++i) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> vals = cur_k.values();
          const double scale = std::max(1.0, std::abs(vals[static_cast<std::size_t>(i)]));
          vals[static_cast<std::size_t>(i)] += sgn * step * scale;
          CurvatureVector cand = CurvatureVector::sorted_descending(std::move(vals));
          double v = 0.0;
          if (admissible(cand) && eval(cand, cur_x, &v) && v > cur_v) {
            cur_k = cand;
            cur_v = v;
            improved = true;
          }
        }
      }
      if (cur_x.n() == cur_k.n() && cur_x.norm() > 0.0) {
        for (int i = 0; i < cur_x.n(); ++i) {
          for (double sgn : {1.0, -1.0}) {
            DirectionVector cand = cur_x;
            cand[i] += sgn * step;
            if (cand.norm() < 1e-12) continue;
            cand.normalize();
            double v = 0.0;
            if (eval(cur_k, cand, &v) && v > cur_v) {
              cur_x = cand;
              cur_v = v;
              improved = true;
            }
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (cur_v > best_v) {
      best_v = cur_v;
      best_k = cur_k;
      best_x = cur_x;
    }
  }
  return {best_k, best_x, best_v, evals};
}

}  // namespace gk::cones
