// Acceptance suite: every release gate in one binary, one PASS/FAIL line per
// criterion with the measured margin. Exit code is the number of failures.
//
//   acceptance --cli <path-to-gardingkit> [--fast]
//
// --fast cuts the sample counts for development loops; the ctest registration
// always runs the full configuration.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gardingkit/cones.hpp"
#include "gardingkit/hygeo.hpp"
#include "gardingkit/lemmas.hpp"
#include "gardingkit/plateau.hpp"
#include "gardingkit/rng.hpp"
#include "gardingkit/symfun.hpp"
#include "support/enum_oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using gk::CurvatureVector;
using gk::DirectionVector;
namespace sym = gk::sym;
namespace cones = gk::cones;
namespace lemmas = gk::lemmas;
namespace plateau = gk::plateau;

namespace {

int g_failures = 0;
bool g_fast = false;
std::string g_cli;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << " — " << detail << " ("
            << std::fixed << seconds << std::defaultfloat << " s)\n";
  if (!pass) ++g_failures;
}

long scaled(long full) { return g_fast ? std::max<long>(full / 20, 100) : full; }

// ---------------------------------------------------------------------------
// 1. exact identity suite at 1e5 seeded samples, residual <= 1e-10, <= 60 s

void criterion_exact_identities() {
  Timer timer;
  const long trials = scaled(100000);
  double worst = 0.0;
  std::string worst_track = "none";
  auto track = [&](const char* name, double value) {
    if (value > worst) {
      worst = value;
      worst_track = name;
    }
  };

  // weighted-sum identities over free boxes
  {
    lemmas::CheckConfig cfg;
    cfg.n = 6;
    cfg.k = 3;
    cfg.trials = trials;
    cfg.seed = 42;
    const auto rep = lemmas::check_sum_identities(cfg);
    track("sum_identities", rep.worst_violation);
  }

  // exact second-derivative identity for q_2 on Gamma_2 samples
  {
    cones::SampleSpec spec;
    spec.n = 6;
    spec.k = 2;
    spec.seed = 43;
    gk::Rng xi_rng(7);
    for (long i = 0; i < trials; ++i) {
      const CurvatureVector kappa = cones::sample_one(spec, i);
      const DirectionVector xi = cones::random_unit_direction(xi_rng, 6);
      track("q2_identity", sym::hs_q2_residual(kappa, xi));
    }
  }

  // denominator identity q_{k;i} + kappa_i = sigma_k / sigma_{k-1}(kappa|i)
  {
    cones::SampleSpec spec;
    spec.n = 6;
    spec.k = 3;
    spec.seed = 44;
    for (long i = 0; i < trials; ++i) {
      const CurvatureVector kappa = cones::sample_one(spec, i);
      const sym::SymBundle b = sym::build_bundle(kappa);
      for (int p = 0; p < 6; ++p) {
        const double mk1 = b.minor1(p, 2);
        if (mk1 == 0.0) continue;
        const double lhs = b.minor1(p, 3) / mk1 + kappa[p];
        const double rhs = b.sigma(3) / mk1;
        track("denominator_identity",
              std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
      }
    }
  }

  // sigma_j against the subset-enumeration oracle for n <= 8
  {
    gk::Rng rng(45);
    for (long i = 0; i < trials; ++i) {
      const int n = 2 + static_cast<int>(i % 7);
      std::vector<double> vals(static_cast<std::size_t>(n));
      for (auto& x : vals) x = rng.uniform(-3.0, 3.0);
      const sym::SymBundle b = sym::build_bundle(CurvatureVector(vals));
      for (int j = 0; j <= n; ++j) {
        const double expect = oracle::sigma_enum(vals, j);
        track("subset_oracle", std::abs(b.sigma(j) - expect) /
                                   std::max({1.0, std::abs(expect), std::abs(b.sigma(j))}));
      }
    }
  }

  const double seconds = timer.s();
  std::ostringstream os;
  os << "max residual " << worst << " (" << worst_track << ") over " << trials
     << " samples per track";
  report("exact-identity-suite", worst <= 1e-10 && seconds <= 60.0, os.str(), seconds);
}

// ---------------------------------------------------------------------------
// 2. inequality suite: zero violations at adversarially refined samples for
//    (n,k) in {(4,2), (6,3), (6,4)}; total <= 10 min

void criterion_inequality_suite() {
  Timer timer;
  const long trials = scaled(10000);
  const std::vector<std::pair<int, int>> combos = {{4, 2}, {6, 3}, {6, 4}};
  const std::vector<std::string> suite = {"partial_ordering", "top_partial",
                                          "quotient_concavity", "product_bound",
                                          "kappa_signs",        "maclaurin",
                                          "hs_recursion"};
  bool pass = true;
  std::ostringstream os;
  for (const auto& [n, k] : combos) {
    for (const auto& id : suite) {
      lemmas::CheckConfig cfg;
      cfg.n = n;
      cfg.k = k;
      cfg.A = 1.0;
      cfg.trials = trials;
      cfg.seed = 42;
      const auto rep = lemmas::run_lemma(id, cfg);
      const bool ok = rep.verdict == lemmas::Verdict::holds;
      if (!ok) {
        pass = false;
        os << " " << id << "(" << n << "," << k << ")=" << lemmas::to_string(rep.verdict)
           << " worst " << rep.worst_violation << ";";
      }
    }
  }
  const double seconds = timer.s();
  if (pass) os << "7 lemmas x 3 combos, zero violations at " << trials << " refined samples";
  report("inequality-suite", pass && seconds <= 600.0, os.str(), seconds);
}

// ---------------------------------------------------------------------------
// 3. refined concavity bound ladder and the gap-index scan at (6,3,A=1,eps=0.1)

void criterion_lu_and_gap() {
  Timer timer;
  lemmas::CheckConfig cfg;
  cfg.n = 6;
  cfg.k = 3;
  cfg.A = 1.0;
  cfg.epsilon = 0.1;
  cfg.trials = scaled(10000);
  cfg.seed = 42;
  const auto lu = lemmas::check_lu(cfg);

  lemmas::CheckConfig gcfg = cfg;
  gcfg.N = 3.0;
  const auto gap = lemmas::check_gap_index(gcfg);

  std::ostringstream os;
  const bool lu_ok = lu.verdict == lemmas::Verdict::holds && lu.empirical_constant.has_value();
  const bool gap_ok = gap.verdict == lemmas::Verdict::holds &&
                      gap.witness.params.value("failures", -1L) == 0;
  os << "N(0.1) = " << (lu.empirical_constant ? *lu.empirical_constant : -1.0)
     << ", worst violation " << lu.worst_violation << "; gap scan failures "
     << gap.witness.params.value("failures", -1L) << "/"
     << gap.witness.params.value("accepted", 0L);
  report("lu-ladder-and-gap-index", lu_ok && gap_ok, os.str(), timer.s());
}

// ---------------------------------------------------------------------------
// 4. perp-projection lower bound: sign everywhere, ratio stable under doubling

void criterion_perp_bound() {
  Timer timer;
  bool pass = true;
  std::ostringstream os;
  for (const auto& [n, k] : std::vector<std::pair<int, int>>{{6, 3}, {6, 4}}) {
    lemmas::CheckConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.A = 1.0;
    cfg.trials = scaled(10000);
    cfg.seed = 42;
    const auto rep = lemmas::check_perp_lower_bound(cfg);
    const double drift = rep.witness.params.value("ratio_drift", 1.0);
    const bool ok = rep.verdict == lemmas::Verdict::holds && rep.worst_violation <= 1e-9 &&
                    drift <= 0.10;
    pass = pass && ok;
    os << "(" << n << "," << k << "): sign worst " << rep.worst_violation << ", ratio inf "
       << (rep.empirical_constant ? *rep.empirical_constant : -1.0) << ", drift " << drift
       << "; ";
  }
  report("perp-lower-bound", pass, os.str(), timer.s());
}

// ---------------------------------------------------------------------------
// 5. cap reproduction at (6,3,sigma=0.125,R=1), M=2048, eps down to 0.025

void criterion_cap_reproduction(plateau::SolveOutcome* outcome_out,
                                plateau::SolverConfig* cfg_out) {
  Timer timer;
  plateau::SolverConfig cfg;
  cfg.n = 6;
  cfg.k = 3;
  cfg.sigma = 0.125;
  cfg.R = 1.0;
  cfg.grid = 2048;  // the tolerance is stated at this resolution
  cfg.eps_schedule = {0.2, 0.1, 0.05, 0.025};
  const auto outcome = plateau::solve(cfg);
  const double seconds = timer.s();

  bool pass = outcome.all_converged;
  double worst_u = 0.0, worst_k = 0.0;
  if (pass) {
    const auto& p = outcome.profiles.back();
    const plateau::Cap cap = plateau::cap_through(cfg.k, cfg.sigma, cfg.R, p.epsilon);
    for (std::size_t i = 0; i < p.u.size(); ++i) {
      worst_u = std::max(worst_u, std::abs(p.u[i] - cap.u(p.r[i])));
      worst_k = std::max(
          {worst_k, std::abs(p.kappa_rad[i] - 0.5), std::abs(p.kappa_ang[i] - 0.5)});
    }
    pass = worst_u <= 1e-5 * cfg.R && worst_k <= 1e-5 && seconds <= 10.0;
  }
  std::ostringstream os;
  os << "max |u - u_cap| = " << worst_u << ", max |kappa - 0.5| = " << worst_k << " at M = "
     << cfg.grid;
  if (!outcome.all_converged) os << "; solver failed: " << outcome.failure;
  report("cap-reproduction", pass, os.str(), seconds);
  *outcome_out = outcome;
  *cfg_out = cfg;
}

// ---------------------------------------------------------------------------
// 6. epsilon-uniform curvature and gradient bounds along the schedule

void criterion_apriori(const plateau::SolveOutcome& outcome,
                       const plateau::SolverConfig& cfg) {
  Timer timer;
  if (!outcome.all_converged) {
    report("apriori-uniformity", false, "no converged schedule to examine", timer.s());
    return;
  }
  const auto rep = plateau::verify_apriori(outcome.profiles, cfg, 1.0);
  double kappa_lo = 1e300, kappa_hi = 0.0, min_nu = 1e300;
  for (const auto& row : rep.rows) {
    kappa_lo = std::min(kappa_lo, row.max_abs_kappa);
    kappa_hi = std::max(kappa_hi, row.max_abs_kappa);
    min_nu = std::min(min_nu, row.min_nu);
  }
  const double variation = kappa_hi / kappa_lo - 1.0;
  const double nu_floor = 0.5 * std::pow(cfg.sigma, 1.0 / cfg.k);
  const bool pass = rep.holds && variation <= 0.01 && min_nu >= nu_floor;
  std::ostringstream os;
  os << "max|kappa| varies by " << variation * 100.0 << "% across eps, min nu = " << min_nu
     << " (floor " << nu_floor << ")";
  report("apriori-uniformity", pass, os.str(), timer.s());
}

// ---------------------------------------------------------------------------
// 7. analytic derivatives against finite differences

void criterion_derivative_crosschecks() {
  Timer timer;
  bool pass = true;
  double worst_grad = 0.0, worst_hess = 0.0, worst_col = 0.0;

  gk::Rng rng(4242);
  const long points = g_fast ? 200 : 1000;
  for (long t = 0; t < points; ++t) {
    const int n = 6;
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (auto& x : vals) x = rng.uniform(-2.0, 2.0);
    const sym::SymBundle b = sym::build_bundle(CurvatureVector(vals));
    const int k = 3;
    auto f = [k](const std::vector<double>& x) { return oracle::sigma_enum(x, k); };
    const int i = static_cast<int>(rng.next_u64() % 6);
    const int p = static_cast<int>(rng.next_u64() % 6);
    const double fd1 = oracle::fd_partial(f, vals, i, 1e-6);
    worst_grad = std::max(worst_grad, std::abs(b.dsigma(k, i) - fd1) /
                                          std::max({1.0, std::abs(fd1), std::abs(b.dsigma(k, i))}));
    const double fd2 = oracle::fd_second(f, vals, i, p, 1e-4);
    worst_hess = std::max(worst_hess, std::abs(b.d2sigma(k, i, p) - fd2) /
                                          std::max({1.0, std::abs(fd2),
                                                    std::abs(b.d2sigma(k, i, p))}));
  }
  pass = pass && worst_grad <= 1e-5 && worst_hess <= 1e-5;

  plateau::SolverConfig cfg;
  cfg.n = 6;
  cfg.k = 3;
  cfg.sigma = 0.125;
  cfg.grid = 96;
  const plateau::Cap cap = plateau::cap_through(cfg.k, cfg.sigma, cfg.R, 0.15);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> u(static_cast<std::size_t>(cfg.grid) + 1);
    for (int i = 0; i <= cfg.grid; ++i) {
      const double r = cfg.R * i / cfg.grid;
      u[static_cast<std::size_t>(i)] = cap.u(r) * (1.0 + 0.01 * rng.uniform(-1.0, 1.0));
    }
    const int j = 1 + static_cast<int>(rng.next_u64() %
                                       static_cast<std::uint64_t>(cfg.grid - 1));
    const auto col = plateau::jacobian_column(u, cfg, 0.15, j);
    const double h = 1e-7;
    auto up = u, um = u;
    up[static_cast<std::size_t>(j)] += h;
    um[static_cast<std::size_t>(j)] -= h;
    const auto rp = plateau::residual(up, cfg, 0.15);
    const auto rm = plateau::residual(um, cfg, 0.15);
    double col_norm = 0.0;
    for (double x : col) col_norm = std::max(col_norm, std::abs(x));
    for (std::size_t i = 0; i < col.size(); ++i)
      worst_col = std::max(worst_col, std::abs(col[i] - (rp[i] - rm[i]) / (2.0 * h)) /
                                          std::max(1.0, col_norm));
  }
  pass = pass && worst_col <= 1e-5;

  std::ostringstream os;
  os << "gradient " << worst_grad << ", hessian " << worst_hess << ", jacobian column "
     << worst_col << " (all relative)";
  report("derivative-crosschecks", pass, os.str(), timer.s());
}

// ---------------------------------------------------------------------------
// 8. determinism: re-running each command from its manifest reproduces every
//    listed output byte for byte

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool rerun_from_manifest(const fs::path& dir1, const fs::path& dir2, std::string* detail) {
  const json manifest = json::parse(slurp(dir1 / "manifest.json"));
  std::ostringstream cmd;
  bool next_is_outdir = false;
  bool first = true;
  for (const auto& tok : manifest["argv"]) {
    std::string t = tok.get<std::string>();
    if (first) {
      first = false;
      cmd << g_cli;  // the recorded binary path, normalized to the one under test
      continue;
    }
    if (next_is_outdir) {
      t = dir2.string();
      next_is_outdir = false;
    } else if (t == "--out-dir") {
      next_is_outdir = true;
    }
    cmd << " " << t;
  }
  cmd << " >/dev/null 2>/dev/null";
  if (std::system(cmd.str().c_str()) == -1) {
    *detail = "re-run failed to launch";
    return false;
  }
  for (const auto& out : manifest["outputs"]) {
    const std::string name = out.get<std::string>();
    if (slurp(dir1 / name) != slurp(dir2 / name)) {
      *detail = "output " + name + " differs between runs";
      return false;
    }
  }
  return true;
}

void criterion_determinism() {
  Timer timer;
  if (g_cli.empty()) {
    report("determinism", false, "no --cli path given", timer.s());
    return;
  }
  char tmpl[] = "/tmp/gardingkit_acc_XXXXXX";
  const fs::path work = mkdtemp(tmpl);
  const long trials = scaled(20000);

  struct Cmd {
    std::string name;
    std::string args;
  };
  std::ostringstream vtrials;
  vtrials << trials;
  const fs::path cap_csv = work / "cap.csv";
  {
    std::ofstream out(cap_csv);
    out.precision(17);
    out << "x,u\n";
    const double rho = 1.171840736823187, d = 0.5859203684115935;
    for (int i = 0; i < 257; ++i) {
      const double r = 1.0 * i / 256;
      out << r << "," << (std::sqrt(rho * rho - r * r) - d) << "\n";
    }
  }
  const std::vector<Cmd> cmds = {
      {"verify", "verify --lemma sum_identities --lemma quotient_concavity --n 6 --k 3 --A 1 "
                 "--trials " + vtrials.str() + " --seed 42"},
      {"solve", "solve --n 6 --k 3 --sigma 0.125 --R 1 --eps 0.2,0.1 --grid 256"},
      {"shape", "shape --input " + cap_csv.string() + " --n 6 --k 3"},
      {"sample", "sample --n 6 --k 3 --stratum huge --N 2 --count 200 --seed 42"},
  };

  bool pass = true;
  std::string detail = "verify, solve, shape, sample all byte-identical on re-run";
  for (const auto& cmd : cmds) {
    const fs::path d1 = work / (cmd.name + "_1");
    const fs::path d2 = work / (cmd.name + "_2");
    const std::string full =
        g_cli + " " + cmd.args + " --out-dir " + d1.string() + " >/dev/null 2>/dev/null";
    const int status = std::system(full.c_str());
    const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (rc != 0) {
      pass = false;
      detail = cmd.name + " exited with " + std::to_string(rc);
      break;
    }
    std::string why;
    if (!rerun_from_manifest(d1, d2, &why)) {
      pass = false;
      detail = cmd.name + ": " + why;
      break;
    }
  }
  fs::remove_all(work);
  report("determinism", pass, detail, timer.s());
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--fast") g_fast = true;
    if (arg == "--cli" && i + 1 < argc) g_cli = argv[++i];
  }
  std::cout << "acceptance suite" << (g_fast ? " (fast mode)" : "") << "\n";

  criterion_exact_identities();
  criterion_inequality_suite();
  criterion_lu_and_gap();
  criterion_perp_bound();

  plateau::SolveOutcome outcome;
  plateau::SolverConfig cfg;
  criterion_cap_reproduction(&outcome, &cfg);
  criterion_apriori(outcome, cfg);
  criterion_derivative_crosschecks();
  criterion_determinism();

  std::cout << (g_failures == 0 ? "all criteria passed\n"
                                : std::to_string(g_failures) + " criteria failed\n");
  return g_failures;
}
