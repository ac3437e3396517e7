// gardingkit: batch driver for the cone-lemma verification harness, the
// half-space graph diagnostics and the radial constant-curvature solver.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gardingkit/cones.hpp"
#include "gardingkit/hygeo.hpp"
#include "gardingkit/lemmas.hpp"
#include "gardingkit/parallel.hpp"
#include "gardingkit/plateau.hpp"
#include "gardingkit/symfun.hpp"
#include "gardingkit/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalytic = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitUsage = 64;
constexpr int kExitFormat = 65;

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

// Collects output files and timing; written last, as out_dir/manifest.json.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  std::uint64_t seed = 42;
  std::string started = iso_now();
  std::vector<std::string> outputs;
  json timings_ms = json::object();

  void write(const fs::path& out_dir) const {
    json j{{"tool", "gardingkit"}, {"version", gk::kVersion},
           {"command", command},   {"argv", argv},
           {"config", config},     {"seed", seed},
           {"started", started},   {"finished", iso_now()},
           {"workers", gk::worker_count()},
           {"outputs", outputs},   {"timings_ms", timings_ms}};
    std::ofstream out(out_dir / "manifest.json");
    out << j.dump(2) << "\n";
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gk::Error("cannot open output file " + path.string());
  out << text;
}

int run_verify(const std::vector<std::string>& lemmas, bool all,
               gk::lemmas::CheckConfig cfg, const fs::path& out_dir, Manifest manifest) {
  std::vector<std::string> ids = lemmas;
  if (all) ids = gk::lemmas::all_lemma_ids();
  fs::create_directories(out_dir);

  bool any_violated = false, any_inconclusive = false;
  for (const auto& id : ids) {
    const gk::lemmas::LemmaReport rep = gk::lemmas::run_lemma(id, cfg);
    const std::string fname = "report_" + id + ".json";
    write_text(out_dir / fname, rep.to_json(/*include_timing=*/false).dump(2) + "\n");
    manifest.outputs.push_back(fname);
    manifest.timings_ms[id] = rep.wall_ms;
    std::cout << id << ": " << gk::lemmas::to_string(rep.verdict)
              << " (worst_violation = " << rep.worst_violation << ", trials = " << rep.trials
              << ")\n";
    any_violated = any_violated || rep.verdict == gk::lemmas::Verdict::violated;
    any_inconclusive = any_inconclusive || rep.verdict == gk::lemmas::Verdict::inconclusive;
  }
  manifest.write(out_dir);
  if (any_violated) return kExitAnalytic;
  if (any_inconclusive) return kExitInconclusive;
  return kExitOk;
}

int run_solve(const gk::plateau::SolverConfig& cfg, double A, const fs::path& out_dir,
              Manifest manifest) {
  fs::create_directories(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const gk::plateau::SolveOutcome outcome = gk::plateau::solve(cfg);
  const double solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& p : outcome.profiles) {
    std::ostringstream name;
    name << "profile_eps_" << fmt_g(p.epsilon) << ".csv";
    std::ostringstream body;
    gk::plateau::write_profile_csv(body, p);
    write_text(out_dir / name.str(), body.str());
    manifest.outputs.push_back(name.str());
  }

  const gk::plateau::AprioriReport* apriori_ptr = nullptr;
  gk::plateau::AprioriReport apriori;
  std::string apriori_error;
  try {
    apriori = gk::plateau::verify_apriori(outcome.profiles, cfg, A);
    apriori_ptr = &apriori;
  } catch (const gk::InsufficientData& e) {
    apriori_error = e.what();
  }
  json summary = gk::plateau::summary_json(cfg, outcome, apriori_ptr);
  if (!apriori_error.empty()) summary["apriori_error"] = apriori_error;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  manifest.outputs.push_back("summary.json");
  manifest.timings_ms["solve"] = solve_ms;
  manifest.write(out_dir);

  for (const auto& p : outcome.profiles)
    std::cout << "epsilon " << p.epsilon << ": "
              << (p.converged ? "converged" : "FAILED") << " in " << p.iters
              << " iterations, max residual " << p.max_residual << "\n";
  if (!outcome.failure.empty()) std::cout << outcome.failure << "\n";
  if (apriori_ptr)
    std::cout << "apriori: " << (apriori.holds ? "holds" : "failed")
              << " (kappa ratio " << apriori.kappa_ratio << ", 1/nu ratio "
              << apriori.inv_nu_ratio << ")\n";
  return outcome.all_converged && apriori_ptr && apriori.holds ? kExitOk : kExitAnalytic;
}

int run_shape(const fs::path& input, int n, int k, double L, const fs::path& out_dir,
              Manifest manifest) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "shape: cannot open input " << input << "\n";
    return kExitFormat;
  }
  gk::hygeo::GraphField field = gk::hygeo::read_graph_csv(in);

  // Domain scan: report every non-positive interior height, not just the first.
  std::vector<long> bad_rows;
  for (int iy = 0; iy < field.ny; ++iy)
    for (int ix = 0; ix < field.nx; ++ix) {
      const bool boundary =
          ix == 0 || ix == field.nx - 1 || (field.axes == 2 && (iy == 0 || iy == field.ny - 1));
      const double v = field.u[static_cast<std::size_t>(iy) * field.nx + ix];
      if (boundary ? v < 0.0 : !(v > 0.0))
        bad_rows.push_back(static_cast<long>(iy) * field.nx + ix);
    }
  if (!bad_rows.empty()) {
    std::cerr << "shape: u <= 0 at " << bad_rows.size() << " node(s); row indices:";
    for (long r : bad_rows) std::cerr << " " << r;
    std::cerr << "\n";
    return kExitAnalytic;
  }

  const gk::hygeo::ShapeData shape = gk::hygeo::shape_from_graph(field, n);
  const gk::hygeo::Diagnostics diag = gk::hygeo::diagnostics(shape, k, L);

  fs::create_directories(out_dir);
  std::ostringstream body;
  gk::hygeo::write_shape_csv(body, shape, diag);
  write_text(out_dir / "shape.csv", body.str());
  manifest.outputs.push_back("shape.csv");
  write_text(out_dir / "diagnostics.json", diag.to_json().dump(2) + "\n");
  manifest.outputs.push_back("diagnostics.json");
  manifest.write(out_dir);

  std::cout << "shape: " << shape.nodes() << " nodes, min nu " << diag.min_nu
            << ", max |kappa| " << diag.max_abs_kappa << ", gamma_" << k << " coverage "
            << diag.gamma_k_fraction << ", max Q " << diag.max_Q << "\n";
  return kExitOk;
}

int run_sample(const gk::cones::SampleSpec& spec, const fs::path& out_dir, Manifest manifest) {
  const gk::cones::SampleRun run = gk::cones::sample(spec);
  fs::create_directories(out_dir);
  std::ostringstream body;
  for (int c = 1; c <= spec.n; ++c) body << (c > 1 ? "," : "") << "kappa_" << c;
  body << "\n";
  char buf[40];
  for (const auto& kv : run.samples) {
    for (int c = 0; c < spec.n; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", kv[c]);
      body << (c > 0 ? "," : "") << buf;
    }
    body << "\n";
  }
  write_text(out_dir / "samples.csv", body.str());
  manifest.outputs.push_back("samples.csv");

  json stats{{"stratum", gk::cones::stratum_name(spec.stratum)},
             {"count", spec.count},
             {"attempts", run.stats.attempts},
             {"rejected", run.stats.rejected},
             {"acceptance_rate", run.stats.acceptance_rate()}};
  write_text(out_dir / "stats.json", stats.dump(2) + "\n");
  manifest.outputs.push_back("stats.json");
  manifest.write(out_dir);
  std::cout << "sample: " << run.samples.size() << " points, acceptance rate "
            << run.stats.acceptance_rate() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sigma_k symmetric-function calculus, cone-lemma verification, "
               "half-space graph geometry and the radial constant-curvature solver"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Manifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.emplace_back(argv[i]);

  // verify ------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run lemma checkers and emit JSON reports");
  bool all = false;
  std::vector<std::string> lemma_ids;
  gk::lemmas::CheckConfig vcfg;
  std::string v_out = "out";
  long v_trials = 10000;
  verify->add_flag("--all", all, "run the full checker suite");
  verify->add_option("--lemma", lemma_ids, "lemma id (repeatable)")
      ->check(CLI::IsMember([] {
        auto ids = gk::lemmas::all_lemma_ids();
        ids.push_back("maclaurin");
        return ids;
      }()));
  verify->add_option("--n", vcfg.n, "dimension")->check(CLI::Range(2, 64));
  verify->add_option("--k", vcfg.k, "order")->check(CLI::Range(1, 64));
  verify->add_option("--A", vcfg.A, "semi-convexity bound")->check(CLI::PositiveNumber);
  verify->add_option("--B", vcfg.B, "sampler box upper edge")->check(CLI::PositiveNumber);
  verify->add_option("--trials", v_trials, "trials per lemma")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vcfg.seed, "base seed");
  verify->add_option("--epsilon", vcfg.epsilon, "epsilon for the refined concavity bound");
  verify->add_option("--N", vcfg.N, "ladder base for the gap-index scan");
  verify->add_option("--delta0", vcfg.delta0, "kappa_n magnitude floor (perp bound)");
  verify->add_option("--out-dir", v_out, "output directory");

  // solve -------------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "radial constant-P_k continuation solver");
  gk::plateau::SolverConfig scfg;
  std::string s_out = "out";
  std::vector<double> eps_list;
  double s_A = 1.0;
  solve->add_option("--n", scfg.n, "dimension")->check(CLI::Range(2, 64));
  solve->add_option("--k", scfg.k, "curvature order")->check(CLI::Range(1, 64));
  solve->add_option("--sigma", scfg.sigma, "target P_k in (0,1)");
  solve->add_option("--R", scfg.R, "domain radius")->check(CLI::PositiveNumber);
  solve->add_option("--eps", eps_list, "decreasing boundary heights")->delimiter(',');
  solve->add_option("--grid", scfg.grid, "grid intervals")->check(CLI::Range(8, 1 << 20));
  solve->add_option("--tol", scfg.newton.tol, "newton tolerance");
  solve->add_option("--max-iters", scfg.newton.max_iters, "newton iteration cap");
  solve->add_option("--A", s_A, "semi-convexity bound for the report");
  solve->add_option("--out-dir", s_out, "output directory");

  // shape -------------------------------------------------------------------
  auto* shape = app.add_subcommand("shape", "graph-field geometry and diagnostics");
  std::string sh_input;
  int sh_n = 2, sh_k = 2;
  double sh_L = 4.0;
  std::string sh_out = "out";
  shape->add_option("--input", sh_input, "graph field CSV")->required();
  shape->add_option("--n", sh_n, "hypersurface dimension")->check(CLI::Range(1, 64));
  shape->add_option("--k", sh_k, "curvature order")->check(CLI::Range(1, 64));
  shape->add_option("--L", sh_L, "gradient weight in Q");
  shape->add_option("--out-dir", sh_out, "output directory");

  // sample ------------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "seeded cone samplers");
  gk::cones::SampleSpec spspec;
  std::string sp_stratum = "interior";
  int sp_l = 1;
  double sp_M = 8.0, sp_N = 2.0, sp_margin = 1e-3;
  std::string sp_out = "out";
  sample->add_option("--n", spspec.n, "dimension")->check(CLI::Range(2, 64));
  sample->add_option("--k", spspec.k, "cone order")->check(CLI::Range(1, 64));
  sample->add_option("--A", spspec.A, "lower box edge magnitude")->check(CLI::PositiveNumber);
  sample->add_option("--B", spspec.B, "upper box edge")->check(CLI::PositiveNumber);
  sample->add_option("--stratum", sp_stratum, "interior|near-boundary|gap|huge")
      ->check(CLI::IsMember({"interior", "near-boundary", "gap", "huge"}));
  sample->add_option("--l", sp_l, "gap stratum index");
  sample->add_option("--M", sp_M, "gap stratum threshold");
  sample->add_option("--N", sp_N, "huge-kappa_1 ladder base");
  sample->add_option("--margin", sp_margin, "near-boundary margin");
  sample->add_option("--count", spspec.count, "samples")->check(CLI::PositiveNumber);
  sample->add_option("--seed", spspec.seed, "seed");
  sample->add_option("--out-dir", sp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) {
      if (vcfg.k > vcfg.n) throw CLI::ValidationError("verify", "--k must not exceed --n");
      if (!all && lemma_ids.empty())
        throw CLI::ValidationError("verify", "pass --all or at least one --lemma");
      vcfg.trials = v_trials;
      manifest.command = "verify";
      manifest.seed = vcfg.seed;
      manifest.config = {{"n", vcfg.n},       {"k", vcfg.k},
                         {"A", vcfg.A},       {"B", vcfg.B},
                         {"trials", vcfg.trials}, {"epsilon", vcfg.epsilon},
                         {"N", vcfg.N},       {"delta0", vcfg.delta0},
                         {"all", all},        {"lemmas", lemma_ids}};
      return run_verify(lemma_ids, all, vcfg, v_out, std::move(manifest));
    }
    if (solve->parsed()) {
      if (scfg.k > scfg.n) throw CLI::ValidationError("solve", "--k must not exceed --n");
      if (!(scfg.sigma > 0.0 && scfg.sigma < 1.0))
        throw CLI::ValidationError("solve", "--sigma must lie in (0,1)");
      if (!eps_list.empty()) scfg.eps_schedule = eps_list;
      scfg.validate();
      manifest.command = "solve";
      manifest.config = scfg.to_json();
      manifest.config["A"] = s_A;
      return run_solve(scfg, s_A, s_out, std::move(manifest));
    }
    if (shape->parsed()) {
      if (sh_k > sh_n) throw CLI::ValidationError("shape", "--k must not exceed --n");
      manifest.command = "shape";
      manifest.config = {{"input", sh_input}, {"n", sh_n}, {"k", sh_k}, {"L", sh_L}};
      return run_shape(sh_input, sh_n, sh_k, sh_L, sh_out, std::move(manifest));
    }
    if (sample->parsed()) {
      if (spspec.k > spspec.n) throw CLI::ValidationError("sample", "--k must not exceed --n");
      if (sp_stratum == "interior")
        spspec.stratum = gk::cones::Interior{};
      else if (sp_stratum == "near-boundary")
        spspec.stratum = gk::cones::NearBoundary{sp_margin};
      else if (sp_stratum == "gap")
        spspec.stratum = gk::cones::Gap{sp_l, sp_M};
      else
        spspec.stratum = gk::cones::HugeKappa1{sp_N};
      manifest.command = "sample";
      manifest.seed = spspec.seed;
      manifest.config = {{"n", spspec.n}, {"k", spspec.k},         {"A", spspec.A},
                         {"B", spspec.B}, {"stratum", sp_stratum}, {"count", spspec.count}};
      return run_sample(spspec, sp_out, std::move(manifest));
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const gk::FormatError& e) {
    std::cerr << "input format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const gk::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalytic;
  }
  return kExitUsage;
}
