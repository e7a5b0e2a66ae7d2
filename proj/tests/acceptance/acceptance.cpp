// Acceptance suite. Each criterion prints one line:
//   [PASS] acN <name>: <measurements>
// Usage: acceptance [ac1 ... ac10] --cli <graphconc binary> --configs <dir>
// With no criterion names every criterion runs. Exit status is 0 iff all pass.

#include <CLI11.hpp>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graphconc/concentration.hpp"
#include "graphconc/graphon.hpp"
#include "graphconc/instances.hpp"
#include "graphconc/perturbation.hpp"
#include "graphconc/quasirandom.hpp"
#include "graphconc/random_graphs.hpp"

namespace fs = std::filesystem;
using namespace graphconc;

namespace {

struct Context {
  std::string cli;
  std::string configs;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- criteria

Outcome ac1(const Context&) {
  Xoshiro256 rng(0xA11CE);
  int ok = 0;
  double worst = -INFINITY;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 5 + rng() % 56;
    const auto b1 = random_symmetric(n, rng);
    const auto b2 = b1 + random_symmetric(n, rng, rng.uniform());
    const auto r = interlacing_report(b1, b2);
    if (r.max_eigen_gap <= r.norm_gap + 1e-9) ++ok;
    worst = std::max(worst, r.max_eigen_gap - r.norm_gap);
  }
  return {ok == 500, fmt("%d/500 pairs satisfy gap <= ||B1-B2|| + 1e-9 (max gap - norm = %.3g)", ok, worst)};
}

Outcome ac2(const Context&) {
  Xoshiro256 rng(0x601D);
  int gt_ok = 0;
  int dom_ok = 0;
  double worst_gt = -INFINITY;
  double worst_dom = INFINITY;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 20;
    const double s = 2.0 / std::sqrt(static_cast<double>(n));
    const auto a = random_symmetric(n, rng, s);
    const auto b = random_symmetric(n, rng, s);
    const auto r = golden_thompson_report(a, b);
    if (r.lhs <= r.rhs + 1e-9 * std::max(1.0, r.rhs)) ++gt_ok;
    worst_gt = std::max(worst_gt, (r.lhs - r.rhs) / std::max(1.0, r.rhs));
  }
  for (int k = 0; k < 200; ++k) {
    const auto c = random_contraction(1 + rng() % 20, rng);
    const auto d = exp_quadratic_dominance_check(c);
    if (d.slack >= -1e-9) ++dom_ok;
    worst_dom = std::min(worst_dom, d.slack);
  }
  return {gt_ok == 200 && dom_ok == 200,
          fmt("Golden-Thompson %d/200 (max relative excess %.3g); e^C <= I+C+C^2 %d/200 (min slack %.3g)", gt_ok,
              worst_gt, dom_ok, worst_dom)};
}

Outcome ac3(const Context&) {
  const auto gen = IncrementGenerator::diagonal_rademacher(8);
  const double t_sharp = std::sqrt(100.0 * std::log(8.0));
  const std::vector<double> ts{10, 20, 30, 40, 50, t_sharp};
  const std::size_t trials = 10000;
  const auto est = empirical_tail(gen, 100, trials, ts, 0x7A11);
  bool ok = std::abs(est.sigma2 - 100.0) < 1e-12;
  std::string rows;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const auto& r = est.rows[k];
    const double bound = freedman_bound(8, r.t, 100.0, 1.0);
    const double b = std::min(bound, 1.0);
    const double slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
    ok = ok && r.empirical_prob <= bound + slack;
    rows += fmt(" t=%g:%.4f<=%.4f", r.t, r.empirical_prob, bound);
  }
  const double sharp = est.rows.back().empirical_prob;
  ok = ok && sharp >= 0.01;
  return {ok, "tail" + rows + fmt("; P(lambda_max >= %.2f) = %.4f (need >= 0.01)", t_sharp, sharp)};
}

Outcome ac4(const Context&) {
  const auto er = model_erdos_renyi(400, 0.2);
  const auto adj = deviation_experiment(er, 0.1, 200, 0xE4, GraphMatrix::Adjacency);
  const auto lap = deviation_experiment(er, 0.1, 200, 0xE5, GraphMatrix::Laplacian);
  const auto perc = deviation_experiment(model_percolation(complete_graph(200), 0.5), 0.1, 200, 0xE6,
                                         GraphMatrix::Laplacian);
  const bool ok = adj.failure_fraction <= 0.1 && lap.failure_fraction <= 0.1 && perc.failure_fraction <= 0.1;
  return {ok, fmt("failure fractions: ER adjacency %.3f, ER Laplacian %.3f, K200 percolation Laplacian %.3f "
                  "(limit 0.1)",
                  adj.failure_fraction, lap.failure_fraction, perc.failure_fraction)};
}

Outcome ac5a(const Context&) {
  const auto res = percolation_gap_experiment(complete_graph(200), 0.5, 0.1, 200, 0x5A);
  const double bound = laplacian_bound(0.5 * 199.0, 200.0, 0.1);
  double worst = 0.0;
  for (const auto& t : res.trials) worst = std::max(worst, t.abs_diff);
  const bool same_bound = std::abs(res.trials.front().bound - bound) < 1e-12;
  return {same_bound && res.within_fraction >= 0.9,
          fmt("|gap(G) - gap(G_p)| <= %.4f in %.1f%% of 200 trials (need >= 90%%; max diff %.4f)", bound,
              100.0 * res.within_fraction, worst)};
}

Outcome ac5b(const Context&) {
  const double n = 200.0;
  const double p = 0.5;
  bool ok = true;
  std::string rows;
  for (double k : {1.0, 2.0, 4.0}) {
    const double pd = k * std::log(n);
    const double ours = laplacian_bound(pd, n, 0.1);
    const double ref = chung_horn_reference(n, p, pd / p, 1.0, 1.0);
    ok = ok && ours < ref;
    rows += fmt(" p*d=%.2f: %.3f vs %.3f;", pd, ours, ref);
  }
  return {ok, "laplacian_bound vs reference (c1=c2=1) at n=200, delta=0.1:" + rows};
}

Outcome ac6(const Context&) {
  const auto rank_one = Kernel::rank_one_product(4.0, 1.0);
  int r1_ok = 0;
  double r1_worst = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    const auto s = sample_inhomogeneous(rank_one, 2000, 0.2, derive_seed(0x6A, t));
    const double top = lambda_max(scaled_adjacency(s.graph, 0.2));
    const double err = std::abs(top - 4.0 / 3.0);
    r1_worst = std::max(r1_worst, err);
    if (err <= 0.1) ++r1_ok;
  }
  Eigen::MatrixXd v(2, 2);
  v << 0.8, 0.2, 0.2, 0.8;
  const auto block = Kernel::block(v);
  const auto ref = leading_reference_values(reference_spectrum(block), 2);
  int b_ok = 0;
  double b_worst = 0.0;
  for (std::size_t t = 0; t < 50; ++t) {
    const auto s = sample_inhomogeneous(block, 1000, 0.5, derive_seed(0x6B, t));
    const auto top = leading_eigenvalues(scaled_adjacency(s.graph, 0.5), 2);
    const double err = std::max(std::abs(top[0] - ref[0]), std::abs(top[1] - ref[1]));
    b_worst = std::max(b_worst, err);
    if (err <= 0.05) ++b_ok;
  }
  const bool ok = r1_ok >= 48 && b_ok >= 45 && std::abs(ref[0] - 0.5) < 1e-12 && std::abs(ref[1] - 0.3) < 1e-12;
  return {ok, fmt("4xy: %d/50 within 0.1 of 4/3 (max err %.4f, need 95%%); block: %d/50 within 0.05 of "
                  "{0.5, 0.3} (max err %.4f, need 90%%)",
                  r1_ok, r1_worst, b_ok, b_worst)};
}

Outcome ac7(const Context&) {
  Xoshiro256 rng(0x7E);
  const auto kernel = Kernel::rank_one_product(4.0, 1.0);
  bool exact = true;
  double proj_err = 0.0;
  double conj_err = 0.0;
  double transfer = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const std::size_t n = 5 + rng() % 46;
    const double p = 0.2;
    const auto s = sample_inhomogeneous(kernel, n, p, derive_seed(0x7F, t));
    const auto sc = step_coordinates(s.points);
    exact = exact && (sc.E * sc.H == Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    const auto a = scaled_adjacency(s.graph, p);
    const auto fam = embedded_projector_family_check(a, sc);
    proj_err = std::max({proj_err, fam.idempotence_error, fam.symmetry_error, fam.orthogonality_error});
    const Eigen::MatrixXd realized = realize_step_operator(graph_step_kernel(s.graph, s.points, p), sc.refinement);
    conj_err = std::max(conj_err, (realized - sc.H * a.dense() * sc.E).cwiseAbs().maxCoeff());
    transfer = std::max(transfer, nonzero_spectrum_transfer_error(s.graph, s.points, p));
  }
  const bool ok = exact && proj_err <= 1e-9 && conj_err <= 1e-12 && transfer <= 1e-10;
  return {ok, fmt("E H = I exactly: %s; max projector-family error %.3g (limit 1e-9); T_G vs H(A/pn)E %.3g; "
                  "nonzero spectrum transfer %.3g (limit 1e-10)",
                  exact ? "yes" : "no", proj_err, conj_err, transfer)};
}

Outcome ac8(const Context&) {
  Xoshiro256 rng(0x8A);
  int mult_ok = 0;
  int proj_ok = 0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 + rng() % 30;
    const double gamma = 0.05 + 0.25 * rng.uniform();
    const double a = -0.5 - rng.uniform();
    const double b = 0.5 + rng.uniform();
    const double eps = 0.99 * gamma * rng.uniform();
    const auto inst = gapped_perturbation_instance(n, -3.0, 3.0, a, b, gamma, eps, rng);
    const double lo = eps + 0.01 + rng.uniform();
    const auto m = multiplicity_lemma_check(inst.v, inst.w, IntervalSet{{lo, lo + 2.0 * rng.uniform()}, {-3.0, -lo}});
    if (m.holds_forward && m.holds_backward) ++mult_ok;
    if (projector_lemma_check(inst.v, inst.w, a, b, gamma).holds) ++proj_ok;
  }
  int contour_ok = 0;
  int halving = 0;
  double worst = 0.0;
  double worst_ratio = INFINITY;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + rng() % 20;
    const auto inst = gapped_perturbation_instance(n, -1.5, 1.5, -0.3, 0.6, 0.1, 0.0, rng);
    const auto direct = eigen_range_projector(inst.v, -0.3, 0.6).matrix;
    const double e1 = spectral_norm(contour_projector(inst.v, -0.3, 0.6, 0.1, 1000) - direct);
    const double e2 = spectral_norm(contour_projector(inst.v, -0.3, 0.6, 0.1, 2000) - direct);
    if (e2 <= 1e-6) ++contour_ok;
    if (e2 <= 0.5 * e1) ++halving;
    worst = std::max(worst, e2);
    worst_ratio = std::min(worst_ratio, e1 / e2);
  }
  const bool ok = mult_ok == 500 && proj_ok == 500 && contour_ok == 100 && halving == 100;
  return {ok, fmt("multiplicity %d/500, projector bound %d/500; contour within 1e-6: %d/100 (max %.3g), "
                  "error halves on doubling: %d/100 (min ratio %.2f)",
                  mult_ok, proj_ok, contour_ok, worst, halving, worst_ratio)};
}

std::int64_t brute_c4(const Graph& g) {
  const std::size_t n = g.order();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (const auto& [i, j] : g.edges()) adj[i][j] = adj[j][i] = true;
  std::int64_t c = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t cc = 0; cc < n; ++cc)
        for (std::size_t d = 0; d < n; ++d)
          if (a != b && a != cc && a != d && b != cc && b != d && cc != d && adj[a][b] && adj[b][cc] && adj[cc][d] &&
              adj[d][a])
            ++c;
  return c;
}

double recount_q4(const Graph& g, double p) {
  double best = 0.0;
  for (std::uint32_t s = 0; s < (1u << g.order()); ++s) {
    long long e = 0;
    for (const auto& [i, j] : g.edges())
      if ((s >> i & 1u) && (s >> j & 1u)) ++e;
    const double k = std::popcount(s);
    best = std::max(best, std::abs(static_cast<double>(e) - p * k * k / 2.0));
  }
  return best;
}

double brute_cut(const StepKernel& sk) {
  const std::size_t n = sk.resolution();
  const Eigen::MatrixXd& v = sk.values().dense();
  double best = 0.0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1u)
        for (std::size_t j = 0; j < n; ++j) col[j] += v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (std::uint32_t t = 0; t < (1u << n); ++t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (t >> j & 1u) acc += col[j];
      best = std::max(best, std::abs(acc));
    }
  }
  return best / static_cast<double>(n * n);
}

Outcome ac9(const Context&) {
  Xoshiro256 rng(0x9C);
  int c4 = 0;
  for (int k = 0; k < 200; ++k) {
    const auto g = random_simple_graph(1 + rng() % 10, rng.uniform(), rng);
    if (labeled_c4_count(g) == brute_c4(g)) ++c4;
  }
  int q4 = 0;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 1 + rng() % 12;
    auto g = random_simple_graph(n, rng.uniform(), rng);
    std::vector<Graph::Edge> edges = g.edges();
    for (std::size_t v = 0; v < n; ++v)
      if (rng.uniform() < 0.2) edges.emplace_back(v, v);
    g = Graph(n, edges);
    const double p = static_cast<double>(rng() % 9 + 1) / 10.0;
    if (q4_discrepancy(g, p) == recount_q4(g, p)) ++q4;
  }
  int cut = 0;
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 1 + rng() % 10;
    SymmetricMatrix v(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) v.set(i, j, static_cast<double>(static_cast<int>(rng() % 7) - 3));
    const StepKernel sk(v);
    if (cut_norm_step(sk) == brute_cut(sk)) ++cut;
  }
  return {c4 == 200 && q4 == 200 && cut == 60,
          fmt("labeled C4 %d/200 exact; Q4 discrepancy %d/200 exact; cut norm %d/60 exact", c4, q4, cut)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome ac10(const Context& ctx) {
  if (ctx.cli.empty() || ctx.configs.empty()) return {false, "needs --cli and --configs"};
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(ctx.configs))
    if (e.path().extension() == ".json") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  const auto tmp = fs::temp_directory_path();
  int same = 0;
  std::string bad;
  for (const auto& cfg : configs) {
    std::string outs[2];
    bool ran = true;
    for (int r = 0; r < 2; ++r) {
      const auto out = tmp / ("graphconc_ac10_" + std::to_string(r) + ".csv");
      fs::remove(out);
      const std::string cmd = ctx.cli + " run " + cfg.string() + " --out " + out.string() + " > /dev/null";
      const int status = std::system(cmd.c_str());
      ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      outs[r] = slurp(out);
    }
    if (ran && !outs[0].empty() && outs[0] == outs[1]) ++same;
    else bad += " " + cfg.filename().string();
  }
  const bool ok = !configs.empty() && same == static_cast<int>(configs.size());
  return {ok, fmt("%d/%zu configs produce byte-identical CSV on rerun", same, configs.size()) +
                  (bad.empty() ? "" : "; differing:" + bad)};
}

struct Criterion {
  const char* id;
  const char* name;
  double limit_seconds;  // 0 = no runtime limit
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"ac1", "interlacing suite", 10.0, ac1},
      {"ac2", "trace and exponential inequalities", 5.0, ac2},
      {"ac3", "Freedman tail validity", 60.0, ac3},
      {"ac4", "deviation bounds Monte Carlo", 600.0, ac4},
      {"ac5a", "spectral gap under percolation", 0.0, ac5a},
      {"ac5b", "gap bound below Chung-Horn reference", 0.0, ac5b},
      {"ac6", "kernel spectrum estimation", 900.0, ac6},
      {"ac7", "step embedding algebra", 0.0, ac7},
      {"ac8", "perturbation lemmas and contour projector", 0.0, ac8},
      {"ac9", "oracle equivalences", 0.0, ac9},
      {"ac10", "CLI determinism", 0.0, ac10},
  };

  CLI::App app{"acceptance criteria"};
  std::vector<std::string> selected;
  Context ctx;
  app.add_option("criteria", selected, "criteria to run (default: all)");
  app.add_option("--cli", ctx.cli, "path to the graphconc binary");
  app.add_option("--configs", ctx.configs, "directory of sample configs");
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(ctx);
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.limit_seconds > 0.0) {
      timing += fmt(" (limit %.0f s)", c.limit_seconds);
      if (secs > c.limit_seconds) out.pass = false;
    }
    std::printf("[%s] %s %s: %s [%s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
