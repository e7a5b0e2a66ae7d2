#pragma once

// The six experiments behind `graphconc run`, and the CSV schema of each.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "graphconc/cli/config.hpp"
#include "graphconc/cli/csv.hpp"
#include "graphconc/concentration.hpp"
#include "graphconc/graphon.hpp"
#include "graphconc/instances.hpp"
#include "graphconc/perturbation.hpp"
#include "graphconc/quasirandom.hpp"
#include "graphconc/random_graphs.hpp"

namespace graphconc::cli {

struct ColumnDoc {
  const char* name;
  const char* meaning;
};

struct Schema {
  Experiment experiment;
  std::vector<ColumnDoc> columns;
  std::vector<ColumnDoc> summary;
};

inline const std::vector<Schema>& schemas() {
  static const std::vector<Schema> all = {
      {Experiment::Deviation,
       {{"trial", "trial index"},
        {"observed", "||M - M_typ|| for the sampled graph (M = adjacency or normalized Laplacian)"},
        {"bound", "high-probability bound at the configured delta"},
        {"within", "1 if observed <= bound"}},
       {{"failure_fraction", "share of trials with observed > bound"},
        {"bound", "the bound used in every row"},
        {"d_min", "smallest typical degree"},
        {"d_max", "largest typical degree"}}},
      {Experiment::FreedmanTail,
       {{"t", "threshold"},
        {"empirical", "share of trials with lambda_max(Z_n) >= t"},
        {"freedman_bound", "d exp(-t^2 / (8 sigma^2 + 4 M t))"},
        {"mc_slack", "3 sqrt(b (1 - b) / trials) with b = min(freedman_bound, 1)"},
        {"within", "1 if empirical <= freedman_bound + mc_slack"}},
       {{"sigma2", "lambda_max of the predictable quadratic variation W_n"},
        {"M", "almost-sure bound on ||X_k||"},
        {"trials", "number of simulated paths"}}},
      {Experiment::PercolationGap,
       {{"trial", "trial index"},
        {"gap_base", "spectral gap of the base graph G"},
        {"gap_sample", "spectral gap of the percolated sample G_p"},
        {"abs_diff", "|gap_base - gap_sample|"},
        {"norm_diff", "||L_G - L_{G_p}||"},
        {"bound", "Laplacian deviation bound at p * d_min(G)"},
        {"within", "1 if abs_diff <= bound"}},
       {{"within_fraction", "share of trials with abs_diff <= bound"},
        {"bound", "the bound used in every row"},
        {"chung_horn_reference", "reference bound c1 sqrt(ln n/(p d)) + c2 (ln n)^1.5/(p d (ln ln n)^1.5)"}}},
      {Experiment::GraphonSpectrum,
       {{"trial", "trial index"},
        {"rank", "1 for the largest eigenvalue, 2 for the next, ..."},
        {"eigenvalue", "eigenvalue of A/(pn) at this rank"},
        {"reference", "eigenvalue of the kernel operator at this rank (0 past its nonzero spectrum)"},
        {"abs_error", "|eigenvalue - reference|"},
        {"within", "1 if abs_error <= tolerance"},
        {"embed_deviation", "||A/(pn) - E T_kappa H|| for the trial"},
        {"operator_distance", "upper bound on ||T_G - T_kappa|| for the trial"}},
       {{"within_fraction", "share of trials with every rank within tolerance"},
        {"theta_bound", "theta(n) error bound (only when a Lipschitz constant is known)"},
        {"mean_embed_deviation", "mean of embed_deviation"},
        {"mean_operator_distance", "mean of operator_distance"},
        {"multiplicity_transfer_rate", "share of applicable (trial, interval) pairs where both counts transfer"},
        {"projector_rate", "share of applicable (trial, eigenvalue) pairs within the projector bound"}}},
      {Experiment::Quasirandom,
       {{"trial", "trial index"},
        {"n", "number of vertices"},
        {"edges", "number of edges"},
        {"c4_labeled", "labeled 4-cycle count"},
        {"lambda_max", "largest adjacency eigenvalue"},
        {"second_abs_eigenvalue", "largest |eigenvalue| after removing lambda_max"},
        {"p1_deviation", "||A - p(J - I)||"},
        {"q3_edges", "1 if edges >= (1 - slack) p n^2 / 2"},
        {"q3_top", "1 if |lambda_max - pn| <= slack n"},
        {"q3_bulk", "1 if second_abs_eigenvalue <= slack n"},
        {"p1_implies_q3", "1 if the P1 => Q3 consequences hold (vacuous when P1 fails)"},
        {"q4_discrepancy", "max over S of |e(S) - p|S|^2/2| (NA when n > 20)"}},
       {{"q3_rate", "share of trials satisfying all three Q3 checks"},
        {"p1_implies_q3_rate", "share of trials with p1_implies_q3 = 1"},
        {"mean_p1_deviation_over_n", "mean of p1_deviation / n"}}},
      {Experiment::PerturbationSuite,
       {{"trial", "trial index"},
        {"eps", "||V - W||"},
        {"m_v", "eigenvalues of V in S"},
        {"m_w_dilated", "eigenvalues of W in S dilated by eps"},
        {"m_w", "eigenvalues of W in S"},
        {"m_v_dilated", "eigenvalues of V in S dilated by eps"},
        {"multiplicity_ok", "1 if m_v <= m_w_dilated and m_w <= m_v_dilated"},
        {"projector_lhs", "||Pi_[a,b](V) - Pi_[a,b](W)||"},
        {"projector_rhs", "(b - a + 2 gamma) eps / (pi (gamma^2 - gamma eps))"},
        {"projector_ok", "1 if projector_lhs <= projector_rhs"},
        {"contour_error", "||contour projector - eigendecomposition projector|| for V"}},
       {{"multiplicity_rate", "share of trials with multiplicity_ok = 1"},
        {"projector_rate", "share of trials with projector_ok = 1"},
        {"max_contour_error", "largest contour_error"}}},
  };
  return all;
}

inline const Schema& schema_for(Experiment e) {
  for (const auto& s : schemas())
    if (s.experiment == e) return s;
  throw Error(Errc::InvalidParameter, "no schema for experiment");
}

inline CsvReport empty_report(Experiment e) {
  std::vector<std::string> cols;
  for (const auto& c : schema_for(e).columns) cols.emplace_back(c.name);
  return CsvReport(std::move(cols));
}

namespace detail {

inline CsvReport run_deviation(const ExperimentConfig& c) {
  const auto model = c.model_kind == "erdos-renyi" ? model_erdos_renyi(c.n, c.p)
                                                   : model_percolation(make_graph(c.graph), c.p);
  const auto res = deviation_experiment(model, c.delta, c.trials, c.master_seed, c.matrix);
  auto rep = empty_report(c.experiment);
  for (std::size_t k = 0; k < res.reports.size(); ++k) {
    const auto& r = res.reports[k];
    rep.add_row({format_number(k), format_number(r.observed), format_number(r.bound), format_bool(r.within)});
  }
  rep.add_summary("failure_fraction", res.failure_fraction);
  rep.add_summary("bound", res.reports.front().bound);
  rep.add_summary("d_min", model.d_min());
  rep.add_summary("d_max", model.d_max());
  return rep;
}

inline IncrementGenerator make_generator(const ExperimentConfig& c) {
  if (c.generator_kind == "diagonal-rademacher") return IncrementGenerator::diagonal_rademacher(c.d, c.scale);
  if (c.generator_kind == "rank-one-sign") return IncrementGenerator::rank_one_sign(c.d, c.vector_seed, c.scale);
  const Graph g = make_graph(c.graph);
  std::vector<EdgeIncrement> edges;
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j, c.q});
  return IncrementGenerator::bernoulli_centered_edge(g.order(), std::move(edges), c.scale);
}

inline CsvReport run_freedman_tail(const ExperimentConfig& c) {
  const auto gen = make_generator(c);
  const auto est = empirical_tail(gen, c.steps, c.trials, c.thresholds, c.master_seed);
  auto rep = empty_report(c.experiment);
  for (const auto& r : est.rows) {
    const double b = std::min(r.freedman_value, 1.0);
    const double slack = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(c.trials));
    rep.add_row({format_number(r.t), format_number(r.empirical_prob), format_number(r.freedman_value),
                 format_number(slack), format_bool(r.empirical_prob <= r.freedman_value + slack)});
  }
  rep.add_summary("sigma2", est.sigma2);
  rep.add_summary("M", est.M);
  rep.add_summary("trials", static_cast<double>(est.trials));
  return rep;
}

inline CsvReport run_percolation_gap(const ExperimentConfig& c) {
  const Graph g = make_graph(c.graph);
  const auto res = percolation_gap_experiment(g, c.p, c.delta, c.trials, c.master_seed);
  auto rep = empty_report(c.experiment);
  for (std::size_t k = 0; k < res.trials.size(); ++k) {
    const auto& t = res.trials[k];
    rep.add_row({format_number(k), format_number(t.gap_base), format_number(t.gap_sample), format_number(t.abs_diff),
                 format_number(t.norm_diff), format_number(t.bound), format_bool(t.within)});
  }
  const auto deg = g.degrees();
  const double d_g = static_cast<double>(*std::min_element(deg.begin(), deg.end()));
  rep.add_summary("within_fraction", res.within_fraction);
  rep.add_summary("bound", res.trials.front().bound);
  rep.add_summary("chung_horn_reference",
                  chung_horn_reference(static_cast<double>(g.order()), c.p, d_g, c.c1, c.c2));
  return rep;
}

inline CsvReport run_graphon_spectrum(const ExperimentConfig& c) {
  const Kernel kernel = make_kernel(c.kernel);
  KernelComparisonOptions opt;
  opt.eps = c.eps;
  opt.lipschitz = c.kernel.L;
  opt.sup_bound = c.kernel.K;
  opt.c_const = c.c_const;
  if (!c.intervals.empty()) opt.interval_sets.push_back(IntervalSet(c.intervals));
  opt.gamma = c.gamma;
  opt.top_k = c.top_k;
  const auto res = kernel_comparison_check(kernel, c.p, c.n, c.trials, c.master_seed, opt);

  auto rep = empty_report(c.experiment);
  std::size_t all_within = 0;
  double embed_sum = 0.0;
  double op_sum = 0.0;
  std::size_t mult_applicable = 0, mult_ok = 0, proj_applicable = 0, proj_ok = 0;
  for (std::size_t k = 0; k < res.trials.size(); ++k) {
    const auto& t = res.trials[k];
    bool every = true;
    for (std::size_t r = 0; r < t.leading.size(); ++r) {
      const double err = std::abs(t.leading[r] - res.reference[r]);
      const bool within = err <= c.tolerance;
      every = every && within;
      rep.add_row({format_number(k), format_number(r + 1), format_number(t.leading[r]), format_number(res.reference[r]),
                   format_number(err), format_bool(within), format_number(t.embed_deviation),
                   format_number(t.operator_distance)});
    }
    if (every) ++all_within;
    embed_sum += t.embed_deviation;
    op_sum += t.operator_distance;
    for (const auto& m : t.multiplicity)
      if (m.applicable) {
        ++mult_applicable;
        if (m.forward && m.backward) ++mult_ok;
      }
    for (const auto& pc : t.projectors)
      if (pc.applicable) {
        ++proj_applicable;
        if (pc.lhs <= pc.rhs) ++proj_ok;
      }
  }
  const double trials = static_cast<double>(res.trials.size());
  rep.add_summary("within_fraction", static_cast<double>(all_within) / trials);
  if (res.theta) rep.add_summary("theta_bound", *res.theta);
  rep.add_summary("mean_embed_deviation", embed_sum / trials);
  rep.add_summary("mean_operator_distance", op_sum / trials);
  if (mult_applicable > 0)
    rep.add_summary("multiplicity_transfer_rate", static_cast<double>(mult_ok) / static_cast<double>(mult_applicable));
  if (proj_applicable > 0)
    rep.add_summary("projector_rate", static_cast<double>(proj_ok) / static_cast<double>(proj_applicable));
  return rep;
}

inline CsvReport run_quasirandom(const ExperimentConfig& c) {
  const bool random = c.graph.kind == "erdos-renyi";
  std::optional<Graph> fixed;
  if (!random) fixed = make_graph(c.graph);
  auto rep = empty_report(c.experiment);
  std::size_t q3 = 0, p42 = 0;
  double p1_sum = 0.0;
  for (std::size_t k = 0; k < c.trials; ++k) {
    const Graph g = random ? sample_graph(model_erdos_renyi(c.graph.n, c.graph.p), derive_seed(c.master_seed, k))
                           : *fixed;
    const auto r = quasirandom_report(g, c.p, c.slack);
    rep.add_row({format_number(k), format_number(r.n), format_number(r.edge_count),
                 std::to_string(r.labeled_c4_count), format_number(r.lambda_max),
                 format_number(r.second_eigen_absmax), format_number(r.p1_deviation), format_bool(r.q3.edges_ok),
                 format_bool(r.q3.top_eigen_ok), format_bool(r.q3.bulk_ok), format_bool(r.p1_implies_q3_ok),
                 r.q4_discrepancy ? format_number(*r.q4_discrepancy) : std::string("NA")});
    if (r.q3.edges_ok && r.q3.top_eigen_ok && r.q3.bulk_ok) ++q3;
    if (r.p1_implies_q3_ok) ++p42;
    p1_sum += r.p1_deviation / static_cast<double>(r.n);
  }
  const double trials = static_cast<double>(c.trials);
  rep.add_summary("q3_rate", static_cast<double>(q3) / trials);
  rep.add_summary("p1_implies_q3_rate", static_cast<double>(p42) / trials);
  rep.add_summary("mean_p1_deviation_over_n", p1_sum / trials);
  return rep;
}

inline CsvReport run_perturbation_suite(const ExperimentConfig& c) {
  const double gamma = *c.gamma;
  const IntervalSet s{c.interval};
  auto rep = empty_report(c.experiment);
  std::size_t mult = 0, proj = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < c.trials; ++k) {
    Xoshiro256 rng(derive_seed(c.master_seed, k));
    const auto inst = gapped_perturbation_instance(c.n, c.lo, c.hi, c.a, c.b, gamma, c.eps_fraction * gamma, rng);
    const auto m = multiplicity_lemma_check(inst.v, inst.w, s);
    const auto pc = projector_lemma_check(inst.v, inst.w, c.a, c.b, gamma);
    const double err = spectral_norm(contour_projector(inst.v, c.a, c.b, gamma, c.quad_points) -
                                     eigen_range_projector(inst.v, c.a, c.b).matrix);
    const bool m_ok = m.holds_forward && m.holds_backward;
    rep.add_row({format_number(k), format_number(m.eps), format_number(m.m_v), format_number(m.m_w_dilated),
                 format_number(m.m_w), format_number(m.m_v_dilated), format_bool(m_ok), format_number(pc.lhs),
                 format_number(pc.rhs), format_bool(pc.holds), format_number(err)});
    if (m_ok) ++mult;
    if (pc.holds) ++proj;
    worst = std::max(worst, err);
  }
  const double trials = static_cast<double>(c.trials);
  rep.add_summary("multiplicity_rate", static_cast<double>(mult) / trials);
  rep.add_summary("projector_rate", static_cast<double>(proj) / trials);
  rep.add_summary("max_contour_error", worst);
  return rep;
}

}  // namespace detail

/// Runs a validated config. Trials run in index order, so output depends
/// only on the config.
inline CsvReport run(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::Deviation: return detail::run_deviation(c);
    case Experiment::FreedmanTail: return detail::run_freedman_tail(c);
    case Experiment::PercolationGap: return detail::run_percolation_gap(c);
    case Experiment::GraphonSpectrum: return detail::run_graphon_spectrum(c);
    case Experiment::Quasirandom: return detail::run_quasirandom(c);
    case Experiment::PerturbationSuite: return detail::run_perturbation_suite(c);
  }
  throw Error(Errc::InvalidParameter, "unknown experiment");
}

/// Column and summary documentation for --help.
inline std::string schema_help() {
  std::string out = "CSV output: a header row, data rows, then rows \"#summary,<metric>,<value>\"\n"
                    "padded to the header width. Numbers use 12 significant digits; flags are 0/1.\n"
                    "--emit-plot-data also writes <out>.plot.csv with columns experiment,row,variable,value\n"
                    "(one line per numeric data cell).\n";
  for (const auto& s : schemas()) {
    out += "\n";
    out += experiment_name(s.experiment);
    out += " columns:\n";
    for (const auto& col : s.columns) out += "  " + std::string(col.name) + ": " + col.meaning + "\n";
    out += "  summary metrics:\n";
    for (const auto& m : s.summary) out += "    " + std::string(m.name) + ": " + m.meaning + "\n";
  }
  return out;
}

}  // namespace graphconc::cli
