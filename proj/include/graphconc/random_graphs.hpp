#pragma once

// Random graphs with independent edges, their typical adjacency and
// Laplacian matrices, and the concentration bounds relating the two.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/graph.hpp"
#include "graphconc/linalg.hpp"
#include "graphconc/rng.hpp"

namespace graphconc {

/// Symmetric edge probabilities p(i,j) in [0,1], loops allowed.
///
/// Probabilities are stored as scale * pattern. Models with a common factor
/// (Erdos-Renyi, percolation) keep the 0/1 pattern, so degree sums and the
/// typical Laplacian are computed from integer weights and the factor never
/// introduces rounding.
class EdgeProbabilityModel {
 public:
  static EdgeProbabilityModel from_probabilities(SymmetricMatrix prob) {
    return EdgeProbabilityModel(std::move(prob), 1.0);
  }

  /// p(i,j) = scale * pattern(i,j).
  static EdgeProbabilityModel scaled(SymmetricMatrix pattern, double scale) {
    return EdgeProbabilityModel(std::move(pattern), scale);
  }

  std::size_t order() const noexcept { return pattern_.order(); }
  double scale() const noexcept { return scale_; }
  const SymmetricMatrix& pattern() const noexcept { return pattern_; }
  const SymmetricMatrix& probabilities() const noexcept { return prob_; }
  double prob(std::size_t i, std::size_t j) const { return prob_(i, j); }

  /// Expected degrees sum_j p(i,j).
  const std::vector<double>& typical_degrees() const noexcept { return degrees_; }
  double d_min() const { return *std::min_element(degrees_.begin(), degrees_.end()); }
  double d_max() const { return *std::max_element(degrees_.begin(), degrees_.end()); }

 private:
  EdgeProbabilityModel(SymmetricMatrix pattern, double scale)
      : pattern_(std::move(pattern)), prob_(pattern_ * scale), scale_(scale) {
    require(pattern_.order() >= 1, Errc::InvalidParameter, "model needs at least one vertex");
    require(std::isfinite(scale) && scale >= 0.0, Errc::InvalidParameter, "model scale must be >= 0");
    const auto& p = prob_.dense();
    require(p.minCoeff() >= 0.0 && p.maxCoeff() <= 1.0, Errc::InvalidParameter,
            "edge probabilities must lie in [0,1]");
    degrees_.resize(order());
    for (std::size_t i = 0; i < order(); ++i)
      degrees_[i] = scale_ * pattern_.dense().row(static_cast<Eigen::Index>(i)).sum();
  }

  SymmetricMatrix pattern_;
  SymmetricMatrix prob_;
  double scale_;
  std::vector<double> degrees_;
};

/// p(i,j) = p off the diagonal, 0 on it.
inline EdgeProbabilityModel model_erdos_renyi(std::size_t n, double p) {
  require(n >= 2, Errc::InvalidParameter, "model_erdos_renyi: n must be >= 2");
  require(p > 0.0 && p < 1.0, Errc::InvalidParameter, "model_erdos_renyi: p must lie in (0,1)");
  auto pattern = SymmetricMatrix::constant(n, 1.0) - SymmetricMatrix::identity(n);
  return EdgeProbabilityModel::scaled(std::move(pattern), p);
}

inline SymmetricMatrix adjacency(const Graph& g) {
  SymmetricMatrix a(g.order());
  for (const auto& [i, j] : g.edges()) a.set(i, j, 1.0);
  return a;
}

/// Bond percolation on g: every edge kept independently with probability p.
inline EdgeProbabilityModel model_percolation(const Graph& g, double p) {
  require(p > 0.0 && p < 1.0, Errc::InvalidParameter, "model_percolation: p must lie in (0,1)");
  return EdgeProbabilityModel::scaled(adjacency(g), p);
}

/// Includes each pair i <= j independently, visiting pairs row by row and
/// consuming one uniform draw per pair.
inline Graph sample_graph(const EdgeProbabilityModel& model, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  const std::size_t n = model.order();
  const auto& p = model.probabilities().dense();
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (rng.uniform() < p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
        edges.emplace_back(i, j);
    }
  }
  return Graph(n, std::move(edges));
}

/// I - T W T with T = diag(deg^{-1/2}), and T(i,i) = 0 for zero degree
/// (so an isolated vertex keeps L(i,i) = 1).
inline SymmetricMatrix normalized_laplacian(const SymmetricMatrix& weights) {
  const auto n = static_cast<Eigen::Index>(weights.order());
  const Eigen::MatrixXd& w = weights.dense();
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double deg = w.row(i).sum();
    t(i) = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd l(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) l(i, j) = (i == j ? 1.0 : 0.0) - t(i) * w(i, j) * t(j);
  return SymmetricMatrix::from_dense(l);
}

inline SymmetricMatrix laplacian(const Graph& g) { return normalized_laplacian(adjacency(g)); }

inline SymmetricMatrix typical_adjacency(const EdgeProbabilityModel& model) { return model.probabilities(); }

/// Laplacian of the weighted graph with weights p(i,j). Computed from the
/// pattern, which gives the same matrix because L is invariant under scaling.
inline SymmetricMatrix typical_laplacian(const EdgeProbabilityModel& model) {
  require(model.d_min() > 0.0, Errc::ZeroDegree, "typical_laplacian: some typical degree is zero");
  return normalized_laplacian(model.pattern());
}

/// 4 sqrt(Delta ln(n/delta)).
inline double adjacency_bound(double max_degree, double n, double delta) {
  require(delta > 0.0 && delta <= 0.5, Errc::InvalidParameter, "adjacency_bound: delta must lie in (0,1/2]");
  require(max_degree > 0.0, Errc::InvalidParameter, "adjacency_bound: Delta must be positive");
  require(n >= 1.0, Errc::InvalidParameter, "adjacency_bound: n must be >= 1");
  return 4.0 * std::sqrt(max_degree * std::log(n / delta));
}

/// 14 sqrt(ln(4n/delta) / d).
inline double laplacian_bound(double min_degree, double n, double delta) {
  require(delta > 0.0 && delta <= 0.5, Errc::InvalidParameter, "laplacian_bound: delta must lie in (0,1/2]");
  require(min_degree > 0.0, Errc::InvalidParameter, "laplacian_bound: d must be positive");
  require(n >= 1.0, Errc::InvalidParameter, "laplacian_bound: n must be >= 1");
  return 14.0 * std::sqrt(std::log(4.0 * n / delta) / min_degree);
}

enum class GraphMatrix { Adjacency, Laplacian };

struct DeviationReport {
  std::size_t n = 0;
  double d_min = 0.0;
  double d_max = 0.0;
  double delta = 0.0;
  double observed = 0.0;
  double bound = 0.0;
  bool within = false;
};

struct DeviationExperiment {
  std::vector<DeviationReport> reports;
  double failure_fraction = 0.0;
};

/// Samples `trials` graphs (trial k seeded by derive_seed(seed, k)) and
/// measures ||M_sample - M_typ|| against the matching bound.
inline DeviationExperiment deviation_experiment(const EdgeProbabilityModel& model, double delta,
                                                std::size_t trials, std::uint64_t seed, GraphMatrix which) {
  require(trials >= 1, Errc::InvalidParameter, "deviation_experiment: trials must be positive");
  const std::size_t n = model.order();
  const double nd = static_cast<double>(n);
  const bool lap = which == GraphMatrix::Laplacian;
  if (lap) require(model.d_min() > 0.0, Errc::ZeroDegree, "deviation_experiment: zero typical degree");
  const SymmetricMatrix typical = lap ? typical_laplacian(model) : typical_adjacency(model);
  const double bound = lap ? laplacian_bound(model.d_min(), nd, delta) : adjacency_bound(model.d_max(), nd, delta);

  DeviationExperiment out;
  std::size_t failures = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Graph g = sample_graph(model, derive_seed(seed, trial));
    const SymmetricMatrix sample = lap ? laplacian(g) : adjacency(g);
    DeviationReport r{n, model.d_min(), model.d_max(), delta, spectral_norm(sample - typical), bound, false};
    r.within = r.observed <= r.bound;
    if (!r.within) ++failures;
    out.reports.push_back(r);
  }
  out.failure_fraction = static_cast<double>(failures) / static_cast<double>(trials);
  return out;
}

/// lambda(G) = min{lambda_1(L), 2 - lambda_{n-1}(L)}.
inline double spectral_gap_of_laplacian(const SymmetricMatrix& l) {
  require(l.order() >= 2, Errc::InvalidParameter, "spectral_gap: need at least 2 vertices");
  const auto ev = eigvals_sym(l);
  return std::min(ev(1), 2.0 - ev(ev.size() - 1));
}

inline double spectral_gap(const Graph& g) { return spectral_gap_of_laplacian(laplacian(g)); }

/// c1 sqrt(ln n/(p d_G)) + c2 (ln n)^{3/2} / (p d_G (ln ln n)^{3/2}); the
/// constants are the caller's since the reference only fixes the order.
inline double chung_horn_reference(double n, double p, double d_g, double c1, double c2) {
  require(n >= 3.0, Errc::InvalidParameter, "chung_horn_reference: n must be >= 3");
  const double pd = p * d_g;
  require(pd > 0.0, Errc::InvalidParameter, "chung_horn_reference: p * d_G must be positive");
  require(c1 >= 0.0 && c2 >= 0.0, Errc::InvalidParameter, "chung_horn_reference: constants must be >= 0");
  const double ln_n = std::log(n);
  const double lnln_n = std::log(ln_n);
  return c1 * std::sqrt(ln_n / pd) + c2 * std::pow(ln_n, 1.5) / (pd * std::pow(lnln_n, 1.5));
}

struct GapTrial {
  double gap_base = 0.0;
  double gap_sample = 0.0;
  double abs_diff = 0.0;
  double norm_diff = 0.0;  // ||L_G - L_{G_p}||
  double bound = 0.0;      // laplacian_bound(p d_G, n, delta)
  bool within = false;
};

struct GapExperiment {
  std::vector<GapTrial> trials;
  double within_fraction = 0.0;
};

/// Spectral gap of G against that of percolated samples G_p. d_G is the
/// minimum degree of G.
inline GapExperiment percolation_gap_experiment(const Graph& g, double p, double delta, std::size_t trials,
                                                std::uint64_t seed) {
  require(trials >= 1, Errc::InvalidParameter, "percolation_gap_experiment: trials must be positive");
  const auto model = model_percolation(g, p);
  require(model.d_min() > 0.0, Errc::ZeroDegree, "percolation_gap_experiment: G has an isolated vertex");
  const auto base_l = laplacian(g);
  const double base_gap = spectral_gap_of_laplacian(base_l);
  const double bound = laplacian_bound(model.d_min(), static_cast<double>(g.order()), delta);

  GapExperiment out;
  std::size_t inside = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto l = laplacian(sample_graph(model, derive_seed(seed, trial)));
    GapTrial t;
    t.gap_base = base_gap;
    t.gap_sample = spectral_gap_of_laplacian(l);
    t.abs_diff = std::abs(t.gap_base - t.gap_sample);
    t.norm_diff = spectral_norm(base_l - l);
    t.bound = bound;
    t.within = t.abs_diff <= t.bound;
    if (t.within) ++inside;
    out.trials.push_back(t);
  }
  out.within_fraction = static_cast<double>(inside) / static_cast<double>(trials);
  return out;
}

}  // namespace graphconc
