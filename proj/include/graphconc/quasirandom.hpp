#pragma once

// Finite-n checks of the quasi-randomness properties: four-cycle counts,
// the eigenvalue picture, discrepancy, and closeness of the adjacency matrix
// to its Erdos-Renyi typical matrix. o(1) terms become explicit slacks.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/graph.hpp"
#include "graphconc/linalg.hpp"
#include "graphconc/random_graphs.hpp"

namespace graphconc {

/// Ordered 4-tuples of distinct vertices (v0,v1,v2,v3) with v0~v1~v2~v3~v0,
/// via Tr(A^4) - 2 sum_v deg(v)^2 + 2|E|.
inline std::int64_t labeled_c4_count(const Graph& g) {
  require(!g.has_loops(), Errc::LoopsUnsupported, "labeled_c4_count: graph has loops");
  using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(g.order());
  IntMatrix a = IntMatrix::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
    a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1;
  }
  const IntMatrix a2 = a * a;
  // Tr(A^4) = sum_ij (A^2)_ij^2 since A^2 is symmetric.
  const std::int64_t closed_walks = a2.cwiseProduct(a2).sum();
  std::int64_t deg_sq = 0;
  for (Eigen::Index v = 0; v < n; ++v) deg_sq += a2(v, v) * a2(v, v);
  return closed_walks - 2 * deg_sq + 2 * static_cast<std::int64_t>(g.size());
}

struct Q3Check {
  bool edges_ok = false;
  bool top_eigen_ok = false;
  bool bulk_ok = false;
};

namespace detail {

inline Q3Check q3_from_spectrum(const Eigen::VectorXd& ev, std::size_t edge_count, double n, double p,
                                double slack) {
  Q3Check out;
  out.edges_ok = static_cast<double>(edge_count) >= (1.0 - slack) * p * n * n / 2.0;
  out.top_eigen_ok = std::abs(ev(ev.size() - 1) - p * n) <= slack * n;
  const double bulk = ev.size() > 1 ? ev.head(ev.size() - 1).cwiseAbs().maxCoeff() : 0.0;
  out.bulk_ok = bulk <= slack * n;
  return out;
}

inline SymmetricMatrix er_typical(std::size_t n, double p) {
  return (SymmetricMatrix::constant(n, 1.0) - SymmetricMatrix::identity(n)) * p;
}

}  // namespace detail

/// |E| >= (1-slack) p n^2/2, |lambda_max - pn| <= slack n, and every other
/// |lambda_i| <= slack n.
inline Q3Check q3_check(const Graph& g, double p, double slack) {
  require(p > 0.0 && p < 1.0, Errc::InvalidParameter, "q3_check: p must lie in (0,1)");
  require(slack >= 0.0, Errc::InvalidParameter, "q3_check: slack must be >= 0");
  return detail::q3_from_spectrum(eigvals_sym(adjacency(g)), g.size(), static_cast<double>(g.order()), p,
                                  slack);
}

/// ||A_G - p(11^T - I)||.
inline double p1_deviation(const Graph& g, double p) {
  require(p > 0.0 && p < 1.0, Errc::InvalidParameter, "p1_deviation: p must lie in (0,1)");
  return spectral_norm(adjacency(g) - detail::er_typical(g.order(), p));
}

/// max over vertex subsets S of |e(S) - p|S|^2/2|, where e(S) counts edges
/// (loops included) with both ends in S. Gray-code enumeration, n <= 20.
inline double q4_discrepancy(const Graph& g, double p) {
  const std::size_t n = g.order();
  require(n <= 20, Errc::TooLarge, "q4_discrepancy: n > 20");
  std::vector<std::uint32_t> nbr(n, 0);
  std::vector<int> loop(n, 0);
  for (const auto& [i, j] : g.edges()) {
    if (i == j) {
      loop[i] = 1;
    } else {
      nbr[i] |= 1u << j;
      nbr[j] |= 1u << i;
    }
  }
  std::uint32_t set = 0;
  long long edges_in = 0;
  double best = 0.0;  // S = empty set
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto v = static_cast<std::size_t>(std::countr_zero(k));
    const std::uint32_t bit = 1u << v;
    const long long delta = std::popcount(nbr[v] & set) + loop[v];
    if (set & bit) {
      set &= ~bit;
      edges_in -= delta;
    } else {
      edges_in += delta;
      set |= bit;
    }
    const double s = static_cast<double>(std::popcount(set));
    best = std::max(best, std::abs(static_cast<double>(edges_in) - p * s * s / 2.0));
  }
  return best;
}

/// Checks the P1 => Q3 arithmetic: when ||A - A_typ|| <= slack n, the top
/// eigenvalue is within slack n + p of pn, the rest within slack n + p of 0,
/// and |E| >= p n^2/2 - slack n^2 - p n/2. Vacuously true when P1 fails.
inline bool p1_implies_q3_check(const Graph& g, double p, double slack) {
  require(p > 0.0 && p < 1.0, Errc::InvalidParameter, "p1_implies_q3_check: p must lie in (0,1)");
  require(slack >= 0.0, Errc::InvalidParameter, "p1_implies_q3_check: slack must be >= 0");
  require(!g.has_loops(), Errc::LoopsUnsupported, "p1_implies_q3_check: graph has loops");
  const double n = static_cast<double>(g.order());
  if (p1_deviation(g, p) > slack * n) return true;
  const auto ev = eigvals_sym(adjacency(g));
  const double top_err = std::abs(ev(ev.size() - 1) - p * n);
  const double bulk = ev.size() > 1 ? ev.head(ev.size() - 1).cwiseAbs().maxCoeff() : 0.0;
  const double edges = static_cast<double>(g.size());
  return top_err <= slack * n + p && bulk <= slack * n + p && edges >= p * n * n / 2.0 - slack * n * n - p * n / 2.0;
}

struct QuasirandomReport {
  std::size_t n = 0;
  std::size_t edge_count = 0;
  std::int64_t labeled_c4_count = 0;
  double lambda_max = 0.0;
  double second_eigen_absmax = 0.0;
  double p1_deviation = 0.0;
  Q3Check q3;
  bool p1_implies_q3_ok = true;
  std::optional<double> q4_discrepancy;  // only for n <= 20
};

inline QuasirandomReport quasirandom_report(const Graph& g, double p, double slack) {
  QuasirandomReport r;
  r.n = g.order();
  r.edge_count = g.size();
  r.labeled_c4_count = labeled_c4_count(g);
  const auto ev = eigvals_sym(adjacency(g));
  r.lambda_max = ev(ev.size() - 1);
  r.second_eigen_absmax = ev.size() > 1 ? ev.head(ev.size() - 1).cwiseAbs().maxCoeff() : 0.0;
  r.p1_deviation = p1_deviation(g, p);
  r.q3 = detail::q3_from_spectrum(ev, g.size(), static_cast<double>(g.order()), p, slack);
  r.p1_implies_q3_ok = p1_implies_q3_check(g, p, slack);
  if (g.order() <= 20) r.q4_discrepancy = q4_discrepancy(g, p);
  return r;
}

}  // namespace graphconc
