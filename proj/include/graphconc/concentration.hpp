#pragma once

// Tail bounds for sums of random symmetric matrices (matrix Freedman and the
// matrix Hoeffding bound of Christofides and Markstrom), a matrix martingale
// simulator to test them against, and the exponential/quadratic PSD check
// that drives the Freedman argument.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/linalg.hpp"
#include "graphconc/rng.hpp"

namespace graphconc {

/// d * exp(-t^2 / (8 sigma2 + 4 M t)), the one-sided Freedman tail.
inline double freedman_bound(std::size_t d, double t, double sigma2, double M) {
  require(d >= 1, Errc::InvalidParameter, "freedman_bound: d must be positive");
  require(t >= 0.0, Errc::InvalidParameter, "freedman_bound: t must be nonnegative");
  require(sigma2 > 0.0, Errc::InvalidParameter, "freedman_bound: sigma2 must be positive");
  require(M > 0.0, Errc::InvalidParameter, "freedman_bound: M must be positive");
  return static_cast<double>(d) * std::exp(-t * t / (8.0 * sigma2 + 4.0 * M * t));
}

/// Bound on P(||sum X_i|| >= t) for independent sums. Not clamped to 1.
inline double freedman_bound_two_sided(std::size_t d, double t, double sigma2, double M) {
  return 2.0 * freedman_bound(d, t, sigma2, M);
}

/// Relative entropy H_r(x) = x ln(x/r) + (1-x) ln((1-x)/(1-r)).
inline double bernoulli_relative_entropy(double r, double x) {
  require(r > 0.0 && r < 1.0, Errc::DomainError, "relative entropy: r outside (0,1)");
  require(x > 0.0 && x < 1.0, Errc::DomainError, "relative entropy: x outside (0,1)");
  return x * std::log(x / r) + (1.0 - x) * std::log((1.0 - x) / (1.0 - r));
}

/// d * exp(-n H_{R/n}((R+t)/n)) with R the (unnormalized) sum of the r_i.
inline double cm_hoeffding_bound(std::size_t d, double t, std::size_t n, double R) {
  require(d >= 1 && n >= 1, Errc::InvalidParameter, "cm_hoeffding_bound: d and n must be positive");
  require(t >= 0.0, Errc::InvalidParameter, "cm_hoeffding_bound: t must be nonnegative");
  const double nn = static_cast<double>(n);
  const double r = R / nn;
  const double x = (R + t) / nn;
  require(r > 0.0 && r < 1.0, Errc::DomainError, "cm_hoeffding_bound: R/n outside (0,1)");
  require(x > 0.0 && x < 1.0, Errc::DomainError, "cm_hoeffding_bound: (R+t)/n outside (0,1)");
  return static_cast<double>(d) * std::exp(-nn * bernoulli_relative_entropy(r, x));
}

/// lambda_max of the summed second moments E[X_i^2].
inline double independent_sum_sigma2(std::span<const SymmetricMatrix> second_moments) {
  require(!second_moments.empty(), Errc::InvalidParameter, "independent_sum_sigma2: no inputs");
  SymmetricMatrix total(second_moments.front().order());
  for (const auto& m : second_moments) {
    require(m.order() == total.order(), Errc::DimensionMismatch, "independent_sum_sigma2: orders differ");
    require(lambda_min(m) >= -tol_eig(m), Errc::NotPSD, "independent_sum_sigma2: input is not PSD");
    total += m;
  }
  return lambda_max(total);
}

/// One centered Bernoulli edge term (I_ij - q) E_ij of an adjacency matrix.
struct EdgeIncrement {
  std::size_t i = 0;
  std::size_t j = 0;
  double q = 0.5;
};

/// Source of mean-zero increments with ||X|| <= scale.
class IncrementGenerator {
 public:
  struct DiagonalRademacher {
    std::size_t d;
  };
  struct RankOneSign {
    std::size_t d;
    std::uint64_t vector_seed;
    Eigen::VectorXd u;  // unit vector drawn from vector_seed
  };
  struct BernoulliCenteredEdge {
    std::size_t d;
    std::vector<EdgeIncrement> edges;  // step k uses edges[k mod size]
  };
  using Kind = std::variant<DiagonalRademacher, RankOneSign, BernoulliCenteredEdge>;

  /// X = scale * diag(e_1, ..., e_d) with independent fair signs.
  static IncrementGenerator diagonal_rademacher(std::size_t d, double scale = 1.0) {
    require(d >= 1, Errc::InvalidParameter, "generator dimension must be positive");
    return IncrementGenerator(DiagonalRademacher{d}, scale);
  }

  /// X = scale * e * u u^T with a fair sign e and a fixed unit vector u.
  static IncrementGenerator rank_one_sign(std::size_t d, std::uint64_t vector_seed, double scale = 1.0) {
    require(d >= 1, Errc::InvalidParameter, "generator dimension must be positive");
    Xoshiro256 rng(vector_seed);
    Eigen::VectorXd u(static_cast<Eigen::Index>(d));
    do {
      for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = 2.0 * rng.uniform() - 1.0;
    } while (u.norm() < 1e-3);
    u.normalize();
    return IncrementGenerator(RankOneSign{d, vector_seed, u}, scale);
  }

  /// X = scale * (I - q) E_ij where I ~ Bernoulli(q), E_ij = e_i e_j^T + e_j e_i^T
  /// (e_i e_i^T on the diagonal). Steps cycle through `edges`.
  static IncrementGenerator bernoulli_centered_edge(std::size_t d, std::vector<EdgeIncrement> edges,
                                                    double scale = 1.0) {
    require(d >= 1, Errc::InvalidParameter, "generator dimension must be positive");
    require(!edges.empty(), Errc::InvalidParameter, "bernoulli_centered_edge: no edges");
    for (const auto& e : edges) {
      require(e.i < d && e.j < d, Errc::InvalidParameter, "bernoulli_centered_edge: vertex out of range");
      require(e.q >= 0.0 && e.q <= 1.0, Errc::InvalidParameter, "bernoulli_centered_edge: q outside [0,1]");
    }
    return IncrementGenerator(BernoulliCenteredEdge{d, std::move(edges)}, scale);
  }

  std::size_t dimension() const {
    return std::visit([](const auto& k) { return k.d; }, kind_);
  }
  double scale() const noexcept { return scale_; }
  const Kind& kind() const noexcept { return kind_; }

  /// Draws the increment of step `step` (0-based).
  SymmetricMatrix sample(std::size_t step, Xoshiro256& rng) const {
    SymmetricMatrix x(dimension());
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, DiagonalRademacher>) {
            for (std::size_t i = 0; i < k.d; ++i) x.set(i, i, scale_ * rng.sign());
          } else if constexpr (std::is_same_v<T, RankOneSign>) {
            const double s = scale_ * rng.sign();
            x = SymmetricMatrix::from_upper(s * k.u * k.u.transpose());
          } else {
            const auto& e = k.edges[step % k.edges.size()];
            const double indicator = rng.uniform() < e.q ? 1.0 : 0.0;
            x.set(e.i, e.j, scale_ * (indicator - e.q));
          }
        },
        kind_);
    return x;
  }

  /// E[X^2] for step `step`; increments are independent so this is also the
  /// conditional second moment.
  SymmetricMatrix second_moment(std::size_t step) const {
    SymmetricMatrix m(dimension());
    const double s2 = scale_ * scale_;
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, DiagonalRademacher>) {
            m = SymmetricMatrix::identity(k.d) * s2;
          } else if constexpr (std::is_same_v<T, RankOneSign>) {
            m = SymmetricMatrix::from_upper(s2 * k.u * k.u.transpose());
          } else {
            const auto& e = k.edges[step % k.edges.size()];
            const double v = s2 * e.q * (1.0 - e.q);
            m.set(e.i, e.i, v);
            if (e.i != e.j) m.set(e.j, e.j, v);
          }
        },
        kind_);
    return m;
  }

  /// W_n = sum over the first n steps of E[X_k^2].
  SymmetricMatrix quadratic_variation(std::size_t n_steps) const {
    SymmetricMatrix w(dimension());
    for (std::size_t k = 0; k < n_steps; ++k) w += second_moment(k);
    return w;
  }

 private:
  IncrementGenerator(Kind kind, double scale) : kind_(std::move(kind)), scale_(scale) {
    require(scale > 0.0 && std::isfinite(scale), Errc::InvalidParameter, "generator scale must be positive");
  }

  Kind kind_;
  double scale_;
};

/// Increments X_1..X_n, partial sums Z_0..Z_n and the predictable quadratic
/// variation W_n of one martingale path.
struct MartingaleTrace {
  std::size_t dimension = 0;
  std::vector<SymmetricMatrix> increments;
  std::vector<SymmetricMatrix> partial_sums;
  SymmetricMatrix quad_variation;
  double bound_M = 0.0;

  const SymmetricMatrix& final_sum() const { return partial_sums.back(); }
};

inline MartingaleTrace simulate_martingale(const IncrementGenerator& gen, std::size_t n_steps,
                                           std::uint64_t seed) {
  require(n_steps >= 1, Errc::InvalidParameter, "simulate_martingale: n_steps must be positive");
  MartingaleTrace trace;
  trace.dimension = gen.dimension();
  trace.bound_M = gen.scale();
  trace.increments.reserve(n_steps);
  trace.partial_sums.reserve(n_steps + 1);
  trace.partial_sums.emplace_back(gen.dimension());
  Xoshiro256 rng(seed);
  for (std::size_t k = 0; k < n_steps; ++k) {
    trace.increments.push_back(gen.sample(k, rng));
    trace.partial_sums.push_back(trace.partial_sums.back() + trace.increments.back());
  }
  trace.quad_variation = gen.quadratic_variation(n_steps);
  return trace;
}

namespace detail {

// Same draws as simulate_martingale without keeping the path.
inline SymmetricMatrix martingale_endpoint(const IncrementGenerator& gen, std::size_t n_steps,
                                           std::uint64_t seed) {
  SymmetricMatrix z(gen.dimension());
  Xoshiro256 rng(seed);
  for (std::size_t k = 0; k < n_steps; ++k) z += gen.sample(k, rng);
  return z;
}

}  // namespace detail

struct TailRow {
  double t = 0.0;
  double empirical_prob = 0.0;
  double freedman_value = 0.0;
};

struct TailEstimate {
  double sigma2 = 0.0;  // exact lambda_max(W_n)
  double M = 0.0;
  std::size_t trials = 0;
  std::vector<TailRow> rows;
};

/// Monte Carlo estimate of P(lambda_max(Z_n) >= t) next to the Freedman bound
/// evaluated at the generator's exact sigma^2. Trial k uses
/// derive_seed(seed, k).
inline TailEstimate empirical_tail(const IncrementGenerator& gen, std::size_t n_steps, std::size_t trials,
                                   std::span<const double> thresholds, std::uint64_t seed) {
  require(n_steps >= 1, Errc::InvalidParameter, "empirical_tail: n_steps must be positive");
  require(trials >= 1, Errc::InvalidParameter, "empirical_tail: trials must be positive");
  TailEstimate out;
  out.sigma2 = lambda_max(gen.quadratic_variation(n_steps));
  out.M = gen.scale();
  out.trials = trials;

  std::vector<std::size_t> hits(thresholds.size(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const double top = lambda_max(detail::martingale_endpoint(gen, n_steps, derive_seed(seed, trial)));
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      if (top >= thresholds[k]) ++hits[k];
  }
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    out.rows.push_back({thresholds[k], static_cast<double>(hits[k]) / static_cast<double>(trials),
                        freedman_bound(gen.dimension(), thresholds[k], out.sigma2, out.M)});
  }
  return out;
}

struct DominanceCheck {
  bool holds = false;
  double slack = 0.0;  // lambda_min(I + C + C^2 - e^C)
};

/// e^C <= I + C + C^2 for ||C|| <= 1.
inline DominanceCheck exp_quadratic_dominance_check(const SymmetricMatrix& c) {
  const double tol = tol_eig(c);
  require(spectral_norm(c) <= 1.0 + tol, Errc::NormTooLarge, "exp_quadratic_dominance_check: ||C|| > 1");
  const auto quadratic = SymmetricMatrix::identity(c.order()) + c + square(c);
  const auto gap = quadratic - matrix_exp(c);
  const double slack = lambda_min(gap);
  return {slack >= -tol, slack};
}

}  // namespace graphconc
