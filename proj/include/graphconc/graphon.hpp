#pragma once

// Inhomogeneous random graphs G(n, p, kappa): attachment kernels, latent
// points, step kernels on the uniform n x n grid, the embedding maps between
// R^n and step functions on [0,1], and the comparisons between A/(pn) and the
// integral operator of kappa. Cut and operator norms of step kernels are
// computed exactly.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/graph.hpp"
#include "graphconc/linalg.hpp"
#include "graphconc/perturbation.hpp"
#include "graphconc/random_graphs.hpp"
#include "graphconc/rng.hpp"

namespace graphconc {

/// Symmetric bounded nonnegative kernel on [0,1]^2.
class Kernel {
 public:
  struct Constant {
    double c;
  };
  /// coef * x^exponent * y^exponent
  struct RankOneProduct {
    double coef;
    double exponent;
  };
  /// values(a,b) on the cell (a/k,(a+1)/k] x (b/k,(b+1)/k].
  struct Block {
    Eigen::MatrixXd values;
  };
  enum class SmoothId {
    GaussianBand,   // exp(-beta (x-y)^2)
    CosineProduct,  // (1 + cos(pi x) cos(pi y)) / 2
  };
  struct SmoothLipschitz {
    SmoothId id;
    double param;
  };
  using Kind = std::variant<Constant, RankOneProduct, Block, SmoothLipschitz>;

  static Kernel constant(double c) {
    require(c >= 0.0 && std::isfinite(c), Errc::InvalidParameter, "constant kernel must be finite and >= 0");
    return Kernel(Constant{c});
  }

  static Kernel rank_one_product(double coef, double exponent) {
    require(coef >= 0.0 && std::isfinite(coef), Errc::InvalidParameter, "rank-one kernel: coef must be >= 0");
    require(exponent >= 0.0 && std::isfinite(exponent), Errc::InvalidParameter,
            "rank-one kernel: exponent must be >= 0");
    return Kernel(RankOneProduct{coef, exponent});
  }

  static Kernel block(Eigen::MatrixXd values) {
    require(values.rows() >= 1 && values.rows() == values.cols(), Errc::InvalidParameter,
            "block kernel needs a nonempty square value matrix");
    require(values.allFinite() && values.minCoeff() >= 0.0, Errc::InvalidParameter,
            "block kernel values must be finite and >= 0");
    require(values == values.transpose(), Errc::InvalidParameter, "block kernel values must be symmetric");
    return Kernel(Block{std::move(values)});
  }

  static Kernel gaussian_band(double beta) {
    require(beta > 0.0 && std::isfinite(beta), Errc::InvalidParameter, "gaussian_band: beta must be positive");
    return Kernel(SmoothLipschitz{SmoothId::GaussianBand, beta});
  }

  static Kernel cosine_product() { return Kernel(SmoothLipschitz{SmoothId::CosineProduct, 0.0}); }

  const Kind& kind() const noexcept { return kind_; }

  double operator()(double x, double y) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return k.c;
          } else if constexpr (std::is_same_v<T, RankOneProduct>) {
            return k.coef * std::pow(x, k.exponent) * std::pow(y, k.exponent);
          } else if constexpr (std::is_same_v<T, Block>) {
            return k.values(block_index(x, k.values.rows()), block_index(y, k.values.rows()));
          } else {
            switch (k.id) {
              case SmoothId::GaussianBand: return std::exp(-k.param * (x - y) * (x - y));
              case SmoothId::CosineProduct:
                return 0.5 * (1.0 + std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y));
            }
            return 0.0;
          }
        },
        kind_);
  }

  /// K = sup kappa.
  double sup_bound() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Constant>) return k.c;
          else if constexpr (std::is_same_v<T, RankOneProduct>) return k.coef;
          else if constexpr (std::is_same_v<T, Block>) return k.values.maxCoeff();
          else return 1.0;
        },
        kind_);
  }

  /// Lipschitz constant (Euclidean) when known; block kernels are not continuous.
  std::optional<double> lipschitz() const {
    return std::visit(
        [](const auto& k) -> std::optional<double> {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, RankOneProduct>) {
            if (k.coef == 0.0 || k.exponent == 0.0) return 0.0;
            if (k.exponent < 1.0) return std::nullopt;
            return k.coef * k.exponent * std::numbers::sqrt2;
          } else if constexpr (std::is_same_v<T, Block>) {
            if (k.values.maxCoeff() == k.values.minCoeff()) return 0.0;
            return std::nullopt;
          } else {
            if (k.id == SmoothId::GaussianBand) return 2.0 * std::sqrt(k.param) * std::exp(-0.5);
            return std::numbers::pi / 2.0;
          }
        },
        kind_);
  }

  bool has_closed_form_spectrum() const { return !std::holds_alternative<SmoothLipschitz>(kind_); }

  /// integral of kappa^2 over [0,1]^2 for the closed-form families.
  double l2_norm_squared() const {
    return std::visit(
        [](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return k.c * k.c;
          } else if constexpr (std::is_same_v<T, RankOneProduct>) {
            const double m = 1.0 / (2.0 * k.exponent + 1.0);
            return k.coef * k.coef * m * m;
          } else if constexpr (std::is_same_v<T, Block>) {
            const double kk = static_cast<double>(k.values.rows());
            return k.values.squaredNorm() / (kk * kk);
          } else {
            throw Error(Errc::Unsupported, "l2_norm_squared: no closed form for smooth kernels");
          }
        },
        kind_);
  }

  static Eigen::Index block_index(double x, Eigen::Index k) {
    const auto i = static_cast<Eigen::Index>(std::ceil(x * static_cast<double>(k))) - 1;
    return std::clamp<Eigen::Index>(i, 0, k - 1);
  }

 private:
  explicit Kernel(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// Latent positions X_1..X_n, their sorted values and the ranks
/// sigma(i) with X_i = sorted[sigma(i)] (0-based). Ties are broken by index.
struct PointSample {
  std::vector<double> raw;
  std::vector<double> sorted;
  std::vector<std::size_t> rank;

  std::size_t size() const noexcept { return raw.size(); }
};

inline PointSample points_from(std::vector<double> raw) {
  require(!raw.empty(), Errc::InvalidParameter, "point sample must be nonempty");
  for (double x : raw) require(x >= 0.0 && x <= 1.0, Errc::InvalidParameter, "points must lie in [0,1]");
  PointSample pts;
  pts.raw = std::move(raw);
  std::vector<std::size_t> order(pts.raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pts.raw[a] < pts.raw[b]; });
  pts.sorted.resize(order.size());
  pts.rank.resize(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    pts.sorted[r] = pts.raw[order[r]];
    pts.rank[order[r]] = r;
  }
  return pts;
}

/// n i.i.d. uniform points on [0,1].
inline PointSample sample_points(std::size_t n, std::uint64_t seed) {
  require(n >= 1, Errc::InvalidParameter, "sample_points: n must be >= 1");
  Xoshiro256 rng(seed);
  std::vector<double> raw(n);
  for (auto& x : raw) x = rng.uniform();
  return points_from(std::move(raw));
}

/// p(i,j) = min(p kappa(X_i, X_j), 1), loops included.
inline EdgeProbabilityModel model_inhomogeneous(const Kernel& kernel, const PointSample& pts, double p) {
  require(p > 0.0 && p <= 1.0, Errc::InvalidParameter, "model_inhomogeneous: p must lie in (0,1]");
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd prob(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = std::min(p * kernel(pts.raw[static_cast<std::size_t>(i)], pts.raw[static_cast<std::size_t>(j)]), 1.0);
      prob(i, j) = v;
      prob(j, i) = v;
    }
  return EdgeProbabilityModel::from_probabilities(SymmetricMatrix::from_dense(prob));
}

/// Step function on the uniform n x n grid of [0,1]^2; values(r,s) is its
/// value on ((r)/n,(r+1)/n] x ((s)/n,(s+1)/n] (0-based cells).
class StepKernel {
 public:
  explicit StepKernel(SymmetricMatrix values) : values_(std::move(values)) {
    require(values_.order() >= 1, Errc::InvalidParameter, "step kernel needs resolution >= 1");
  }

  std::size_t resolution() const noexcept { return values_.order(); }
  const SymmetricMatrix& values() const noexcept { return values_; }

  /// integral of the step function over [0,1]^2 of |eta| and eta^2.
  double l1_norm() const {
    const double n = static_cast<double>(resolution());
    return values_.dense().cwiseAbs().sum() / (n * n);
  }
  double l2_norm_squared() const {
    const double n = static_cast<double>(resolution());
    return values_.dense().squaredNorm() / (n * n);
  }

 private:
  SymmetricMatrix values_;
};

/// The step kernel of G: 1/p on cell (sigma(i), sigma(j)) for each edge ij.
inline StepKernel graph_step_kernel(const Graph& g, const PointSample& pts, double p) {
  require(g.order() == pts.size(), Errc::DimensionMismatch, "graph_step_kernel: graph and points differ in size");
  require(p > 0.0, Errc::InvalidParameter, "graph_step_kernel: p must be positive");
  SymmetricMatrix values(g.order());
  for (const auto& [i, j] : g.edges()) values.set(pts.rank[i], pts.rank[j], 1.0 / p);
  return StepKernel(std::move(values));
}

/// ||T_eta||_{L2->L2} of a step kernel: spectral norm of the grid over n.
inline double step_operator_norm(const StepKernel& sk) {
  return spectral_norm(sk.values()) / static_cast<double>(sk.resolution());
}

namespace detail {

// Cell r of the uniform n-grid against block a of the uniform k-grid, both
// scaled to integers in units of 1/(n k).
inline long long cell_block_overlap(long long r, long long n, long long a, long long k) {
  const long long lo = std::max(r * k, a * n);
  const long long hi = std::min((r + 1) * k, (a + 1) * n);
  return std::max(0LL, hi - lo);
}

// integral of x^e over cell r of the uniform n-grid.
inline double power_cell_integral(double r, double n, double e) {
  return (std::pow(r + 1.0, e + 1.0) - std::pow(r, e + 1.0)) / ((e + 1.0) * std::pow(n, e + 1.0));
}

}  // namespace detail

/// Cell averages n^2 * integral over cell(r) x cell(s) of kappa. Closed form
/// for constant, rank-one and block kernels; 8-point Gauss-Legendre per cell
/// axis for smooth kernels.
inline StepKernel discretize(const Kernel& kernel, std::size_t n) {
  require(n >= 1, Errc::InvalidParameter, "discretize: n must be >= 1");
  const auto nn = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  Eigen::MatrixXd avg(nn, nn);
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Kernel::Constant>) {
          avg.setConstant(k.c);
        } else if constexpr (std::is_same_v<T, Kernel::RankOneProduct>) {
          Eigen::VectorXd g(nn);
          for (Eigen::Index r = 0; r < nn; ++r)
            g(r) = nd * detail::power_cell_integral(static_cast<double>(r), nd, k.exponent);
          avg = k.coef * g * g.transpose();
        } else if constexpr (std::is_same_v<T, Kernel::Block>) {
          const Eigen::Index kb = k.values.rows();
          const double k2 = static_cast<double>(kb * kb);
          for (Eigen::Index s = 0; s < nn; ++s)
            for (Eigen::Index r = 0; r <= s; ++r) {
              double acc = 0.0;
              for (Eigen::Index a = 0; a < kb; ++a) {
                const auto ora = detail::cell_block_overlap(r, nn, a, kb);
                if (ora == 0) continue;
                for (Eigen::Index b = 0; b < kb; ++b) {
                  const auto osb = detail::cell_block_overlap(s, nn, b, kb);
                  if (osb == 0) continue;
                  acc += k.values(a, b) * (static_cast<double>(ora * osb) / k2);
                }
              }
              avg(r, s) = acc;
              avg(s, r) = acc;
            }
        } else {
          using Rule = boost::math::quadrature::gauss<double, 8>;
          std::vector<double> nodes;
          std::vector<double> weights;
          for (std::size_t q = 0; q < Rule::abscissa().size(); ++q) {
            nodes.push_back(Rule::abscissa()[q]);
            weights.push_back(Rule::weights()[q]);
            nodes.push_back(-Rule::abscissa()[q]);
            weights.push_back(Rule::weights()[q]);
          }
          for (Eigen::Index s = 0; s < nn; ++s)
            for (Eigen::Index r = 0; r <= s; ++r) {
              double acc = 0.0;
              for (std::size_t qa = 0; qa < nodes.size(); ++qa) {
                const double x = (static_cast<double>(r) + 0.5 * (1.0 + nodes[qa])) / nd;
                for (std::size_t qb = 0; qb < nodes.size(); ++qb) {
                  const double y = (static_cast<double>(s) + 0.5 * (1.0 + nodes[qb])) / nd;
                  acc += 0.25 * weights[qa] * weights[qb] * kernel(x, y);
                }
              }
              require(std::isfinite(acc), Errc::QuadratureFailure, "discretize: non-finite kernel evaluation");
              avg(r, s) = acc;
              avg(s, r) = acc;
            }
        }
      },
      kernel.kind());
  return StepKernel(SymmetricMatrix::from_dense(avg));
}

namespace detail {

inline SymmetricMatrix permuted_over_n(const StepKernel& grid, const PointSample& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  require(grid.resolution() == pts.size(), Errc::DimensionMismatch, "grid and points differ in size");
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd& v = grid.values().dense();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, j) = v(static_cast<Eigen::Index>(pts.rank[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(pts.rank[static_cast<std::size_t>(j)])) / nd;
  return SymmetricMatrix::from_dense(out);
}

}  // namespace detail

/// E_n T_kappa H_n: entry (i,j) = n * integral over cell(sigma(i)) x cell(sigma(j)) of kappa.
inline SymmetricMatrix embed_matrix(const Kernel& kernel, const PointSample& pts) {
  return detail::permuted_over_n(discretize(kernel, pts.size()), pts);
}

/// Nonzero eigenvalue of T_kappa with its multiplicity.
struct ReferenceEigenvalue {
  double value = 0.0;
  std::size_t multiplicity = 0;
};

/// Nonzero spectrum of T_kappa in decreasing order (0 is always in the
/// spectrum with infinite multiplicity and is omitted).
inline std::vector<ReferenceEigenvalue> reference_spectrum(const Kernel& kernel) {
  std::vector<ReferenceEigenvalue> out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Kernel::Constant>) {
          if (k.c != 0.0) out.push_back({k.c, 1});
        } else if constexpr (std::is_same_v<T, Kernel::RankOneProduct>) {
          if (k.coef != 0.0) out.push_back({k.coef / (2.0 * k.exponent + 1.0), 1});
        } else if constexpr (std::is_same_v<T, Kernel::Block>) {
          const double kk = static_cast<double>(k.values.rows());
          const Eigen::VectorXd ev = eigvals_sym(SymmetricMatrix::from_dense(k.values / kk));
          const double tol = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
          for (Eigen::Index i = ev.size() - 1; i >= 0; --i) {
            if (std::abs(ev(i)) <= tol) continue;
            if (!out.empty() && std::abs(out.back().value - ev(i)) <= tol)
              ++out.back().multiplicity;
            else
              out.push_back({ev(i), 1});
          }
        } else {
          throw Error(Errc::Unsupported, "reference_spectrum: no closed form for smooth kernels");
        }
      },
      kernel.kind());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
  return out;
}

/// Multiplicity of the reference spectrum inside S (S must stay away from 0).
inline std::size_t reference_multiplicity(const std::vector<ReferenceEigenvalue>& spectrum, const IntervalSet& s) {
  std::size_t m = 0;
  for (const auto& e : spectrum)
    if (s.contains(e.value)) m += e.multiplicity;
  return m;
}

/// E_n P_alpha H_n, where P_alpha projects onto the eigenspace of T_kappa
/// for the nonzero eigenvalue alpha.
inline SymmetricMatrix embedded_eigenprojector(const Kernel& kernel, const PointSample& pts, double alpha) {
  const std::size_t n = pts.size();
  const auto nn = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  // Columns: integrals of an orthonormal eigenbasis over each (rank) cell.
  Eigen::MatrixXd cell_integrals;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Kernel::Constant>) {
          require(k.c != 0.0 && alpha == k.c, Errc::InvalidParameter, "alpha is not a nonzero eigenvalue");
          cell_integrals = Eigen::MatrixXd::Constant(nn, 1, 1.0 / nd);
        } else if constexpr (std::is_same_v<T, Kernel::RankOneProduct>) {
          const double lam = k.coef / (2.0 * k.exponent + 1.0);
          require(k.coef != 0.0 && alpha == lam, Errc::InvalidParameter, "alpha is not a nonzero eigenvalue");
          cell_integrals.resize(nn, 1);
          const double norm = std::sqrt(2.0 * k.exponent + 1.0);
          for (Eigen::Index r = 0; r < nn; ++r)
            cell_integrals(r, 0) = norm * detail::power_cell_integral(static_cast<double>(r), nd, k.exponent);
        } else if constexpr (std::is_same_v<T, Kernel::Block>) {
          const Eigen::Index kb = k.values.rows();
          const double kk = static_cast<double>(kb);
          const auto sd = eig_sym(SymmetricMatrix::from_dense(k.values / kk));
          const double tol = 1e-12 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
          std::vector<Eigen::Index> cols;
          for (Eigen::Index i = 0; i < kb; ++i)
            if (std::abs(sd.eigenvalues(i) - alpha) <= tol && std::abs(alpha) > tol) cols.push_back(i);
          require(!cols.empty(), Errc::InvalidParameter, "alpha is not a nonzero eigenvalue");
          cell_integrals = Eigen::MatrixXd::Zero(nn, static_cast<Eigen::Index>(cols.size()));
          for (std::size_t c = 0; c < cols.size(); ++c)
            for (Eigen::Index r = 0; r < nn; ++r)
              for (Eigen::Index a = 0; a < kb; ++a) {
                const auto o = detail::cell_block_overlap(r, nn, a, kb);
                cell_integrals(r, static_cast<Eigen::Index>(c)) +=
                    std::sqrt(kk) * sd.eigenvectors(a, cols[c]) * static_cast<double>(o) / (nd * kk);
              }
        } else {
          throw Error(Errc::Unsupported, "embedded_eigenprojector: no closed form for smooth kernels");
        }
      },
      kernel.kind());
  Eigen::MatrixXd permuted(nn, cell_integrals.cols());
  for (Eigen::Index i = 0; i < nn; ++i)
    permuted.row(i) = cell_integrals.row(static_cast<Eigen::Index>(pts.rank[static_cast<std::size_t>(i)]));
  return SymmetricMatrix::from_upper(nd * permuted * permuted.transpose());
}

/// 2 eps + c (L + K) (ln n / n)^{1/4} + sqrt(K ln n / (p n)).
inline double theta_bound(double eps, double lipschitz, double sup_bound, double n, double p, double c_const) {
  require(eps >= 0.0 && lipschitz >= 0.0 && c_const >= 0.0, Errc::InvalidParameter,
          "theta_bound: eps, L and c must be >= 0");
  require(sup_bound > 0.0 && p > 0.0, Errc::InvalidParameter, "theta_bound: K and p must be positive");
  require(n > 1.0, Errc::InvalidParameter, "theta_bound: n must exceed 1");
  const double ln_n = std::log(n);
  return 2.0 * eps + c_const * (lipschitz + sup_bound) * std::pow(ln_n / n, 0.25) +
         std::sqrt(sup_bound * ln_n / (p * n));
}

/// Draws points and a graph for one trial of G(n, p, kappa). Points use
/// derive_seed(seed, 0) and edges derive_seed(seed, 1).
struct InhomogeneousSample {
  PointSample points;
  Graph graph;
};

inline InhomogeneousSample sample_inhomogeneous(const Kernel& kernel, std::size_t n, double p, std::uint64_t seed) {
  auto pts = sample_points(n, derive_seed(seed, 0));
  auto g = sample_graph(model_inhomogeneous(kernel, pts, p), derive_seed(seed, 1));
  return {std::move(pts), std::move(g)};
}

inline SymmetricMatrix scaled_adjacency(const Graph& g, double p) {
  return adjacency(g) * (1.0 / (p * static_cast<double>(g.order())));
}

/// Reference values aligned with the `count` largest eigenvalues: nonzero
/// reference eigenvalues repeated by multiplicity, then zeros.
inline std::vector<double> leading_reference_values(const std::vector<ReferenceEigenvalue>& spectrum,
                                                    std::size_t count) {
  std::vector<double> out;
  for (const auto& e : spectrum)
    for (std::size_t m = 0; m < e.multiplicity && out.size() < count; ++m)
      if (e.value > 0.0) out.push_back(e.value);
  out.resize(count, 0.0);
  return out;
}

/// The `count` largest eigenvalues of A/(pn), in decreasing order.
inline std::vector<double> leading_eigenvalues(const SymmetricMatrix& m, std::size_t count) {
  const auto ev = eigvals_sym(m);
  std::vector<double> out;
  for (Eigen::Index i = ev.size() - 1; i >= 0 && out.size() < count; --i) out.push_back(ev(i));
  return out;
}

struct KernelComparisonOptions {
  double eps = 0.0;                  // L2 distance to the Lipschitz approximant
  std::optional<double> lipschitz;   // defaults to the kernel's own constant
  std::optional<double> sup_bound;   // declared K, at least the kernel's supremum
  double c_const = 1.0;              // universal constant in theta
  std::vector<IntervalSet> interval_sets;
  std::optional<double> gamma;       // isolation radius for projector comparisons
  std::size_t top_k = 0;             // 0: number of positive reference eigenvalues
};

struct MultiplicityTransfer {
  bool applicable = false;  // inf |S| > theta_obs
  std::size_t m_matrix = 0;
  std::size_t m_operator_dilated = 0;
  std::size_t m_operator = 0;
  std::size_t m_matrix_dilated = 0;
  bool forward = false;
  bool backward = false;
};

struct ProjectorComparison {
  double alpha = 0.0;
  double gamma = 0.0;
  bool applicable = false;  // gamma > theta_obs and alpha isolated by 2 gamma
  double lhs = 0.0;         // ||Pi_{(alpha +- gamma) pn}(A) - E P_alpha H||
  double rhs = 0.0;         // 4 theta_obs / (pi (gamma - theta_obs))
};

struct KernelComparisonTrial {
  double embed_deviation = 0.0;           // ||A/pn - E T H||
  double step_distance = 0.0;             // ||T_G - T_kbar||, exact
  double discretization_remainder = 0.0;  // ||kappa - kbar||_L2
  double operator_distance = 0.0;         // bound on ||T_G - T_kappa||
  std::vector<double> leading;            // largest eigenvalues of A/pn
  std::vector<MultiplicityTransfer> multiplicity;
  std::vector<ProjectorComparison> projectors;
};

struct KernelComparisonReport {
  std::optional<double> theta;  // needs a Lipschitz constant
  std::vector<double> reference;
  std::vector<KernelComparisonTrial> trials;
};

/// Runs the four comparisons between G(n, p, kappa) and T_kappa on `trials`
/// samples. theta_obs is the observed operator distance of each trial.
inline KernelComparisonReport kernel_comparison_check(const Kernel& kernel, double p, std::size_t n, std::size_t trials,
                                       std::uint64_t seed, const KernelComparisonOptions& opt = {}) {
  require(kernel.has_closed_form_spectrum(), Errc::Unsupported, "kernel_comparison_check: kernel has no closed-form spectrum");
  require(trials >= 1, Errc::InvalidParameter, "kernel_comparison_check: trials must be positive");
  require(n >= 2, Errc::InvalidParameter, "kernel_comparison_check: n must be >= 2");
  require(p > 0.0 && p <= 1.0, Errc::InvalidParameter, "kernel_comparison_check: p must lie in (0,1]");

  KernelComparisonReport report;
  const double nd = static_cast<double>(n);
  const double K = opt.sup_bound.value_or(kernel.sup_bound());
  require(K >= kernel.sup_bound(), Errc::InvalidParameter, "kernel_comparison_check: declared K is below sup kappa");
  const auto L = opt.lipschitz ? opt.lipschitz : kernel.lipschitz();
  if (L && K > 0.0) report.theta = theta_bound(opt.eps, *L, K, nd, p, opt.c_const);

  const auto spectrum = reference_spectrum(kernel);
  std::size_t positive = 0;
  for (const auto& e : spectrum)
    if (e.value > 0.0) positive += e.multiplicity;
  const std::size_t top_k = opt.top_k > 0 ? opt.top_k : std::max<std::size_t>(1, positive);
  report.reference = leading_reference_values(spectrum, top_k);

  const StepKernel kbar = discretize(kernel, n);
  const double remainder = std::sqrt(std::max(0.0, kernel.l2_norm_squared() - kbar.l2_norm_squared()));

  for (std::size_t trial = 0; trial < trials; ++trial) {
    const auto s = sample_inhomogeneous(kernel, n, p, derive_seed(seed, trial));
    const auto a = scaled_adjacency(s.graph, p);
    KernelComparisonTrial t;
    t.embed_deviation = spectral_norm(a - detail::permuted_over_n(kbar, s.points));
    const auto g_grid = graph_step_kernel(s.graph, s.points, p);
    t.step_distance = spectral_norm(g_grid.values() - kbar.values()) / nd;
    t.discretization_remainder = remainder;
    t.operator_distance = t.step_distance + remainder;
    const double theta_obs = t.operator_distance;

    SpectralDecomposition sd;
    if (opt.gamma) sd = eig_sym(a);
    else sd.eigenvalues = eigvals_sym(a);
    for (Eigen::Index i = sd.eigenvalues.size() - 1; i >= 0 && t.leading.size() < top_k; --i)
      t.leading.push_back(sd.eigenvalues(i));

    for (const auto& set : opt.interval_sets) {
      MultiplicityTransfer m;
      m.applicable = set.inf_abs() > theta_obs;
      if (m.applicable) {
        const auto grown = set.dilate(theta_obs);
        m.m_matrix = multiplicity_count(sd.eigenvalues, set);
        m.m_operator_dilated = reference_multiplicity(spectrum, grown);
        m.m_operator = reference_multiplicity(spectrum, set);
        m.m_matrix_dilated = multiplicity_count(sd.eigenvalues, grown);
        m.forward = m.m_matrix <= m.m_operator_dilated;
        m.backward = m.m_operator <= m.m_matrix_dilated;
      }
      t.multiplicity.push_back(m);
    }

    if (opt.gamma) {
      const double gamma = *opt.gamma;
      for (const auto& e : spectrum) {
        ProjectorComparison pc;
        pc.alpha = e.value;
        pc.gamma = gamma;
        bool isolated = std::abs(e.value) >= 2.0 * gamma;  // 0 is always in the spectrum
        for (const auto& other : spectrum)
          if (other.value != e.value && std::abs(other.value - e.value) < 2.0 * gamma) isolated = false;
        pc.applicable = isolated && gamma > theta_obs;
        const auto pi_a = eigen_range_projector(sd, e.value - gamma, e.value + gamma);
        pc.lhs = spectral_norm(pi_a.matrix - embedded_eigenprojector(kernel, s.points, e.value));
        pc.rhs = gamma > theta_obs ? 4.0 * theta_obs / (std::numbers::pi * (gamma - theta_obs))
                                   : std::numeric_limits<double>::infinity();
        t.projectors.push_back(pc);
      }
    }
    report.trials.push_back(std::move(t));
  }
  return report;
}

/// Exact cut norm sup_{A,B} |integral over A x B of eta| of a step kernel:
/// enumerate row sets S and take the best column set for each sign.
inline double cut_norm_step(const StepKernel& sk) {
  const std::size_t n = sk.resolution();
  require(n <= 24, Errc::TooLarge, "cut_norm_step: resolution > 24");
  const Eigen::MatrixXd& v = sk.values().dense();
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(nn);
  std::uint32_t set = 0;
  double best = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto r = static_cast<Eigen::Index>(std::countr_zero(k));
    const std::uint32_t bit = 1u << r;
    if (set & bit) {
      set &= ~bit;
      col_sums -= v.row(r).transpose();
    } else {
      set |= bit;
      col_sums += v.row(r).transpose();
    }
    double pos = 0.0;
    double neg = 0.0;
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (col_sums(j) > 0.0) pos += col_sums(j);
      else neg -= col_sums(j);
    }
    best = std::max({best, pos, neg});
  }
  const double nd = static_cast<double>(n);
  return best / (nd * nd);
}

struct NormSandwich {
  double cut2 = 0.0;       // ||eta||_cut,2
  double cut_lower = 0.0;  // ||eta||_cut lies in [cut2, 4 cut2]
  double cut_upper = 0.0;
  double op = 0.0;         // ||eta||_op
  bool consistent = false; // op >= cut2
};

inline NormSandwich norm_sandwich_check(const StepKernel& sk) {
  NormSandwich out;
  out.cut2 = cut_norm_step(sk);
  out.cut_lower = out.cut2;
  out.cut_upper = 4.0 * out.cut2;
  out.op = step_operator_norm(sk);
  out.consistent = out.op >= out.cut2 - 1e-12 * std::max(1.0, out.cut2);
  return out;
}

/// H_n and E_n = H_n^T written in an orthonormal basis of step functions on a
/// grid `refinement` times finer than the n cells. H(k, i) = 1/sqrt(r) when
/// fine cell k lies in coarse cell sigma(i).
struct StepCoordinates {
  std::size_t n = 0;
  std::size_t refinement = 1;
  Eigen::MatrixXd H;  // (n r) x n
  Eigen::MatrixXd E;  // n x (n r)
};

inline StepCoordinates step_coordinates(const PointSample& pts, std::size_t refinement = 4) {
  require(refinement >= 1, Errc::InvalidParameter, "step_coordinates: refinement must be >= 1");
  StepCoordinates sc;
  sc.n = pts.size();
  sc.refinement = refinement;
  const auto n = static_cast<Eigen::Index>(sc.n);
  const auto r = static_cast<Eigen::Index>(refinement);
  sc.H = Eigen::MatrixXd::Zero(n * r, n);
  const double w = 1.0 / std::sqrt(static_cast<double>(refinement));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cell = static_cast<Eigen::Index>(pts.rank[static_cast<std::size_t>(i)]);
    for (Eigen::Index f = 0; f < r; ++f) sc.H(cell * r + f, i) = w;
  }
  sc.E = sc.H.transpose();
  return sc;
}

/// Matrix of T_eta in the fine orthonormal basis: entry (k,l) is
/// values(cell(k), cell(l)) / (n r).
inline Eigen::MatrixXd realize_step_operator(const StepKernel& sk, std::size_t refinement) {
  const auto n = static_cast<Eigen::Index>(sk.resolution());
  const auto r = static_cast<Eigen::Index>(refinement);
  const double m = static_cast<double>(n * r);
  Eigen::MatrixXd out(n * r, n * r);
  for (Eigen::Index l = 0; l < n * r; ++l)
    for (Eigen::Index k = 0; k < n * r; ++k) out(k, l) = sk.values()(static_cast<std::size_t>(k / r), static_cast<std::size_t>(l / r)) / m;
  return out;
}

struct EmbeddedProjectorCheck {
  std::size_t eigenspaces = 0;
  double idempotence_error = 0.0;    // max ||Q^2 - Q||_F
  double symmetry_error = 0.0;       // max ||Q - Q^T||_F
  double orthogonality_error = 0.0;  // max ||Q_a Q_b||_F, a != b
  double completeness_error = 0.0;   // ||sum Q - H E||_F
};

/// Groups the spectrum of `a` into eigenspaces (eigenvalues within
/// 1e-9 max(1, ||a||) are merged) and checks that the maps H Pi_alpha E are
/// orthogonal projections with orthogonal ranges.
inline EmbeddedProjectorCheck embedded_projector_family_check(const SymmetricMatrix& a, const StepCoordinates& sc) {
  require(a.order() == sc.n, Errc::DimensionMismatch, "embedded_projector_family_check: sizes differ");
  const auto sd = eig_sym(a);
  const double tol = 1e-9 * std::max(1.0, std::max(std::abs(sd.min()), std::abs(sd.max())));
  std::vector<Eigen::MatrixXd> q;
  Eigen::Index start = 0;
  const Eigen::Index n = sd.eigenvalues.size();
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && sd.eigenvalues(end) - sd.eigenvalues(end - 1) <= tol) ++end;
    const Eigen::MatrixXd basis = sd.eigenvectors.middleCols(start, end - start);
    q.push_back(sc.H * (basis * basis.transpose()) * sc.E);
    start = end;
  }
  EmbeddedProjectorCheck out;
  out.eigenspaces = q.size();
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(sc.H.rows(), sc.H.rows());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.idempotence_error = std::max(out.idempotence_error, (q[i] * q[i] - q[i]).norm());
    out.symmetry_error = std::max(out.symmetry_error, (q[i] - q[i].transpose()).norm());
    for (std::size_t j = i + 1; j < q.size(); ++j)
      out.orthogonality_error = std::max(out.orthogonality_error, (q[i] * q[j]).norm());
    total += q[i];
  }
  out.completeness_error = (total - sc.H * sc.E).norm();
  return out;
}

/// Largest difference between the nonzero eigenvalues of the step-kernel
/// grid over n and those of A/(pn); +inf when the nonzero counts differ.
inline double nonzero_spectrum_transfer_error(const Graph& g, const PointSample& pts, double p,
                                              double zero_tol = 1e-9) {
  const double nd = static_cast<double>(g.order());
  const Eigen::VectorXd grid_ev = eigvals_sym(graph_step_kernel(g, pts, p).values()) / nd;
  const auto a_ev = eigvals_sym(scaled_adjacency(g, p));
  std::vector<double> x;
  std::vector<double> y;
  for (Eigen::Index i = 0; i < grid_ev.size(); ++i)
    if (std::abs(grid_ev(i)) > zero_tol) x.push_back(grid_ev(i));
  for (Eigen::Index i = 0; i < a_ev.size(); ++i)
    if (std::abs(a_ev(i)) > zero_tol) y.push_back(a_ev(i));
  if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

}  // namespace graphconc
