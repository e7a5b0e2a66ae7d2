#pragma once

// Seeded random test instances: symmetric matrices with prescribed spectra,
// perturbations of a given norm and random graphs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/graph.hpp"
#include "graphconc/linalg.hpp"
#include "graphconc/rng.hpp"

namespace graphconc {

/// Symmetric matrix with entries uniform on [-scale, scale].
inline SymmetricMatrix random_symmetric(std::size_t n, Xoshiro256& rng, double scale = 1.0) {
  SymmetricMatrix out(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.set(i, j, scale * (2.0 * rng.uniform() - 1.0));
  return out;
}

/// Orthogonal Q from the Householder QR of a uniform random matrix.
inline Eigen::MatrixXd random_orthogonal(std::size_t n, Xoshiro256& rng) {
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g(nn, nn);
  for (Eigen::Index j = 0; j < nn; ++j)
    for (Eigen::Index i = 0; i < nn; ++i) g(i, j) = 2.0 * rng.uniform() - 1.0;
  return g.householderQr().householderQ() * Eigen::MatrixXd::Identity(nn, nn);
}

/// Q diag(eigenvalues) Q^T for a random orthogonal Q.
inline SymmetricMatrix with_spectrum(const std::vector<double>& eigenvalues, Xoshiro256& rng) {
  const auto q = random_orthogonal(eigenvalues.size(), rng);
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(), static_cast<Eigen::Index>(eigenvalues.size()));
  return SymmetricMatrix::from_upper(q * d.asDiagonal() * q.transpose());
}

/// Random symmetric matrix rescaled to spectral norm `norm`.
inline SymmetricMatrix random_perturbation(std::size_t n, double norm, Xoshiro256& rng) {
  require(norm >= 0.0, Errc::InvalidParameter, "random_perturbation: norm must be >= 0");
  auto e = random_symmetric(n, rng);
  const double s = spectral_norm(e);
  if (s == 0.0) return SymmetricMatrix(n);
  return e * (norm / s);
}

/// C with ||C|| <= 1: a random symmetric matrix scaled by u/||C|| for u uniform on [0,1].
inline SymmetricMatrix random_contraction(std::size_t n, Xoshiro256& rng) {
  auto c = random_symmetric(n, rng);
  const double s = spectral_norm(c);
  if (s == 0.0) return c;
  return c * (rng.uniform() / s);
}

/// Loopless graph keeping each pair independently with probability p.
inline Graph random_simple_graph(std::size_t n, double p, Xoshiro256& rng) {
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.emplace_back(i, j);
  return Graph(n, std::move(edges));
}

/// Pair (V, W = V + E) with ||E|| = eps and V free of eigenvalues within
/// gamma of a and b. V's eigenvalues are uniform on [lo, hi], redrawn while
/// they fall in a forbidden window.
struct PerturbationInstance {
  SymmetricMatrix v;
  SymmetricMatrix w;
  double eps = 0.0;
};

inline PerturbationInstance gapped_perturbation_instance(std::size_t n, double lo, double hi, double a, double b,
                                                         double gamma, double eps, Xoshiro256& rng) {
  require(lo < hi && gamma > 0.0 && eps >= 0.0, Errc::InvalidParameter, "perturbation instance: bad parameters");
  require(hi - lo > 4.0 * gamma, Errc::InvalidParameter, "perturbation instance: range too narrow for the gaps");
  std::vector<double> ev(n);
  for (auto& x : ev) {
    do {
      x = lo + (hi - lo) * rng.uniform();
    } while (std::abs(x - a) < gamma || std::abs(x - b) < gamma);
  }
  auto v = with_spectrum(ev, rng);
  auto w = v + random_perturbation(n, eps, rng);
  return {std::move(v), std::move(w), eps};
}

}  // namespace graphconc
