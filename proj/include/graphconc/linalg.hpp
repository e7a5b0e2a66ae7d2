#pragma once

// Dense real symmetric linear algebra: spectral decomposition, spectral norm,
// the positive semi-definite order, matrix exponential and eigen-range
// projectors. Backed by Eigen's tridiagonal QR solver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "graphconc/error.hpp"

namespace graphconc {

/// Dense real symmetric matrix. Entries are stored once in the upper
/// triangle and mirrored, so (i,j) and (j,i) always agree bit for bit.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(std::size_t n) : data_(Eigen::MatrixXd::Zero(idx(n), idx(n))) {}

  static SymmetricMatrix zeros(std::size_t n) { return SymmetricMatrix(n); }

  static SymmetricMatrix identity(std::size_t n) {
    SymmetricMatrix m(n);
    m.data_.setIdentity();
    return m;
  }

  static SymmetricMatrix diagonal(std::span<const double> values) {
    SymmetricMatrix m(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m.set(i, i, values[i]);
    return m;
  }

  static SymmetricMatrix constant(std::size_t n, double value) {
    SymmetricMatrix m(n);
    m.data_.setConstant(value);
    m.check_finite();
    return m;
  }

  /// Requires exact symmetry and finite entries.
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& dense) {
    require(dense.rows() == dense.cols(), Errc::DimensionMismatch, "matrix is not square");
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      for (Eigen::Index i = 0; i < j; ++i)
        require(dense(i, j) == dense(j, i), Errc::InvalidParameter,
                "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    SymmetricMatrix m;
    m.data_ = dense;
    m.check_finite();
    return m;
  }

  /// Copies the upper triangle of `dense` and mirrors it. Used for results of
  /// products that are symmetric in exact arithmetic.
  static SymmetricMatrix from_upper(const Eigen::MatrixXd& dense) {
    require(dense.rows() == dense.cols(), Errc::DimensionMismatch, "matrix is not square");
    SymmetricMatrix m;
    m.data_ = dense;
    m.data_.template triangularView<Eigen::StrictlyLower>() = dense.transpose();
    m.check_finite();
    return m;
  }

  std::size_t order() const noexcept { return static_cast<std::size_t>(data_.rows()); }

  double operator()(std::size_t i, std::size_t j) const { return data_(idx(i), idx(j)); }

  void set(std::size_t i, std::size_t j, double value) {
    require(std::isfinite(value), Errc::NonFinite, "non-finite matrix entry");
    data_(idx(i), idx(j)) = value;
    data_(idx(j), idx(i)) = value;
  }

  const Eigen::MatrixXd& dense() const noexcept { return data_; }

  double trace() const { return data_.trace(); }
  double frobenius_norm() const { return data_.norm(); }

  SymmetricMatrix& operator+=(const SymmetricMatrix& other) {
    same_order(other);
    data_ += other.data_;
    return *this;
  }
  SymmetricMatrix& operator-=(const SymmetricMatrix& other) {
    same_order(other);
    data_ -= other.data_;
    return *this;
  }
  SymmetricMatrix& operator*=(double s) {
    data_ *= s;
    return *this;
  }

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(SymmetricMatrix a, double s) { return a *= s; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend SymmetricMatrix operator-(SymmetricMatrix a) { return a *= -1.0; }

  bool operator==(const SymmetricMatrix& other) const {
    return order() == other.order() && data_ == other.data_;
  }

  bool all_finite() const { return data_.allFinite(); }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  void same_order(const SymmetricMatrix& other) const {
    require(order() == other.order(), Errc::DimensionMismatch,
            "orders differ: " + std::to_string(order()) + " vs " + std::to_string(other.order()));
  }

  void check_finite() const {
    require(data_.allFinite(), Errc::NonFinite, "matrix contains non-finite entries");
  }

  Eigen::MatrixXd data_;
};

/// Square of a symmetric matrix (symmetric in exact arithmetic).
inline SymmetricMatrix square(const SymmetricMatrix& a) {
  return SymmetricMatrix::from_upper(a.dense() * a.dense());
}

/// Ascending eigenvalues with orthonormal eigenvectors as columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::size_t source_order = 0;

  double min() const { return eigenvalues(0); }
  double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

struct Projector {
  SymmetricMatrix matrix;
  std::size_t rank = 0;
};

/// Eigensolver accuracy scale: 1e-10 * max(1, ||A||_F).
inline double tol_eig(const SymmetricMatrix& a) {
  return 1e-10 * std::max(1.0, a.frobenius_norm());
}

namespace detail {

inline void check_input(const SymmetricMatrix& a) {
  require(a.order() > 0, Errc::InvalidParameter, "empty matrix");
  require(a.all_finite(), Errc::NonFinite, "matrix contains non-finite entries");
}

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const SymmetricMatrix& a, int options) {
  check_input(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.dense(), options);
  require(solver.info() == Eigen::Success, Errc::ConvergenceFailure,
          "symmetric eigensolver exceeded its iteration cap (order " + std::to_string(a.order()) + ")");
  return solver;
}

}  // namespace detail

inline SpectralDecomposition eig_sym(const SymmetricMatrix& a) {
  auto solver = detail::solve(a, Eigen::ComputeEigenvectors);
  return {solver.eigenvalues(), solver.eigenvectors(), a.order()};
}

/// Ascending eigenvalues only; much cheaper than eig_sym for large orders.
inline Eigen::VectorXd eigvals_sym(const SymmetricMatrix& a) {
  return detail::solve(a, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double lambda_max(const SymmetricMatrix& a) {
  const auto ev = eigvals_sym(a);
  return ev(ev.size() - 1);
}

inline double lambda_min(const SymmetricMatrix& a) { return eigvals_sym(a)(0); }

/// ||A|| = max_i |lambda_i(A)|.
inline double spectral_norm(const SymmetricMatrix& a) {
  const auto ev = eigvals_sym(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// A <= B in the PSD order, up to `tol`: lambda_min(B - A) >= -tol.
inline bool psd_dominates(const SymmetricMatrix& a, const SymmetricMatrix& b, double tol) {
  require(a.order() == b.order(), Errc::DimensionMismatch, "psd_dominates: orders differ");
  require(tol >= 0.0, Errc::InvalidParameter, "psd_dominates: negative tolerance");
  return lambda_min(b - a) >= -tol;
}

/// Applies f to the spectrum: V diag(f(lambda)) V^T.
template <class F>
SymmetricMatrix spectral_apply(const SpectralDecomposition& sd, F&& f) {
  Eigen::VectorXd mapped(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(sd.eigenvalues(i));
  require(mapped.allFinite(), Errc::Overflow, "spectral function produced non-finite values");
  const Eigen::MatrixXd& v = sd.eigenvectors;
  return SymmetricMatrix::from_upper(v * mapped.asDiagonal() * v.transpose());
}

inline SymmetricMatrix matrix_exp(const SymmetricMatrix& a) {
  return spectral_apply(eig_sym(a), [](double x) { return std::exp(x); });
}

/// Orthogonal projector onto eigenvectors with eigenvalue in the closed
/// interval [a, b]. Membership uses exact comparison on computed eigenvalues.
inline Projector eigen_range_projector(const SpectralDecomposition& sd, double a, double b) {
  require(a <= b, Errc::InvalidParameter, "eigen_range_projector: a > b");
  const auto n = static_cast<Eigen::Index>(sd.source_order);
  std::vector<Eigen::Index> selected;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = sd.eigenvalues(i);
    if (a <= lambda && lambda <= b) selected.push_back(i);
  }
  Eigen::MatrixXd basis(n, static_cast<Eigen::Index>(selected.size()));
  for (std::size_t k = 0; k < selected.size(); ++k)
    basis.col(static_cast<Eigen::Index>(k)) = sd.eigenvectors.col(selected[k]);
  return {SymmetricMatrix::from_upper(basis * basis.transpose()), selected.size()};
}

inline Projector eigen_range_projector(const SymmetricMatrix& m, double a, double b) {
  require(a <= b, Errc::InvalidParameter, "eigen_range_projector: a > b");
  return eigen_range_projector(eig_sym(m), a, b);
}

struct InterlacingReport {
  double max_eigen_gap = 0.0;
  double norm_gap = 0.0;
};

/// max_i |lambda_i(B1) - lambda_i(B2)| over sorted spectra, against ||B1 - B2||.
inline InterlacingReport interlacing_report(const SymmetricMatrix& b1, const SymmetricMatrix& b2) {
  require(b1.order() == b2.order(), Errc::DimensionMismatch, "interlacing_report: orders differ");
  const auto e1 = eigvals_sym(b1);
  const auto e2 = eigvals_sym(b2);
  return {(e1 - e2).cwiseAbs().maxCoeff(), spectral_norm(b1 - b2)};
}

struct TraceInequality {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = Tr exp(A+B), rhs = Tr(exp(A) exp(B)).
inline TraceInequality golden_thompson_report(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  require(a.order() == b.order(), Errc::DimensionMismatch, "golden_thompson_report: orders differ");
  const auto lhs = matrix_exp(a + b).trace();
  // Tr(XY) for symmetric X, Y is the entrywise inner product.
  const auto rhs = matrix_exp(a).dense().cwiseProduct(matrix_exp(b).dense()).sum();
  require(std::isfinite(lhs) && std::isfinite(rhs), Errc::Overflow, "trace overflow");
  return {lhs, rhs};
}

}  // namespace graphconc
