#pragma once

// Stability of eigenvalue multiplicities and spectral projectors under
// symmetric perturbations, plus a spectral projector computed as a contour
// integral of the resolvent.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "graphconc/error.hpp"
#include "graphconc/linalg.hpp"

namespace graphconc {

/// Finite union of closed intervals, kept sorted with overlaps merged.
class IntervalSet {
 public:
  using Interval = std::pair<double, double>;

  IntervalSet() = default;
  IntervalSet(std::initializer_list<Interval> intervals) : IntervalSet(std::vector<Interval>(intervals)) {}
  explicit IntervalSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    for (const auto& [a, b] : intervals_) {
      require(!std::isnan(a) && !std::isnan(b), Errc::InvalidParameter, "interval endpoint is NaN");
      require(a <= b, Errc::InvalidParameter, "interval with a > b");
    }
    normalize();
  }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool empty() const noexcept { return intervals_.empty(); }

  bool contains(double x) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [x](const Interval& iv) { return iv.first <= x && x <= iv.second; });
  }

  /// inf over s in S of |s|; +inf for the empty set.
  double inf_abs() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : intervals_) {
      if (a <= 0.0 && 0.0 <= b) return 0.0;
      best = std::min({best, std::abs(a), std::abs(b)});
    }
    return best;
  }

  /// S^eps = {x : |x - s| <= eps for some s in S}.
  IntervalSet dilate(double eps) const {
    require(eps >= 0.0, Errc::InvalidParameter, "dilate: eps must be >= 0");
    std::vector<Interval> grown;
    grown.reserve(intervals_.size());
    for (const auto& [a, b] : intervals_) grown.emplace_back(a - eps, b + eps);
    return IntervalSet(std::move(grown));
  }

  bool operator==(const IntervalSet&) const = default;

 private:
  void normalize() {
    std::sort(intervals_.begin(), intervals_.end());
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
      if (!merged.empty() && iv.first <= merged.back().second)
        merged.back().second = std::max(merged.back().second, iv.second);
      else
        merged.push_back(iv);
    }
    intervals_ = std::move(merged);
  }

  std::vector<Interval> intervals_;
};

inline IntervalSet dilate(const IntervalSet& s, double eps) { return s.dilate(eps); }

/// Number of eigenvalues (with multiplicity) lying in S.
inline std::size_t multiplicity_count(std::span<const double> spectrum, const IntervalSet& s) {
  return static_cast<std::size_t>(
      std::count_if(spectrum.begin(), spectrum.end(), [&](double x) { return s.contains(x); }));
}

inline std::size_t multiplicity_count(const Eigen::VectorXd& spectrum, const IntervalSet& s) {
  return multiplicity_count(std::span<const double>(spectrum.data(), static_cast<std::size_t>(spectrum.size())), s);
}

struct MultiplicityCheck {
  double eps = 0.0;  // ||V - W||
  std::size_t m_v = 0;
  std::size_t m_w_dilated = 0;
  std::size_t m_w = 0;
  std::size_t m_v_dilated = 0;
  bool holds_forward = false;   // m_V(S) <= m_W(S^eps)
  bool holds_backward = false;  // m_W(S) <= m_V(S^eps)
};

/// Requires inf_{s in S} |s| > ||V - W||.
inline MultiplicityCheck multiplicity_lemma_check(const SymmetricMatrix& v, const SymmetricMatrix& w,
                                                  const IntervalSet& s) {
  require(v.order() == w.order(), Errc::DimensionMismatch, "multiplicity_lemma_check: orders differ");
  MultiplicityCheck out;
  out.eps = spectral_norm(v - w);
  require(s.inf_abs() > out.eps, Errc::HypothesisViolated,
          "multiplicity_lemma_check: S comes within ||V - W|| of zero");
  const auto ev = eigvals_sym(v);
  const auto ew = eigvals_sym(w);
  const auto grown = s.dilate(out.eps);
  out.m_v = multiplicity_count(ev, s);
  out.m_w = multiplicity_count(ew, s);
  out.m_w_dilated = multiplicity_count(ew, grown);
  out.m_v_dilated = multiplicity_count(ev, grown);
  out.holds_forward = out.m_v <= out.m_w_dilated;
  out.holds_backward = out.m_w <= out.m_v_dilated;
  return out;
}

/// (b - a + 2 gamma) eps / (pi (gamma^2 - gamma eps)).
inline double projector_perturbation_bound(double a, double b, double gamma, double eps) {
  require(a < b, Errc::InvalidParameter, "projector bound: need a < b");
  require(eps >= 0.0, Errc::InvalidParameter, "projector bound: eps must be >= 0");
  require(gamma > eps, Errc::InvalidParameter, "projector bound: need gamma > eps");
  require(a + gamma < b - gamma, Errc::InvalidParameter, "projector bound: need a + gamma < b - gamma");
  return (b - a + 2.0 * gamma) * eps / (std::numbers::pi * (gamma * gamma - gamma * eps));
}

struct ProjectorCheck {
  double eps = 0.0;
  double lhs = 0.0;  // ||Pi_{a,b}(V) - Pi_{a,b}(W)||
  double rhs = 0.0;
  bool holds = false;
};

/// Requires V to have no eigenvalue in (a-gamma, a+gamma) or (b-gamma, b+gamma)
/// and ||V - W|| < gamma.
inline ProjectorCheck projector_lemma_check(const SymmetricMatrix& v, const SymmetricMatrix& w, double a, double b,
                                            double gamma) {
  require(v.order() == w.order(), Errc::DimensionMismatch, "projector_lemma_check: orders differ");
  const auto sv = eig_sym(v);
  for (Eigen::Index i = 0; i < sv.eigenvalues.size(); ++i) {
    const double x = sv.eigenvalues(i);
    require(std::abs(x - a) >= gamma && std::abs(x - b) >= gamma, Errc::HypothesisViolated,
            "projector_lemma_check: V has an eigenvalue within gamma of a or b");
  }
  ProjectorCheck out;
  out.eps = spectral_norm(v - w);
  require(out.eps < gamma, Errc::HypothesisViolated, "projector_lemma_check: ||V - W|| >= gamma");
  const auto pv = eigen_range_projector(sv, a, b);
  const auto pw = eigen_range_projector(w, a, b);
  out.lhs = spectral_norm(pv.matrix - pw.matrix);
  out.rhs = projector_perturbation_bound(a, b, gamma, out.eps);
  out.holds = out.lhs <= out.rhs + tol_eig(v);
  return out;
}

/// (1/2 pi i) * contour integral of (zI - M)^{-1} around the rectangle with
/// corners a -/+ i gamma, b -/+ i gamma, by the composite trapezoid rule on
/// each side. The 4 * quad_points nodes are split across sides in proportion
/// to side length. The resolvent is applied through the eigendecomposition,
/// so the only error is quadrature error.
inline SymmetricMatrix contour_projector(const SymmetricMatrix& m, double a, double b, double gamma,
                                         std::size_t quad_points) {
  require(a < b, Errc::InvalidParameter, "contour_projector: need a < b");
  require(gamma > 0.0, Errc::InvalidParameter, "contour_projector: gamma must be positive");
  require(quad_points >= 16, Errc::InvalidParameter, "contour_projector: need at least 16 points per side");
  using cd = std::complex<double>;
  const auto sd = eig_sym(m);
  const auto& lambda = sd.eigenvalues;

  const std::array<std::pair<cd, cd>, 4> sides{{
      {cd(a, -gamma), cd(b, -gamma)},
      {cd(b, -gamma), cd(b, gamma)},
      {cd(b, gamma), cd(a, gamma)},
      {cd(a, gamma), cd(a, -gamma)},
  }};
  const double perimeter = 2.0 * (b - a) + 4.0 * gamma;
  const double total = 4.0 * static_cast<double>(quad_points);

  Eigen::VectorXcd weights = Eigen::VectorXcd::Zero(lambda.size());
  for (const auto& [start, end] : sides) {
    const double length = std::abs(end - start);
    const auto intervals = std::max<std::size_t>(4, static_cast<std::size_t>(std::lround(total * length / perimeter)));
    const cd h = (end - start) / static_cast<double>(intervals);
    for (std::size_t k = 0; k <= intervals; ++k) {
      const cd z = start + static_cast<double>(k) * h;
      const double w = (k == 0 || k == intervals) ? 0.5 : 1.0;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const cd diff = z - lambda(i);
        require(std::abs(diff) > 1e-8, Errc::SingularResolvent, "contour_projector: node hits an eigenvalue");
        weights(i) += w * h / diff;
      }
    }
  }
  const Eigen::VectorXd real_weights = (weights / cd(0.0, 2.0 * std::numbers::pi)).real();
  const Eigen::MatrixXd& v = sd.eigenvectors;
  return SymmetricMatrix::from_upper(v * real_weights.asDiagonal() * v.transpose());
}

}  // namespace graphconc
