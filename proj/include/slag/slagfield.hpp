#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slag/regions.hpp"
#include "slag/sym3tensor.hpp"
#include "slag/types.hpp"

namespace slag {

/// Uniform-grid samples of a scalar potential F on a box in R^n, n <= 3.
/// Values are stored row-major (last index fastest).
class GraphField {
 public:
  GraphField() = default;
  GraphField(int n, Eigen::VectorXd origin, double spacing,
             std::vector<int> shape, Eigen::VectorXd values);

  int dim() const { return n_; }
  const Eigen::VectorXd& origin() const { return origin_; }
  double spacing() const { return spacing_; }
  const std::vector<int>& shape() const { return shape_; }
  const Eigen::VectorXd& values() const { return values_; }

  long long flat_index(std::span<const int> idx) const;
  double value(std::span<const int> idx) const {
    return values_[flat_index(idx)];
  }
  /// Coordinates of a grid node.
  Eigen::VectorXd point(std::span<const int> idx) const;
  /// Distance (in nodes) to the nearest boundary face.
  int margin(std::span<const int> idx) const;

  /// Visits every interior index with at least `margin` nodes to spare on
  /// each side, in row-major order.
  template <typename Fn>
  void for_each_interior(int margin, Fn&& fn) const;

 private:
  int n_ = 0;
  Eigen::VectorXd origin_;
  double spacing_ = 0.0;
  std::vector<int> shape_;
  Eigen::VectorXd values_;
};

/// Loads either a JSON field file or, with a "builtin:" prefix, a sampled
/// closed form. Builtin descriptors (colon-separated):
///   quadratic:<n>:<packed upper triangle of A>   F = x^T A x / 2
///   paraboloid:<n>:<c>                           F = c |x|^2 / 2
///   harmonic_expcos                              F = e^x cos y  (n = 2)
/// each optionally followed by shape=<s1,..>, h=<spacing>, origin=<o1,..>
/// tokens; defaults are 33 nodes per axis, spacing 1/16, box centered at 0.
GraphField load_field(const std::string& source);
GraphField load_field_file(const std::string& path);
GraphField make_builtin_field(const std::string& descriptor);

/// Second-order central differences; exact on quadratics. Needs one interior
/// node of margin.
SymMatrix hessian_at(const GraphField& field, std::span<const int> p);

/// Central differences of the Hessian stencils, symmetrized over the outer
/// index; exact on cubics. Needs two nodes of margin.
Sym3Tensor third_derivatives_at(const GraphField& field,
                                std::span<const int> p);

struct PointAnalysis {
  std::vector<int> index;
  SymMatrix hessian;
  Spectrum spectrum;  // descending, paired with the eigenframe below
  double omega = 0.0;      // projection Jacobian 1/sqrt(prod(1+l^2))
  double phase = 0.0;      // sum_i arctan(lambda_i)
  double residual = 0.0;   // Im det(I + i Hess F) - c
  Sym3Tensor second_form;  // h_abc in the eigenframe of the slope
  double a_norm_sq = 0.0;  // |A|^2
  /// Analytic Laplacian of ln(omega): minus the stability form of the
  /// second fundamental form.
  double laplacian_ln_omega = 0.0;
  /// Finite-difference surface Laplacian of ln(omega); NaN when the point
  /// has fewer than three nodes of margin.
  double fd_laplacian = 0.0;
  RegionReport region;
};

/// Full pointwise analysis. Needs two nodes of margin (three to also fill
/// fd_laplacian). The residual uses the stable product form
/// prod sqrt(1+l^2) * sin(sum arctan l) - c.
PointAnalysis analyze_point(const GraphField& field, std::span<const int> p,
                            double c, double K,
                            double tol = kDefaultTolerance);

struct ResidualStats {
  double c = 0.0;
  bool c_estimated = false;  // true when c came from the interior median
  double max_abs = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  long long count = 0;
};

/// Residual statistics of the graphical minimal-Lagrangian equation over all
/// 1-margin interior nodes. When c is absent it is estimated as the median
/// of Im det(I + i Hess F). Requires at least five nodes per axis.
ResidualStats residual_stats(const GraphField& field,
                             std::optional<double> c = std::nullopt);

/// Per-direction residual of the identity relating the derivative of the
/// projection Jacobian to the lambda-weighted traces of the second form:
///   d_k(omega) = -omega * sum_i lambda_i h_iik,
/// with d_k the finite-difference derivative along the k-th eigenvector,
/// normalized by sqrt(1+lambda_k^2). Needs three nodes of margin.
Eigen::VectorXd gradient_identity_residual(const GraphField& field,
                                           std::span<const int> p);

/// Divergence-form finite-difference Laplacian of ln(omega) in the induced
/// graph metric g = I + (Hess F)^2. Needs three nodes of margin.
double surface_laplacian(const GraphField& field, std::span<const int> p);

struct FieldViolation {
  std::vector<int> index;
  std::string kind;  // "xi_superharmonic" or "xi_prime_strengthened"
  double amount = 0.0;
};

struct FieldReport {
  double K = 0.0;
  double tolerance = kDefaultTolerance;
  double c = 0.0;
  bool c_estimated = false;
  std::vector<PointAnalysis> points;  // 3-margin interior, row-major order
  std::vector<double> mismatch;       // |laplacian_ln_omega - fd_laplacian|
  double max_mismatch = 0.0;
  std::vector<FieldViolation> violations;
};

/// Analyzes every 3-margin interior point and checks the superharmonicity
/// implications: inside Xi the analytic Laplacian of ln(omega) must be
/// nonpositive, and inside Xi' it must not exceed -|A|^2. The Xi' check
/// carries a computable slack for the (finite-difference) trace defect of
/// the second form, so discretization alone cannot trip it.
FieldReport superharmonicity_report(const GraphField& field, double K,
                                    std::optional<double> c = std::nullopt,
                                    double tol = kDefaultTolerance);

template <typename Fn>
void GraphField::for_each_interior(int margin, Fn&& fn) const {
  std::vector<int> idx(n_);
  bool any = true;
  for (int d = 0; d < n_; ++d) {
    idx[d] = margin;
    if (shape_[d] <= 2 * margin) any = false;
  }
  if (!any) return;
  while (true) {
    fn(std::span<const int>(idx));
    int d = n_ - 1;
    while (d >= 0) {
      if (++idx[d] <= shape_[d] - 1 - margin) break;
      idx[d] = margin;
      --d;
    }
    if (d < 0) break;
  }
}

}  // namespace slag
