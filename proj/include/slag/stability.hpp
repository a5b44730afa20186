#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slag/sym3tensor.hpp"
#include "slag/types.hpp"

namespace slag {

/// The stability quadratic form
///   F(h) = sum_ijk h_ijk^2 + sum_ki lambda_i^2 h_iik^2
///          + 2 sum_{k, i<j} lambda_i lambda_j h_ijk^2
/// is diagonal in sorted-component coordinates. coef(c) collects everything
/// multiplying coeff(c)^2; ratio(c) = coef(c)/m(c) expresses the form in
/// ambient-orthonormal coordinates.
struct DiagonalFormCoefficients {
  int n = 0;
  Eigen::VectorXd coef;
  Eigen::VectorXd multiplicity;
  Eigen::VectorXd ratio;
};

/// Per component:
///   (i,i,i)          -> 1 + lambda_i^2
///   (i,i,j), i != j  -> 3 + lambda_i^2 + 2 lambda_i lambda_j  (i repeated)
///   (i,j,k) distinct -> 6 + 2(l_i l_j + l_j l_k + l_k l_i)
double evaluate_component_coefficient(const Eigen::VectorXd& lambda, int i,
                                      int j, int k);
DiagonalFormCoefficients form_coefficients(const Spectrum& spec);

/// F(h) by the literal sum over ordered index triples. Kept loop-expanded so
/// it can serve as the oracle for the diagonal fast path.
double stability_form_value(const Spectrum& spec, const Sym3Tensor& t);

/// F(h) via the diagonal coefficient table (fast path).
double stability_form_value_diagonal(const DiagonalFormCoefficients& coeffs,
                                     const Sym3Tensor& t);

/// Second fundamental form of a general (not necessarily Lagrangian) graph:
/// h[alpha](i,k), symmetric in (i,k) only.
class AmbientSecondForm {
 public:
  AmbientSecondForm() = default;
  explicit AmbientSecondForm(int n);

  int dim() const { return n_; }
  double operator()(int alpha, int i, int k) const {
    return blocks_[alpha](i, k);
  }
  void set(int alpha, int i, int k, double value) {
    blocks_[alpha](i, k) = value;
    blocks_[alpha](k, i) = value;
  }
  const Eigen::MatrixXd& block(int alpha) const { return blocks_[alpha]; }

 private:
  int n_ = 0;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Identifies normal index n+i with tangent index i: h[i](j,k) = t(i,j,k).
AmbientSecondForm lagrangianize(const Sym3Tensor& t);

/// The bracket of the Laplacian of the projection Jacobian for a general
/// second form:
///   sum_{alpha,i,k} h_{alpha ik}^2
///   - 2 sum_{k,i<j} l_i l_j h_{n+i,ik} h_{n+j,jk}
///   + 2 sum_{k,i<j} l_i l_j h_{n+j,ik} h_{n+i,jk}
double second_form_bracket(const Spectrum& spec, const AmbientSecondForm& h);

/// For trace-free t, the mean-curvature substitution
///   sum_i l_i^2 h_iii^2 = sum_{i != j} l_i^2 h_ijj^2
///                         + 2 sum_{i != j, i != l, j < l} l_i^2 h_ijj h_ill
/// is an identity; returns |LHS - RHS|. Rejects tensors whose traces exceed
/// 1e-10 in magnitude.
double trace_identity_residual(const Spectrum& spec, const Sym3Tensor& t);

/// Minimum over index triples (i; j < l, both != i) whose pairwise-product
/// sum l_i l_j + l_j l_l + l_l l_i is nonnegative of
///   2 l_i^2 h_ijj h_ill + (l_i + l_l)^2 h_ill^2 + (l_i + l_j)^2 h_ijj^2,
/// each a PSD 2x2 block under the triple condition. +inf when no triple
/// qualifies; rejects n < 3.
double pair_inequality_min(const Spectrum& spec, const Sym3Tensor& t);

}  // namespace slag
