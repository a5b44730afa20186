#include "slag/stability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace slag {

double evaluate_component_coefficient(const Eigen::VectorXd& lambda, int i,
                                      int j, int k) {
  if (i == j && j == k) return 1.0 + lambda[i] * lambda[i];
  if (i == j) return 3.0 + lambda[i] * lambda[i] + 2.0 * lambda[i] * lambda[k];
  if (j == k) return 3.0 + lambda[j] * lambda[j] + 2.0 * lambda[j] * lambda[i];
  return 6.0 + 2.0 * (lambda[i] * lambda[j] + lambda[j] * lambda[k] +
                      lambda[k] * lambda[i]);
}

DiagonalFormCoefficients form_coefficients(const Spectrum& spec) {
  const int n = spec.dim();
  const auto table = component_table(n);
  DiagonalFormCoefficients out;
  out.n = n;
  out.coef.resize(table.size());
  out.multiplicity.resize(table.size());
  out.ratio.resize(table.size());
  for (std::size_t c = 0; c < table.size(); ++c) {
    const auto [i, j, k] = table[c].index;
    out.coef[c] = evaluate_component_coefficient(spec.values(), i, j, k);
    out.multiplicity[c] = table[c].multiplicity;
    out.ratio[c] = out.coef[c] / out.multiplicity[c];
  }
  return out;
}

double stability_form_value(const Spectrum& spec, const Sym3Tensor& t) {
  const int n = spec.dim();
  if (n != t.dim()) {
    throw std::invalid_argument("stability_form_value: dimension mismatch");
  }
  const Eigen::VectorXd& l = spec.values();
  double norm_term = 0.0, diag_term = 0.0, cross_term = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double h = t(i, j, k);
        norm_term += h * h;
      }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const double h = t(i, i, k);
      diag_term += l[i] * l[i] * h * h;
    }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double h = t(i, j, k);
        cross_term += l[i] * l[j] * h * h;
      }
  return norm_term + diag_term + 2.0 * cross_term;
}

double stability_form_value_diagonal(const DiagonalFormCoefficients& coeffs,
                                     const Sym3Tensor& t) {
  if (coeffs.n != t.dim()) {
    throw std::invalid_argument(
        "stability_form_value_diagonal: dimension mismatch");
  }
  return coeffs.coef.dot(t.coeffs().cwiseAbs2());
}

AmbientSecondForm::AmbientSecondForm(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("second form dimension must be >= 1");
  blocks_.assign(n, Eigen::MatrixXd::Zero(n, n));
}

AmbientSecondForm lagrangianize(const Sym3Tensor& t) {
  const int n = t.dim();
  AmbientSecondForm h(n);
  for (int alpha = 0; alpha < n; ++alpha)
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) h.set(alpha, i, k, t(alpha, i, k));
  return h;
}

double second_form_bracket(const Spectrum& spec, const AmbientSecondForm& h) {
  const int n = spec.dim();
  if (n != h.dim()) {
    throw std::invalid_argument("second_form_bracket: dimension mismatch");
  }
  const Eigen::VectorXd& l = spec.values();
  double norm_term = 0.0;
  for (int alpha = 0; alpha < n; ++alpha) norm_term += h.block(alpha).squaredNorm();
  double diag_cross = 0.0, mixed_cross = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        diag_cross += l[i] * l[j] * h(i, i, k) * h(j, j, k);
        mixed_cross += l[i] * l[j] * h(j, i, k) * h(i, j, k);
      }
  return norm_term - 2.0 * diag_cross + 2.0 * mixed_cross;
}

double trace_identity_residual(const Spectrum& spec, const Sym3Tensor& t) {
  const int n = spec.dim();
  if (n != t.dim()) {
    throw std::invalid_argument("trace_identity_residual: dimension mismatch");
  }
  const double max_trace = traces(t).cwiseAbs().maxCoeff();
  if (max_trace > 1e-10) {
    throw std::invalid_argument(
        "trace_identity_residual: tensor is not trace-free (max trace "
        "magnitude " +
        std::to_string(max_trace) + ")");
  }
  const Eigen::VectorXd& l = spec.values();
  double lhs = 0.0;
  for (int i = 0; i < n; ++i) {
    const double h = t(i, i, i);
    lhs += l[i] * l[i] * h * h;
  }
  double rhs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double h = t(i, j, j);
      rhs += l[i] * l[i] * h * h;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int lidx = j + 1; lidx < n; ++lidx) {
        if (j == i || lidx == i) continue;
        rhs += 2.0 * l[i] * l[i] * t(i, j, j) * t(i, lidx, lidx);
      }
  return std::abs(lhs - rhs);
}

double pair_inequality_min(const Spectrum& spec, const Sym3Tensor& t) {
  const int n = spec.dim();
  if (n < 3) {
    throw std::invalid_argument("pair_inequality_min requires n >= 3");
  }
  if (n != t.dim()) {
    throw std::invalid_argument("pair_inequality_min: dimension mismatch");
  }
  const Eigen::VectorXd& l = spec.values();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        if (j == i || k == i) continue;
        const double triple = l[i] * l[j] + l[j] * l[k] + l[k] * l[i];
        if (triple < 0.0) continue;
        const double hijj = t(i, j, j);
        const double hikk = t(i, k, k);
        const double value = 2.0 * l[i] * l[i] * hijj * hikk +
                             (l[i] + l[k]) * (l[i] + l[k]) * hikk * hikk +
                             (l[i] + l[j]) * (l[i] + l[j]) * hijj * hijj;
        best = std::min(best, value);
      }
  return best;
}

}  // namespace slag
