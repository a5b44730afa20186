#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace slag {

/// One stored component of a symmetric 3-tensor: the sorted index triple and
/// the number of distinct permutations it stands for (1, 3 or 6).
struct ComponentEntry {
  std::array<int, 3> index;
  int multiplicity;
};

/// Sorted index triples (i <= j <= k) in lexicographic order, with
/// multiplicities. Table length is n(n+1)(n+2)/6; multiplicities sum to n^3.
std::vector<ComponentEntry> component_table(int n);

/// Fully symmetric 3-tensor on R^n, stored by sorted multi-index in
/// lexicographic order. Any index triple resolves to its sorted component.
class Sym3Tensor {
 public:
  Sym3Tensor() = default;
  explicit Sym3Tensor(int n);
  Sym3Tensor(int n, Eigen::VectorXd coeffs);

  static int component_count(int n) { return n * (n + 1) * (n + 2) / 6; }
  static int component_index(int n, int i, int j, int k);

  int dim() const { return n_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double operator()(int i, int j, int k) const {
    return coeffs_[component_index(n_, i, j, k)];
  }
  void set(int i, int j, int k, double value) {
    coeffs_[component_index(n_, i, j, k)] = value;
  }

 private:
  int n_ = 0;
  Eigen::VectorXd coeffs_;
};

/// Squared norm over all n^3 ordered triples, computed with multiplicity
/// weights: sum_c m(c) coeff(c)^2.
double ambient_norm_sq(const Sym3Tensor& t);

/// Multiplicity-weighted inner product (equals the ordered-triple sum).
double ambient_dot(const Sym3Tensor& a, const Sym3Tensor& b);

/// k-th entry is sum_i t(i,i,k).
Eigen::VectorXd traces(const Sym3Tensor& t);

/// Orthonormal basis (in the ambient inner product) of the trace-free
/// subspace; n(n+1)(n+2)/6 - n elements, each with all traces zero.
struct TraceFreeBasis {
  int n = 0;
  std::vector<Sym3Tensor> elements;
};

TraceFreeBasis trace_free_basis(int n);

/// Orthogonal projection onto the trace-free subspace (ambient metric).
Sym3Tensor project_trace_free(const Sym3Tensor& t);

/// Deterministic unit-norm trace-free tensor: normal coefficients from the
/// seeded stream, projected and normalized. Rejects n = 1 (trivial subspace).
Sym3Tensor random_trace_free(int n, std::uint64_t seed);

}  // namespace slag
