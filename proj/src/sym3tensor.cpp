#include "slag/sym3tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slag/rng.hpp"

namespace slag {

namespace {

void check_dim(int n) {
  if (n < 1) throw std::invalid_argument("tensor dimension must be >= 1");
}

std::array<int, 3> sorted_triple(int i, int j, int k) {
  std::array<int, 3> t{i, j, k};
  std::sort(t.begin(), t.end());
  return t;
}

}  // namespace

std::vector<ComponentEntry> component_table(int n) {
  check_dim(n);
  std::vector<ComponentEntry> table;
  table.reserve(Sym3Tensor::component_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        int mult = 6;
        if (i == j && j == k) {
          mult = 1;
        } else if (i == j || j == k) {
          mult = 3;
        }
        table.push_back({{i, j, k}, mult});
      }
  return table;
}

Sym3Tensor::Sym3Tensor(int n)
    : n_(n), coeffs_(Eigen::VectorXd::Zero(component_count(n))) {
  check_dim(n);
}

Sym3Tensor::Sym3Tensor(int n, Eigen::VectorXd coeffs) : n_(n) {
  check_dim(n);
  if (coeffs.size() != component_count(n)) {
    throw std::invalid_argument(
        "Sym3Tensor coefficient count mismatch: expected " +
        std::to_string(component_count(n)) + ", got " +
        std::to_string(coeffs.size()));
  }
  for (int c = 0; c < coeffs.size(); ++c) {
    if (!std::isfinite(coeffs[c])) {
      throw std::invalid_argument("Sym3Tensor coefficient " +
                                  std::to_string(c) + " is not finite");
    }
  }
  coeffs_ = std::move(coeffs);
}

int Sym3Tensor::component_index(int n, int i, int j, int k) {
  const auto [a, b, c] = sorted_triple(i, j, k);
  if (a < 0 || c >= n) throw std::out_of_range("tensor index out of range");
  // Offset of the block with first index a, then of the (b, c) pair.
  // Block a holds the sorted pairs over {a..n-1}: (n-a)(n-a+1)/2 entries.
  const auto pairs = [](int m) { return m * (m + 1) / 2; };
  int offset = 0;
  for (int t = 0; t < a; ++t) offset += pairs(n - t);
  offset += pairs(n - a) - pairs(n - b);
  return offset + (c - b);
}

double ambient_norm_sq(const Sym3Tensor& t) { return ambient_dot(t, t); }

double ambient_dot(const Sym3Tensor& a, const Sym3Tensor& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("ambient_dot: dimension mismatch");
  }
  const auto table = component_table(a.dim());
  double s = 0.0;
  for (std::size_t c = 0; c < table.size(); ++c) {
    s += table[c].multiplicity * a.coeffs()[c] * b.coeffs()[c];
  }
  return s;
}

Eigen::VectorXd traces(const Sym3Tensor& t) {
  const int n = t.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) out[k] += t(i, i, k);
  return out;
}

namespace {

// Trace constraints in ambient-orthonormal coordinates u_c = sqrt(m_c) h_c.
// Row k has support on components {i,i,k}; supports are pairwise disjoint,
// so the rows are orthogonal and projection is a single pass.
Eigen::MatrixXd trace_constraint_rows(int n) {
  const int d = Sym3Tensor::component_count(n);
  const auto table = component_table(n);
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(n, d);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const int c = Sym3Tensor::component_index(n, i, i, k);
      rows(k, c) += 1.0 / std::sqrt(static_cast<double>(table[c].multiplicity));
    }
  for (int k = 0; k < n; ++k) rows.row(k).normalize();
  return rows;
}

Eigen::VectorXd to_u(const Sym3Tensor& t) {
  const auto table = component_table(t.dim());
  Eigen::VectorXd u(t.coeffs().size());
  for (std::size_t c = 0; c < table.size(); ++c)
    u[c] = std::sqrt(static_cast<double>(table[c].multiplicity)) *
           t.coeffs()[c];
  return u;
}

Sym3Tensor from_u(int n, const Eigen::VectorXd& u) {
  const auto table = component_table(n);
  Eigen::VectorXd coeffs(u.size());
  for (std::size_t c = 0; c < table.size(); ++c)
    coeffs[c] = u[c] / std::sqrt(static_cast<double>(table[c].multiplicity));
  return Sym3Tensor(n, std::move(coeffs));
}

}  // namespace

TraceFreeBasis trace_free_basis(int n) {
  check_dim(n);
  const int d = Sym3Tensor::component_count(n);
  const int target = d - n;
  const Eigen::MatrixXd rows = trace_constraint_rows(n);

  TraceFreeBasis basis;
  basis.n = n;
  basis.elements.reserve(target);

  std::vector<Eigen::VectorXd> accepted;
  accepted.reserve(target);
  for (int c = 0; c < d && static_cast<int>(accepted.size()) < target; ++c) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    w[c] = 1.0;
    // Two Gram-Schmidt passes against the constraints and accepted vectors.
    for (int pass = 0; pass < 2; ++pass) {
      w -= rows.transpose() * (rows * w);
      for (const auto& b : accepted) w -= b.dot(w) * b;
    }
    const double norm = w.norm();
    if (norm > 1e-8) accepted.push_back(w / norm);
  }
  if (static_cast<int>(accepted.size()) != target) {
    throw std::runtime_error("trace_free_basis: rank deficiency (got " +
                             std::to_string(accepted.size()) + ", expected " +
                             std::to_string(target) + ")");
  }
  for (const auto& u : accepted) basis.elements.push_back(from_u(n, u));
  return basis;
}

Sym3Tensor project_trace_free(const Sym3Tensor& t) {
  const Eigen::MatrixXd rows = trace_constraint_rows(t.dim());
  Eigen::VectorXd u = to_u(t);
  u -= rows.transpose() * (rows * u);
  return from_u(t.dim(), u);
}

Sym3Tensor random_trace_free(int n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument(
        "random_trace_free: the trace-free subspace is trivial for n = 1");
  }
  const int d = Sym3Tensor::component_count(n);
  Lcg rng(seed);
  while (true) {
    Eigen::VectorXd coeffs(d);
    for (int c = 0; c < d; ++c) coeffs[c] = rng.normal();
    Sym3Tensor t = project_trace_free(Sym3Tensor(n, std::move(coeffs)));
    const double norm_sq = ambient_norm_sq(t);
    if (norm_sq < 1e-12) continue;  // resample a degenerate draw
    t.coeffs() /= std::sqrt(norm_sq);
    return t;
  }
}

}  // namespace slag
