#include "slag/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slag/types.hpp"

namespace slag {

// ---------------------------------------------------------------------------
// Spectrum / SymMatrix
// ---------------------------------------------------------------------------

Spectrum::Spectrum(Eigen::VectorXd values) : values_(std::move(values)) {
  for (int i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("spectrum entry " + std::to_string(i) +
                                  " is not finite");
    }
  }
}

Spectrum::Spectrum(std::initializer_list<double> values)
    : Spectrum(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
          values.begin(), static_cast<Eigen::Index>(values.size())))) {}

Spectrum Spectrum::canonical() const {
  Eigen::VectorXd v = values_;
  std::sort(v.data(), v.data() + v.size(), std::greater<double>());
  return Spectrum(std::move(v));
}

double Spectrum::max_abs() const {
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

SymMatrix::SymMatrix(int n)
    : n_(n), packed_(Eigen::VectorXd::Zero(packed_size(n))) {
  if (n < 1) throw std::invalid_argument("SymMatrix dimension must be >= 1");
}

SymMatrix::SymMatrix(int n, Eigen::VectorXd packed) : n_(n) {
  if (n < 1) throw std::invalid_argument("SymMatrix dimension must be >= 1");
  if (packed.size() != packed_size(n)) {
    throw std::invalid_argument("SymMatrix packed size mismatch: expected " +
                                std::to_string(packed_size(n)) + ", got " +
                                std::to_string(packed.size()));
  }
  packed_ = std::move(packed);
}

SymMatrix SymMatrix::FromDense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("FromDense expects a square matrix");
  }
  const int n = static_cast<int>(m.rows());
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  return out;
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) m(i, j) = m(j, i) = (*this)(i, j);
  return m;
}

int SymMatrix::packed_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffDiagonalFactor = 1e-13;  // relative to ||M||_F

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  const int n = static_cast<int>(a.rows());
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
  return std::sqrt(s);
}

void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, int p, int q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const int n = static_cast<int>(a.rows());

  const double app = a(p, p), aqq = a(q, q);
  a(p, p) = c * c * app - 2.0 * s * c * apq + s * s * aqq;
  a(q, q) = s * s * app + 2.0 * s * c * apq + c * c * aqq;
  a(p, q) = a(q, p) = 0.0;
  for (int r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p), arq = a(r, q);
    a(r, p) = a(p, r) = c * arp - s * arq;
    a(r, q) = a(q, r) = s * arp + c * arq;
  }
  for (int r = 0; r < n; ++r) {
    const double vrp = v(r, p), vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

void normalize_column_signs(Eigen::MatrixXd& v) {
  const int n = static_cast<int>(v.rows());
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      if (std::abs(v(r, c)) > 1e-12) {
        if (v(r, c) < 0.0) v.col(c) = -v.col(c);
        break;
      }
    }
  }
}

bool column_less(const Eigen::MatrixXd& v, int a, int b) {
  for (int r = 0; r < v.rows(); ++r) {
    if (v(r, a) != v(r, b)) return v(r, a) < v(r, b);
  }
  return false;
}

}  // namespace

EigenDecomposition sym_eigen(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("sym_eigen expects a square matrix, n >= 1");
  }
  const int n = static_cast<int>(m.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(m(i, j))) {
        throw std::invalid_argument("sym_eigen: entry (" + std::to_string(i) +
                                    "," + std::to_string(j) +
                                    ") is not finite");
      }

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = kOffDiagonalFactor * a.norm();

  for (int sweep = 0; sweep < kMaxSweeps && n > 1; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  normalize_column_signs(v);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (a(x, x) != a(y, y)) return a(x, x) < a(y, y);
    return column_less(v, x, y);
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int c = 0; c < n; ++c) {
    out.eigenvalues[c] = a(order[c], order[c]);
    out.eigenvectors.col(c) = v.col(order[c]);
  }
  return out;
}

EigenDecomposition sym_eigen(const SymMatrix& m) { return sym_eigen(m.dense()); }

double restricted_min_eigenvalue(const DiagonalFormCoefficients& form,
                                 const TraceFreeBasis& basis) {
  if (form.n != basis.n) {
    throw std::invalid_argument(
        "restricted_min_eigenvalue: dimension mismatch (form n = " +
        std::to_string(form.n) + ", basis n = " + std::to_string(basis.n) +
        ")");
  }
  const int dim = static_cast<int>(basis.elements.size());
  if (dim == 0) return std::numeric_limits<double>::infinity();

  const int d = Sym3Tensor::component_count(form.n);
  const Eigen::VectorXd root_mult = form.multiplicity.cwiseSqrt();

  // Basis columns in ambient-orthonormal coordinates u_c = sqrt(m_c) h_c.
  Eigen::MatrixXd b(d, dim);
  for (int e = 0; e < dim; ++e) {
    if (basis.elements[e].dim() != form.n) {
      throw std::invalid_argument(
          "restricted_min_eigenvalue: basis element dimension mismatch");
    }
    b.col(e) = root_mult.cwiseProduct(basis.elements[e].coeffs());
  }

  Eigen::MatrixXd g = b.transpose() * form.ratio.asDiagonal() * b;
  g = 0.5 * (g + g.transpose()).eval();
  return sym_eigen(g).eigenvalues[0];
}

}  // namespace slag
