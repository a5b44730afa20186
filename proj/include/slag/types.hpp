#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <vector>

namespace slag {

/// Ordered eigenvalue list of a Lagrangian plane's slope matrix. Values are
/// kept in construction order so a spectrum can be paired positionally with
/// tensor components; canonical() gives the descending sort used in reports.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(Eigen::VectorXd values);
  Spectrum(std::initializer_list<double> values);

  int dim() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  /// Descending-sorted copy (canonical form for reports).
  Spectrum canonical() const;
  double max_abs() const;

 private:
  Eigen::VectorXd values_;
};

/// Dense symmetric matrix stored as the packed upper triangle (row-major,
/// i <= j), so symmetry holds by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);
  SymMatrix(int n, Eigen::VectorXd packed);

  static SymMatrix FromDense(const Eigen::MatrixXd& m);

  int dim() const { return n_; }
  double operator()(int i, int j) const { return packed_[packed_index(i, j)]; }
  void set(int i, int j, double value) { packed_[packed_index(i, j)] = value; }

  const Eigen::VectorXd& packed() const { return packed_; }
  Eigen::MatrixXd dense() const;

  static int packed_size(int n) { return n * (n + 1) / 2; }

 private:
  int packed_index(int i, int j) const;

  int n_ = 0;
  Eigen::VectorXd packed_;
};

}  // namespace slag
