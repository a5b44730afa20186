#pragma once

#include <Eigen/Dense>

#include "slag/stability.hpp"
#include "slag/sym3tensor.hpp"
#include "slag/types.hpp"

namespace slag {

/// Eigenvalues sorted ascending; eigenvectors are the matching orthonormal
/// columns, each sign-normalized so its first nonzero component is positive.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Cyclic Jacobi sweeps on the dense symmetric matrix. Terminates when the
/// off-diagonal Frobenius norm drops below 1e-13 * ||M||_F (at most 60
/// sweeps). Deterministic: identical input gives bit-identical output.
EigenDecomposition sym_eigen(const SymMatrix& m);

/// Same solver on a raw symmetric Eigen matrix (no packing round-trip).
EigenDecomposition sym_eigen(const Eigen::MatrixXd& m);

/// Minimum of the diagonal form over the unit sphere of the trace-free
/// subspace: smallest eigenvalue of B^T Lambda B where B holds the basis in
/// ambient-orthonormal coordinates and Lambda the per-component ratios.
/// +inf for an empty basis.
double restricted_min_eigenvalue(const DiagonalFormCoefficients& form,
                                 const TraceFreeBasis& basis);

}  // namespace slag
