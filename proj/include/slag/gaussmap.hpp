#pragma once

#include <optional>
#include <vector>

#include "slag/types.hpp"

namespace slag {

/// Rotation applied simultaneously in every (x_i, y_i) coordinate plane;
/// theta must lie in (-pi/2, pi/2].
struct RotationAngle {
  explicit RotationAngle(double theta_radians);
  double theta = 0.0;
};

/// A graphical Lagrangian plane: the graph of a symmetric slope matrix,
/// with its spectrum cached.
struct LagrangianPlane {
  explicit LagrangianPlane(SymMatrix slope_matrix);
  SymMatrix slope;
  Spectrum spectrum;
};

/// Sorted (descending) eigenvalues of the slope matrix.
Spectrum plane_spectrum(const SymMatrix& s);

/// Diagonal-torus rotation acting on spectra:
///   lambda -> (lambda cos t - sin t) / (cos t + lambda sin t)
///           = tan(arctan(lambda) - t).
/// A vanishing denominator means the rotated plane is vertical over the base
/// (no longer a graph) and is reported as an error.
Spectrum lewy_rotate(const Spectrum& spec, RotationAngle angle);

inline constexpr int kRotationGridCount = 720;  // step pi/720 over (-pi/2, pi/2]

struct RotationSearchResult {
  std::optional<RotationAngle> angle;
  /// Worst-case margins over the input family, at the returned angle when
  /// admissible, otherwise the best lexicographic (ball, xi) pair seen.
  double ball_margin = 0.0;
  double xi_margin = 0.0;
};

/// Scans the rotation grid for an angle placing every rotated spectrum in
/// Xi and the K-ball; among admissible angles returns the one maximizing the
/// worst-case (ball margin, xi margin) pair lexicographically. Pole-hitting
/// angles are skipped.
RotationSearchResult find_admissible_rotation(
    const std::vector<Spectrum>& spectra, double K, double tol = 1e-9);

}  // namespace slag
