#include "slag/gaussmap.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "slag/numkernel.hpp"

namespace slag {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double min_pair_margin(const Eigen::VectorXd& l) {
  const int n = static_cast<int>(l.size());
  if (n < 2) return kInf;
  double margin = kInf;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) margin = std::min(margin, l[i] * l[j] + 1.0);
  return margin;
}

}  // namespace

RotationAngle::RotationAngle(double theta_radians) : theta(theta_radians) {
  if (!std::isfinite(theta) || theta <= -kPi / 2 || theta > kPi / 2) {
    throw std::invalid_argument(
        "rotation angle must lie in (-pi/2, pi/2], got " +
        std::to_string(theta_radians));
  }
}

LagrangianPlane::LagrangianPlane(SymMatrix slope_matrix)
    : slope(std::move(slope_matrix)), spectrum(plane_spectrum(slope)) {}

Spectrum plane_spectrum(const SymMatrix& s) {
  const EigenDecomposition eig = sym_eigen(s);
  return Spectrum(eig.eigenvalues.reverse());
}

Spectrum lewy_rotate(const Spectrum& spec, RotationAngle angle) {
  const double c = std::cos(angle.theta);
  const double s = std::sin(angle.theta);
  Eigen::VectorXd out(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) {
    const double denom = c + spec[i] * s;
    if (std::abs(denom) < kPoleTolerance) {
      throw std::domain_error(
          "lewy_rotate: rotated plane is vertical over the base (eigenvalue " +
          std::to_string(spec[i]) + " at angle " + std::to_string(angle.theta) +
          " is not a graph)");
    }
    out[i] = (spec[i] * c - s) / denom;
  }
  return Spectrum(std::move(out));
}

RotationSearchResult find_admissible_rotation(
    const std::vector<Spectrum>& spectra, double K, double tol) {
  if (spectra.empty()) {
    throw std::invalid_argument("find_admissible_rotation: empty family");
  }
  if (!(K > 0.0)) {
    throw std::invalid_argument("find_admissible_rotation: K must be positive");
  }

  const double step = kPi / kRotationGridCount;
  using Pair = std::pair<double, double>;  // (ball margin, xi margin)
  Pair best_any{-kInf, -kInf};
  Pair best_admissible{-kInf, -kInf};
  double best_theta = 0.0;
  bool found = false;

  for (int k = 1; k <= kRotationGridCount; ++k) {
    const double theta = k == kRotationGridCount ? kPi / 2
                                                 : -kPi / 2 + k * step;
    double worst_ball = kInf;
    double worst_xi = kInf;
    bool pole = false;
    for (const Spectrum& spec : spectra) {
      Spectrum rotated;
      try {
        rotated = lewy_rotate(spec, RotationAngle(theta));
      } catch (const std::domain_error&) {
        pole = true;
        break;
      }
      worst_ball = std::min(worst_ball, K - rotated.max_abs());
      worst_xi = std::min(worst_xi, min_pair_margin(rotated.values()));
    }
    if (pole) continue;

    const Pair margins{worst_ball, worst_xi};
    best_any = std::max(best_any, margins);
    if (worst_ball >= -tol && worst_xi >= -tol && margins > best_admissible) {
      best_admissible = margins;
      best_theta = theta;
      found = true;
    }
  }

  RotationSearchResult result;
  if (found) {
    result.angle = RotationAngle(best_theta);
    result.ball_margin = best_admissible.first;
    result.xi_margin = best_admissible.second;
  } else {
    result.ball_margin = best_any.first;
    result.xi_margin = best_any.second;
  }
  return result;
}

}  // namespace slag
