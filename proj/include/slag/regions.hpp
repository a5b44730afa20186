#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "slag/types.hpp"

namespace slag {

inline constexpr double kDefaultTolerance = 1e-9;

struct RegionFlags {
  bool ball = false;
  bool xi = false;
  bool xi_prime = false;
  bool m_semi = false;    // margin >= -tol
  bool m_strict = false;  // margin > tol (form vanishes only at 0)
  bool m_k = false;       // m_semi and ball
  bool strengthened = false;
};

/// Margins are signed distances to the region boundaries: nonnegative means
/// inside. xi_prime is +inf below n = 3; for n = 1 everything but the ball
/// margin is +inf (the trace-free subspace is trivial).
struct RegionReport {
  Spectrum spectrum;
  double K = 0.0;
  double tolerance = kDefaultTolerance;
  double ball_margin = 0.0;
  double xi_margin = 0.0;
  double xi_prime_margin = 0.0;
  double m_margin = 0.0;
  double strengthened_margin = 0.0;
  RegionFlags flags;
};

RegionReport classify(const Spectrum& spec, double K,
                      double tol = kDefaultTolerance);

/// Minimum of the stability form over unit trace-free tensors. The spectrum
/// is in the M region iff this is positive.
double m_margin(const Spectrum& spec);

/// Same restricted eigenvalue with every diagonal ratio reduced by one,
/// i.e. the minimum of F(h) - |h|^2 over unit trace-free h.
double strengthened_margin(const Spectrum& spec);

enum class ScanCondition { kNone, kXi, kXiPrime };

struct ScanCounterexample {
  std::string kind;  // "xi_m" or "xi_prime_strengthened"
  Eigen::VectorXd spectrum;
  double margin = 0.0;
};

struct ExtremalMargin {
  double value = 0.0;
  Eigen::VectorXd spectrum;
};

struct ScanSample {
  Eigen::VectorXd spectrum;
  double ball = 0.0, xi = 0.0, xi_prime = 0.0, m = 0.0, strengthened = 0.0;
  RegionFlags flags;
  std::string counterexample_kind;  // empty if none
};

struct ScanSummary {
  int n = 0;
  double K = 0.0;
  int count = 0;
  std::uint64_t seed = 0;
  double tolerance = kDefaultTolerance;
  ScanCondition condition = ScanCondition::kNone;

  long long in_ball = 0, in_xi = 0, in_xi_prime = 0;
  long long in_m_semi = 0, in_m_strict = 0, in_strengthened = 0;
  long long in_m_not_xi_or_xi_prime = 0;

  ExtremalMargin min_ball, min_xi, min_xi_prime, min_m, min_strengthened;

  std::vector<ScanCounterexample> xi_m_counterexamples;
  std::vector<ScanCounterexample> xi_prime_strengthened_counterexamples;

  std::vector<ScanSample> samples;  // filled only when requested

  bool has_counterexamples() const {
    return !xi_m_counterexamples.empty() ||
           !xi_prime_strengthened_counterexamples.empty();
  }
};

/// Samples spectra uniformly from [-K, K]^n with per-sample derived seeds
/// (deterministic and schedule-independent). With a condition, rejection
/// samples into Xi or Xi' with a cap of 1e6 attempts per sample. Any sample
/// inside Xi whose m margin drops below -tol, or inside Xi' whose
/// strengthened margin does, is recorded as a counterexample.
ScanSummary region_scan(int n, double K, int count, std::uint64_t seed,
                        ScanCondition condition = ScanCondition::kNone,
                        double tol = kDefaultTolerance,
                        bool collect_samples = false);

const char* to_string(ScanCondition c);

}  // namespace slag
