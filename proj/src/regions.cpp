#include "slag/regions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "slag/numkernel.hpp"
#include "slag/rng.hpp"
#include "slag/stability.hpp"
#include "slag/sym3tensor.hpp"

namespace slag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long long kRejectionCap = 1000000;

double xi_margin_of(const Eigen::VectorXd& l) {
  const int n = static_cast<int>(l.size());
  if (n < 2) return kInf;
  double margin = kInf;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) margin = std::min(margin, l[i] * l[j] + 1.0);
  return margin;
}

double xi_prime_margin_of(const Eigen::VectorXd& l) {
  const int n = static_cast<int>(l.size());
  if (n < 3) return kInf;
  double margin = kInf;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        margin = std::min(margin, l[i] * l[j] + l[j] * l[k] + l[k] * l[i]);
  return margin;
}

double restricted_margin(const Spectrum& spec, const TraceFreeBasis& basis,
                         double ratio_shift) {
  DiagonalFormCoefficients coeffs = form_coefficients(spec);
  if (ratio_shift != 0.0) {
    coeffs.ratio.array() -= ratio_shift;
    coeffs.coef = coeffs.ratio.cwiseProduct(coeffs.multiplicity);
  }
  return restricted_min_eigenvalue(coeffs, basis);
}

RegionReport classify_with_basis(const Spectrum& spec, double K, double tol,
                                 const TraceFreeBasis& basis) {
  if (!(K > 0.0)) throw std::invalid_argument("classify: K must be positive");
  if (!(tol >= 0.0)) {
    throw std::invalid_argument("classify: tolerance must be nonnegative");
  }
  const int n = spec.dim();
  RegionReport r;
  r.spectrum = spec;
  r.K = K;
  r.tolerance = tol;
  r.ball_margin = K - spec.max_abs();
  r.xi_margin = xi_margin_of(spec.values());
  r.xi_prime_margin = xi_prime_margin_of(spec.values());
  if (n < 2) {
    r.m_margin = kInf;
    r.strengthened_margin = kInf;
  } else {
    r.m_margin = restricted_margin(spec, basis, 0.0);
    r.strengthened_margin = restricted_margin(spec, basis, 1.0);
  }
  r.flags.ball = r.ball_margin >= -tol;
  r.flags.xi = r.xi_margin >= -tol;
  r.flags.xi_prime = r.xi_prime_margin >= -tol;
  r.flags.m_semi = r.m_margin >= -tol;
  r.flags.m_strict = r.m_margin > tol;
  r.flags.m_k = r.flags.m_semi && r.flags.ball;
  r.flags.strengthened = r.strengthened_margin >= -tol;
  return r;
}

}  // namespace

RegionReport classify(const Spectrum& spec, double K, double tol) {
  TraceFreeBasis basis;
  basis.n = spec.dim();
  if (spec.dim() >= 2) basis = trace_free_basis(spec.dim());
  return classify_with_basis(spec, K, tol, basis);
}

double m_margin(const Spectrum& spec) {
  if (spec.dim() < 2) return kInf;
  return restricted_margin(spec, trace_free_basis(spec.dim()), 0.0);
}

double strengthened_margin(const Spectrum& spec) {
  if (spec.dim() < 2) return kInf;
  return restricted_margin(spec, trace_free_basis(spec.dim()), 1.0);
}

const char* to_string(ScanCondition c) {
  switch (c) {
    case ScanCondition::kNone:
      return "none";
    case ScanCondition::kXi:
      return "xi";
    case ScanCondition::kXiPrime:
      return "xiprime";
  }
  return "none";
}

ScanSummary region_scan(int n, double K, int count, std::uint64_t seed,
                        ScanCondition condition, double tol,
                        bool collect_samples) {
  if (n < 1) throw std::invalid_argument("region_scan: n must be >= 1");
  if (!(K > 0.0)) throw std::invalid_argument("region_scan: K must be positive");
  if (count < 1) throw std::invalid_argument("region_scan: count must be >= 1");

  ScanSummary s;
  s.n = n;
  s.K = K;
  s.count = count;
  s.seed = seed;
  s.tolerance = tol;
  s.condition = condition;
  s.min_ball.value = kInf;
  s.min_xi.value = kInf;
  s.min_xi_prime.value = kInf;
  s.min_m.value = kInf;
  s.min_strengthened.value = kInf;

  TraceFreeBasis basis = n >= 2 ? trace_free_basis(n) : TraceFreeBasis{};
  basis.n = n;

  const auto track = [](ExtremalMargin& slot, double value,
                        const Eigen::VectorXd& spectrum) {
    if (value < slot.value) {
      slot.value = value;
      slot.spectrum = spectrum;
    }
  };

  for (int sample = 0; sample < count; ++sample) {
    Lcg rng(derive_seed(seed, static_cast<std::uint64_t>(sample)));
    Eigen::VectorXd l(n);
    long long attempts = 0;
    while (true) {
      if (++attempts > kRejectionCap) {
        throw std::runtime_error(
            "region_scan: rejection cap of 1e6 attempts exceeded for "
            "condition " +
            std::string(to_string(condition)));
      }
      for (int i = 0; i < n; ++i) l[i] = rng.uniform(-K, K);
      if (condition == ScanCondition::kXi && xi_margin_of(l) < 0.0) continue;
      if (condition == ScanCondition::kXiPrime && xi_prime_margin_of(l) < 0.0)
        continue;
      break;
    }

    const RegionReport r = classify_with_basis(Spectrum(l), K, tol, basis);
    s.in_ball += r.flags.ball;
    s.in_xi += r.flags.xi;
    s.in_xi_prime += r.flags.xi_prime;
    s.in_m_semi += r.flags.m_semi;
    s.in_m_strict += r.flags.m_strict;
    s.in_strengthened += r.flags.strengthened;
    if (r.flags.m_strict && !r.flags.xi && !r.flags.xi_prime) {
      ++s.in_m_not_xi_or_xi_prime;
    }

    track(s.min_ball, r.ball_margin, l);
    track(s.min_xi, r.xi_margin, l);
    track(s.min_xi_prime, r.xi_prime_margin, l);
    track(s.min_m, r.m_margin, l);
    track(s.min_strengthened, r.strengthened_margin, l);

    std::string counterexample_kind;
    if (r.flags.xi && r.m_margin < -tol) {
      counterexample_kind = "xi_m";
      s.xi_m_counterexamples.push_back({counterexample_kind, l, r.m_margin});
    }
    if (r.flags.xi_prime && r.strengthened_margin < -tol) {
      counterexample_kind = counterexample_kind.empty()
                                ? "xi_prime_strengthened"
                                : counterexample_kind + "+xi_prime_strengthened";
      s.xi_prime_strengthened_counterexamples.push_back(
          {"xi_prime_strengthened", l, r.strengthened_margin});
    }

    if (collect_samples) {
      ScanSample row;
      row.spectrum = l;
      row.ball = r.ball_margin;
      row.xi = r.xi_margin;
      row.xi_prime = r.xi_prime_margin;
      row.m = r.m_margin;
      row.strengthened = r.strengthened_margin;
      row.flags = r.flags;
      row.counterexample_kind = counterexample_kind;
      s.samples.push_back(std::move(row));
    }
  }
  return s;
}

}  // namespace slag
