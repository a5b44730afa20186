// Acceptance suite: one pass/fail line per criterion, pinned tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "slag/gaussmap.hpp"
#include "slag/numkernel.hpp"
#include "slag/regions.hpp"
#include "slag/rng.hpp"
#include "slag/slagfield.hpp"
#include "slag/stability.hpp"
#include "slag/sym3tensor.hpp"

using namespace slag;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

GraphField harmonic_field(int level) {
  // level 0: h = 1/64 on [-0.5, 0.5]^2; each level halves h.
  const int nodes = (64 << level) + 1;
  const double h = 1.0 / (nodes - 1);
  std::ostringstream desc;
  desc << "harmonic_expcos:shape=" << nodes << "," << nodes << ":h=" << h;
  return make_builtin_field(desc.str());
}

Outcome xi_implies_m() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  std::ostringstream detail;
  for (int n : {2, 3, 4, 5}) {
    const ScanSummary s =
        region_scan(n, 3.0, 500, 1001 + n, ScanCondition::kXi);
    detail << "n=" << n << " min_m=" << fmt(s.min_m.value) << "  ";
    if (s.min_m.value < -1e-9) o.pass = false;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  detail << "(" << fmt(elapsed) << " s)";
  if (elapsed > 30.0) o.pass = false;
  o.detail = detail.str();
  return o;
}

Outcome xi_prime_strengthened() {
  Outcome o;
  std::ostringstream detail;
  for (int n : {3, 4, 5}) {
    const ScanSummary s =
        region_scan(n, 3.0, 500, 2001 + n, ScanCondition::kXiPrime);
    detail << "n=" << n << " min_strengthened=" << fmt(s.min_strengthened.value)
           << " counterexamples=" << s.xi_prime_strengthened_counterexamples.size()
           << "  ";
    if (s.min_strengthened.value < -1e-9) o.pass = false;
  }
  o.detail = detail.str();
  return o;
}

Outcome two_dim_vacuity() {
  const ScanSummary s = region_scan(2, 10.0, 500, 3001);
  Outcome o;
  o.pass = s.min_strengthened.value >= -1e-9;
  o.detail = "min_strengthened=" + fmt(s.min_strengthened.value);
  return o;
}

Outcome witness_fixture() {
  const Spectrum spec{10.0, -10.0, 0.0};
  Sym3Tensor witness(3);
  witness.set(0, 0, 1, 1.0);
  witness.set(1, 2, 2, -1.0);
  const double f = stability_form_value(spec, witness);
  const double m = m_margin(spec);
  Outcome o;
  o.pass = std::abs(f - (-94.0)) <= 1e-9 && m <= -15.0;
  o.detail = "form=" + fmt(f) + " m_margin=" + fmt(m);
  return o;
}

Outcome margin_fixture() {
  const double m = m_margin(Spectrum{2.0, -0.5});
  Outcome o;
  o.pass = std::abs(m - 1.5625) <= 1e-9;
  o.detail = "m_margin=" + fmt(m);
  return o;
}

Outcome lewy_footnote() {
  Outcome o;
  double worst_entry = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    Lcg rng(derive_seed(4001, trial));
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) v[i] = rng.uniform(0.0, 100.0);
    const Spectrum rotated =
        lewy_rotate(Spectrum(v), RotationAngle(3.14159265358979323846 / 4));
    worst_entry = std::max(worst_entry, rotated.max_abs());
    if (rotated.max_abs() > 1.0 + 1e-12) o.pass = false;
    const RegionReport r = classify(rotated, 1.0);
    if (!r.flags.ball || !r.flags.xi) o.pass = false;
  }
  o.detail = "max |rotated eigenvalue| = " + fmt(worst_entry);
  return o;
}

Outcome bracket_identity() {
  Outcome o;
  double worst = 0.0;
  Lcg seeds(5001);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    Lcg rng(seeds.next_u64());
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = rng.uniform(-3.0, 3.0);
    const Spectrum spec(l);
    Eigen::VectorXd coeffs(Sym3Tensor::component_count(n));
    for (int c = 0; c < coeffs.size(); ++c) coeffs[c] = rng.normal();
    const Sym3Tensor t(n, coeffs);

    const double f = stability_form_value(spec, t);
    const double bracket = second_form_bracket(spec, lagrangianize(t));
    double weighted = 0.0;
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += spec[i] * t(i, i, k);
      weighted += s * s;
    }
    const double rel = std::abs(f - bracket - weighted) /
                       (1.0 + std::abs(f) + std::abs(bracket));
    worst = std::max(worst, rel);
    if (rel > 1e-10) o.pass = false;
  }
  o.detail = "worst relative residual = " + fmt(worst);
  return o;
}

Outcome trace_identity() {
  Outcome o;
  double worst = 0.0;
  Lcg seeds(6001);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 3;
    Lcg rng(seeds.next_u64());
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = rng.uniform(-3.0, 3.0);
    const Sym3Tensor t = random_trace_free(n, seeds.next_u64());
    const double res = trace_identity_residual(Spectrum(l), t);
    worst = std::max(worst, res);
    if (res > 1e-9) o.pass = false;
  }
  o.detail = "worst residual = " + fmt(worst);
  return o;
}

Outcome pair_inequality() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  Lcg seeds(7001);
  int accepted = 0;
  while (accepted < 200) {
    const int n = 3 + accepted % 3;
    Lcg rng(seeds.next_u64());
    Eigen::VectorXd l(n);
    for (int i = 0; i < n; ++i) l[i] = rng.uniform(-3.0, 3.0);
    bool in_xi_prime = true;
    for (int i = 0; i < n && in_xi_prime; ++i)
      for (int j = i + 1; j < n && in_xi_prime; ++j)
        for (int k = j + 1; k < n; ++k)
          if (l[i] * l[j] + l[j] * l[k] + l[k] * l[i] < 0.0) {
            in_xi_prime = false;
            break;
          }
    if (!in_xi_prime) continue;
    ++accepted;
    const Sym3Tensor t = random_trace_free(n, seeds.next_u64());
    const double value = pair_inequality_min(Spectrum(l), t);
    const double bound = -1e-10 * ambient_norm_sq(t);
    worst = std::min(worst, value);
    if (value < bound) o.pass = false;
  }
  o.detail = "worst triple value = " + fmt(worst);
  return o;
}

Outcome gradient_identity_orders() {
  Outcome o;
  std::vector<double> residuals;
  for (int level = 0; level < 3; ++level) {
    const GraphField field = harmonic_field(level);
    const int c = (64 << level) / 2;
    const int center[2] = {c, c};
    residuals.push_back(gradient_identity_residual(field, center).maxCoeff());
  }
  std::ostringstream detail;
  detail << "residuals " << fmt(residuals[0]) << " / " << fmt(residuals[1])
         << " / " << fmt(residuals[2]) << ", orders";
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(residuals[i] / residuals[i + 1]);
    detail << " " << fmt(order);
    if (order < 1.8) o.pass = false;
  }
  o.detail = detail.str();
  return o;
}

Outcome laplacian_cross_check() {
  Outcome o;
  // Closed-form side: lambda = (1, -1) with the handmade unit second form.
  const double h1 = 1.0 / (2.0 * std::sqrt(2.0));
  Sym3Tensor hand(2);
  hand.set(0, 0, 0, h1);
  hand.set(0, 1, 1, -h1);
  const double analytic = -stability_form_value(Spectrum{1.0, -1.0}, hand);
  if (std::abs(analytic - (-0.5)) > 1e-10) o.pass = false;

  std::vector<double> errors;
  double fd_fine = 0.0;
  for (int level = 0; level < 3; ++level) {
    const GraphField field = harmonic_field(level);
    const int c = (64 << level) / 2;
    const int center[2] = {c, c};
    const double fd = surface_laplacian(field, center);
    errors.push_back(std::abs(fd + 0.5));
    fd_fine = fd;
  }
  if (std::abs(fd_fine + 0.5) > 0.05 * 0.5) o.pass = false;

  std::ostringstream detail;
  detail << "analytic=" << fmt(analytic) << " fd(h=1/256)=" << fmt(fd_fine)
         << ", orders";
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    detail << " " << fmt(order);
    if (order < 1.5) o.pass = false;
  }
  o.detail = detail.str();
  return o;
}

Outcome equation_residual() {
  Outcome o;
  std::ostringstream detail;
  for (const char* desc : {"quadratic:2:1,0,1", "quadratic:2:1,0.5,-1",
                           "paraboloid:3:0.4"}) {
    const ResidualStats stats = residual_stats(make_builtin_field(desc));
    if (stats.stddev > 1e-12) o.pass = false;
  }
  detail << "quadratic stddev ok; harmonic orders";
  std::vector<double> max_residuals;
  for (int level = 0; level < 3; ++level) {
    const ResidualStats stats = residual_stats(harmonic_field(level), 0.0);
    max_residuals.push_back(stats.max_abs);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    const double order = std::log2(max_residuals[i] / max_residuals[i + 1]);
    detail << " " << fmt(order);
    if (order < 1.8) o.pass = false;
  }
  o.detail = detail.str();
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::ostringstream detail;
  for (int n : {2, 3}) {
    std::vector<Sym3Tensor> tensors;
    tensors.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      tensors.push_back(random_trace_free(n, derive_seed(8000 + n, i)));
    }
    const TraceFreeBasis basis = trace_free_basis(n);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      Lcg rng(derive_seed(8100 + n, trial));
      Eigen::VectorXd l(n);
      for (int i = 0; i < n; ++i) l[i] = rng.uniform(-3.0, 3.0);
      const Spectrum spec(l);
      const double restricted =
          restricted_min_eigenvalue(form_coefficients(spec), basis);
      double sampled = std::numeric_limits<double>::infinity();
      for (const Sym3Tensor& t : tensors) {
        sampled = std::min(sampled, stability_form_value(spec, t));
      }
      if (sampled < restricted - 1e-6) o.pass = false;
      if (n == 2 && std::abs(sampled - restricted) > 1e-3) o.pass = false;
      worst_gap = std::max(worst_gap, sampled - restricted);
    }
    detail << "n=" << n << " worst sampled-restricted gap=" << fmt(worst_gap)
           << "  ";
  }
  o.detail = detail.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Xi-conditioned spectra stay in the M region", xi_implies_m},
      {2, "Xi'-conditioned spectra keep the strengthened margin",
       xi_prime_strengthened},
      {3, "two-dimensional strengthened margin is unconditional",
       two_dim_vacuity},
      {4, "witness tensor fixture (form -94, margin below -15)",
       witness_fixture},
      {5, "restricted margin fixture 1.5625", margin_fixture},
      {6, "quarter-turn rotation bounds convex spectra", lewy_footnote},
      {7, "bracket identity between the two form routes", bracket_identity},
      {8, "trace substitution identity", trace_identity},
      {9, "pairwise triple inequality", pair_inequality},
      {10, "gradient identity residual converges at order 1.8+",
       gradient_identity_orders},
      {11, "Laplacian cross-check at the origin (-0.5)",
       laplacian_cross_check},
      {12, "equation residual: exact on quadratics, order 1.8+ on harmonic",
       equation_residual},
      {13, "sampled Rayleigh minimum matches the restricted eigenvalue",
       oracle_equivalence},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d. %s — %s\n", o.pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
