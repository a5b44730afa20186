#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "slag/rng.hpp"
#include "slag/sym3tensor.hpp"
#include "test_helpers.hpp"

using namespace slag;

namespace {

double brute_norm_sq(const Sym3Tensor& t) {
  const int n = t.dim();
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += t(i, j, k) * t(i, j, k);
  return s;
}

}  // namespace

TEST_SUITE("sym3tensor") {

TEST_CASE("component tables for small dimensions") {
  const auto t1 = component_table(1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].index == std::array<int, 3>{0, 0, 0});
  CHECK(t1[0].multiplicity == 1);

  const auto t2 = component_table(2);
  REQUIRE(t2.size() == 4);
  CHECK(t2[0].multiplicity == 1);
  CHECK(t2[1].multiplicity == 3);
  CHECK(t2[2].multiplicity == 3);
  CHECK(t2[3].multiplicity == 1);

  const auto t3 = component_table(3);
  REQUIRE(t3.size() == 10);
  int sum = 0;
  for (const auto& e : t3) {
    sum += e.multiplicity;
    if (e.index == std::array<int, 3>{0, 1, 2}) CHECK(e.multiplicity == 6);
  }
  CHECK(sum == 27);
}

TEST_CASE("multiplicities always sum to n^3") {
  for (int n = 1; n <= 6; ++n) {
    const auto table = component_table(n);
    CHECK(static_cast<int>(table.size()) == Sym3Tensor::component_count(n));
    int sum = 0;
    for (const auto& e : table) sum += e.multiplicity;
    CHECK(sum == n * n * n);
  }
}

TEST_CASE("component_index matches table order and sorts indices") {
  const int n = 4;
  const auto table = component_table(n);
  for (std::size_t c = 0; c < table.size(); ++c) {
    const auto [i, j, k] = table[c].index;
    CHECK(Sym3Tensor::component_index(n, i, j, k) == static_cast<int>(c));
    CHECK(Sym3Tensor::component_index(n, k, i, j) == static_cast<int>(c));
    CHECK(Sym3Tensor::component_index(n, j, k, i) == static_cast<int>(c));
  }
  Sym3Tensor t(n);
  t.set(2, 0, 1, 5.0);
  CHECK(t(0, 1, 2) == 5.0);
  CHECK(t(1, 2, 0) == 5.0);
}

TEST_CASE("ambient norm expands the multiplicity weights") {
  Sym3Tensor zero(3);
  CHECK(ambient_norm_sq(zero) == 0.0);

  // n = 2 trace-free pattern (a, b, -a, -b).
  const double a = 0.7, b = -1.3;
  Sym3Tensor t(2);
  t.set(0, 0, 0, a);
  t.set(0, 0, 1, b);
  t.set(0, 1, 1, -a);
  t.set(1, 1, 1, -b);
  CHECK(std::abs(ambient_norm_sq(t) - 4.0 * (a * a + b * b)) <= 1e-12);

  Sym3Tensor witness(3);
  witness.set(0, 0, 1, 1.0);
  witness.set(1, 2, 2, -1.0);
  CHECK(ambient_norm_sq(witness) == 6.0);
}

TEST_CASE("ambient norm equals the ordered-triple sum") {
  for (int n : {2, 3, 4}) {
    const Sym3Tensor t = test::random_tensor(n, 17 + n);
    CHECK(std::abs(ambient_norm_sq(t) - brute_norm_sq(t)) <=
          1e-12 * (1.0 + brute_norm_sq(t)));
  }
}

TEST_CASE("traces") {
  CHECK(traces(Sym3Tensor(3)).cwiseAbs().maxCoeff() == 0.0);

  Sym3Tensor t(2);
  t.set(0, 0, 0, 1.0);
  const Eigen::VectorXd tr = traces(t);
  CHECK(tr[0] == 1.0);
  CHECK(tr[1] == 0.0);

  Sym3Tensor witness(3);
  witness.set(0, 0, 1, 1.0);
  witness.set(1, 2, 2, -1.0);
  CHECK(traces(witness).cwiseAbs().maxCoeff() == 0.0);

  const Sym3Tensor r = test::random_tensor(3, 5);
  const Eigen::VectorXd tr2 = traces(r);
  for (int k = 0; k < 3; ++k) {
    double direct = 0.0;
    for (int i = 0; i < 3; ++i) direct += r(i, i, k);
    CHECK(tr2[k] == doctest::Approx(direct));
  }
}

TEST_CASE("trace-free basis has the right size and is orthonormal") {
  CHECK(trace_free_basis(1).elements.empty());
  CHECK(trace_free_basis(2).elements.size() == 2);
  CHECK(trace_free_basis(3).elements.size() == 7);

  for (int n = 2; n <= 5; ++n) {
    const TraceFreeBasis basis = trace_free_basis(n);
    CHECK(static_cast<int>(basis.elements.size()) ==
          Sym3Tensor::component_count(n) - n);
    for (std::size_t a = 0; a < basis.elements.size(); ++a) {
      CHECK(traces(basis.elements[a]).cwiseAbs().maxCoeff() <= 1e-12);
      for (std::size_t b = a; b < basis.elements.size(); ++b) {
        const double dot = ambient_dot(basis.elements[a], basis.elements[b]);
        CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("basis expansion reproduces the projector") {
  const int n = 3;
  const TraceFreeBasis basis = trace_free_basis(n);
  for (int trial = 0; trial < 100; ++trial) {
    const Sym3Tensor t = test::random_tensor(n, 1000 + trial);
    const Sym3Tensor projected = project_trace_free(t);
    Sym3Tensor expanded(n);
    for (const Sym3Tensor& b : basis.elements) {
      expanded.coeffs() += ambient_dot(b, t) * b.coeffs();
    }
    CHECK((expanded.coeffs() - projected.coeffs()).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("projection is idempotent and fixes trace-free input") {
  const Sym3Tensor t = test::random_tensor(4, 21);
  const Sym3Tensor once = project_trace_free(t);
  const Sym3Tensor twice = project_trace_free(once);
  CHECK((once.coeffs() - twice.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(traces(once).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK(project_trace_free(Sym3Tensor(3)).coeffs().cwiseAbs().maxCoeff() ==
        0.0);

  const Sym3Tensor tf = random_trace_free(3, 9);
  const Sym3Tensor fixed = project_trace_free(tf);
  CHECK((fixed.coeffs() - tf.coeffs()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("projection agrees with a constrained least-squares oracle") {
  // Minimize |h' - h|_ambient subject to the n trace constraints, solved as
  // a KKT system with Eigen. Oracle path shares nothing with the projector.
  const int n = 2;
  Sym3Tensor t(n);
  t.set(0, 0, 0, 1.0);

  const int d = Sym3Tensor::component_count(n);
  const auto table = component_table(n);
  Eigen::VectorXd root_mult(d);
  for (int c = 0; c < d; ++c) root_mult[c] = std::sqrt(double(table[c].multiplicity));

  Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(n, d);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      const int c = Sym3Tensor::component_index(n, i, i, k);
      constraints(k, c) += 1.0 / root_mult[c];
    }

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + n, d + n);
  kkt.topLeftCorner(d, d).setIdentity();
  kkt.topRightCorner(d, n) = constraints.transpose();
  kkt.bottomLeftCorner(n, d) = constraints;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + n);
  rhs.head(d) = root_mult.cwiseProduct(t.coeffs());

  const Eigen::VectorXd solution = kkt.fullPivLu().solve(rhs);
  const Eigen::VectorXd oracle = solution.head(d).cwiseQuotient(root_mult);

  const Sym3Tensor projected = project_trace_free(t);
  CHECK((projected.coeffs() - oracle).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(traces(projected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("decomposition into trace-free part plus complement") {
  const Sym3Tensor t = test::random_tensor(3, 33);
  const Sym3Tensor p = project_trace_free(t);
  Sym3Tensor r(3);
  r.coeffs() = t.coeffs() - p.coeffs();
  CHECK(std::abs(ambient_dot(p, r)) <= 1e-12 * (1.0 + ambient_norm_sq(t)));
  CHECK(project_trace_free(r).coeffs().cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(((p.coeffs() + r.coeffs()) - t.coeffs()).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("random trace-free tensors: determinism and contracts") {
  const Sym3Tensor a = random_trace_free(2, 7);
  const Sym3Tensor b = random_trace_free(2, 7);
  CHECK(a.coeffs() == b.coeffs());

  for (int n : {2, 3, 5}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
      const Sym3Tensor t = random_trace_free(n, seed);
      CHECK(traces(t).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(std::abs(ambient_norm_sq(t) - 1.0) <= 1e-12);
    }
  }

  const Sym3Tensor c = random_trace_free(3, 1);
  const Sym3Tensor d = random_trace_free(3, 2);
  CHECK((c.coeffs() - d.coeffs()).cwiseAbs().maxCoeff() > 1e-3);

  CHECK_THROWS_AS(random_trace_free(1, 5), std::invalid_argument);
}

}  // TEST_SUITE
