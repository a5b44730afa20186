#include "slag/slagfield.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "slag/numkernel.hpp"
#include "slag/stability.hpp"

namespace slag {

namespace {

std::string index_string(std::span<const int> idx) {
  std::string s = "(";
  for (std::size_t d = 0; d < idx.size(); ++d) {
    if (d) s += ",";
    s += std::to_string(idx[d]);
  }
  return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// GraphField
// ---------------------------------------------------------------------------

GraphField::GraphField(int n, Eigen::VectorXd origin, double spacing,
                       std::vector<int> shape, Eigen::VectorXd values)
    : n_(n),
      origin_(std::move(origin)),
      spacing_(spacing),
      shape_(std::move(shape)),
      values_(std::move(values)) {
  if (n_ < 1 || n_ > 3) {
    throw std::invalid_argument("field dimension must be 1, 2 or 3, got " +
                                std::to_string(n_));
  }
  if (static_cast<int>(origin_.size()) != n_) {
    throw std::invalid_argument("field origin must have n entries");
  }
  for (int d = 0; d < n_; ++d) {
    if (!std::isfinite(origin_[d])) {
      throw std::invalid_argument("field origin entry " + std::to_string(d) +
                                  " is not finite");
    }
  }
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
    throw std::invalid_argument("field spacing must be a positive number");
  }
  if (static_cast<int>(shape_.size()) != n_) {
    throw std::invalid_argument("field shape must have n entries");
  }
  long long expected = 1;
  for (int d = 0; d < n_; ++d) {
    if (shape_[d] < 1) {
      throw std::invalid_argument("field shape entry " + std::to_string(d) +
                                  " must be positive");
    }
    expected *= shape_[d];
  }
  if (values_.size() != expected) {
    throw std::invalid_argument(
        "field value count mismatch: shape product is " +
        std::to_string(expected) + " but " + std::to_string(values_.size()) +
        " values were given");
  }
  for (long long i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("field value " + std::to_string(i) +
                                  " is not finite");
    }
  }
}

long long GraphField::flat_index(std::span<const int> idx) const {
  long long flat = 0;
  for (int d = 0; d < n_; ++d) {
    if (idx[d] < 0 || idx[d] >= shape_[d]) {
      throw std::out_of_range("grid index " + index_string(idx) +
                              " out of range");
    }
    flat = flat * shape_[d] + idx[d];
  }
  return flat;
}

Eigen::VectorXd GraphField::point(std::span<const int> idx) const {
  Eigen::VectorXd x(n_);
  for (int d = 0; d < n_; ++d) x[d] = origin_[d] + spacing_ * idx[d];
  return x;
}

int GraphField::margin(std::span<const int> idx) const {
  int m = std::numeric_limits<int>::max();
  for (int d = 0; d < n_; ++d) {
    m = std::min(m, std::min(idx[d], shape_[d] - 1 - idx[d]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(s);
  while (std::getline(stream, token, sep)) out.push_back(token);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " from '" + s + "'");
  }
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok, what));
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int> out;
  for (const auto& tok : split(s, ',')) out.push_back(parse_int(tok, what));
  return out;
}

}  // namespace

GraphField make_builtin_field(const std::string& descriptor) {
  const auto fail = [&](const std::string& msg) -> GraphField {
    throw std::invalid_argument("builtin field '" + descriptor + "': " + msg);
  };

  const auto tokens = split(descriptor, ':');
  if (tokens.empty() || tokens[0].empty()) return fail("empty descriptor");
  const std::string& name = tokens[0];

  int n = 0;
  std::size_t next = 1;
  Eigen::MatrixXd quad_a;
  double parabola_c = 0.0;
  if (name == "quadratic") {
    if (tokens.size() < 3) return fail("expected quadratic:<n>:<packed A>");
    n = parse_int(tokens[1], "dimension");
    if (n < 1 || n > 3) return fail("dimension must be 1, 2 or 3");
    const auto packed = parse_double_list(tokens[2], "matrix entry");
    if (static_cast<int>(packed.size()) != n * (n + 1) / 2) {
      return fail("packed upper triangle needs " +
                  std::to_string(n * (n + 1) / 2) + " entries");
    }
    quad_a.setZero(n, n);
    int pos = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) quad_a(i, j) = quad_a(j, i) = packed[pos++];
    next = 3;
  } else if (name == "paraboloid") {
    if (tokens.size() < 3) return fail("expected paraboloid:<n>:<c>");
    n = parse_int(tokens[1], "dimension");
    if (n < 1 || n > 3) return fail("dimension must be 1, 2 or 3");
    parabola_c = parse_double(tokens[2], "coefficient");
    next = 3;
  } else if (name == "harmonic_expcos") {
    n = 2;
    next = 1;
  } else {
    return fail("unknown builtin '" + name + "'");
  }

  std::vector<int> shape(n, 33);
  double spacing = 1.0 / 16.0;
  std::vector<double> origin;
  for (; next < tokens.size(); ++next) {
    const auto eq = tokens[next].find('=');
    if (eq == std::string::npos) {
      return fail("expected key=value token, got '" + tokens[next] + "'");
    }
    const std::string key = tokens[next].substr(0, eq);
    const std::string value = tokens[next].substr(eq + 1);
    if (key == "shape") {
      shape = parse_int_list(value, "shape entry");
      if (static_cast<int>(shape.size()) != n) {
        return fail("shape needs " + std::to_string(n) + " entries");
      }
    } else if (key == "h") {
      spacing = parse_double(value, "spacing");
      if (!(spacing > 0.0)) return fail("spacing must be positive");
    } else if (key == "origin") {
      origin = parse_double_list(value, "origin entry");
      if (static_cast<int>(origin.size()) != n) {
        return fail("origin needs " + std::to_string(n) + " entries");
      }
    } else {
      return fail("unknown key '" + key + "'");
    }
  }

  Eigen::VectorXd origin_v(n);
  if (origin.empty()) {
    for (int d = 0; d < n; ++d) origin_v[d] = -0.5 * (shape[d] - 1) * spacing;
  } else {
    for (int d = 0; d < n; ++d) origin_v[d] = origin[d];
  }

  long long total = 1;
  for (int d = 0; d < n; ++d) total *= shape[d];
  Eigen::VectorXd values(total);

  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(n);
  for (long long flat = 0; flat < total; ++flat) {
    for (int d = 0; d < n; ++d) x[d] = origin_v[d] + spacing * idx[d];
    double f = 0.0;
    if (name == "quadratic") {
      f = 0.5 * x.dot(quad_a * x);
    } else if (name == "paraboloid") {
      f = 0.5 * parabola_c * x.squaredNorm();
    } else {  // harmonic_expcos
      f = std::exp(x[0]) * std::cos(x[1]);
    }
    values[flat] = f;
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < shape[d]) break;
      idx[d] = 0;
    }
  }
  return GraphField(n, std::move(origin_v), spacing, std::move(shape),
                    std::move(values));
}

GraphField load_field_file(const std::string& path) {
  const auto fail = [&](const std::string& msg) -> GraphField {
    throw std::invalid_argument("field file '" + path + "': " + msg);
  };

  std::ifstream in(path);
  if (!in) return fail("cannot open file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    return fail(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) return fail("top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "origin" && key != "spacing" && key != "shape" &&
        key != "values") {
      return fail("unknown key '" + key + "'");
    }
  }
  for (const char* key : {"n", "origin", "spacing", "shape", "values"}) {
    if (!doc.contains(key)) return fail(std::string("missing key '") + key + "'");
  }

  if (!doc["n"].is_number_integer()) return fail("'n' must be an integer");
  const int n = doc["n"].get<int>();
  if (n < 1 || n > 3) return fail("'n' must be 1, 2 or 3");

  if (!doc["spacing"].is_number()) {
    return fail("'spacing' must be a single number (uniform in every axis)");
  }
  const double spacing = doc["spacing"].get<double>();

  if (!doc["origin"].is_array() || static_cast<int>(doc["origin"].size()) != n) {
    return fail("'origin' must be an array of n numbers");
  }
  Eigen::VectorXd origin(n);
  for (int d = 0; d < n; ++d) {
    if (!doc["origin"][d].is_number()) {
      return fail("'origin' entry " + std::to_string(d) + " is not a number");
    }
    origin[d] = doc["origin"][d].get<double>();
  }

  if (!doc["shape"].is_array() || static_cast<int>(doc["shape"].size()) != n) {
    return fail("'shape' must be an array of n integers");
  }
  std::vector<int> shape(n);
  for (int d = 0; d < n; ++d) {
    if (!doc["shape"][d].is_number_integer()) {
      return fail("'shape' entry " + std::to_string(d) + " is not an integer");
    }
    shape[d] = doc["shape"][d].get<int>();
  }

  if (!doc["values"].is_array()) return fail("'values' must be an array");
  Eigen::VectorXd values(doc["values"].size());
  for (std::size_t i = 0; i < doc["values"].size(); ++i) {
    if (!doc["values"][i].is_number()) {
      return fail("'values' entry " + std::to_string(i) + " is not a number");
    }
    values[static_cast<long long>(i)] = doc["values"][i].get<double>();
  }

  try {
    return GraphField(n, std::move(origin), spacing, std::move(shape),
                      std::move(values));
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  }
}

GraphField load_field(const std::string& source) {
  constexpr const char* kPrefix = "builtin:";
  if (source.rfind(kPrefix, 0) == 0) {
    return make_builtin_field(source.substr(std::string(kPrefix).size()));
  }
  return load_field_file(source);
}

// ---------------------------------------------------------------------------
// Stencils
// ---------------------------------------------------------------------------

namespace {

void require_margin(const GraphField& field, std::span<const int> p, int need,
                    const char* what) {
  if (field.margin(p) < need) {
    throw std::invalid_argument(std::string(what) + " needs " +
                                std::to_string(need) +
                                " node(s) of margin; index " +
                                index_string(p) + " has " +
                                std::to_string(field.margin(p)));
  }
}

double value_at_offset(const GraphField& field, std::span<const int> p,
                       int da, int a, int db = 0, int b = 0) {
  std::vector<int> idx(p.begin(), p.end());
  idx[a] += da;
  if (db != 0) idx[b] += db;
  return field.value(idx);
}

}  // namespace

SymMatrix hessian_at(const GraphField& field, std::span<const int> p) {
  require_margin(field, p, 1, "Hessian stencil");
  const int n = field.dim();
  const double h = field.spacing();
  const double inv_h2 = 1.0 / (h * h);
  SymMatrix out(n);
  const double center = field.value(p);
  for (int i = 0; i < n; ++i) {
    out.set(i, i,
            (value_at_offset(field, p, +1, i) - 2.0 * center +
             value_at_offset(field, p, -1, i)) *
                inv_h2);
    for (int j = i + 1; j < n; ++j) {
      const double cross = value_at_offset(field, p, +1, i, +1, j) -
                           value_at_offset(field, p, +1, i, -1, j) -
                           value_at_offset(field, p, -1, i, +1, j) +
                           value_at_offset(field, p, -1, i, -1, j);
      out.set(i, j, cross * 0.25 * inv_h2);
    }
  }
  return out;
}

Sym3Tensor third_derivatives_at(const GraphField& field,
                                std::span<const int> p) {
  require_margin(field, p, 2, "third-derivative stencil");
  const int n = field.dim();
  const double inv_2h = 1.0 / (2.0 * field.spacing());

  // Hessians at the 2n axis neighbors.
  std::vector<SymMatrix> plus, minus;
  plus.reserve(n);
  minus.reserve(n);
  for (int d = 0; d < n; ++d) {
    std::vector<int> idx(p.begin(), p.end());
    idx[d] += 1;
    plus.push_back(hessian_at(field, idx));
    idx[d] -= 2;
    minus.push_back(hessian_at(field, idx));
  }

  const auto outer = [&](int d, int y, int z) {
    return (plus[d](y, z) - minus[d](y, z)) * inv_2h;
  };

  Sym3Tensor t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) {
        t.set(i, j, k,
              (outer(i, j, k) + outer(j, i, k) + outer(k, i, j)) / 3.0);
      }
  return t;
}

// ---------------------------------------------------------------------------
// Pointwise analysis
// ---------------------------------------------------------------------------

namespace {

struct Frame {
  Eigen::VectorXd lambda;  // descending
  Eigen::MatrixXd q;       // matching eigenvector columns
};

Frame eigenframe_at(const GraphField& field, std::span<const int> p) {
  const EigenDecomposition eig = sym_eigen(hessian_at(field, p));
  const int n = field.dim();
  Frame f;
  f.lambda = eig.eigenvalues.reverse();
  f.q.resize(n, n);
  for (int c = 0; c < n; ++c) f.q.col(c) = eig.eigenvectors.col(n - 1 - c);
  return f;
}

double omega_of(const Eigen::VectorXd& lambda) {
  double prod = 1.0;
  for (int i = 0; i < lambda.size(); ++i) prod *= 1.0 + lambda[i] * lambda[i];
  return 1.0 / std::sqrt(prod);
}

/// Projection Jacobian as a grid function, via det(I + H^2) = prod(1+l^2).
double omega_at(const GraphField& field, std::span<const int> p) {
  const Eigen::MatrixXd h = hessian_at(field, p).dense();
  const Eigen::MatrixXd g =
      Eigen::MatrixXd::Identity(field.dim(), field.dim()) + h * h;
  return 1.0 / std::sqrt(g.determinant());
}

double im_det_at(const GraphField& field, std::span<const int> p) {
  const Frame f = eigenframe_at(field, p);
  double prod = 1.0, phase = 0.0;
  for (int i = 0; i < f.lambda.size(); ++i) {
    prod *= std::sqrt(1.0 + f.lambda[i] * f.lambda[i]);
    phase += std::atan(f.lambda[i]);
  }
  return prod * std::sin(phase);
}

Sym3Tensor second_form_from(const Frame& frame, const Sym3Tensor& third) {
  const int n = third.dim();
  Sym3Tensor out(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        double rotated = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              rotated += frame.q(i, a) * frame.q(j, b) * frame.q(k, c) *
                         third(i, j, k);
            }
        const double scale =
            std::sqrt((1.0 + frame.lambda[a] * frame.lambda[a]) *
                      (1.0 + frame.lambda[b] * frame.lambda[b]) *
                      (1.0 + frame.lambda[c] * frame.lambda[c]));
        out.set(a, b, c, rotated / scale);
      }
  return out;
}

}  // namespace

PointAnalysis analyze_point(const GraphField& field, std::span<const int> p,
                            double c, double K, double tol) {
  require_margin(field, p, 2, "point analysis");
  const Frame frame = eigenframe_at(field, p);
  const int n = field.dim();

  PointAnalysis out;
  out.index.assign(p.begin(), p.end());
  out.hessian = hessian_at(field, p);
  out.spectrum = Spectrum(frame.lambda);
  out.omega = omega_of(frame.lambda);
  out.phase = 0.0;
  double prod = 1.0;
  for (int i = 0; i < n; ++i) {
    out.phase += std::atan(frame.lambda[i]);
    prod *= std::sqrt(1.0 + frame.lambda[i] * frame.lambda[i]);
  }
  out.residual = prod * std::sin(out.phase) - c;
  out.second_form = second_form_from(frame, third_derivatives_at(field, p));
  out.a_norm_sq = ambient_norm_sq(out.second_form);
  out.laplacian_ln_omega = -stability_form_value(out.spectrum, out.second_form);
  out.fd_laplacian = field.margin(p) >= 3
                         ? surface_laplacian(field, p)
                         : std::numeric_limits<double>::quiet_NaN();
  out.region = classify(out.spectrum, K, tol);
  return out;
}

ResidualStats residual_stats(const GraphField& field, std::optional<double> c) {
  for (int d = 0; d < field.dim(); ++d) {
    if (field.shape()[d] < 5) {
      throw std::invalid_argument(
          "residual_stats needs at least 5 nodes per axis");
    }
  }
  std::vector<double> imdet;
  field.for_each_interior(1, [&](std::span<const int> p) {
    imdet.push_back(im_det_at(field, p));
  });

  ResidualStats stats;
  stats.count = static_cast<long long>(imdet.size());
  if (c.has_value()) {
    stats.c = *c;
  } else {
    std::vector<double> sorted = imdet;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    stats.c = sorted.size() % 2 == 1
                  ? sorted[mid]
                  : 0.5 * (sorted[mid - 1] + sorted[mid]);
    stats.c_estimated = true;
  }

  double sum = 0.0;
  for (double v : imdet) {
    const double r = v - stats.c;
    stats.max_abs = std::max(stats.max_abs, std::abs(r));
    sum += r;
  }
  const double mean = imdet.empty() ? 0.0 : sum / static_cast<double>(imdet.size());
  double var = 0.0;
  for (double v : imdet) {
    const double d = (v - stats.c) - mean;
    var += d * d;
  }
  stats.mean = mean;
  stats.stddev =
      imdet.empty() ? 0.0 : std::sqrt(var / static_cast<double>(imdet.size()));
  return stats;
}

Eigen::VectorXd gradient_identity_residual(const GraphField& field,
                                           std::span<const int> p) {
  require_margin(field, p, 3, "gradient identity stencil");
  const int n = field.dim();
  const Frame frame = eigenframe_at(field, p);
  const Sym3Tensor h = second_form_from(frame, third_derivatives_at(field, p));
  const double omega_center = omega_of(frame.lambda);

  Eigen::VectorXd grad(n);
  for (int d = 0; d < n; ++d) {
    std::vector<int> idx(p.begin(), p.end());
    idx[d] += 1;
    const double fwd = omega_at(field, idx);
    idx[d] -= 2;
    const double bwd = omega_at(field, idx);
    grad[d] = (fwd - bwd) / (2.0 * field.spacing());
  }

  Eigen::VectorXd residual(n);
  for (int k = 0; k < n; ++k) {
    const double directional =
        grad.dot(frame.q.col(k)) /
        std::sqrt(1.0 + frame.lambda[k] * frame.lambda[k]);
    double weighted_trace = 0.0;
    for (int i = 0; i < n; ++i) weighted_trace += frame.lambda[i] * h(i, i, k);
    residual[k] = std::abs(directional - (-omega_center * weighted_trace));
  }
  return residual;
}

double surface_laplacian(const GraphField& field, std::span<const int> p) {
  require_margin(field, p, 3, "surface Laplacian stencil");
  const int n = field.dim();
  const double h = field.spacing();

  const auto log_omega = [&](std::span<const int> q) {
    return std::log(omega_at(field, q));
  };

  // sqrt(det g) g^{ij} d_j(ln omega) at a grid node.
  const auto flux = [&](std::span<const int> q, int i) {
    const Eigen::MatrixXd hess = hessian_at(field, q).dense();
    const Eigen::MatrixXd g =
        Eigen::MatrixXd::Identity(n, n) + hess * hess;
    const Eigen::MatrixXd ginv = g.inverse();
    const double sqrtg = std::sqrt(g.determinant());
    double value = 0.0;
    for (int j = 0; j < n; ++j) {
      std::vector<int> idx(q.begin(), q.end());
      idx[j] += 1;
      const double fwd = log_omega(idx);
      idx[j] -= 2;
      const double bwd = log_omega(idx);
      value += ginv(i, j) * (fwd - bwd) / (2.0 * h);
    }
    return sqrtg * value;
  };

  const Eigen::MatrixXd hess = hessian_at(field, p).dense();
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n) + hess * hess;
  const double sqrtg_center = std::sqrt(g.determinant());

  double divergence = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> idx(p.begin(), p.end());
    idx[i] += 1;
    const double fwd = flux(idx, i);
    idx[i] -= 2;
    const double bwd = flux(idx, i);
    divergence += (fwd - bwd) / (2.0 * h);
  }
  return divergence / sqrtg_center;
}

FieldReport superharmonicity_report(const GraphField& field, double K,
                                    std::optional<double> c, double tol) {
  FieldReport report;
  report.K = K;
  report.tolerance = tol;
  if (c.has_value()) {
    report.c = *c;
  } else {
    const ResidualStats stats = residual_stats(field);
    report.c = stats.c;
    report.c_estimated = true;
  }

  field.for_each_interior(3, [&](std::span<const int> p) {
    PointAnalysis point = analyze_point(field, p, report.c, K, tol);
    const double mismatch =
        std::abs(point.laplacian_ln_omega - point.fd_laplacian);
    report.max_mismatch = std::max(report.max_mismatch, mismatch);

    const double lam_sq = point.spectrum.max_abs() * point.spectrum.max_abs();
    const double slack = tol * (1.0 + (1.0 + lam_sq) * point.a_norm_sq);
    if (point.region.flags.xi && point.laplacian_ln_omega > slack) {
      report.violations.push_back({point.index, "xi_superharmonic",
                                   point.laplacian_ln_omega - slack});
    }
    if (point.region.flags.xi_prime) {
      // The strengthened bound needs a trace-free second form; the stencil
      // tensor is only trace-free up to O(h^2), so allow the computable
      // worst-case effect of the trace defect on the shifted form.
      const double trace_norm = traces(point.second_form).norm();
      const DiagonalFormCoefficients coeffs =
          form_coefficients(point.spectrum);
      const double shift_bound =
          (coeffs.ratio.array() - 1.0).abs().maxCoeff();
      const double h_norm = std::sqrt(point.a_norm_sq);
      const double trace_slack =
          shift_bound * trace_norm * (2.0 * h_norm + trace_norm);
      if (point.laplacian_ln_omega + point.a_norm_sq > slack + trace_slack) {
        report.violations.push_back(
            {point.index, "xi_prime_strengthened",
             point.laplacian_ln_omega + point.a_norm_sq - slack - trace_slack});
      }
    }

    report.mismatch.push_back(mismatch);
    report.points.push_back(std::move(point));
  });
  return report;
}

}  // namespace slag
