#include "slag/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slag/gaussmap.hpp"
#include "slag/numkernel.hpp"
#include "slag/regions.hpp"
#include "slag/rng.hpp"
#include "slag/slagfield.hpp"
#include "slag/stability.hpp"
#include "slag/sym3tensor.hpp"
#include "slag/version.hpp"

namespace slag::cli {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitViolation = 3;

// JSON has no literals for non-finite numbers; serialize them as strings so
// +inf margins survive a round trip.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json jvec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(jnum(v[i]));
  return out;
}

json jvec(const std::vector<int>& v) {
  json out = json::array();
  for (int x : v) out.push_back(x);
  return out;
}

json margins_json(const RegionReport& r) {
  return json{{"ball", jnum(r.ball_margin)},
              {"xi", jnum(r.xi_margin)},
              {"xi_prime", jnum(r.xi_prime_margin)},
              {"m", jnum(r.m_margin)},
              {"strengthened", jnum(r.strengthened_margin)}};
}

json flags_json(const RegionFlags& f) {
  return json{{"ball", f.ball},         {"xi", f.xi},
              {"xi_prime", f.xi_prime}, {"m", f.m_semi},
              {"m_strict", f.m_strict}, {"m_k", f.m_k},
              {"strengthened", f.strengthened}};
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream stream(s);
  while (std::getline(stream, token, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("trailing chars");
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse " + what + " from '" + token +
                                  "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(what + " list is empty");
  return out;
}

Spectrum parse_spectrum(const std::string& s) {
  const auto values = parse_double_list(s, "spectrum entry");
  Eigen::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return Spectrum(std::move(v));
}

std::vector<Spectrum> read_spectra_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spectra file '" + path + "'");
  std::vector<Spectrum> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_spectrum(line));
    } catch (const std::exception& e) {
      throw std::invalid_argument("spectra file '" + path + "' line " +
                                  std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) {
    throw std::invalid_argument("spectra file '" + path + "' has no spectra");
  }
  return out;
}

Sym3Tensor read_tensor(const std::string& source, int n,
                       std::optional<std::uint64_t>& seed_used) {
  constexpr const char* kRandomPrefix = "random:";
  if (source.rfind(kRandomPrefix, 0) == 0) {
    const std::string seed_str = source.substr(std::string(kRandomPrefix).size());
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(seed_str);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse tensor seed from '" +
                                  seed_str + "'");
    }
    seed_used = seed;
    return random_trace_free(n, seed);
  }

  std::ifstream in(source);
  if (!in) throw std::invalid_argument("cannot open tensor file '" + source + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("tensor file '" + source + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("coeffs")) {
    throw std::invalid_argument("tensor file '" + source +
                                "' must be {\"n\": ..., \"coeffs\": [...]}");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "coeffs") {
      throw std::invalid_argument("tensor file '" + source +
                                  "': unknown key '" + key + "'");
    }
  }
  const int file_n = doc["n"].get<int>();
  if (file_n != n) {
    throw std::invalid_argument(
        "tensor file dimension " + std::to_string(file_n) +
        " does not match spectrum dimension " + std::to_string(n));
  }
  const auto& arr = doc["coeffs"];
  if (!arr.is_array() ||
      static_cast<int>(arr.size()) != Sym3Tensor::component_count(n)) {
    throw std::invalid_argument(
        "tensor file needs " +
        std::to_string(Sym3Tensor::component_count(n)) +
        " coefficients in sorted multi-index order");
  }
  Eigen::VectorXd coeffs(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    coeffs[static_cast<long long>(i)] = arr[i].get<double>();
  }
  return Sym3Tensor(n, std::move(coeffs));
}

void emit(const std::string& text, const std::string& out_path,
          std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file) {
    throw std::invalid_argument("cannot open output file '" + out_path + "'");
  }
  file << text;
}

json envelope(const std::vector<std::string>& args, double tol) {
  json j;
  j["version"] = kVersion;
  j["argv"] = args;
  j["tolerance"] = tol;
  j["seed"] = nullptr;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string scan_csv(const ScanSummary& s) {
  std::ostringstream out;
  out << "index";
  for (int d = 0; d < s.n; ++d) out << ",lambda_" << d;
  out << ",ball,xi,xi_prime,m,strengthened"
      << ",in_ball,in_xi,in_xi_prime,in_m,in_m_strict,in_strengthened"
      << ",counterexample\n";
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const ScanSample& row = s.samples[i];
    out << i;
    for (int d = 0; d < s.n; ++d) out << "," << format_double(row.spectrum[d]);
    out << "," << format_double(row.ball) << "," << format_double(row.xi)
        << "," << format_double(row.xi_prime) << "," << format_double(row.m)
        << "," << format_double(row.strengthened);
    out << "," << row.flags.ball << "," << row.flags.xi << ","
        << row.flags.xi_prime << "," << row.flags.m_semi << ","
        << row.flags.m_strict << "," << row.flags.strengthened;
    out << "," << row.counterexample_kind << "\n";
  }
  return out.str();
}

struct Options {
  std::string spectrum;
  std::string spectra_path;
  std::string tensor;
  std::string source;
  std::string condition = "none";
  std::string format = "json";
  std::string out_path;
  double k = 1.0;
  double tol = kDefaultTolerance;
  double c = 0.0;
  bool c_given = false;
  double theta = 0.0;
  bool theta_given = false;
  int n = 2;
  int count = 100;
  std::uint64_t seed = 0;
};

int run_region_check(const Options& opt, const std::vector<std::string>& args,
                     std::ostream& out) {
  const Spectrum spec = parse_spectrum(opt.spectrum);
  const RegionReport r = classify(spec, opt.k, opt.tol);

  json j = envelope(args, opt.tol);
  j["K"] = opt.k;
  j["spectrum"] = jvec(spec.values());
  j["spectrum_canonical"] = jvec(spec.canonical().values());
  j["margins"] = margins_json(r);
  j["flags"] = flags_json(r.flags);
  emit(j.dump(2) + "\n", opt.out_path, out);
  return kExitOk;
}

int run_region_scan(const Options& opt, const std::vector<std::string>& args,
                    std::ostream& out) {
  ScanCondition condition = ScanCondition::kNone;
  if (opt.condition == "xi") {
    condition = ScanCondition::kXi;
  } else if (opt.condition == "xiprime") {
    condition = ScanCondition::kXiPrime;
  } else if (opt.condition != "none") {
    throw CLI::ValidationError("--condition must be xi, xiprime or none");
  }
  if (opt.format != "json" && opt.format != "csv") {
    throw CLI::ValidationError("--format must be json or csv");
  }

  const bool csv = opt.format == "csv";
  const ScanSummary s = region_scan(opt.n, opt.k, opt.count, opt.seed,
                                    condition, opt.tol, csv);

  if (csv) {
    emit(scan_csv(s), opt.out_path, out);
    return s.has_counterexamples() ? kExitViolation : kExitOk;
  }

  json j = envelope(args, opt.tol);
  j["seed"] = s.seed;
  j["n"] = s.n;
  j["K"] = s.K;
  j["count"] = s.count;
  j["condition"] = to_string(s.condition);
  j["counts"] = json{{"ball", s.in_ball},
                     {"xi", s.in_xi},
                     {"xi_prime", s.in_xi_prime},
                     {"m", s.in_m_semi},
                     {"m_strict", s.in_m_strict},
                     {"strengthened", s.in_strengthened},
                     {"m_not_xi_or_xi_prime", s.in_m_not_xi_or_xi_prime}};
  const auto extremal = [](const ExtremalMargin& e) {
    return json{{"value", jnum(e.value)}, {"spectrum", jvec(e.spectrum)}};
  };
  j["extremal"] = json{{"ball", extremal(s.min_ball)},
                       {"xi", extremal(s.min_xi)},
                       {"xi_prime", extremal(s.min_xi_prime)},
                       {"m", extremal(s.min_m)},
                       {"strengthened", extremal(s.min_strengthened)}};

  json spectra = json::array();
  json details = json::array();
  for (const auto* list :
       {&s.xi_m_counterexamples, &s.xi_prime_strengthened_counterexamples}) {
    for (const ScanCounterexample& ce : *list) {
      spectra.push_back(jvec(ce.spectrum));
      details.push_back(json{{"kind", ce.kind},
                             {"spectrum", jvec(ce.spectrum)},
                             {"margin", jnum(ce.margin)}});
    }
  }
  j["counterexamples"] = spectra;
  j["counterexample_details"] = details;

  emit(j.dump(2) + "\n", opt.out_path, out);
  return s.has_counterexamples() ? kExitViolation : kExitOk;
}

int run_form_eval(const Options& opt, const std::vector<std::string>& args,
                  std::ostream& out) {
  const Spectrum spec = parse_spectrum(opt.spectrum);
  std::optional<std::uint64_t> seed_used;
  const Sym3Tensor t = read_tensor(opt.tensor, spec.dim(), seed_used);

  const double f = stability_form_value(spec, t);
  const double f_diag =
      stability_form_value_diagonal(form_coefficients(spec), t);
  const double norm_sq = ambient_norm_sq(t);
  const Eigen::VectorXd trace_vec = traces(t);
  const bool trace_free = trace_vec.cwiseAbs().maxCoeff() <= 1e-10;

  double lambda_trace_sq = 0.0;
  for (int k = 0; k < spec.dim(); ++k) {
    double s = 0.0;
    for (int i = 0; i < spec.dim(); ++i) s += spec[i] * t(i, i, k);
    lambda_trace_sq += s * s;
  }
  const double bracket_residual = std::abs(
      f - second_form_bracket(spec, lagrangianize(t)) - lambda_trace_sq);

  json j = envelope(args, opt.tol);
  if (seed_used) j["seed"] = *seed_used;
  j["spectrum"] = jvec(spec.values());
  j["tensor_source"] = opt.tensor;
  j["n"] = spec.dim();
  j["stability_form"] = jnum(f);
  j["stability_form_diagonal"] = jnum(f_diag);
  j["strengthened_form"] = jnum(f - norm_sq);
  j["ambient_norm_sq"] = jnum(norm_sq);
  j["traces"] = jvec(trace_vec);
  j["trace_free"] = trace_free;
  j["trace_identity_residual"] =
      trace_free ? jnum(trace_identity_residual(spec, t)) : json(nullptr);
  j["bracket_identity_residual"] = jnum(bracket_residual);
  j["pair_inequality_min"] =
      spec.dim() >= 3 ? jnum(pair_inequality_min(spec, t)) : json(nullptr);

  emit(j.dump(2) + "\n", opt.out_path, out);
  return kExitOk;
}

int run_rotate(const Options& opt, const std::vector<std::string>& args,
               std::ostream& out) {
  const std::vector<Spectrum> spectra = read_spectra_file(opt.spectra_path);

  json j = envelope(args, opt.tol);
  j["K"] = opt.k;
  j["count"] = spectra.size();

  if (opt.theta_given) {
    const RotationAngle angle(opt.theta);
    json rotated = json::array();
    double worst_ball = std::numeric_limits<double>::infinity();
    double worst_xi = std::numeric_limits<double>::infinity();
    for (const Spectrum& spec : spectra) {
      const Spectrum r = lewy_rotate(spec, angle);
      const RegionReport report = classify(r, opt.k, opt.tol);
      worst_ball = std::min(worst_ball, report.ball_margin);
      worst_xi = std::min(worst_xi, report.xi_margin);
      rotated.push_back(json{{"spectrum", jvec(r.values())},
                             {"margins", margins_json(report)},
                             {"flags", flags_json(report.flags)}});
    }
    j["theta"] = angle.theta;
    j["rotated"] = rotated;
    j["margins"] = json{{"ball", jnum(worst_ball)}, {"xi", jnum(worst_xi)}};
    j["admissible"] = worst_ball >= -opt.tol && worst_xi >= -opt.tol;
  } else {
    const RotationSearchResult r =
        find_admissible_rotation(spectra, opt.k, opt.tol);
    j["theta"] = r.angle ? json(r.angle->theta) : json(nullptr);
    j["admissible"] = r.angle.has_value();
    j["margins"] =
        json{{"ball", jnum(r.ball_margin)}, {"xi", jnum(r.xi_margin)}};
  }

  emit(j.dump(2) + "\n", opt.out_path, out);
  return kExitOk;
}

int run_field_report(const Options& opt, const std::vector<std::string>& args,
                     std::ostream& out) {
  const GraphField field = load_field(opt.source);
  const std::optional<double> c =
      opt.c_given ? std::optional<double>(opt.c) : std::nullopt;
  const FieldReport report = superharmonicity_report(field, opt.k, c, opt.tol);
  const ResidualStats stats = residual_stats(field, report.c);

  json j = envelope(args, opt.tol);
  j["source"] = opt.source;
  j["K"] = opt.k;
  j["c"] = jnum(report.c);
  j["c_estimated"] = report.c_estimated;
  j["residual_stats"] = json{{"max_abs", jnum(stats.max_abs)},
                             {"mean", jnum(stats.mean)},
                             {"stddev", jnum(stats.stddev)},
                             {"count", stats.count}};
  j["point_count"] = report.points.size();
  j["max_mismatch"] = jnum(report.max_mismatch);

  json points = json::array();
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const PointAnalysis& p = report.points[i];
    points.push_back(json{{"index", jvec(p.index)},
                          {"spectrum", jvec(p.spectrum.values())},
                          {"omega", jnum(p.omega)},
                          {"phase", jnum(p.phase)},
                          {"residual", jnum(p.residual)},
                          {"a_norm_sq", jnum(p.a_norm_sq)},
                          {"laplacian_ln_omega", jnum(p.laplacian_ln_omega)},
                          {"fd_laplacian", jnum(p.fd_laplacian)},
                          {"mismatch", jnum(report.mismatch[i])},
                          {"margins", margins_json(p.region)},
                          {"flags", flags_json(p.region.flags)}});
  }
  j["points"] = points;

  json violations = json::array();
  for (const FieldViolation& v : report.violations) {
    violations.push_back(json{{"index", jvec(v.index)},
                              {"kind", v.kind},
                              {"amount", jnum(v.amount)}});
  }
  j["violations"] = violations;

  emit(j.dump(2) + "\n", opt.out_path, out);
  return report.violations.empty() ? kExitOk : kExitViolation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Eigenvalue-region analysis for minimal Lagrangian graphs"};
  app.name("slag");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options opt;

  CLI::App* region = app.add_subcommand("region", "Region membership tools");
  region->require_subcommand(1);

  CLI::App* check = region->add_subcommand(
      "check", "Classify one spectrum against every region");
  check->add_option("--spectrum", opt.spectrum, "comma-separated eigenvalues")
      ->required();
  check->add_option("--K", opt.k, "slope bound")->required()
      ->check(CLI::PositiveNumber);
  check->add_option("--tol", opt.tol, "membership tolerance")
      ->check(CLI::NonNegativeNumber);
  check->add_option("--out", opt.out_path, "write the report to a file");

  CLI::App* scan = region->add_subcommand(
      "scan", "Sample spectra and audit the region inclusions");
  scan->add_option("--n", opt.n, "spectrum dimension")->required()
      ->check(CLI::PositiveNumber);
  scan->add_option("--K", opt.k, "sampling box half-width")->required()
      ->check(CLI::PositiveNumber);
  scan->add_option("--count", opt.count, "number of samples")->required()
      ->check(CLI::PositiveNumber);
  scan->add_option("--seed", opt.seed, "stream seed")->required();
  scan->add_option("--condition", opt.condition,
                   "rejection-sample into a region: xi, xiprime or none");
  scan->add_option("--tol", opt.tol, "membership tolerance")
      ->check(CLI::NonNegativeNumber);
  scan->add_option("--format", opt.format, "json or csv (per-sample table)");
  scan->add_option("--out", opt.out_path, "write the report to a file");

  CLI::App* form = app.add_subcommand("form", "Stability form tools");
  form->require_subcommand(1);
  CLI::App* eval = form->add_subcommand(
      "eval", "Evaluate the stability form and its identities on a tensor");
  eval->add_option("--spectrum", opt.spectrum, "comma-separated eigenvalues")
      ->required();
  eval->add_option("--tensor", opt.tensor,
                   "tensor JSON file or random:<seed>")
      ->required();
  eval->add_option("--tol", opt.tol, "tolerance echoed into the report")
      ->check(CLI::NonNegativeNumber);
  eval->add_option("--out", opt.out_path, "write the report to a file");

  CLI::App* rotate = app.add_subcommand(
      "rotate", "Search the diagonal rotation family for admissible angles");
  rotate->add_option("--spectra", opt.spectra_path,
                     "file with one comma-separated spectrum per line")
      ->required();
  rotate->add_option("--K", opt.k, "slope bound")->required()
      ->check(CLI::PositiveNumber);
  rotate->add_option("--theta", opt.theta,
                     "apply this angle instead of searching")
      ->check(CLI::Number);
  rotate->add_option("--tol", opt.tol, "admissibility tolerance")
      ->check(CLI::NonNegativeNumber);
  rotate->add_option("--out", opt.out_path, "write the report to a file");

  CLI::App* field = app.add_subcommand("field", "Gridded potential tools");
  field->require_subcommand(1);
  CLI::App* report = field->add_subcommand(
      "report", "Pointwise superharmonicity report for a gridded potential");
  report->add_option("--source", opt.source,
                     "field JSON file or builtin:<descriptor>")
      ->required();
  report->add_option("--K", opt.k, "slope bound")->required()
      ->check(CLI::PositiveNumber);
  report->add_option("--c", opt.c, "phase constant (default: interior median)");
  report->add_option("--tol", opt.tol, "implication tolerance")
      ->check(CLI::NonNegativeNumber);
  report->add_option("--out", opt.out_path, "write the report to a file");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("slag");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  opt.c_given = report->count("--c") > 0;
  opt.theta_given = rotate->count("--theta") > 0;

  try {
    if (check->parsed()) return run_region_check(opt, args, out);
    if (scan->parsed()) return run_region_scan(opt, args, out);
    if (eval->parsed()) return run_form_eval(opt, args, out);
    if (rotate->parsed()) return run_rotate(opt, args, out);
    if (report->parsed()) return run_field_report(opt, args, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  err << "usage error: no subcommand\n";
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? argc - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace slag::cli
