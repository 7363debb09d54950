#include "opmeans/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "opmeans/means.hpp"
#include "opmeans/metrics.hpp"
#include "opmeans/symcore.hpp"
#include "opmeans/verify.hpp"

namespace opmeans::cli {

namespace {

using nlohmann::json;

// Thrown for flag values that CLI11 accepts syntactically but we reject.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SymMatrix counterexample_a() { return SymMatrix::from_rows({{5, 7}, {7, 10}}); }
SymMatrix counterexample_b() { return SymMatrix::from_rows({{5, 2}, {2, 1}}); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + ": '" + s + "'");
  }
}

void parse_dim_range(const std::string& s, TrialConfig& config) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    config.dim_lo = config.dim_hi = static_cast<int>(to_number(s, "--dim"));
  } else {
    config.dim_lo = static_cast<int>(to_number(s.substr(0, dots), "--dim"));
    config.dim_hi = static_cast<int>(to_number(s.substr(dots + 2), "--dim"));
  }
}

void parse_exp_range(const std::string& s, TrialConfig& config) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError("--exp-range expects 'lo,hi'");
  config.exponent_lo = to_number(parts[0], "--exp-range");
  config.exponent_hi = to_number(parts[1], "--exp-range");
}

std::string fixed6(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(6) << v;
  return s.str();
}

/// Writes to --out when given, otherwise to the command's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
    os_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

json config_json(const TrialConfig& c) {
  return {{"dim", {c.dim_lo, c.dim_hi}},
          {"trials", c.trials},
          {"seed", c.seed},
          {"exp_range", {c.exponent_lo, c.exponent_hi}},
          {"grid", c.grid_size},
          {"tolerance", c.tolerance}};
}

void print_suite_table(std::ostream& os, const std::vector<SuiteResult>& results, bool with_finding) {
  os << std::left << std::setw(28) << "suite" << std::setw(9) << "trials" << std::setw(12) << "violations"
     << std::setw(10) << "failures" << std::setw(16) << "worst_margin";
  if (with_finding) os << "finding";
  os << "\n";
  for (const auto& r : results) {
    os << std::left << std::setw(28) << r.suite << std::setw(9) << r.trials_run << std::setw(12) << r.violations
       << std::setw(10) << r.failures << std::setw(16) << (std::isfinite(r.worst_margin) ? fixed6(r.worst_margin) : std::string("n/a"));
    if (with_finding) os << (r.finding.value_or(false) ? "yes" : "no");
    os << "\n";
  }
}

void print_suite_csv(std::ostream& os, const std::vector<SuiteResult>& results) {
  os << "suite,trials,violations,failures,worst_margin\n";
  for (const auto& r : results)
    os << r.suite << ',' << r.trials_run << ',' << r.violations << ',' << r.failures << ','
       << (std::isfinite(r.worst_margin) ? format_double(r.worst_margin) : std::string()) << "\n";
}

void print_curve_csv(std::ostream& os, const MonotonicityReport& r, const std::string& column) {
  os << "t," << column << "\n";
  for (std::size_t i = 0; i < r.t_values.size(); ++i)
    os << format_double(r.t_values[i]) << ',' << format_double(r.values[i]) << "\n";
}

void print_curve_summary(std::ostream& os, const MonotonicityReport& r, const std::string& column) {
  os << std::left << std::setw(10) << "t" << column << "\n";
  const std::size_t n = r.t_values.size();
  const std::size_t stride = std::max<std::size_t>(1, (n - 1) / 20);
  for (std::size_t i = 0; i < n; i += stride)
    os << std::left << std::setw(10) << fixed6(r.t_values[i]) << fixed6(r.values[i]) << "\n";
  if ((n - 1) % stride != 0) os << std::left << std::setw(10) << fixed6(r.t_values.back()) << fixed6(r.values.back()) << "\n";
  os << "verdict: " << verdict_name(r.verdict) << " (expected "
     << (r.expected == Direction::decreasing ? "decreasing" : "increasing") << ")\n";
  os << "violating steps: " << r.violations.size() << "\n";
  os << "crossing points:";
  for (double t : r.crossing_points) os << ' ' << fixed6(t);
  if (r.crossing_points.empty()) os << " none";
  os << "\nworst margin: " << fixed6(r.worst_margin) << "\n";
}

// Refines the first grid crossing of a scan.
std::optional<double> refined_first_crossing(const WeightedFamily& family, const SymMatrix& a, const SymMatrix& b,
                                             ScanMetric metric, const MonotonicityReport& r) {
  if (r.crossing_points.empty()) return std::nullopt;
  const double h = 2.0 / (static_cast<double>(r.t_values.size()) - 1.0);
  const double t = r.crossing_points.front();
  try {
    return refine_crossing(family, a, b, metric, std::max(0.0, t - h), std::min(1.0, t + h));
  } catch (const NoSignChange&) {
    return std::nullopt;
  }
}

// Location of an interior maximum that rises above the value at t = 0.
std::optional<double> interior_peak(const WeightedFamily& family, const SymMatrix& a, const SymMatrix& b,
                                    const MonotonicityReport& r) {
  const auto it = std::max_element(r.values.begin(), r.values.end());
  const auto i = static_cast<std::size_t>(it - r.values.begin());
  if (i == 0 || i + 1 == r.values.size() || !(*it > r.values.front())) return std::nullopt;
  try {
    return refine_crossing(family, a, b, ScanMetric::euclid, r.t_values[i - 1], r.t_values[i + 1]);
  } catch (const NoSignChange&) {
    return r.t_values[i];
  }
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::string suites = "all";
  int trials = 1000;
  std::uint64_t seed = 42;
  std::string dim = "2..8";
  std::string exp_range;
  bool extreme = false;
  int grid = 1001;
  double tol = 1e-9;
  int threads = 0;
  bool json = false;
  bool csv = false;
  std::string out;
};

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  TrialConfig config;
  config.trials = o.trials;
  config.seed = o.seed;
  config.grid_size = o.grid;
  config.tolerance = o.tol;
  config.threads = o.threads;
  parse_dim_range(o.dim, config);
  if (o.extreme) {
    config.exponent_lo = -6.0;
    config.exponent_hi = 6.0;
  }
  if (!o.exp_range.empty()) parse_exp_range(o.exp_range, config);
  config.validate();

  std::vector<std::string> names;
  if (o.suites == "all") {
    names = suite_names();
  } else {
    for (const auto& s : split(o.suites, ',')) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
        std::string valid;
        for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
        err << "error: unknown suite '" << s << "'; valid suites: " << valid << ", all\n";
        return kExitUsage;
      }
      names.push_back(s);
    }
    if (names.empty()) throw UsageError("--suites is empty");
  }

  std::vector<SuiteResult> results;
  bool ok = true;
  for (const auto& name : names) {
    results.push_back(run_suite(name, config));
    ok = ok && results.back().violations == 0 && results.back().failures == 0;
  }

  Sink sink(o.out, out);
  if (o.json) {
    json j{{"command", "verify"}, {"config", config_json(config)}, {"passed", ok}};
    j["results"] = json::array();
    for (const auto& r : results) j["results"].push_back(to_json(r));
    *sink << j.dump(2) << "\n";
  } else if (o.csv) {
    print_suite_csv(*sink, results);
  } else {
    print_suite_table(*sink, results, false);
    *sink << (ok ? "all suites passed\n" : "VIOLATIONS FOUND\n");
  }
  return ok ? kExitOk : kExitViolation;
}

struct CounterexampleOptions {
  int grid = 1001;
  bool refine = false;
  bool csv = false;
  bool json = false;
  std::string out;
};

int cmd_counterexample(const CounterexampleOptions& o, std::ostream& out) {
  if (o.grid < 3) throw UsageError("--grid must be at least 3");
  const SymMatrix a = counterexample_a();
  const SymMatrix b = counterexample_b();
  const WeightedFamily fam = harm_family();
  const MonotonicityReport rep = scan_monotonicity(fam, a, b, ScanMetric::euclid, o.grid);
  const std::optional<double> refined =
      o.refine ? refined_first_crossing(fam, a, b, ScanMetric::euclid, rep) : std::nullopt;

  Sink sink(o.out, out);
  if (o.csv) {
    print_curve_csv(*sink, rep, "distance");
    return kExitOk;
  }

  // Uniform rescaling leaves the peak in place; rescaling A alone moves it.
  struct Scaled {
    std::string kind;
    double c;
    std::optional<double> peak;
    double d_half;
    double d_ab;
  };
  std::vector<Scaled> scaled;
  for (const auto& [kind, c] : std::vector<std::pair<std::string, double>>{
           {"both", 0.01}, {"both", 100.0}, {"A", 0.5}, {"A", 2.0}, {"A", 5.0}, {"A", 10.0}, {"A", 20.0}, {"A", 50.0}}) {
    const SymMatrix sa = c * a;
    const SymMatrix sb = kind == "both" ? c * b : b;
    const MonotonicityReport r = scan_monotonicity(fam, sa, sb, ScanMetric::euclid, o.grid);
    scaled.push_back({kind, c, interior_peak(fam, sa, sb, r), dist_euclid(sa, harmonic_w(sa, sb, 0.5)),
                      dist_euclid(sa, sb)});
  }

  if (o.json) {
    json j = to_json(rep);
    j["A"] = format_matrix(a);
    j["B"] = format_matrix(b);
    j["mean"] = "harm";
    j["metric"] = "euclid";
    j["refined_crossing"] = refined ? json(*refined) : json(nullptr);
    j["scaled"] = json::array();
    for (const auto& s : scaled)
      j["scaled"].push_back({{"scale", s.kind},
                             {"c", s.c},
                             {"peak", s.peak ? json(*s.peak) : json(nullptr)},
                             {"distance_at_half", s.d_half},
                             {"distance_ab", s.d_ab}});
    *sink << j.dump(2) << "\n";
    return kExitOk;
  }

  auto& os = *sink;
  os << "A =\n" << format_matrix(a) << "B =\n" << format_matrix(b);
  os << "distance ||A - A !_t B||_F along t:\n";
  print_curve_summary(os, rep, "distance");
  if (refined) os << "refined crossing t*: " << std::setprecision(9) << *refined << "\n";
  os << "\nrescaled pairs (peak = interior maximiser of the distance; t = 1/2 is violated when "
        "d(A, A!B) > d(A, B)):\n";
  os << std::left << std::setw(8) << "scale" << std::setw(8) << "c" << std::setw(12) << "peak" << std::setw(14)
     << "d(A,A!B)" << std::setw(14) << "d(A,B)" << "violated\n";
  for (const auto& s : scaled)
    os << std::left << std::setw(8) << s.kind << std::setw(8) << fixed6(s.c) << std::setw(12)
       << (s.peak ? fixed6(*s.peak) : std::string("none")) << std::setw(14) << fixed6(s.d_half)
       << std::setw(14) << fixed6(s.d_ab) << (s.d_half > s.d_ab ? "yes" : "no") << "\n";
  return kExitOk;
}

struct ScanOptions {
  std::string a_file;
  std::string b_file;
  std::string mean;
  std::string metric = "euclid";
  int grid = 1001;
  double tol = 1e-9;
  bool csv = false;
  bool json = false;
  std::string out;
};

int cmd_scan(const ScanOptions& o, std::ostream& out) {
  const auto metric = parse_scan_metric(o.metric);
  if (!metric) throw UsageError("unknown metric '" + o.metric + "' (expected euclid, inv-euclid, trace, angle)");
  if (o.grid < 3) throw UsageError("--grid must be at least 3");
  const SymMatrix a = load_matrix(o.a_file);
  const SymMatrix b = load_matrix(o.b_file);
  for (const auto* m : {&a, &b}) {
    const Spectral s = eigh(*m);
    require_positive_definite(s, m == &a ? o.a_file : o.b_file);
  }
  const WeightedFamily fam = parse_family(o.mean);
  const MonotonicityReport rep = scan_monotonicity(fam, a, b, *metric, o.grid, o.tol);

  Sink sink(o.out, out);
  const std::string column = *metric == ScanMetric::angle ? "cos2_functional" : "distance";
  if (o.csv) {
    print_curve_csv(*sink, rep, column);
  } else if (o.json) {
    json j = to_json(rep);
    j["mean"] = fam.name;
    j["metric"] = std::string(scan_metric_name(*metric));
    *sink << j.dump(2) << "\n";
  } else {
    *sink << "mean " << fam.name << ", metric " << scan_metric_name(*metric) << "\n";
    print_curve_summary(*sink, rep, column);
  }
  return kExitOk;
}

struct ExploreOptions {
  std::string p_list;
  int trials = 1000;
  std::uint64_t seed = 42;
  std::string dim = "2..8";
  std::string exp_range;
  int grid = 1001;
  double tol = 1e-9;
  int threads = 0;
  bool json = false;
  std::string out;
};

int cmd_explore(const ExploreOptions& o, std::ostream& out) {
  TrialConfig config;
  config.trials = o.trials;
  config.seed = o.seed;
  config.grid_size = o.grid;
  config.tolerance = o.tol;
  config.threads = o.threads;
  parse_dim_range(o.dim, config);
  if (!o.exp_range.empty()) parse_exp_range(o.exp_range, config);
  config.validate();
  std::vector<double> ps;
  for (const auto& s : split(o.p_list, ',')) {
    const double p = to_number(s, "--p-list");
    if (!(p > 0.0)) throw UsageError("--p-list values must be positive");
    ps.push_back(p);
  }
  if (ps.empty()) throw UsageError("--p-list is empty");

  const std::vector<SuiteResult> results = explore_power_conjecture(config, ps);
  Sink sink(o.out, out);
  if (o.json) {
    json j{{"command", "explore"}, {"config", config_json(config)}};
    j["results"] = json::array();
    for (const auto& r : results) j["results"].push_back(to_json(r));
    *sink << j.dump(2) << "\n";
  } else {
    print_suite_table(*sink, results, true);
  }
  return kExitOk;
}

struct MeansEvalOptions {
  std::string a_file;
  std::string b_file;
  std::string mean;
  double t = 0.5;
  double nu = 0.5;
  std::optional<double> p;
};

int cmd_means_eval(const MeansEvalOptions& o, std::ostream& out) {
  const SymMatrix a = load_matrix(o.a_file);
  const SymMatrix b = load_matrix(o.b_file);
  const std::string& m = o.mean;
  std::string text;
  if (m == "arith") {
    text = format_matrix(arithmetic(a, b, o.t));
  } else if (m == "harm") {
    text = format_matrix(harmonic_w(a, b, o.t));
  } else if (m == "geom") {
    text = format_matrix(geometric_w(a, b, o.t));
  } else if (m == "heinz") {
    text = format_matrix(heinz(a, b, o.nu));
  } else if (m == "power" || m.rfind("power:", 0) == 0) {
    double p = 0.0;
    if (m == "power") {
      if (!o.p) throw UsageError("mean 'power' needs --p");
      p = *o.p;
    } else {
      p = to_number(m.substr(6), "power exponent");
    }
    text = format_matrix(power_mean(a, b, o.t, p));
  } else if (m.rfind("ka-f:", 0) == 0) {
    text = format_matrix(kubo_ando_spectral(representing_function(m.substr(5), o.t), a, b));
  } else if (m.rfind("ka-measure:", 0) == 0) {
    const DiscreteMeasure measure = load_measure(m.substr(11));
    text = format_matrix(kubo_ando_measure(o.t == 0.5 ? measure : stretch_measure(measure, o.t), a, b));
  } else {
    throw UsageError("unknown mean '" + m + "' (expected arith, harm, geom, power:p, heinz, ka-f:name, ka-measure:file)");
  }
  out << text;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator means on positive definite matrices: verification and exploration"};
  app.name("opmeans");
  app.require_subcommand(1);

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Run theorem suites");
  verify->add_option("--suites", vo.suites, "Comma-separated suite names or 'all'");
  verify->add_option("--trials", vo.trials, "Trials per suite");
  verify->add_option("--seed", vo.seed, "Base seed");
  verify->add_option("--dim", vo.dim, "Dimension or range lo..hi");
  verify->add_option("--exp-range", vo.exp_range, "Eigenvalue exponent range lo,hi (base 10)");
  verify->add_flag("--extreme", vo.extreme, "Use the wide exponent range -6,6");
  verify->add_option("--grid", vo.grid, "t-grid size");
  verify->add_option("--tol", vo.tol, "Relative tolerance");
  verify->add_option("--threads", vo.threads, "Worker threads (0 = automatic)");
  verify->add_flag("--json", vo.json, "JSON report");
  verify->add_flag("--csv", vo.csv, "CSV report");
  verify->add_option("--out", vo.out, "Write the report to a file");

  CounterexampleOptions co;
  auto* counter = app.add_subcommand("counterexample", "Reproduce the 2x2 harmonic-mean counterexample");
  counter->add_option("--grid", co.grid, "t-grid size");
  counter->add_flag("--refine", co.refine, "Refine the crossing by bisection");
  counter->add_flag("--csv", co.csv, "Two-column t,distance output");
  counter->add_flag("--json", co.json, "JSON report");
  counter->add_option("--out", co.out, "Write the report to a file");

  ScanOptions so;
  auto* scan = app.add_subcommand("scan", "Scan t -> metric(A, mean(A, B, t))");
  scan->add_option("a_file", so.a_file, "Matrix file for A")->required();
  scan->add_option("b_file", so.b_file, "Matrix file for B")->required();
  scan->add_option("--mean", so.mean, "arith, harm, geom, power:p, heinz, ka-f:name, ka-measure:file")->required();
  scan->add_option("--metric", so.metric, "euclid, inv-euclid, trace or angle");
  scan->add_option("--grid", so.grid, "t-grid size");
  scan->add_option("--tol", so.tol, "Relative tolerance band");
  scan->add_flag("--csv", so.csv, "CSV output");
  scan->add_flag("--json", so.json, "JSON output");
  scan->add_option("--out", so.out, "Write the report to a file");

  ExploreOptions eo;
  auto* explore = app.add_subcommand("explore", "Search for power-mean monotonicity violations at given p");
  explore->add_option("--p-list", eo.p_list, "Comma-separated exponents")->required();
  explore->add_option("--trials", eo.trials, "Trials per exponent");
  explore->add_option("--seed", eo.seed, "Base seed");
  explore->add_option("--dim", eo.dim, "Dimension or range lo..hi");
  explore->add_option("--exp-range", eo.exp_range, "Eigenvalue exponent range lo,hi (base 10)");
  explore->add_option("--grid", eo.grid, "t-grid size");
  explore->add_option("--tol", eo.tol, "Relative tolerance");
  explore->add_option("--threads", eo.threads, "Worker threads (0 = automatic)");
  explore->add_flag("--json", eo.json, "JSON report");
  explore->add_option("--out", eo.out, "Write the report to a file");

  MeansEvalOptions mo;
  auto* meval = app.add_subcommand("means-eval", "Evaluate a mean and print the matrix");
  meval->add_option("a_file", mo.a_file, "Matrix file for A")->required();
  meval->add_option("b_file", mo.b_file, "Matrix file for B")->required();
  meval->add_option("--mean", mo.mean, "arith, harm, geom, power:p, heinz, ka-f:name, ka-measure:file")->required();
  meval->add_option("--t", mo.t, "Weight t in [0, 1]");
  meval->add_option("--nu", mo.nu, "Heinz exponent in [0, 1]");
  meval->add_option("--p", mo.p, "Power exponent for 'power'");

  std::vector<const char*> argv{"opmeans"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'opmeans --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(vo, out, err);
    if (*counter) return cmd_counterexample(co, out);
    if (*scan) return cmd_scan(so, out);
    if (*explore) return cmd_explore(eo, out);
    if (*meval) return cmd_means_eval(mo, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace opmeans::cli
