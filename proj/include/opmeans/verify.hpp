#pragma once

// Randomized verification harness: seeded sampling of positive definite
// matrices, grid-based monotonicity scans and the theorem suites.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "opmeans/means.hpp"
#include "opmeans/metrics.hpp"
#include "opmeans/symcore.hpp"

namespace opmeans {

using Rng = std::mt19937_64;

struct TrialConfig {
  int dim_lo = 2;
  int dim_hi = 8;
  int trials = 1000;
  std::uint64_t seed = 42;
  /// Sampled eigenvalues are 10^u with u uniform in [exponent_lo, exponent_hi].
  double exponent_lo = -2.0;
  double exponent_hi = 2.0;
  int grid_size = 1001;
  double tolerance = 1e-9;
  /// 0 selects OPMEANS_THREADS or the hardware concurrency.
  int threads = 0;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

/// Each trial owns the stream seeded with seed XOR trial_index.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Q diag(10^u) Q^T with Q Haar-distributed from the QR factorization of a
/// Gaussian matrix.
SymMatrix sample_pd(int dim, Rng& rng, double exponent_lo, double exponent_hi);
SymMatrix sample_pd(int dim, std::uint64_t seed, double exponent_lo, double exponent_hi);
GeneralMatrix random_orthogonal(int dim, Rng& rng);
/// G G^T with standard Gaussian G.
SymMatrix sample_psd(int dim, Rng& rng);
/// One to six atoms, an occasional endpoint atom, exponential weights.
DiscreteMeasure random_measure(Rng& rng);

// ---------------------------------------------------------------------------
// Monotonicity scans

enum class Verdict { monotone_decreasing, monotone_increasing, non_monotone };
enum class Direction { decreasing, increasing };

std::string_view verdict_name(Verdict v);

struct StepViolation {
  double t_from;
  double t_to;
  double delta;
};

struct MonotonicityReport {
  std::vector<double> t_values;
  std::vector<double> values;
  Direction expected = Direction::decreasing;
  Verdict verdict = Verdict::monotone_decreasing;
  /// Steps moving against the expected direction by more than the band.
  std::vector<StepViolation> violations;
  /// Grid points where the sign of the finite difference flips.
  std::vector<double> crossing_points;
  /// Most negative step slack, relative to max(1, max |value|).
  double worst_margin = std::numeric_limits<double>::infinity();
};

/// t_i = i / (n - 1), endpoints exact.
std::vector<double> uniform_grid(int n);

/// Classifies a sampled curve with tolerance band tolerance * max(1, max |v|).
MonotonicityReport classify_curve(std::vector<double> t_values, std::vector<double> values,
                                  Direction expected, double tolerance);

/// What a scan measures between A and mu(A, B, t). `angle` is the
/// cos^2 functional, which grows as the angle shrinks.
enum class ScanMetric { euclid, inv_euclid, trace_metric, angle };

std::string_view scan_metric_name(ScanMetric m);
std::optional<ScanMetric> parse_scan_metric(std::string_view name);

using MeanPath = std::function<GeneralMatrix(double)>;

/// A one-parameter mean family mu(A, B, t).
struct WeightedFamily {
  std::string name;
  bool symmetric_output = true;
  /// true when mu(A, B, 1) = A; the geometric mean runs the other way.
  bool a_at_one = true;
  std::function<MeanPath(const SymMatrix&, const SymMatrix&)> bind;
};

WeightedFamily arith_family();
WeightedFamily harm_family();
WeightedFamily geom_family();
WeightedFamily power_family(double p);
WeightedFamily heinz_family();
WeightedFamily ka_function_family(const std::string& function_name);
WeightedFamily ka_measure_family(DiscreteMeasure m, const std::string& label);

/// Parses arith, harm, geom, power:p, heinz, ka-f:name and ka-measure:path.
WeightedFamily parse_family(const std::string& spec);

/// Expected direction of the scanned quantity.
Direction expected_direction(const WeightedFamily& family, ScanMetric metric);

/// Value of the scanned quantity for a mean output M.
double scan_value(const SymMatrix& a, const GeneralMatrix& m, bool symmetric, ScanMetric metric);

MonotonicityReport scan_monotonicity(const WeightedFamily& family, const SymMatrix& a,
                                     const SymMatrix& b, ScanMetric metric, int grid_size = 1001,
                                     double tolerance = 1e-9);

/// Bisection on the central finite difference of value(t)^2 until the
/// bracket is narrower than 1e-7. Throws NoSignChange when the slope has the
/// same sign at both ends.
double refine_crossing(const WeightedFamily& family, const SymMatrix& a, const SymMatrix& b,
                       ScanMetric metric, double lo, double hi);

// ---------------------------------------------------------------------------
// Suites

struct Witness {
  SymMatrix a;
  SymMatrix b;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::int64_t trial = 0;
};

struct SuiteResult {
  std::string suite;
  int trials_run = 0;
  int violations = 0;
  /// Trials aborted by a numerical or domain error. They count against a
  /// suite but are kept apart from genuine violations.
  int failures = 0;
  /// Message of the first failure.
  std::optional<std::string> failure;
  /// Minimum slack over trials that completed.
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  /// Set by the conjecture explorer only.
  std::optional<bool> finding;
};

nlohmann::json to_json(const SuiteResult& r);
nlohmann::json to_json(const MonotonicityReport& r);

/// Per-trial outcome. Every check records its slack; the trial is violated
/// when any slack falls below minus that check's tolerance.
struct TrialOutcome {
  bool violated = false;
  double margin = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  std::optional<std::string> failure;

  void check(double slack, double tolerance);
};

/// Runs trials, possibly in parallel, and merges the outcomes in trial
/// order so the result does not depend on scheduling. A trial that throws
/// opmeans::Error is recorded as a failure.
SuiteResult run_trials(const std::string& suite, const TrialConfig& config,
                       const std::function<TrialOutcome(std::int64_t trial, Rng& rng)>& body);

/// Exponent range for power suites; the monotonicity claims cover [1, 2].
struct PowerRange {
  double lo = 1.0;
  double hi = 2.0;
  /// Also check the intermediate inequalities, valid only on [1, 2].
  bool intermediate_checks = true;
};

SuiteResult suite_geodesy(const TrialConfig& config);
SuiteResult suite_power_distance(const TrialConfig& config, PowerRange range = {});
SuiteResult suite_power_angle(const TrialConfig& config, PowerRange range = {});
SuiteResult suite_heinz_angle(const TrialConfig& config);
SuiteResult suite_heinz_distance(const TrialConfig& config);
SuiteResult suite_logconvexity(const TrialConfig& config);
SuiteResult suite_lemma_convex(const TrialConfig& config);

/// Absolute slack in delta(A, A sigma B) <= delta(A, B).
inline constexpr double trace_metric_slack = 1e-8;

/// Registry means plus 50 random measures derived from the seed.
std::vector<KuboAndoMean> default_ka_means(std::uint64_t seed, int random_measures = 50);

SuiteResult suite_trace_metric_ka(const TrialConfig& config, const std::vector<KuboAndoMean>& means);
SuiteResult suite_adjoint_duality(const TrialConfig& config, const std::vector<KuboAndoMean>& means);
SuiteResult suite_ka_axioms(const TrialConfig& config, const std::vector<KuboAndoMean>& means);

/// Scalar convex test functions for the slope lemma.
struct ConvexTestFunction {
  std::string name;
  std::function<double(double)> f;
  double lo;
  double hi;
};
std::vector<ConvexTestFunction> convex_test_functions();

/// Slack in (f(a) - f(x)) / (a - x) <= (f(y) - f(b)) / (y - b), relative to
/// max(1, |lhs|, |rhs|).
double slope_lemma_slack(const std::function<double(double)>& f, double x, double a, double b, double y);

/// Runs the power distance and angle machinery at each fixed p. Violations
/// are reported as findings.
std::vector<SuiteResult> explore_power_conjecture(const TrialConfig& config,
                                                  const std::vector<double>& p_values);

/// Names accepted by run_suite, in execution order for "all".
const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const TrialConfig& config);

}  // namespace opmeans
