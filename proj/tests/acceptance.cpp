// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "opmeans/means.hpp"
#include "opmeans/metrics.hpp"
#include "opmeans/symcore.hpp"
#include "opmeans/verify.hpp"

using namespace opmeans;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome v{false, ""};
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("criterion %d: %s  %s  [%s] (%.2fs)\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string summarize(const SuiteResult& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s: %d trials, %d violations, %d failures, worst margin %.3g", r.suite.c_str(),
                r.trials_run, r.violations, r.failures, r.worst_margin);
  return buf;
}

bool clean(const SuiteResult& r) { return r.violations == 0 && r.failures == 0; }

double rel_diff(const SymMatrix& x, const SymMatrix& y) { return frob_norm(x - y) / std::max(1.0, frob_norm(y)); }

}  // namespace

int main() {
  TrialConfig config;  // 1000 trials, dims 2..8, seed 42, tolerance 1e-9

  criterion(1, "counterexample: initial rise, crossing in [0.30, 0.34], under 1 s", [] {
    const auto start = std::chrono::steady_clock::now();
    const SymMatrix a = SymMatrix::from_rows({{5, 7}, {7, 10}});
    const SymMatrix b = SymMatrix::from_rows({{5, 2}, {2, 1}});
    const MonotonicityReport r = scan_monotonicity(harm_family(), a, b, ScanMetric::euclid);
    bool rises = true;
    for (std::size_t i = 0; i + 1 < r.t_values.size() && r.t_values[i + 1] <= 0.30; ++i)
      rises = rises && r.values[i + 1] > r.values[i];
    if (r.crossing_points.empty()) return Outcome{false, "no crossing on the grid"};
    const double h = 2.0 / (r.t_values.size() - 1.0);
    const double t = refine_crossing(harm_family(), a, b, ScanMetric::euclid, r.crossing_points[0] - h,
                                     r.crossing_points[0] + h);
    const double secs = elapsed_since(start);
    char buf[160];
    std::snprintf(buf, sizeof buf, "verdict %s, rises on [0, 0.30]: %s, t* = %.9f, %.3fs",
                  std::string(verdict_name(r.verdict)).c_str(), rises ? "yes" : "no", t, secs);
    return Outcome{rises && r.verdict == Verdict::non_monotone && t >= 0.30 && t <= 0.34 && secs < 1.0, buf};
  });

  criterion(2, "geodesy equalities, 1000 pairs, relative 1e-9, under 30 s", [&] {
    const auto start = std::chrono::steady_clock::now();
    const SuiteResult r = suite_geodesy(config);
    const double secs = elapsed_since(start);
    return Outcome{clean(r) && secs < 30.0, summarize(r)};
  });

  criterion(3, "power means, distance and angle monotonicity, p in [1, 2]", [&] {
    const SuiteResult d = suite_power_distance(config);
    const SuiteResult a = suite_power_angle(config);
    return Outcome{clean(d) && clean(a), summarize(d) + "; " + summarize(a)};
  });

  criterion(4, "Heinz inequalities and log-convexity", [&] {
    const SuiteResult h1 = suite_heinz_angle(config);
    const SuiteResult h2 = suite_heinz_distance(config);
    const SuiteResult lc = suite_logconvexity(config);
    return Outcome{clean(h1) && clean(h2) && clean(lc), summarize(h1) + "; " + summarize(h2) + "; " + summarize(lc)};
  });

  criterion(5, "trace metric contraction for Kubo-Ando means, scalar sandwich", [&] {
    const std::vector<KuboAndoMean> means = default_ka_means(config.seed, 50);
    bool sandwich = true;
    for (const auto& m : means)
      for (int k = 0; k <= 200; ++k) {
        const double c = std::pow(10.0, -k / 20.0);
        const double s = m.scalar(c);
        sandwich = sandwich && s <= 1.0 + 1e-12 && s >= c - 1e-12;
      }
    const SuiteResult r = suite_trace_metric_ka(config, means);
    return Outcome{clean(r) && sandwich,
                   summarize(r) + ", " + std::to_string(means.size()) + " means, sandwich " + (sandwich ? "ok" : "broken")};
  });

  criterion(6, "spectral construction matches closed forms; uniform measure gives e/(e-1)", [&] {
    double worst = 0.0;
    Rng rng(config.seed);
    std::uniform_int_distribution<int> dims(2, 8);
    for (int i = 0; i < 200; ++i) {
      const int n = dims(rng);
      const SymMatrix a = sample_pd(n, rng, -2, 2);
      const SymMatrix b = sample_pd(n, rng, -2, 2);
      worst = std::max(worst, rel_diff(kubo_ando_spectral(representing_function("arith"), a, b), arithmetic(a, b, 0.5)));
      worst = std::max(worst, rel_diff(kubo_ando_spectral(representing_function("geom"), a, b), geometric_w(a, b, 0.5)));
      worst = std::max(worst, rel_diff(kubo_ando_spectral(representing_function("harm"), a, b), harmonic_w(a, b, 0.5)));
    }
    const double e = std::numbers::e;
    const double got = kubo_ando_measure(uniform_measure(200), SymMatrix::diagonal({1.0}), SymMatrix::diagonal({e}))(0, 0);
    const double err = std::abs(got - e / (e - 1.0));
    char buf[160];
    std::snprintf(buf, sizeof buf, "closed-form deviation %.3g, measure value %.12f, error %.3g", worst, got, err);
    return Outcome{worst <= 1e-9 && err <= 1e-6, buf};
  });

  criterion(7, "Kubo-Ando axioms in the tolerant Loewner order, 500 trials", [&] {
    TrialConfig c = config;
    c.trials = 500;
    const SuiteResult r = suite_ka_axioms(c, default_ka_means(c.seed, 20));
    return Outcome{clean(r), summarize(r)};
  });

  criterion(8, "eigensolver reconstruction and power composition up to n = 64", [&] {
    double worst_rec = 0.0;
    double worst_comp = 0.0;
    Rng rng(config.seed);
    std::normal_distribution<double> normal;
    for (int n : {2, 5, 8, 16, 32, 48, 64}) {
      for (int rep = 0; rep < 3; ++rep) {
        GeneralMatrix g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
        const SymMatrix s = SymMatrix::symmetrize(g + g.transpose());
        const Spectral sp = eigh(s);
        GeneralMatrix d(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) d(i, i) = sp.eigenvalues[i];
        const GeneralMatrix back = sp.eigenvectors * d * sp.eigenvectors.transpose();
        worst_rec = std::max(worst_rec, frob_norm(back - GeneralMatrix(s)) / frob_norm(s));

        const SymMatrix a = sample_pd(n, rng, -2, 2);
        for (auto [p, q] : {std::pair{0.5, 2.0}, {-1.0, -1.0}, {1.7, 0.3}, {-0.5, 3.0}, {2.0, 0.25}})
          worst_comp = std::max(worst_comp, rel_diff(matrix_power(matrix_power(a, p), q), matrix_power(a, p * q)));
      }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "reconstruction %.3g * ||A||_F, composition %.3g relative", worst_rec, worst_comp);
    return Outcome{worst_rec <= 1e-10 && worst_comp <= 1e-9, buf};
  });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria FAILED");
  return failures == 0 ? 0 : 1;
}
