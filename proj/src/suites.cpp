#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "opmeans/verify.hpp"

namespace opmeans {

namespace {

int resolve_threads(const TrialConfig& config) {
  if (config.threads > 0) return config.threads;
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("OPMEANS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

double relative_slack(double larger, double smaller) {
  const double scale = std::max({1.0, std::abs(larger), std::abs(smaller)});
  return (larger - smaller) / scale;
}

struct Pair {
  int dim;
  SymMatrix a;
  SymMatrix b;
};

Pair sample_pair(const TrialConfig& config, Rng& rng) {
  std::uniform_int_distribution<int> dims(config.dim_lo, config.dim_hi);
  const int n = dims(rng);
  SymMatrix a = sample_pd(n, rng, config.exponent_lo, config.exponent_hi);
  SymMatrix b = sample_pd(n, rng, config.exponent_lo, config.exponent_hi);
  return {n, std::move(a), std::move(b)};
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

Witness make_witness(const Pair& pair, std::map<std::string, double> params) {
  params["dim"] = pair.dim;
  return Witness{pair.a, pair.b, std::move(params)};
}

}  // namespace

void TrialOutcome::check(double slack, double tolerance) {
  if (std::isnan(slack) || slack < -tolerance) violated = true;
  margin = std::isnan(slack) ? -std::numeric_limits<double>::infinity() : std::min(margin, slack);
}

SuiteResult run_trials(const std::string& suite, const TrialConfig& config,
                       const std::function<TrialOutcome(std::int64_t, Rng&)>& body) {
  config.validate();
  const auto count = static_cast<std::size_t>(config.trials);
  std::vector<TrialOutcome> outcomes(count);

  const auto run_one = [&](std::size_t i) {
    const std::uint64_t sub_seed = config.seed ^ static_cast<std::uint64_t>(i);
    Rng rng(sub_seed);
    TrialOutcome out;
    try {
      out = body(static_cast<std::int64_t>(i), rng);
    } catch (const Error& e) {
      out = TrialOutcome{};
      out.failure = e.what();
    }
    if (out.witness) {
      out.witness->seed = sub_seed;
      out.witness->trial = static_cast<std::int64_t>(i);
    }
    outcomes[i] = std::move(out);
  };

  const int threads = std::min<int>(resolve_threads(config), static_cast<int>(count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k)
      pool.emplace_back([&, k] {
        for (std::size_t i = static_cast<std::size_t>(k); i < count; i += static_cast<std::size_t>(threads)) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  SuiteResult r;
  r.suite = suite;
  r.trials_run = config.trials;
  std::optional<std::size_t> worst_violated;
  std::optional<std::size_t> first_failed;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& o = outcomes[i];
    if (o.failure) {
      ++r.failures;
      if (!first_failed) first_failed = i;
      continue;
    }
    r.worst_margin = std::min(r.worst_margin, o.margin);
    if (o.violated) {
      ++r.violations;
      if (!worst_violated || o.margin < outcomes[*worst_violated].margin) worst_violated = i;
    }
  }
  if (worst_violated) {
    r.witness = outcomes[*worst_violated].witness;
  } else if (first_failed) {
    // The trial failed before it could describe its inputs; replaying the
    // seed recreates them.
    const std::uint64_t sub_seed = config.seed ^ *first_failed;
    Rng rng(sub_seed);
    const Pair pair = sample_pair(config, rng);
    r.witness = make_witness(pair, {});
    r.witness->seed = sub_seed;
    r.witness->trial = static_cast<std::int64_t>(*first_failed);
  }
  if (first_failed) r.failure = outcomes[*first_failed].failure;
  return r;
}

// ---------------------------------------------------------------------------

SuiteResult suite_geodesy(const TrialConfig& config) {
  return run_trials("geodesy", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double t = uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"t", t}});
    const auto& [n, a, b] = pair;

    const double d = dist_euclid(a, b);
    const double da = dist_euclid(a, arithmetic(a, b, t));
    out.check(-std::abs(da - (1.0 - t) * d) / std::max(1.0, d), config.tolerance);

    const double dinv = dist_inv_euclid(a, b);
    const double dh = dist_inv_euclid(a, harmonic_w(a, b, t));
    out.check(-std::abs(dh - (1.0 - t) * dinv) / std::max(1.0, dinv), config.tolerance);

    const double delta = dist_trace_metric(a, b);
    const double dg = dist_trace_metric(a, geometric_w(a, b, t));
    out.check(-std::abs(dg - t * delta) / std::max(1.0, delta), config.tolerance);
    return out;
  });
}

SuiteResult suite_power_distance(const TrialConfig& config, PowerRange range) {
  return run_trials("power-distance", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double p = range.lo + (range.hi - range.lo) * uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"p", p}});
    const auto& [n, a, b] = pair;

    const MonotonicityReport rep =
        scan_monotonicity(power_family(p), a, b, ScanMetric::euclid, config.grid_size, config.tolerance);
    out.check(rep.worst_margin, config.tolerance);

    if (range.intermediate_checks) {
      // trace mu_p^2 <= t trace A^2 + (1-t) trace B^2.
      const double ta = frob_inner(a, a);
      const double tb = frob_inner(b, b);
      for (int k = 1; k <= 9; ++k) {
        const double t = 0.1 * k;
        const SymMatrix m = power_mean(a, b, t, p);
        out.check(relative_slack(t * ta + (1.0 - t) * tb, frob_inner(m, m)), config.tolerance);
      }
    }
    return out;
  });
}

SuiteResult suite_power_angle(const TrialConfig& config, PowerRange range) {
  return run_trials("power-angle", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double p = range.lo + (range.hi - range.lo) * uniform(rng, 0.0, 1.0);
    const double s = uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"p", p}, {"s", s}});
    const auto& [n, a, b] = pair;

    const MonotonicityReport rep =
        scan_monotonicity(power_family(p), a, b, ScanMetric::angle, config.grid_size, config.tolerance);
    out.check(rep.worst_margin, config.tolerance);

    if (range.intermediate_checks) {
      // Unit-norm form: (tr GH)^2 tr X^(2/p) <= (tr[G X^(1/p)])^2 with
      // X = s G^p + (1-s) H^p.
      const SymMatrix g = (1.0 / frob_norm(a)) * a;
      const SymMatrix h = (1.0 / frob_norm(b)) * b;
      const SymMatrix x = s * matrix_power(g, p) + (1.0 - s) * matrix_power(h, p);
      const Spectral sx = eigh(x);
      double tr2 = 0.0;
      for (double l : sx.eigenvalues) tr2 += std::pow(l, 2.0 / p);
      const double gh = frob_inner(g, h);
      const double lhs = gh * gh * tr2;
      const double gx = frob_inner(g, matrix_power(sx, 1.0 / p));
      out.check(relative_slack(gx * gx, lhs), config.tolerance);
    }
    return out;
  });
}

SuiteResult suite_heinz_angle(const TrialConfig& config) {
  return run_trials("heinz-angle", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double nu = uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"nu", nu}});
    const auto& [n, a, b] = pair;
    const Spectral sa = eigh(a);
    const Spectral sb = eigh(b);

    // tr B^2 (tr[A^(1+nu) B^(1-nu)])^2 >= g(nu) (tr AB)^2
    const double trb2 = frob_inner(b, b);
    const double cross = frob_inner(matrix_power(sa, 1.0 + nu), matrix_power(sb, 1.0 - nu));
    const double trab = frob_inner(a, b);
    const double gnu = heinz_trace_g(sa, sb, nu);
    out.check(relative_slack(trb2 * cross * cross, gnu * trab * trab), config.tolerance);

    // g(0) g(1/2 + nu/2)^2 >= g(nu) g(1/2)^2
    const double g0 = heinz_trace_g(sa, sb, 0.0);
    const double gmid = heinz_trace_g(sa, sb, 0.5 + 0.5 * nu);
    const double ghalf = heinz_trace_g(sa, sb, 0.5);
    out.check(relative_slack(g0 * gmid * gmid, gnu * ghalf * ghalf), config.tolerance);

    // The Heinz mean's trace pairing with A stays positive.
    out.check(cross > 0.0 ? 0.0 : -1.0, config.tolerance);
    return out;
  });
}

SuiteResult suite_heinz_distance(const TrialConfig& config) {
  return run_trials("heinz-distance", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double nu = uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"nu", nu}});
    const auto& [n, a, b] = pair;
    const Spectral sa = eigh(a);
    const Spectral sb = eigh(b);

    // tr B^2 + 2 tr[A^(1+nu) B^(1-nu)] >= g(nu) + 2 tr AB
    const double cross = frob_inner(matrix_power(sa, 1.0 + nu), matrix_power(sb, 1.0 - nu));
    const double lhs = frob_inner(b, b) + 2.0 * cross;
    const double rhs = heinz_trace_g(sa, sb, nu) + 2.0 * frob_inner(a, b);
    out.check(relative_slack(lhs, rhs), config.tolerance);

    // Same statement through the mean itself: ||A - H_nu|| <= ||A - B||.
    const double dh = dist_euclid(a, heinz(a, b, nu));
    const double dab = dist_euclid(a, b);
    out.check(relative_slack(dab * dab, dh * dh), config.tolerance);

    // Convexity of g on the grid.
    const std::vector<double> xs = uniform_grid(config.grid_size);
    std::vector<double> g(xs.size());
    double scale = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      g[i] = heinz_trace_g(sa, sb, xs[i]);
      scale = std::max(scale, std::abs(g[i]));
    }
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) worst = std::min(worst, (g[i - 1] - 2.0 * g[i] + g[i + 1]) / scale);
    out.check(worst, config.tolerance);
    return out;
  });
}

SuiteResult suite_logconvexity(const TrialConfig& config) {
  return run_trials("logconvexity", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double x = uniform(rng, 0.0, 1.0);
    const double y = uniform(rng, 0.0, 1.0);
    TrialOutcome out;
    out.witness = make_witness(pair, {{"x", x}, {"y", y}});
    const Spectral sa = eigh(pair.a);
    const Spectral sb = eigh(pair.b);
    const double mid = heinz_trace_g(sa, sb, 0.5 * (x + y));
    out.check(relative_slack(heinz_trace_g(sa, sb, x) * heinz_trace_g(sa, sb, y), mid * mid), config.tolerance);
    return out;
  });
}

std::vector<ConvexTestFunction> convex_test_functions() {
  return {
      {"square", [](double x) { return x * x; }, -3.0, 3.0},
      {"exp", [](double x) { return std::exp(x); }, -3.0, 3.0},
      {"neglog", [](double x) { return -std::log(x); }, 0.05, 5.0},
  };
}

double slope_lemma_slack(const std::function<double(double)>& f, double x, double a, double b, double y) {
  const double lhs = (f(a) - f(x)) / (a - x);
  const double rhs = (f(y) - f(b)) / (y - b);
  return relative_slack(rhs, lhs);
}

SuiteResult suite_lemma_convex(const TrialConfig& config) {
  const auto fns = convex_test_functions();
  return run_trials("lemma-convex", config, [&](std::int64_t, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, fns.size() - 1);
    const auto& fn = fns[pick(rng)];
    double x = uniform(rng, fn.lo, fn.hi);
    double y = uniform(rng, fn.lo, fn.hi);
    if (x > y) std::swap(x, y);
    if (y - x < 1e-3) y = std::min(fn.hi, x + 1e-3);
    const double a = x + (y - x) * uniform(rng, 1e-3, 1.0 - 1e-3);
    const double b = x + (y - x) * uniform(rng, 1e-3, 1.0 - 1e-3);
    TrialOutcome out;
    out.witness = Witness{SymMatrix::diagonal({x, a}), SymMatrix::diagonal({b, y}),
                          {{"x", x}, {"a", a}, {"b", b}, {"y", y}}};
    out.check(slope_lemma_slack(fn.f, x, a, b, y), config.tolerance);
    return out;
  });
}

std::vector<KuboAndoMean> default_ka_means(std::uint64_t seed, int random_measures) {
  std::vector<KuboAndoMean> means = registry_means();
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < random_measures; ++i)
    means.emplace_back("measure#" + std::to_string(i), random_measure(rng));
  return means;
}

SuiteResult suite_trace_metric_ka(const TrialConfig& config, const std::vector<KuboAndoMean>& means) {
  return run_trials("trace-metric-ka", config, [&](std::int64_t trial, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const double c = std::pow(10.0, -6.0 * uniform(rng, 0.0, 1.0));
    TrialOutcome out;
    out.witness = make_witness(pair, {{"c", c}});
    const auto& [n, a, b] = pair;

    const double dab = dist_trace_metric(a, b);
    std::vector<double> cs{c};
    if (trial == 0)
      for (int k = 0; k <= 60; ++k) cs.push_back(std::pow(10.0, -k / 10.0));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < means.size(); ++i) {
      const double slack = dab - dist_trace_metric(a, means[i](a, b));
      if (slack < worst) {
        worst = slack;
        out.witness->params["mean_index"] = static_cast<double>(i);
      }
      out.check(slack, trace_metric_slack);
      // 1 >= 1 sigma c >= c
      for (double ci : cs) {
        const double s = means[i].scalar(ci);
        out.check(std::min(1.0 - s, s - ci), 1e-12);
      }
    }
    return out;
  });
}

SuiteResult suite_adjoint_duality(const TrialConfig& config, const std::vector<KuboAndoMean>& means) {
  return run_trials("adjoint-duality", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    TrialOutcome out;
    out.witness = make_witness(pair, {});
    const auto& [n, a, b] = pair;
    const SymMatrix ainv = inverse(a);
    const SymMatrix binv = inverse(b);
    for (const auto& mean : means) {
      const BinaryMean adj = adjoint_mean(mean.as_binary());
      const double lhs = dist_inv_euclid(a, mean(a, b));
      const double rhs = dist_euclid(ainv, adj(ainv, binv));
      out.check(-std::abs(lhs - rhs) / std::max({1.0, lhs, rhs}), config.tolerance);
    }
    return out;
  });
}

SuiteResult suite_ka_axioms(const TrialConfig& config, const std::vector<KuboAndoMean>& means) {
  return run_trials("ka-axioms", config, [&](std::int64_t, Rng& rng) {
    const Pair pair = sample_pair(config, rng);
    const auto& [n, a, b] = pair;
    const SymMatrix c = a + sample_psd(n, rng);
    const SymMatrix d = b + sample_psd(n, rng);
    // Random symmetric invertible congruence with |eigenvalues| in [10^-0.5, 10^0.5].
    GeneralMatrix q = random_orthogonal(n, rng);
    std::vector<double> lam(static_cast<std::size_t>(n));
    for (double& l : lam) l = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * std::pow(10.0, uniform(rng, -0.5, 0.5));
    const SymMatrix m = spectral_apply_unchecked(Spectral{lam, std::move(q)}, [](double x) { return x; });
    TrialOutcome out;
    out.witness = make_witness(pair, {});
    const SymMatrix id = SymMatrix::identity(static_cast<std::size_t>(n));
    const SymMatrix ma = congruence(m, a);
    const SymMatrix mb = congruence(m, b);
    for (const auto& mean : means) {
      const SymMatrix ab = mean(a, b);
      out.check(loewner_margin(mean(c, d), ab), loewner_tolerance);
      out.check(loewner_margin(mean(ma, mb), congruence(m, ab)), loewner_tolerance);
      out.check(-frob_norm(mean(id, id) - id), 1e-12);
    }
    return out;
  });
}

std::vector<SuiteResult> explore_power_conjecture(const TrialConfig& config, const std::vector<double>& p_values) {
  std::vector<SuiteResult> out;
  for (double p : p_values) {
    if (!(p > 0.0)) throw InvalidArgument("explore: p values must be positive");
    const PowerRange range{p, p, false};
    SuiteResult dist = suite_power_distance(config, range);
    dist.suite = "explore-distance p=" + format_double(p);
    dist.finding = dist.violations > 0;
    SuiteResult ang = suite_power_angle(config, range);
    ang.suite = "explore-angle p=" + format_double(p);
    ang.finding = ang.violations > 0;
    out.push_back(std::move(dist));
    out.push_back(std::move(ang));
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "geodesy",        "power-distance",  "power-angle", "heinz-angle", "heinz-distance", "logconvexity",
      "lemma-convex", "trace-metric-ka", "adjoint-duality", "ka-axioms"};
  return names;
}

SuiteResult run_suite(const std::string& name, const TrialConfig& config) {
  if (name == "geodesy") return suite_geodesy(config);
  if (name == "power-distance") return suite_power_distance(config);
  if (name == "power-angle") return suite_power_angle(config);
  if (name == "heinz-angle") return suite_heinz_angle(config);
  if (name == "heinz-distance") return suite_heinz_distance(config);
  if (name == "logconvexity") return suite_logconvexity(config);
  if (name == "lemma-convex") return suite_lemma_convex(config);
  if (name == "trace-metric-ka") return suite_trace_metric_ka(config, default_ka_means(config.seed));
  if (name == "adjoint-duality") return suite_adjoint_duality(config, default_ka_means(config.seed, 10));
  if (name == "ka-axioms") return suite_ka_axioms(config, default_ka_means(config.seed, 20));
  throw InvalidArgument("unknown suite '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const SuiteResult& r) {
  nlohmann::json j;
  j["suite"] = r.suite;
  j["trials"] = r.trials_run;
  j["violations"] = r.violations;
  j["failures"] = r.failures;
  if (r.failure) j["failure"] = *r.failure;
  j["worst_margin"] = std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json(nullptr);
  if (r.witness) {
    nlohmann::json w;
    w["A"] = format_matrix(r.witness->a);
    w["B"] = format_matrix(r.witness->b);
    w["params"] = r.witness->params;
    w["seed"] = r.witness->seed;
    w["trial"] = r.witness->trial;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  if (r.finding) j["finding"] = *r.finding;
  return j;
}

nlohmann::json to_json(const MonotonicityReport& r) {
  nlohmann::json j;
  j["verdict"] = std::string(verdict_name(r.verdict));
  j["expected"] = r.expected == Direction::decreasing ? "decreasing" : "increasing";
  j["t"] = r.t_values;
  j["values"] = r.values;
  nlohmann::json v = nlohmann::json::array();
  for (const auto& s : r.violations) v.push_back({s.t_from, s.t_to, s.delta});
  j["violations"] = std::move(v);
  j["crossing_points"] = r.crossing_points;
  j["worst_margin"] = r.worst_margin;
  return j;
}

}  // namespace opmeans
