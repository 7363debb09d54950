#include <algorithm>
#include <charconv>
#include <cmath>

#include "opmeans/verify.hpp"

namespace opmeans {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::monotone_decreasing:
      return "monotone_decreasing";
    case Verdict::monotone_increasing:
      return "monotone_increasing";
    case Verdict::non_monotone:
      return "non_monotone";
  }
  return "?";
}

std::string_view scan_metric_name(ScanMetric m) {
  switch (m) {
    case ScanMetric::euclid:
      return "euclid";
    case ScanMetric::inv_euclid:
      return "inv-euclid";
    case ScanMetric::trace_metric:
      return "trace";
    case ScanMetric::angle:
      return "angle";
  }
  return "?";
}

std::optional<ScanMetric> parse_scan_metric(std::string_view name) {
  if (name == "angle") return ScanMetric::angle;
  if (const auto m = parse_metric(name)) {
    switch (*m) {
      case MetricKind::euclid:
        return ScanMetric::euclid;
      case MetricKind::inv_euclid:
        return ScanMetric::inv_euclid;
      case MetricKind::trace_metric:
        return ScanMetric::trace_metric;
    }
  }
  return std::nullopt;
}

std::vector<double> uniform_grid(int n) {
  if (n < 2) throw InvalidArgument("grid needs at least two points");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[i] = static_cast<double>(i) / (n - 1);
  t.back() = 1.0;
  return t;
}

MonotonicityReport classify_curve(std::vector<double> t_values, std::vector<double> values,
                                  Direction expected, double tolerance) {
  if (t_values.size() != values.size() || t_values.size() < 2)
    throw InvalidArgument("classify_curve: need matching t and value samples");
  MonotonicityReport r;
  r.expected = expected;
  double scale = 1.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainViolation("scanned quantity is not finite");
    scale = std::max(scale, std::abs(v));
  }
  const double band = tolerance * scale;
  const double sign_expected = expected == Direction::decreasing ? -1.0 : 1.0;

  bool up = false;
  bool down = false;
  int last_sign = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double delta = values[i + 1] - values[i];
    r.worst_margin = std::min(r.worst_margin, sign_expected * delta / scale);
    int sign = 0;
    if (delta > band) {
      sign = 1;
      up = true;
    } else if (delta < -band) {
      sign = -1;
      down = true;
    }
    if (sign != 0 && sign_expected * sign < 0) r.violations.push_back({t_values[i], t_values[i + 1], delta});
    if (sign != 0) {
      if (last_sign != 0 && sign != last_sign) r.crossing_points.push_back(t_values[i]);
      last_sign = sign;
    }
  }
  if (expected == Direction::decreasing)
    r.verdict = !up ? Verdict::monotone_decreasing : (!down ? Verdict::monotone_increasing : Verdict::non_monotone);
  else
    r.verdict = !down ? Verdict::monotone_increasing : (!up ? Verdict::monotone_decreasing : Verdict::non_monotone);
  r.t_values = std::move(t_values);
  r.values = std::move(values);
  return r;
}

// ---------------------------------------------------------------------------
// Families

namespace {

Spectral checked_spectral(const SymMatrix& a) {
  Spectral s = eigh(a);
  require_positive_definite(s, "mean family");
  return s;
}

}  // namespace

WeightedFamily arith_family() {
  return {"arith", true, true, [](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            return [a, b](double t) { return GeneralMatrix(arithmetic(a, b, t)); };
          }};
}

WeightedFamily harm_family() {
  return {"harm", true, true, [](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            return [a, b](double t) { return GeneralMatrix(harmonic_w(a, b, t)); };
          }};
}

WeightedFamily geom_family() {
  return {"geom", true, false, [](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            return [a, b](double t) { return GeneralMatrix(geometric_w(a, b, t)); };
          }};
}

WeightedFamily power_family(double p) {
  if (p == 0.0) throw ZeroExponent();
  if (!std::isfinite(p)) throw InvalidArgument("power exponent must be finite");
  return {"power:" + format_double(p), true, true, [p](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
            // Same evaluation order as power_mean, so results agree bit for bit.
            const SymMatrix ap = matrix_power(checked_spectral(a), p);
            const SymMatrix bp = matrix_power(checked_spectral(b), p);
            return [a, b, ap, bp, p](double t) {
              if (t == 0.0) return GeneralMatrix(b);
              if (t == 1.0) return GeneralMatrix(a);
              return GeneralMatrix(power_mean_from_powers(ap, bp, t, p));
            };
          }};
}

WeightedFamily heinz_family() {
  return {"heinz", false, true, [](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            return [a, b](double t) { return heinz(a, b, t); };
          }};
}

WeightedFamily ka_function_family(const std::string& function_name) {
  representing_function(function_name);  // validates the name
  return {"ka-f:" + function_name, true, true, [function_name](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            checked_spectral(a);
            checked_spectral(b);
            return [a, b, function_name](double t) {
              if (t == 0.0) return GeneralMatrix(b);
              if (t == 1.0) return GeneralMatrix(a);
              return GeneralMatrix(kubo_ando_spectral(representing_function(function_name, t), a, b));
            };
          }};
}

WeightedFamily ka_measure_family(DiscreteMeasure m, const std::string& label) {
  return {"ka-measure:" + label, true, true, [m](const SymMatrix& a, const SymMatrix& b) -> MeanPath {
            checked_spectral(a);
            checked_spectral(b);
            return [a, b, m](double t) {
              if (t == 0.0) return GeneralMatrix(b);
              if (t == 1.0) return GeneralMatrix(a);
              return GeneralMatrix(kubo_ando_measure(stretch_measure(m, t), a, b));
            };
          }};
}

WeightedFamily parse_family(const std::string& spec) {
  if (spec == "arith") return arith_family();
  if (spec == "harm") return harm_family();
  if (spec == "geom") return geom_family();
  if (spec == "heinz") return heinz_family();
  if (spec.rfind("power:", 0) == 0) {
    const std::string arg = spec.substr(6);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc() || ptr != arg.data() + arg.size())
      throw InvalidArgument("bad exponent in '" + spec + "'");
    return power_family(p);
  }
  if (spec.rfind("ka-f:", 0) == 0) return ka_function_family(spec.substr(5));
  if (spec.rfind("ka-measure:", 0) == 0) {
    const std::string path = spec.substr(11);
    return ka_measure_family(load_measure(path), path);
  }
  throw InvalidArgument("unknown mean '" + spec +
                        "' (expected arith, harm, geom, power:p, heinz, ka-f:name or ka-measure:file)");
}

Direction expected_direction(const WeightedFamily& family, ScanMetric metric) {
  // Distances to A shrink and the cos^2 functional grows as mu moves to A.
  const bool toward_a_increasing = metric == ScanMetric::angle;
  const bool increasing = toward_a_increasing == family.a_at_one;
  return increasing ? Direction::increasing : Direction::decreasing;
}

double scan_value(const SymMatrix& a, const GeneralMatrix& m, bool symmetric, ScanMetric metric) {
  switch (metric) {
    case ScanMetric::euclid:
      return dist_euclid(a, m);
    case ScanMetric::angle: {
      if (!symmetric && !(frob_inner(GeneralMatrix(a), m) > 0.0))
        throw DomainViolation("trace[A M] must be positive for a Heinz mean of positive matrices");
      return angle_cos_sq_functional(a, m);
    }
    case ScanMetric::inv_euclid:
    case ScanMetric::trace_metric:
      break;
  }
  if (!symmetric)
    throw InvalidArgument(std::string(scan_metric_name(metric)) + " metric needs a symmetric mean output");
  const SymMatrix ms = SymMatrix::symmetrize(m);
  return metric == ScanMetric::inv_euclid ? dist_inv_euclid(a, ms) : dist_trace_metric(a, ms);
}

MonotonicityReport scan_monotonicity(const WeightedFamily& family, const SymMatrix& a,
                                     const SymMatrix& b, ScanMetric metric, int grid_size,
                                     double tolerance) {
  if (grid_size < 3) throw InvalidArgument("grid size must be at least 3");
  if (!is_positive_definite(a) || !is_positive_definite(b))
    throw DomainViolation("scan_monotonicity needs positive definite inputs");
  const MeanPath path = family.bind(a, b);
  std::vector<double> t = uniform_grid(grid_size);
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v[i] = scan_value(a, path(t[i]), family.symmetric_output, metric);
  return classify_curve(std::move(t), std::move(v), expected_direction(family, metric), tolerance);
}

double refine_crossing(const WeightedFamily& family, const SymMatrix& a, const SymMatrix& b,
                       ScanMetric metric, double lo, double hi) {
  constexpr double h = 1e-5;
  lo = std::max(lo, h);
  hi = std::min(hi, 1.0 - h);
  if (!(lo < hi)) throw NoSignChange("refine_crossing: empty bracket");
  const MeanPath path = family.bind(a, b);
  const auto sq = [&](double t) {
    const double v = scan_value(a, path(t), family.symmetric_output, metric);
    return v * v;
  };
  const auto slope = [&](double t) { return (sq(t + h) - sq(t - h)) / (2.0 * h); };
  double slo = slope(lo);
  const double shi = slope(hi);
  if ((slo > 0.0) == (shi > 0.0) || slo == 0.0 || shi == 0.0) {
    if (slo == 0.0) return lo;
    if (shi == 0.0) return hi;
    throw NoSignChange("refine_crossing: slope has the same sign at " + format_double(lo) + " and " +
                       format_double(hi));
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    const double sm = slope(mid);
    if (sm == 0.0) return mid;
    if ((sm > 0.0) == (slo > 0.0)) {
      lo = mid;
      slo = sm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace opmeans
