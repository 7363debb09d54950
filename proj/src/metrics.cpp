#include "opmeans/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace opmeans {

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::euclid:
      return "euclid";
    case MetricKind::inv_euclid:
      return "inv-euclid";
    case MetricKind::trace_metric:
      return "trace";
  }
  return "?";
}

std::optional<MetricKind> parse_metric(std::string_view name) {
  if (name == "euclid") return MetricKind::euclid;
  if (name == "inv-euclid") return MetricKind::inv_euclid;
  if (name == "trace") return MetricKind::trace_metric;
  return std::nullopt;
}

double dist_euclid(const GeneralMatrix& a, const GeneralMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

double dist_inv_euclid(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  return dist_euclid(inverse(a), inverse(b));
}

double dist_trace_metric(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  const Spectral sa = eigh(a);
  require_positive_definite(sa, "dist_trace_metric");
  require_positive_definite(eigh(b), "dist_trace_metric");
  const Spectral inner = eigh(congruence(matrix_power(sa, -0.5), b));
  // The Frobenius norm of log(C) only needs the eigenvalues of C.
  double s = 0.0;
  for (double lambda : inner.eigenvalues) {
    if (!(lambda > 0.0)) throw DomainViolation("dist_trace_metric: log of nonpositive eigenvalue", lambda);
    const double l = std::log(lambda);
    s += l * l;
  }
  return std::sqrt(s);
}

double distance(MetricKind kind, const SymMatrix& a, const SymMatrix& b) {
  switch (kind) {
    case MetricKind::euclid:
      return dist_euclid(a, b);
    case MetricKind::inv_euclid:
      return dist_inv_euclid(a, b);
    case MetricKind::trace_metric:
      return dist_trace_metric(a, b);
  }
  return 0.0;
}

double angle(const GeneralMatrix& a, const GeneralMatrix& b) {
  const double na = frob_norm(a);
  const double nb = frob_norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroOperator();
  const double c = std::clamp(frob_inner(a, b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

double angle_cos_sq_functional(const SymMatrix& a, const GeneralMatrix& m) {
  const double mm = frob_inner(m, m);
  if (mm == 0.0) throw ZeroOperator();
  const double am = frob_inner(GeneralMatrix(a), m);
  return am * am / mm;
}

}  // namespace opmeans
