#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "opmeans/symcore.hpp"

namespace opmeans {

/// Distance measures on the positive definite cone. CLI names are
/// `euclid`, `inv-euclid` and `trace`.
enum class MetricKind { euclid, inv_euclid, trace_metric };

std::string_view metric_name(MetricKind kind);
std::optional<MetricKind> parse_metric(std::string_view name);

/// Frobenius norm of A - B.
double dist_euclid(const GeneralMatrix& a, const GeneralMatrix& b);

/// Frobenius distance between the inverses.
double dist_inv_euclid(const SymMatrix& a, const SymMatrix& b);

/// ||log(A^-1/2 B A^-1/2)||_F, the affine-invariant trace metric.
double dist_trace_metric(const SymMatrix& a, const SymMatrix& b);

/// Both arguments must be symmetric positive definite for the inverse and
/// trace metrics.
double distance(MetricKind kind, const SymMatrix& a, const SymMatrix& b);

/// Angle in the trace inner product, in [0, pi]. Throws ZeroOperator when
/// either argument vanishes.
double angle(const GeneralMatrix& a, const GeneralMatrix& b);

/// (trace[A^T M])^2 / trace[M^T M]. For fixed A this grows exactly when the
/// angle between A and M shrinks.
double angle_cos_sq_functional(const SymMatrix& a, const GeneralMatrix& m);

}  // namespace opmeans
