#include <cmath>
#include <numbers>

#include "doctest.h"
#include "opmeans/errors.hpp"
#include "opmeans/means.hpp"
#include "opmeans/metrics.hpp"
#include "support.hpp"

using namespace opmeans;

TEST_CASE("Euclidean distance") {
  const SymMatrix a = support::paper_a();
  const SymMatrix b = support::paper_b();
  CHECK(dist_euclid(a, a) == 0.0);
  CHECK(dist_euclid(a, b) == doctest::Approx(std::sqrt(131.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dist_euclid(a, SymMatrix::identity(3)), DimensionMismatch);
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    const SymMatrix x = sample_pd(4, rng, -2, 2);
    const SymMatrix y = sample_pd(4, rng, -2, 2);
    const SymMatrix z = sample_pd(4, rng, -2, 2);
    CHECK(dist_euclid(x, z) <= dist_euclid(x, y) + dist_euclid(y, z) + 1e-12);
    CHECK(dist_euclid(x, y) == dist_euclid(y, x));
  }
}

TEST_CASE("inverse Euclidean distance") {
  CHECK(dist_inv_euclid(support::paper_a(), support::paper_a()) == 0.0);
  CHECK(dist_inv_euclid(SymMatrix::diagonal({1.0}), SymMatrix::diagonal({2.0})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dist_inv_euclid(SymMatrix::diagonal({1.0, 0.0}), SymMatrix::identity(2)), DomainViolation);
  support::for_random_pairs(50, 2, [](const SymMatrix& x, const SymMatrix& y, Rng& rng) {
    const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double d = dist_inv_euclid(x, y);
    CHECK(std::abs(dist_inv_euclid(x, harmonic_w(x, y, t)) - (1.0 - t) * d) <= 1e-9 * std::max(1.0, d));
  });
}

TEST_CASE("trace metric") {
  const SymMatrix a = support::paper_a();
  const SymMatrix b = support::paper_b();
  CHECK(dist_trace_metric(a, a) < 1e-13);
  CHECK(dist_trace_metric(SymMatrix::identity(3), 5.0 * SymMatrix::identity(3)) ==
        doctest::Approx(std::sqrt(3.0) * std::log(5.0)).epsilon(1e-14));
  // A^-1 B has trace 27 and determinant 1.
  CHECK(dist_trace_metric(a, b) == doctest::Approx(std::sqrt(2.0) * std::log((27.0 + std::sqrt(725.0)) / 2.0)).epsilon(1e-12));
  CHECK(dist_trace_metric(a, b) == doctest::Approx(4.6590732551227688).epsilon(1e-12));
  CHECK_THROWS_AS(dist_trace_metric(a, SymMatrix::diagonal({1.0, -1.0})), DomainViolation);
  support::for_random_pairs(50, 3, [](const SymMatrix& x, const SymMatrix& y, Rng& rng) {
    const double t = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double d = dist_trace_metric(x, y);
    CHECK(std::abs(dist_trace_metric(x, geometric_w(x, y, t)) - t * d) <= 1e-9 * std::max(1.0, d));
    CHECK(d == doctest::Approx(dist_trace_metric(y, x)).epsilon(1e-10));
    // Congruence invariance: delta(X A X, X B X) = delta(A, B).
    const SymMatrix s = matrix_power(x, 0.5);
    CHECK(dist_trace_metric(congruence(s, y), congruence(s, x)) == doctest::Approx(d).epsilon(1e-8));
  });
  CHECK(distance(MetricKind::trace_metric, a, b) == dist_trace_metric(a, b));
  CHECK(parse_metric("inv-euclid") == MetricKind::inv_euclid);
  CHECK_FALSE(parse_metric("l1").has_value());
}

TEST_CASE("angle") {
  const SymMatrix a = support::paper_a();
  CHECK(angle(a, 3.0 * a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));
  CHECK(angle(SymMatrix::diagonal({1, 0}), SymMatrix::diagonal({0, 1})) == doctest::Approx(std::numbers::pi / 2));
  // tr AB = 63, tr A^2 = 223, tr B^2 = 34.
  CHECK(std::cos(angle(a, support::paper_b())) == doctest::Approx(63.0 / std::sqrt(223.0 * 34.0)).epsilon(1e-14));
  CHECK_THROWS_AS(angle(a, SymMatrix(2)), ZeroOperator);
}

TEST_CASE("cos^2 functional") {
  const SymMatrix a = support::paper_a();
  CHECK(angle_cos_sq_functional(a, a) == doctest::Approx(frob_inner(a, a)));
  CHECK(angle_cos_sq_functional(SymMatrix::identity(2), SymMatrix::diagonal({1, 0})) == 1.0);
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const SymMatrix m1 = sample_pd(2, rng, -1, 1);
    const SymMatrix m2 = sample_pd(2, rng, -1, 1);
    const double c = std::cos(angle(a, m1));
    CHECK(angle_cos_sq_functional(a, m1) == doctest::Approx(c * c * frob_inner(a, a)).epsilon(1e-12));
    const bool larger = angle_cos_sq_functional(a, m1) > angle_cos_sq_functional(a, m2);
    CHECK(larger == (angle(a, m1) < angle(a, m2)));
  }
}
