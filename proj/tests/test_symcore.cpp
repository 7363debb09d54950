#include <cmath>
#include <sstream>

#include "doctest.h"
#include "opmeans/errors.hpp"
#include "opmeans/symcore.hpp"
#include "support.hpp"

using namespace opmeans;
using support::max_abs_diff;

namespace {

GeneralMatrix reconstruct(const Spectral& s) {
  const std::size_t n = s.eigenvalues.size();
  GeneralMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) d(i, i) = s.eigenvalues[i];
  return s.eigenvectors * d * s.eigenvectors.transpose();
}

SymMatrix random_symmetric(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  GeneralMatrix g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  return SymMatrix::symmetrize(g + g.transpose());
}

}  // namespace

TEST_CASE("SymMatrix construction") {
  SUBCASE("symmetrizes its input") {
    const SymMatrix s(2, {1.0, 2.0, 4.0, 3.0});
    CHECK(s(0, 1) == 3.0);
    CHECK(s(1, 0) == 3.0);
  }
  SUBCASE("rejects bad sizes") {
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 3.0}), InvalidArgument);
    CHECK_THROWS_AS(SymMatrix::from_rows({{1, 2}, {3}}), InvalidArgument);
  }
  SUBCASE("arithmetic") {
    const SymMatrix a = support::paper_a();
    const SymMatrix b = support::paper_b();
    CHECK((a - b) == SymMatrix::from_rows({{0, 5}, {5, 9}}));
    CHECK((2.0 * a)(1, 1) == 20.0);
    CHECK(a.trace() == 15.0);
    CHECK_THROWS_AS(a + SymMatrix::identity(3), DimensionMismatch);
  }
}

TEST_CASE("eigh") {
  SUBCASE("diagonal input is sorted ascending") {
    const Spectral s = eigh(SymMatrix::diagonal({3.0, 1.0}));
    CHECK(s.eigenvalues == std::vector<double>{1.0, 3.0});
    CHECK(std::abs(s.eigenvectors(1, 0)) == 1.0);
    CHECK(std::abs(s.eigenvectors(0, 1)) == 1.0);
  }
  SUBCASE("exchange matrix") {
    const Spectral s = eigh(SymMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(s.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-15));
    const double r = 1.0 / std::sqrt(2.0);
    // First nonzero component of each eigenvector is nonnegative.
    CHECK(s.eigenvectors(0, 0) == doctest::Approx(r));
    CHECK(s.eigenvectors(1, 0) == doctest::Approx(-r));
    CHECK(s.eigenvectors(0, 1) == doctest::Approx(r));
    CHECK(s.eigenvectors(1, 1) == doctest::Approx(r));
  }
  SUBCASE("closed-form 2x2 eigenvalues") {
    // (15 -+ sqrt(221)) / 2
    const Spectral s = eigh(support::paper_a());
    CHECK(s.eigenvalues[0] == doctest::Approx((15.0 - std::sqrt(221.0)) / 2.0).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx((15.0 + std::sqrt(221.0)) / 2.0).epsilon(1e-12));
  }
  SUBCASE("1x1 and empty-off-diagonal cases") {
    const Spectral s = eigh(SymMatrix::diagonal({-2.5}));
    CHECK(s.eigenvalues[0] == -2.5);
    CHECK(s.eigenvectors(0, 0) == 1.0);
  }
  SUBCASE("reconstruction and orthogonality on random symmetric matrices") {
    for (int n : {2, 3, 8, 17, 32}) {
      const SymMatrix a = random_symmetric(n, 100 + n);
      const Spectral s = eigh(a);
      CHECK(frob_norm(reconstruct(s) - a) <= 1e-10 * frob_norm(a));
      const GeneralMatrix qtq = s.eigenvectors.transpose() * s.eigenvectors;
      CHECK(max_abs_diff(qtq, GeneralMatrix::identity(a.size())) < 1e-12);
      CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
      for (std::size_t j = 0; j < a.size(); ++j) {
        std::size_t i = 0;
        while (std::abs(s.eigenvectors(i, j)) <= 1e-12) ++i;
        CHECK(s.eigenvectors(i, j) > 0.0);
      }
    }
  }
  SUBCASE("repeated eigenvalues") {
    const Spectral s = eigh(SymMatrix::identity(4));
    for (double l : s.eigenvalues) CHECK(l == 1.0);
  }
  SUBCASE("trace and determinant are preserved") {
    const SymMatrix a = support::random_pd(5, 7);
    const Spectral s = eigh(a);
    double sum = 0.0;
    for (double l : s.eigenvalues) sum += l;
    CHECK(sum == doctest::Approx(a.trace()).epsilon(1e-12));
  }
}

TEST_CASE("matrix functions") {
  SUBCASE("identity is a fixed point of x^2") {
    CHECK(matrix_function(SymMatrix::identity(3), [](double x) { return x * x; }, [](double) { return true; }) ==
          SymMatrix::identity(3));
  }
  SUBCASE("square root of a diagonal") {
    const SymMatrix r = matrix_function(
        SymMatrix::diagonal({4.0, 9.0}), [](double x) { return std::sqrt(x); }, [](double x) { return x >= 0; });
    CHECK(max_abs_diff(r, SymMatrix::diagonal({2.0, 3.0})) < 1e-15);
  }
  SUBCASE("domain violation names the eigenvalue") {
    try {
      matrix_function(
          SymMatrix::diagonal({1.0, -0.5}), [](double x) { return std::log(x); }, [](double x) { return x > 0; });
      FAIL("expected DomainViolation");
    } catch (const DomainViolation& e) {
      CHECK(e.offending_value() == -0.5);
      CHECK(std::string(e.what()).find("-0.5") != std::string::npos);
    }
  }
  SUBCASE("square root round trip") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const SymMatrix a = support::random_pd(6, seed);
      const SymMatrix r = matrix_power(a, 0.5);
      CHECK(frob_norm(GeneralMatrix(r) * GeneralMatrix(r) - GeneralMatrix(a)) <= 1e-10 * frob_norm(a));
    }
  }
}

TEST_CASE("matrix_power") {
  CHECK(max_abs_diff(matrix_power(SymMatrix::diagonal({4.0, 25.0}), 0.5), SymMatrix::diagonal({2.0, 5.0})) < 1e-15);
  const SymMatrix a = support::random_pd(4, 11);
  CHECK(matrix_power(a, 0.0) == SymMatrix::identity(4));
  CHECK(matrix_power(a, 1.0) == a);

  SUBCASE("inverse matches Gauss-Jordan elimination") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SymMatrix m = support::random_pd(4, seed);
      CHECK(support::rel_diff(matrix_power(m, -1.0), support::gauss_inverse(m)) < 1e-9);
      CHECK(support::rel_diff(inverse(m), support::gauss_inverse(m)) < 1e-9);
    }
  }
  SUBCASE("2x2 inverse of a unit-determinant matrix") {
    CHECK(max_abs_diff(inverse(support::paper_a()), SymMatrix::from_rows({{10, -7}, {-7, 5}})) < 1e-12);
  }
  SUBCASE("composition law") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SymMatrix m = support::random_pd(5, seed);
      for (auto [p, q] : {std::pair{0.5, 2.0}, {-1.0, -1.0}, {1.5, -0.4}, {0.3, 3.0}}) {
        CHECK(support::rel_diff(matrix_power(matrix_power(m, p), q), matrix_power(m, p * q)) < 1e-9);
      }
    }
  }
  SUBCASE("rejects non positive definite input") {
    CHECK_THROWS_AS(matrix_power(SymMatrix::diagonal({1.0, -1.0}), 0.5), DomainViolation);
    CHECK_THROWS_AS(matrix_power(SymMatrix::diagonal({1.0, 1e-12}), 0.5), DomainViolation);
  }
}

TEST_CASE("pseudo_power") {
  CHECK(max_abs_diff(pseudo_power(SymMatrix::diagonal({1.0, 0.0}), -1.0, 1e-12), SymMatrix::diagonal({1.0, 0.0})) ==
        0.0);
  CHECK(max_abs_diff(pseudo_power(SymMatrix::diagonal({4.0, 0.0}), 0.5, 1e-12), SymMatrix::diagonal({2.0, 0.0})) <
        1e-15);
  const SymMatrix a = support::random_pd(5, 3);
  CHECK(max_abs_diff(pseudo_power(a, -1.0, 1e-12), matrix_power(a, -1.0)) < 1e-10 * frob_norm(inverse(a)));
  // Eigenvalues below the cutoff, negative ones included, are dropped.
  CHECK(pseudo_power(SymMatrix::diagonal({4.0, -1e-14}), 0.5, 1e-12) == SymMatrix::diagonal({2.0, 0.0}));
  CHECK_THROWS_AS(pseudo_power(SymMatrix::identity(2), 0.5, -1.0), InvalidArgument);
}

TEST_CASE("Frobenius inner product") {
  CHECK(frob_inner(SymMatrix::identity(2), SymMatrix::identity(2)) == 2.0);
  const SymMatrix d = SymMatrix::from_rows({{0, 5}, {5, 9}});
  CHECK(frob_inner(d, d) == 131.0);
  support::for_random_pairs(20, 5, [](const SymMatrix& a, const SymMatrix& b, Rng&) {
    CHECK(frob_inner(a, b) == frob_inner(b, a));
  });
  CHECK_THROWS_AS(frob_inner(SymMatrix::identity(2), SymMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("positive definiteness") {
  CHECK(is_positive_definite(SymMatrix::identity(3)));
  CHECK_FALSE(is_positive_definite(SymMatrix::diagonal({1.0, -1.0})));
  CHECK(is_positive_definite(support::paper_a()));
  CHECK(is_positive_definite(support::paper_b()));
  // Threshold is relative to max(1, lambda_max).
  CHECK_FALSE(is_positive_definite(SymMatrix::diagonal({1e-11, 1.0})));
  CHECK(is_positive_definite(SymMatrix::diagonal({2e-10, 1.0})));
  CHECK_FALSE(is_positive_definite(SymMatrix::diagonal({1e-5, 1e6})));
}

TEST_CASE("text format") {
  SUBCASE("round trip is exact") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SymMatrix a = support::random_pd(5, seed);
      CHECK(parse_matrix(format_matrix(a)) == a);
    }
  }
  SUBCASE("layout") {
    CHECK(format_matrix(SymMatrix::diagonal({0.1, 2.0})) == "2\n0.10000000000000001 0\n0 2\n");
  }
  SUBCASE("rejects malformed input") {
    CHECK_THROWS_AS(parse_matrix("2\n1 2\n2\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("2\n1 2\n3 4\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("x\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix("1\nnan\n"), ParseError);
    CHECK_THROWS_AS(parse_matrix(""), ParseError);
    CHECK_THROWS_AS(load_matrix("/nonexistent/matrix.txt"), ParseError);
  }
  SUBCASE("tolerates tiny asymmetry") {
    const SymMatrix a = parse_matrix("2\n1 0.5\n0.5000000000001 1\n");
    CHECK(a(0, 1) == a(1, 0));
  }
}
