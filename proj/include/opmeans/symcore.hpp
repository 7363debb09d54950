#pragma once

// Dense real matrices, the symmetric Jacobi eigensolver and spectral matrix
// functions. Every other module is built on this header.

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "opmeans/errors.hpp"

namespace opmeans {

/// Eigenvalues at or below pd_epsilon * max(1, lambda_max) disqualify a
/// matrix from being positive definite.
inline constexpr double pd_epsilon = 1e-10;

class SymMatrix;
struct Spectral;

/// Dense n x n real matrix without symmetry constraint, row-major.
class GeneralMatrix {
 public:
  explicit GeneralMatrix(std::size_t n);
  GeneralMatrix(std::size_t n, std::vector<double> entries);
  GeneralMatrix(const SymMatrix& s);  // NOLINT: implicit widening is intended

  static GeneralMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }

  GeneralMatrix transpose() const;
  double trace() const;

  friend GeneralMatrix operator*(const GeneralMatrix& a, const GeneralMatrix& b);
  friend GeneralMatrix operator+(const GeneralMatrix& a, const GeneralMatrix& b);
  friend GeneralMatrix operator-(const GeneralMatrix& a, const GeneralMatrix& b);
  friend GeneralMatrix operator*(double s, const GeneralMatrix& a);
  friend bool operator==(const GeneralMatrix&, const GeneralMatrix&) = default;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Dense real symmetric matrix. Construction symmetrizes the input so that
/// entry (i, j) equals entry (j, i) bit for bit; instances are immutable.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t n);
  SymMatrix(std::size_t n, std::vector<double> entries);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix diagonal(std::initializer_list<double> d);
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  /// (M + M^T) / 2.
  static SymMatrix symmetrize(const GeneralMatrix& m);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }
  double trace() const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  struct Trusted {};
  SymMatrix(std::size_t n, std::vector<double> entries, Trusted);
  friend SymMatrix spectral_apply_unchecked(const Spectral&, const std::function<double(double)>&);
  friend SymMatrix congruence(const GeneralMatrix& m, const SymMatrix& x);

  std::size_t n_;
  std::vector<double> a_;
};

/// Symmetric eigendecomposition A = Q diag(eigenvalues) Q^T.
/// Eigenvalues ascend; each eigenvector column has its first nonzero
/// component nonnegative.
struct Spectral {
  std::vector<double> eigenvalues;
  GeneralMatrix eigenvectors;

  double min_eigenvalue() const { return eigenvalues.front(); }
  double max_eigenvalue() const { return eigenvalues.back(); }
};

/// Cyclic Jacobi eigensolver. Throws NonConvergence when the off-diagonal
/// Frobenius norm stays above 1e-12 * ||A||_F after 100 sweeps.
Spectral eigh(const SymMatrix& a);

/// Q f(Lambda) Q^T for a precomputed factorization; no domain checking.
SymMatrix spectral_apply_unchecked(const Spectral& s, const std::function<double(double)>& f);

/// Applies f to the spectrum of A. Every eigenvalue must satisfy
/// domain_check, otherwise DomainViolation names the first offender.
SymMatrix matrix_function(const SymMatrix& a, const std::function<double(double)>& f,
                          const std::function<bool(double)>& domain_check);
SymMatrix matrix_function(const Spectral& s, const std::function<double(double)>& f,
                          const std::function<bool(double)>& domain_check);

/// Spectral power of a positive definite matrix. p = 1 returns A and p = 0
/// returns I without touching the spectrum.
SymMatrix matrix_power(const SymMatrix& a, double p);
SymMatrix matrix_power(const Spectral& s, double p);
SymMatrix inverse(const SymMatrix& a);

/// Power of a positive semidefinite matrix with eigenvalues at or below
/// cutoff * lambda_max mapped to zero (Moore-Penrose for p = -1).
SymMatrix pseudo_power(const SymMatrix& a, double p, double cutoff);

/// M X M^T, symmetrized.
SymMatrix congruence(const GeneralMatrix& m, const SymMatrix& x);

double frob_inner(const GeneralMatrix& a, const GeneralMatrix& b);
double frob_inner(const SymMatrix& a, const SymMatrix& b);
double frob_norm(const GeneralMatrix& a);
double frob_norm(const SymMatrix& a);

bool is_positive_definite(const SymMatrix& a);
bool is_positive_definite(const Spectral& s);
/// Throws DomainViolation unless the spectrum is positive definite.
void require_positive_definite(const Spectral& s, const std::string& context);

// Text format: first line n, then n rows of n numbers.

/// Parses a matrix; rejects asymmetry above 1e-9 * ||A||_F.
SymMatrix parse_matrix(std::istream& in);
SymMatrix parse_matrix(const std::string& text);
SymMatrix load_matrix(const std::string& path);
GeneralMatrix parse_general_matrix(std::istream& in);
/// 17 significant digits so that parsing reproduces every entry exactly.
std::string format_matrix(const GeneralMatrix& m);
std::string format_matrix(const SymMatrix& m);
std::string format_double(double v);

}  // namespace opmeans
