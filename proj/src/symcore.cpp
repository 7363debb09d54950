#include "opmeans/symcore.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

namespace opmeans {

std::string DomainViolation::format_value(double v) { return format_double(v); }

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;
constexpr double kAsymmetryTolerance = 1e-9;

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch(a, b);
}

void check_entries(std::size_t n, const std::vector<double>& entries) {
  if (n == 0) throw InvalidArgument("matrix dimension must be at least 1");
  if (entries.size() != n * n)
    throw InvalidArgument("expected " + std::to_string(n * n) + " entries, got " +
                          std::to_string(entries.size()));
}

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// GeneralMatrix

GeneralMatrix::GeneralMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
  if (n == 0) throw InvalidArgument("matrix dimension must be at least 1");
}

GeneralMatrix::GeneralMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), a_(std::move(entries)) {
  check_entries(n_, a_);
}

GeneralMatrix::GeneralMatrix(const SymMatrix& s)
    : n_(s.size()), a_(s.data().begin(), s.data().end()) {}

GeneralMatrix GeneralMatrix::identity(std::size_t n) {
  GeneralMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

GeneralMatrix GeneralMatrix::transpose() const {
  GeneralMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double GeneralMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += a_[i * n_ + i];
  return s;
}

GeneralMatrix operator*(const GeneralMatrix& a, const GeneralMatrix& b) {
  check_same_size(a.n_, b.n_);
  const std::size_t n = a.n_;
  GeneralMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a.a_[i * n + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c.a_[i * n + j] += aik * b.a_[k * n + j];
    }
  return c;
}

GeneralMatrix operator+(const GeneralMatrix& a, const GeneralMatrix& b) {
  check_same_size(a.n_, b.n_);
  GeneralMatrix c(a);
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
  return c;
}

GeneralMatrix operator-(const GeneralMatrix& a, const GeneralMatrix& b) {
  check_same_size(a.n_, b.n_);
  GeneralMatrix c(a);
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
  return c;
}

GeneralMatrix operator*(double s, const GeneralMatrix& a) {
  GeneralMatrix c(a);
  for (double& x : c.a_) x *= s;
  return c;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
  if (n == 0) throw InvalidArgument("matrix dimension must be at least 1");
}

SymMatrix::SymMatrix(std::size_t n, std::vector<double> entries) : n_(n), a_(std::move(entries)) {
  check_entries(n_, a_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double m = 0.5 * (a_[i * n_ + j] + a_[j * n_ + i]);
      a_[i * n_ + j] = m;
      a_[j * n_ + i] = m;
    }
}

SymMatrix::SymMatrix(std::size_t n, std::vector<double> entries, Trusted)
    : n_(n), a_(std::move(entries)) {}

SymMatrix SymMatrix::identity(std::size_t n) {
  std::vector<double> d(n, 1.0);
  return diagonal(d);
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  const std::size_t n = d.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = d[i];
  return SymMatrix(n, std::move(a));
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  std::vector<double> a;
  a.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n) throw InvalidArgument("from_rows: matrix must be square");
    a.insert(a.end(), row.begin(), row.end());
  }
  return SymMatrix(n, std::move(a));
}

SymMatrix SymMatrix::symmetrize(const GeneralMatrix& m) {
  return SymMatrix(m.size(), std::vector<double>(m.data().begin(), m.data().end()));
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += a_[i * n_ + i];
  return s;
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  check_same_size(a.n_, b.n_);
  std::vector<double> c(a.a_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.a_[i];
  return SymMatrix(a.n_, std::move(c), SymMatrix::Trusted{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  check_same_size(a.n_, b.n_);
  std::vector<double> c(a.a_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.a_[i];
  return SymMatrix(a.n_, std::move(c), SymMatrix::Trusted{});
}

SymMatrix operator*(double s, const SymMatrix& a) {
  std::vector<double> c(a.a_);
  for (double& x : c) x *= s;
  return SymMatrix(a.n_, std::move(c), SymMatrix::Trusted{});
}

// ---------------------------------------------------------------------------
// Eigensolver

Spectral eigh(const SymMatrix& input) {
  const std::size_t n = input.size();
  std::vector<double> a(input.data().begin(), input.data().end());
  for (double x : a)
    if (!std::isfinite(x)) throw InvalidArgument("eigh: matrix has non-finite entries");

  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  // Sweeping continues past the absolute test until every remaining
  // off-diagonal entry is negligible relative to its diagonal pair, which
  // keeps small eigenvalues and their vectors accurate.
  const double tol = kOffDiagonalTolerance * frob_norm(input);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (!converged && off_diagonal_norm(a, n) <= tol) converged = true;
    if (sweep == kMaxSweeps) break;
    int rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        if (std::abs(apq) <= eps * std::sqrt(std::abs(app * aqq)) || apq == 0.0) continue;
        ++rotations;
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          const double np = c * akp - s * akq;
          const double nq = s * akp + c * akq;
          a[k * n + p] = np;
          a[p * n + k] = np;
          a[k * n + q] = nq;
          a[q * n + k] = nq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
    if (rotations == 0) {
      converged = converged || off_diagonal_norm(a, n) <= tol;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("eigh: off-diagonal norm did not fall below 1e-12 * ||A||_F in " +
                         std::to_string(kMaxSweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });

  Spectral out{std::vector<double>(n), GeneralMatrix(n)};
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.eigenvalues[col] = a[src * n + src];
    double sign = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = v[k * n + src];
      if (std::abs(x) > 1e-12) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, col) = sign * v[k * n + src];
  }
  return out;
}

SymMatrix spectral_apply_unchecked(const Spectral& s, const std::function<double(double)>& f) {
  const std::size_t n = s.eigenvalues.size();
  std::vector<double> fl(n);
  for (std::size_t k = 0; k < n; ++k) fl[k] = f(s.eigenvalues[k]);
  const GeneralMatrix& q = s.eigenvectors;
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += q(i, k) * fl[k] * q(j, k);
      out[i * n + j] = acc;
      out[j * n + i] = acc;
    }
  return SymMatrix(n, std::move(out), SymMatrix::Trusted{});
}

SymMatrix matrix_function(const Spectral& s, const std::function<double(double)>& f,
                          const std::function<bool(double)>& domain_check) {
  for (double lambda : s.eigenvalues)
    if (!domain_check(lambda))
      throw DomainViolation("matrix function applied outside its domain", lambda);
  return spectral_apply_unchecked(s, f);
}

SymMatrix matrix_function(const SymMatrix& a, const std::function<double(double)>& f,
                          const std::function<bool(double)>& domain_check) {
  return matrix_function(eigh(a), f, domain_check);
}

bool is_positive_definite(const Spectral& s) {
  return s.min_eigenvalue() > pd_epsilon * std::max(1.0, s.max_eigenvalue());
}

bool is_positive_definite(const SymMatrix& a) {
  for (double x : a.data())
    if (!std::isfinite(x)) return false;
  return is_positive_definite(eigh(a));
}

void require_positive_definite(const Spectral& s, const std::string& context) {
  if (!is_positive_definite(s))
    throw DomainViolation(context + ": matrix is not positive definite", s.min_eigenvalue());
}

SymMatrix matrix_power(const Spectral& s, double p) {
  require_positive_definite(s, "matrix_power");
  if (p == 0.0) return SymMatrix::identity(s.eigenvalues.size());
  if (p == 1.0) return spectral_apply_unchecked(s, [](double x) { return x; });
  if (p == -1.0) return spectral_apply_unchecked(s, [](double x) { return 1.0 / x; });
  if (p == 0.5) return spectral_apply_unchecked(s, [](double x) { return std::sqrt(x); });
  if (p == -0.5) return spectral_apply_unchecked(s, [](double x) { return 1.0 / std::sqrt(x); });
  return spectral_apply_unchecked(s, [p](double x) { return std::pow(x, p); });
}

SymMatrix matrix_power(const SymMatrix& a, double p) {
  const Spectral s = eigh(a);
  require_positive_definite(s, "matrix_power");
  if (p == 1.0) return a;
  return matrix_power(s, p);
}

SymMatrix inverse(const SymMatrix& a) { return matrix_power(a, -1.0); }

SymMatrix pseudo_power(const SymMatrix& a, double p, double cutoff) {
  if (!(cutoff >= 0.0)) throw InvalidArgument("pseudo_power: cutoff must be nonnegative");
  const Spectral s = eigh(a);
  const double threshold = cutoff * s.max_eigenvalue();
  const bool all_zero = s.max_eigenvalue() <= 0.0;
  return spectral_apply_unchecked(s, [=](double x) {
    if (all_zero || x <= threshold) return 0.0;
    return std::pow(x, p);
  });
}

SymMatrix congruence(const GeneralMatrix& m, const SymMatrix& x) {
  const GeneralMatrix mx = m * GeneralMatrix(x);
  const GeneralMatrix out = mx * m.transpose();
  return SymMatrix::symmetrize(out);
}

double frob_inner(const GeneralMatrix& a, const GeneralMatrix& b) {
  check_same_size(a.size(), b.size());
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double frob_inner(const SymMatrix& a, const SymMatrix& b) {
  check_same_size(a.size(), b.size());
  const auto x = a.data();
  const auto y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double frob_norm(const GeneralMatrix& a) { return std::sqrt(frob_inner(a, a)); }
double frob_norm(const SymMatrix& a) { return std::sqrt(frob_inner(a, a)); }

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string> tokens(std::istream& in) {
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("not a number: '" + tok + "'");
  if (!std::isfinite(v)) throw ParseError("non-finite entry: '" + tok + "'");
  return v;
}

std::pair<std::size_t, std::vector<double>> read_square(std::istream& in) {
  const std::vector<std::string> toks = tokens(in);
  if (toks.empty()) throw ParseError("empty matrix input");
  std::size_t n = 0;
  {
    const auto& t = toks.front();
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
    if (ec != std::errc() || ptr != t.data() + t.size() || n == 0)
      throw ParseError("first token must be a positive dimension, got '" + t + "'");
  }
  if (toks.size() != 1 + n * n)
    throw ParseError("expected " + std::to_string(n * n) + " entries for n = " + std::to_string(n) +
                     ", got " + std::to_string(toks.size() - 1));
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n * n; ++i) a[i] = to_double(toks[i + 1]);
  return {n, std::move(a)};
}

}  // namespace

GeneralMatrix parse_general_matrix(std::istream& in) {
  auto [n, a] = read_square(in);
  return GeneralMatrix(n, std::move(a));
}

SymMatrix parse_matrix(std::istream& in) {
  auto [n, a] = read_square(in);
  double norm = 0.0;
  double asym = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      norm += a[i * n + j] * a[i * n + j];
      asym = std::max(asym, std::abs(a[i * n + j] - a[j * n + i]));
    }
  norm = std::sqrt(norm);
  if (asym > kAsymmetryTolerance * norm)
    throw ParseError("matrix is not symmetric (max asymmetry " + format_double(asym) + ")");
  return SymMatrix(n, std::move(a));
}

SymMatrix parse_matrix(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix(in);
}

SymMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file '" + path + "'");
  try {
    return parse_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string format_matrix(const GeneralMatrix& m) {
  const std::size_t n = m.size();
  std::string out = std::to_string(n) + "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string format_matrix(const SymMatrix& m) { return format_matrix(GeneralMatrix(m)); }

}  // namespace opmeans
