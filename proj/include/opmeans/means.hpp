#pragma once

// Operator means of positive definite matrices: weighted arithmetic,
// harmonic, geometric and power means, the Heinz mean, and Kubo-Ando means
// built either from a representing function or from a discrete measure over
// weighted harmonic means.

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "opmeans/symcore.hpp"

namespace opmeans {

/// Probability measure with finitely many atoms on [0, 1]. An atom at t
/// contributes the weighted harmonic mean A !_t B to a Kubo-Ando mean.
class DiscreteMeasure {
 public:
  /// Validates nodes in [0, 1], weights >= 0 and total weight 1 within 1e-12.
  DiscreteMeasure(std::vector<double> nodes, std::vector<double> weights);

  /// Same checks, except the weights are rescaled to sum to one.
  static DiscreteMeasure normalized(std::vector<double> nodes, std::vector<double> weights);
  static DiscreteMeasure atom(double t);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }

  /// The scalar mean 1 sigma c.
  double scalar_mean(double c) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Atom of a measure on [0, +inf]; s may be +infinity.
struct HalfLineAtom {
  double s;
  double weight;
};

struct ConvertedMeasure {
  DiscreteMeasure measure;
  bool normalization_applied;
};

/// Moves atoms from the half line to [0, 1] via t = 1 / (1 + s), so s = 0
/// lands on t = 1 and s = +inf on t = 0. Weights are carried over unchanged
/// and then renormalized; a density given on the half line needs its
/// Jacobian folded in by the caller.
ConvertedMeasure convert_measure(std::span<const HalfLineAtom> atoms);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [lo, hi].
QuadratureRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

/// Uniform probability density on [0, 1], discretized by Gauss-Legendre.
DiscreteMeasure uniform_measure(int order = 200);

/// Measure file format: one "t weight" pair per line; '#' starts a comment.
DiscreteMeasure parse_measure(std::istream& in);
DiscreteMeasure load_measure(const std::string& path);

/// Scalar function f(x) = 1 sigma x on (0, +inf). Nonnegativity is spot
/// checked on a log-spaced grid at construction; operator monotonicity is
/// taken on trust.
class RepresentingFunction {
 public:
  RepresentingFunction(std::string label, std::function<double(double)> f);

  double operator()(double x) const { return f_(x); }
  const std::string& label() const { return label_; }

 private:
  std::string label_;
  std::function<double(double)> f_;
};

/// Built-in representing functions: arith, geom, harm and power:p with
/// f(x) = ((1 + x^p) / 2)^(1/p). The weight t (default 1/2) selects the
/// weighted member: t + (1-t)x, x^(1-t), (t + (1-t)/x)^-1 and
/// (t + (1-t)x^p)^(1/p), so t = 1 yields A and t = 0 yields B.
RepresentingFunction representing_function(const std::string& name, double t = 0.5);

SymMatrix arithmetic(const SymMatrix& a, const SymMatrix& b, double t);

/// (A^-1 + B^-1)^-1.
SymMatrix parallel_sum(const SymMatrix& a, const SymMatrix& b);
/// B - B (A + B)^-1 B; algebraically equal to parallel_sum.
SymMatrix parallel_sum_alt(const SymMatrix& a, const SymMatrix& b);

/// (t A^-1 + (1-t) B^-1)^-1; t = 0 returns B and t = 1 returns A exactly.
SymMatrix harmonic_w(const SymMatrix& a, const SymMatrix& b, double t);

/// A #_t B = A^1/2 (A^-1/2 B A^-1/2)^t A^1/2. Note the orientation: t = 0
/// returns A and t = 1 returns B, so the trace metric distance from A grows
/// as t * delta(A, B).
SymMatrix geometric_w(const SymMatrix& a, const SymMatrix& b, double t);

/// (t A^p + (1-t) B^p)^(1/p). Throws ZeroExponent for p = 0.
SymMatrix power_mean(const SymMatrix& a, const SymMatrix& b, double t, double p);
/// Interior evaluation from precomputed powers A^p and B^p.
SymMatrix power_mean_from_powers(const SymMatrix& ap, const SymMatrix& bp, double t, double p);

/// A^nu B^(1-nu). Not symmetric in general.
GeneralMatrix heinz(const SymMatrix& a, const SymMatrix& b, double nu);

/// g(x) = trace[A^(2x) B^(2(1-x))].
double heinz_trace_g(const SymMatrix& a, const SymMatrix& b, double x);
double heinz_trace_g(const Spectral& a, const Spectral& b, double x);

SymMatrix kubo_ando_spectral(const RepresentingFunction& f, const SymMatrix& a, const SymMatrix& b);
/// Sum over atoms of w_i * (A !_{t_i} B).
SymMatrix kubo_ando_measure(const DiscreteMeasure& m, const SymMatrix& a, const SymMatrix& b);

using BinaryMean = std::function<SymMatrix(const SymMatrix&, const SymMatrix&)>;

/// A sigma* B = (A^-1 sigma B^-1)^-1.
BinaryMean adjoint_mean(BinaryMean mean);

/// A Kubo-Ando mean together with a display name.
class KuboAndoMean {
 public:
  KuboAndoMean(std::string name, RepresentingFunction f);
  KuboAndoMean(std::string name, DiscreteMeasure m);

  const std::string& name() const { return name_; }
  SymMatrix operator()(const SymMatrix& a, const SymMatrix& b) const;
  /// 1 sigma c.
  double scalar(double c) const;
  BinaryMean as_binary() const;

 private:
  std::string name_;
  std::variant<RepresentingFunction, DiscreteMeasure> repr_;
};

/// arith, geom, harm and power:p for p in {-1, -1/2, 1/2, 1}.
std::vector<KuboAndoMean> registry_means();

/// Measure path through m used when a measure-built mean is scanned over
/// t: every node tau moves to 2 t tau for t <= 1/2 and to
/// tau + (2t - 1)(1 - tau) above, so t = 1/2 gives m itself, t = 0 the
/// point mass at 0 (B) and t = 1 the point mass at 1 (A).
DiscreteMeasure stretch_measure(const DiscreteMeasure& m, double t);

/// Tolerant Loewner order: lambda_min(X - Y) / max(1, ||X||_F).
double loewner_margin(const SymMatrix& x, const SymMatrix& y);
inline constexpr double loewner_tolerance = 1e-9;
/// X >= Y when loewner_margin(X, Y) >= -1e-9.
bool loewner_geq(const SymMatrix& x, const SymMatrix& y);

}  // namespace opmeans
