#include "opmeans/means.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

namespace opmeans {

namespace {

constexpr double kMeasureSumTolerance = 1e-12;

void check_weight(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0))
    throw InvalidArgument(std::string(what) + ": weight must lie in [0, 1], got " + format_double(t));
}

void check_dims(const SymMatrix& a, const SymMatrix& b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
}

Spectral pd_spectral(const SymMatrix& a, const char* context) {
  Spectral s = eigh(a);
  require_positive_definite(s, context);
  return s;
}

// (t A^-1 + (1-t) B^-1)^-1 for interior t, given both inverses.
SymMatrix harmonic_from_inverses(const SymMatrix& ainv, const SymMatrix& binv, double t) {
  return matrix_power(pd_spectral(t * ainv + (1.0 - t) * binv, "harmonic_w"), -1.0);
}

void validate_measure(const std::vector<double>& nodes, const std::vector<double>& weights) {
  if (nodes.empty()) throw InvalidMeasure("measure has no atoms");
  if (nodes.size() != weights.size())
    throw InvalidMeasure("measure has " + std::to_string(nodes.size()) + " nodes but " +
                         std::to_string(weights.size()) + " weights");
  for (double t : nodes)
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidMeasure("node outside [0, 1]: " + format_double(t));
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InvalidMeasure("weight must be finite and nonnegative: " + format_double(w));
}

double weight_sum(const std::vector<double>& weights) {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Measures

DiscreteMeasure::DiscreteMeasure(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  validate_measure(nodes_, weights_);
  const double s = weight_sum(weights_);
  if (std::abs(s - 1.0) > kMeasureSumTolerance)
    throw InvalidMeasure("weights sum to " + format_double(s) + ", expected 1");
}

DiscreteMeasure DiscreteMeasure::normalized(std::vector<double> nodes, std::vector<double> weights) {
  validate_measure(nodes, weights);
  const double s = weight_sum(weights);
  if (!(s > 0.0)) throw InvalidMeasure("measure has zero total weight");
  for (double& w : weights) w /= s;
  return DiscreteMeasure(std::move(nodes), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::atom(double t) { return DiscreteMeasure({t}, {1.0}); }

double DiscreteMeasure::scalar_mean(double c) const {
  if (!(c > 0.0)) throw DomainViolation("scalar mean needs a positive argument", c);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double t = nodes_[i];
    double h;
    if (t == 0.0)
      h = c;
    else if (t == 1.0)
      h = 1.0;
    else
      h = 1.0 / (t + (1.0 - t) / c);
    acc += weights_[i] * h;
  }
  return acc;
}

ConvertedMeasure convert_measure(std::span<const HalfLineAtom> atoms) {
  std::vector<double> nodes;
  std::vector<double> weights;
  for (const auto& atom : atoms) {
    if (!(atom.weight >= 0.0) || !std::isfinite(atom.weight))
      throw InvalidMeasure("negative or non-finite atom weight: " + format_double(atom.weight));
    if (!(atom.s >= 0.0)) throw InvalidMeasure("atom location must lie in [0, +inf]");
    nodes.push_back(std::isinf(atom.s) ? 0.0 : 1.0 / (1.0 + atom.s));
    weights.push_back(atom.weight);
  }
  const double s = weight_sum(weights);
  const bool renormalize = std::abs(s - 1.0) > kMeasureSumTolerance;
  if (!renormalize) return {DiscreteMeasure(std::move(nodes), std::move(weights)), false};
  return {DiscreteMeasure::normalized(std::move(nodes), std::move(weights)), true};
}

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw InvalidArgument("Gauss-Legendre order must be positive");
  const int n = order;
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const double mid = 0.5 * (hi + lo);
  const double half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

DiscreteMeasure uniform_measure(int order) {
  QuadratureRule rule = gauss_legendre(order, 0.0, 1.0);
  return DiscreteMeasure::normalized(std::move(rule.nodes), std::move(rule.weights));
}

DiscreteMeasure parse_measure(std::istream& in) {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (toks.empty()) continue;
    if (toks.size() != 2)
      throw ParseError("measure line " + std::to_string(lineno) + ": expected 't weight'");
    double vals[2];
    for (int k = 0; k < 2; ++k) {
      const auto& t = toks[k];
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), vals[k]);
      if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("measure line " + std::to_string(lineno) + ": not a number '" + t + "'");
    }
    nodes.push_back(vals[0]);
    weights.push_back(vals[1]);
  }
  return DiscreteMeasure(std::move(nodes), std::move(weights));
}

DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measure file '" + path + "'");
  return parse_measure(in);
}

DiscreteMeasure stretch_measure(const DiscreteMeasure& m, double t) {
  check_weight(t, "stretch_measure");
  std::vector<double> nodes(m.nodes().begin(), m.nodes().end());
  for (double& tau : nodes) {
    if (t == 0.0)
      tau = 0.0;
    else if (t == 1.0)
      tau = 1.0;
    else if (t <= 0.5)
      tau = 2.0 * t * tau;
    else
      tau = std::min(1.0, tau + (2.0 * t - 1.0) * (1.0 - tau));
  }
  return DiscreteMeasure(std::move(nodes), std::vector<double>(m.weights().begin(), m.weights().end()));
}

// ---------------------------------------------------------------------------
// Representing functions

RepresentingFunction::RepresentingFunction(std::string label, std::function<double(double)> f)
    : label_(std::move(label)), f_(std::move(f)) {
  for (int k = -8; k <= 8; ++k) {
    const double x = std::pow(10.0, k);
    const double y = f_(x);
    if (!(y >= 0.0))
      throw InvalidArgument("representing function '" + label_ + "' is negative or undefined at x = " +
                            format_double(x));
  }
}

RepresentingFunction representing_function(const std::string& name, double t) {
  check_weight(t, "representing_function");
  if (name == "arith")
    return {name, [t](double x) { return t + (1.0 - t) * x; }};
  if (name == "geom")
    return {name, [t](double x) { return t == 0.5 ? std::sqrt(x) : std::pow(x, 1.0 - t); }};
  if (name == "harm")
    return {name, [t](double x) { return 1.0 / (t + (1.0 - t) / x); }};
  if (name.rfind("power:", 0) == 0) {
    const std::string arg = name.substr(6);
    double p = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(p))
      throw InvalidArgument("bad exponent in '" + name + "'");
    if (p == 0.0) throw ZeroExponent();
    return {name, [t, p](double x) { return std::pow(t + (1.0 - t) * std::pow(x, p), 1.0 / p); }};
  }
  throw InvalidArgument("unknown representing function '" + name +
                        "' (expected arith, geom, harm or power:p)");
}

// ---------------------------------------------------------------------------
// Means

SymMatrix arithmetic(const SymMatrix& a, const SymMatrix& b, double t) {
  check_dims(a, b);
  check_weight(t, "arithmetic");
  if (t == 1.0) return a;
  if (t == 0.0) return b;
  return t * a + (1.0 - t) * b;
}

SymMatrix parallel_sum(const SymMatrix& a, const SymMatrix& b) {
  check_dims(a, b);
  const SymMatrix ainv = matrix_power(pd_spectral(a, "parallel_sum"), -1.0);
  const SymMatrix binv = matrix_power(pd_spectral(b, "parallel_sum"), -1.0);
  return inverse(ainv + binv);
}

SymMatrix parallel_sum_alt(const SymMatrix& a, const SymMatrix& b) {
  check_dims(a, b);
  pd_spectral(a, "parallel_sum");
  pd_spectral(b, "parallel_sum");
  return b - congruence(b, inverse(a + b));
}

SymMatrix harmonic_w(const SymMatrix& a, const SymMatrix& b, double t) {
  check_dims(a, b);
  check_weight(t, "harmonic_w");
  const Spectral sa = pd_spectral(a, "harmonic_w");
  const Spectral sb = pd_spectral(b, "harmonic_w");
  if (t == 0.0) return b;
  if (t == 1.0) return a;
  return harmonic_from_inverses(matrix_power(sa, -1.0), matrix_power(sb, -1.0), t);
}

SymMatrix geometric_w(const SymMatrix& a, const SymMatrix& b, double t) {
  check_dims(a, b);
  check_weight(t, "geometric_w");
  const Spectral sa = pd_spectral(a, "geometric_w");
  pd_spectral(b, "geometric_w");
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  const SymMatrix inner = congruence(matrix_power(sa, -0.5), b);
  return congruence(matrix_power(sa, 0.5), matrix_power(inner, t));
}

SymMatrix power_mean_from_powers(const SymMatrix& ap, const SymMatrix& bp, double t, double p) {
  // The mixture is positive definite by construction but may be far worse
  // conditioned than its inputs, so only positivity is required here.
  const SymMatrix mix = t * ap + (1.0 - t) * bp;
  if (p == 1.0) return mix;
  const Spectral s = eigh(mix);
  if (!(s.min_eigenvalue() > 0.0))
    throw DomainViolation("power_mean: mixture of powers lost positivity", s.min_eigenvalue());
  if (p == 2.0) return spectral_apply_unchecked(s, [](double x) { return std::sqrt(x); });
  const double q = 1.0 / p;
  return spectral_apply_unchecked(s, [q](double x) { return std::pow(x, q); });
}

SymMatrix power_mean(const SymMatrix& a, const SymMatrix& b, double t, double p) {
  check_dims(a, b);
  check_weight(t, "power_mean");
  if (p == 0.0) throw ZeroExponent();
  if (!std::isfinite(p)) throw InvalidArgument("power_mean: exponent must be finite");
  const Spectral sa = pd_spectral(a, "power_mean");
  const Spectral sb = pd_spectral(b, "power_mean");
  if (t == 0.0) return b;
  if (t == 1.0) return a;
  return power_mean_from_powers(matrix_power(sa, p), matrix_power(sb, p), t, p);
}

GeneralMatrix heinz(const SymMatrix& a, const SymMatrix& b, double nu) {
  check_dims(a, b);
  check_weight(nu, "heinz");
  const Spectral sa = pd_spectral(a, "heinz");
  const Spectral sb = pd_spectral(b, "heinz");
  const SymMatrix an = nu == 1.0 ? a : matrix_power(sa, nu);
  const SymMatrix bn = nu == 0.0 ? b : matrix_power(sb, 1.0 - nu);
  return GeneralMatrix(an) * GeneralMatrix(bn);
}

double heinz_trace_g(const Spectral& a, const Spectral& b, double x) {
  if (a.eigenvalues.size() != b.eigenvalues.size())
    throw DimensionMismatch(a.eigenvalues.size(), b.eigenvalues.size());
  // trace[X Y] = <X, Y>_F for symmetric X, Y.
  return frob_inner(matrix_power(a, 2.0 * x), matrix_power(b, 2.0 * (1.0 - x)));
}

double heinz_trace_g(const SymMatrix& a, const SymMatrix& b, double x) {
  check_dims(a, b);
  check_weight(x, "heinz_trace_g");
  return heinz_trace_g(pd_spectral(a, "heinz_trace_g"), pd_spectral(b, "heinz_trace_g"), x);
}

SymMatrix kubo_ando_spectral(const RepresentingFunction& f, const SymMatrix& a, const SymMatrix& b) {
  check_dims(a, b);
  const Spectral sa = pd_spectral(a, "kubo_ando_spectral");
  pd_spectral(b, "kubo_ando_spectral");
  const SymMatrix inner = congruence(matrix_power(sa, -0.5), b);
  const SymMatrix fx = matrix_function(
      inner,
      [&f](double x) {
        const double y = f(x);
        if (!std::isfinite(y) || y < 0.0)
          throw DomainViolation("representing function '" + f.label() + "' invalid on spectrum", x);
        return y;
      },
      [](double x) { return x > 0.0; });
  return congruence(matrix_power(sa, 0.5), fx);
}

SymMatrix kubo_ando_measure(const DiscreteMeasure& m, const SymMatrix& a, const SymMatrix& b) {
  check_dims(a, b);
  const Spectral sa = pd_spectral(a, "kubo_ando_measure");
  const Spectral sb = pd_spectral(b, "kubo_ando_measure");
  const SymMatrix ainv = matrix_power(sa, -1.0);
  const SymMatrix binv = matrix_power(sb, -1.0);
  SymMatrix acc(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double t = m.nodes()[i];
    const double w = m.weights()[i];
    if (w == 0.0) continue;
    if (t == 0.0)
      acc = acc + w * b;
    else if (t == 1.0)
      acc = acc + w * a;
    else
      acc = acc + w * harmonic_from_inverses(ainv, binv, t);
  }
  return acc;
}

BinaryMean adjoint_mean(BinaryMean mean) {
  return [mean = std::move(mean)](const SymMatrix& a, const SymMatrix& b) {
    return inverse(mean(inverse(a), inverse(b)));
  };
}

// ---------------------------------------------------------------------------
// KuboAndoMean

KuboAndoMean::KuboAndoMean(std::string name, RepresentingFunction f)
    : name_(std::move(name)), repr_(std::move(f)) {}

KuboAndoMean::KuboAndoMean(std::string name, DiscreteMeasure m)
    : name_(std::move(name)), repr_(std::move(m)) {}

SymMatrix KuboAndoMean::operator()(const SymMatrix& a, const SymMatrix& b) const {
  if (const auto* f = std::get_if<RepresentingFunction>(&repr_)) return kubo_ando_spectral(*f, a, b);
  return kubo_ando_measure(std::get<DiscreteMeasure>(repr_), a, b);
}

double KuboAndoMean::scalar(double c) const {
  if (const auto* f = std::get_if<RepresentingFunction>(&repr_)) return (*f)(c);
  return std::get<DiscreteMeasure>(repr_).scalar_mean(c);
}

BinaryMean KuboAndoMean::as_binary() const {
  return [self = *this](const SymMatrix& a, const SymMatrix& b) { return self(a, b); };
}

std::vector<KuboAndoMean> registry_means() {
  std::vector<KuboAndoMean> out;
  for (const char* name : {"arith", "geom", "harm", "power:-1", "power:-0.5", "power:0.5", "power:1"})
    out.emplace_back(name, representing_function(name));
  return out;
}

double loewner_margin(const SymMatrix& x, const SymMatrix& y) {
  return eigh(x - y).min_eigenvalue() / std::max(1.0, frob_norm(x));
}

bool loewner_geq(const SymMatrix& x, const SymMatrix& y) {
  return loewner_margin(x, y) >= -loewner_tolerance;
}

}  // namespace opmeans
