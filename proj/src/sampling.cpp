#include <cmath>

#include "opmeans/verify.hpp"

namespace opmeans {

void TrialConfig::validate() const {
  if (dim_lo < 1 || dim_hi < dim_lo) throw InvalidArgument("dimension range must satisfy 1 <= lo <= hi");
  if (dim_hi > 64) throw InvalidArgument("dimensions above 64 are not supported");
  if (trials < 1) throw InvalidArgument("trials must be at least 1");
  if (!(exponent_lo <= exponent_hi)) throw InvalidArgument("condition exponent range must satisfy lo <= hi");
  if (grid_size < 3) throw InvalidArgument("grid size must be at least 3");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (threads < 0) throw InvalidArgument("threads must be nonnegative");
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return Rng(seed ^ trial); }

GeneralMatrix random_orthogonal(int dim, Rng& rng) {
  const auto n = static_cast<std::size_t>(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  GeneralMatrix q(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = normal(rng);

  // Modified Gram-Schmidt, two passes, on the columns. R keeps a positive
  // diagonal so Q is Haar distributed.
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += q(i, k) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

SymMatrix sample_pd(int dim, Rng& rng, double exponent_lo, double exponent_hi) {
  GeneralMatrix q = random_orthogonal(dim, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> lambda(static_cast<std::size_t>(dim));
  for (double& l : lambda) l = std::pow(10.0, exponent_lo + (exponent_hi - exponent_lo) * unit(rng));
  return spectral_apply_unchecked(Spectral{lambda, std::move(q)}, [](double x) { return x; });
}

SymMatrix sample_pd(int dim, std::uint64_t seed, double exponent_lo, double exponent_hi) {
  Rng rng(seed);
  return sample_pd(dim, rng, exponent_lo, exponent_hi);
}

SymMatrix sample_psd(int dim, Rng& rng) {
  const auto n = static_cast<std::size_t>(dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  GeneralMatrix g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = normal(rng);
  return SymMatrix::symmetrize(g * g.transpose());
}

DiscreteMeasure random_measure(Rng& rng) {
  std::uniform_int_distribution<int> count(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const int k = count(rng);
  std::vector<double> nodes;
  std::vector<double> weights;
  for (int i = 0; i < k; ++i) {
    const double kind = unit(rng);
    if (kind < 0.1)
      nodes.push_back(0.0);
    else if (kind < 0.2)
      nodes.push_back(1.0);
    else
      nodes.push_back(unit(rng));
    weights.push_back(expo(rng) + 1e-3);
  }
  return DiscreteMeasure::normalized(std::move(nodes), std::move(weights));
}

}  // namespace opmeans
