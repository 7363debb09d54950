#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "opmeans/symcore.hpp"
#include "opmeans/verify.hpp"

namespace support {

using opmeans::GeneralMatrix;
using opmeans::SymMatrix;

inline SymMatrix paper_a() { return SymMatrix::from_rows({{5, 7}, {7, 10}}); }
inline SymMatrix paper_b() { return SymMatrix::from_rows({{5, 2}, {2, 1}}); }

inline double max_abs_diff(const GeneralMatrix& x, const GeneralMatrix& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) m = std::max(m, std::abs(x(i, j) - y(i, j)));
  return m;
}

inline double rel_diff(const GeneralMatrix& x, const GeneralMatrix& y) {
  return opmeans::frob_norm(x - y) / std::max(1.0, opmeans::frob_norm(y));
}

// Gauss-Jordan elimination with partial pivoting.
inline GeneralMatrix gauss_inverse(const GeneralMatrix& m) {
  const std::size_t n = m.size();
  GeneralMatrix a = m;
  GeneralMatrix inv = GeneralMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a(c, k), a(piv, k));
      std::swap(inv(c, k), inv(piv, k));
    }
    const double d = a(c, c);
    for (std::size_t k = 0; k < n; ++k) {
      a(c, k) /= d;
      inv(c, k) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      for (std::size_t k = 0; k < n; ++k) {
        a(r, k) -= f * a(c, k);
        inv(r, k) -= f * inv(c, k);
      }
    }
  }
  return inv;
}

inline SymMatrix random_pd(int n, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
  return opmeans::sample_pd(n, seed, lo, hi);
}

// Random pairs of PD matrices for property tests.
template <class F>
void for_random_pairs(int count, std::uint64_t seed, F&& f) {
  opmeans::Rng rng(seed);
  std::uniform_int_distribution<int> dims(2, 6);
  for (int i = 0; i < count; ++i) {
    const int n = dims(rng);
    const SymMatrix a = opmeans::sample_pd(n, rng, -2.0, 2.0);
    const SymMatrix b = opmeans::sample_pd(n, rng, -2.0, 2.0);
    f(a, b, rng);
  }
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("opmeans_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace support
