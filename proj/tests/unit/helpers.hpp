#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ebrus/spectral.hpp"

namespace testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline ebrus::DomainSpec interval(double L = M_PI) {
  ebrus::DomainSpec d;
  d.dim = 1;
  d.lengths = {L, L, L};
  return d;
}

inline ebrus::DomainSpec box(int dim, double L) {
  ebrus::DomainSpec d;
  d.dim = dim;
  d.lengths = {L, L, L};
  return d;
}

/// Smooth random modal state: N(0,1) / k^2 on sorted mode k, scaled by `amp`.
inline ebrus::ModalState smooth(const ebrus::SineBasis& b, std::uint64_t seed, double amp = 1.0,
                                std::size_t max_mode = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::size_t M = b.mode_count();
  ebrus::ModalState g(M);
  for (int c = 0; c < ebrus::kComponents; ++c) {
    for (std::size_t k = 0; k < M; ++k) {
      if (max_mode && k >= max_mode) continue;
      g.coef[c * M + k] = amp * nd(rng) / ((k + 1.0) * (k + 1.0));
    }
  }
  return g;
}

inline double l2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace testing
