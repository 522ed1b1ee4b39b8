#pragma once

// Integrating-factor Runge-Kutta steps shared by the spectral integrator and
// the finite-difference oracle. The linear part is diagonal with factors
// E = exp(L h) and Eh = exp(L h / 2).

#include <cstddef>
#include <vector>

#include "ebrus/integrate.hpp"

namespace ebrus::detail {

struct IfBuffers {
  std::vector<double> k1, k2, k3, k4, stage;
};

/// N(q, out) must write the nonlinear term and return a Jacobian norm
/// estimate. Returns false (q untouched) when h * norm(q) > limit.
template <class Nonlinear>
bool if_step(Scheme scheme, std::vector<double>& q, double h, const std::vector<double>& E,
             const std::vector<double>& Eh, Nonlinear&& N, IfBuffers& b, double limit) {
  const std::size_t n = q.size();
  b.k1.resize(n);
  b.k2.resize(n);
  b.k3.resize(n);
  b.k4.resize(n);
  b.stage.resize(n);
  const double jn = N(q, b.k1);
  if (h * jn > limit) return false;

  switch (scheme) {
    case Scheme::IfEuler:
      for (std::size_t i = 0; i < n; ++i) q[i] = E[i] * (q[i] + h * b.k1[i]);
      break;
    case Scheme::IfRk2:
      for (std::size_t i = 0; i < n; ++i) b.stage[i] = Eh[i] * (q[i] + 0.5 * h * b.k1[i]);
      N(b.stage, b.k2);
      for (std::size_t i = 0; i < n; ++i) q[i] = E[i] * q[i] + h * Eh[i] * b.k2[i];
      break;
    case Scheme::IfRk4:
      for (std::size_t i = 0; i < n; ++i) b.stage[i] = Eh[i] * (q[i] + 0.5 * h * b.k1[i]);
      N(b.stage, b.k2);
      for (std::size_t i = 0; i < n; ++i) b.stage[i] = Eh[i] * q[i] + 0.5 * h * b.k2[i];
      N(b.stage, b.k3);
      for (std::size_t i = 0; i < n; ++i) b.stage[i] = E[i] * q[i] + h * Eh[i] * b.k3[i];
      N(b.stage, b.k4);
      for (std::size_t i = 0; i < n; ++i) {
        q[i] = E[i] * q[i] +
               h / 6.0 * (E[i] * b.k1[i] + 2.0 * Eh[i] * (b.k2[i] + b.k3[i]) + b.k4[i]);
      }
      break;
  }
  return true;
}

}  // namespace ebrus::detail
