#pragma once

#include <array>
#include <cstddef>

namespace ebrus {

/// The eleven coefficients of the two-compartment Brusselator. Plain data;
/// validation happens when a Parameters object is built from it.
struct Coefficients {
  double d1 = 1.0;  ///< diffusivity of u, w
  double d2 = 1.0;  ///< diffusivity of v, z
  double d3 = 1.0;  ///< diffusivity of phi, psi
  double D1 = 0.1;  ///< compartment coupling for u <-> w
  double D2 = 0.1;  ///< compartment coupling for v <-> z
  double D3 = 0.1;  ///< compartment coupling for phi <-> psi
  double a = 1.0;   ///< feed concentration
  double b = 2.0;   ///< autocatalysis feed rate
  double k = 1.0;   ///< conversion rate u -> phi
  double lambda = 1.0;  ///< removal rate of phi, psi
  double N = 1.0;   ///< reverse reaction rate phi -> u

  static constexpr std::size_t kCount = 11;
  static const std::array<const char*, kCount>& names();
  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;

  bool operator==(const Coefficients&) const = default;
};

/// Validated coefficients plus the derived scalars used throughout the
/// bound formulas: mu = k/N, d = min(d1, d3), d0 = min(d1, d2, d3).
class Parameters {
 public:
  /// Strict: every coefficient finite and > 0.
  explicit Parameters(const Coefficients& c = Coefficients{});

  /// Non-negative finite coefficients. Only for degenerate oracle runs
  /// (a = 0, pure diffusion, ...); mu is NaN when N == 0.
  static Parameters relaxed(const Coefficients& c);

  const Coefficients& coefficients() const noexcept { return c_; }
  bool strict() const noexcept { return strict_; }

  double d1() const noexcept { return c_.d1; }
  double d2() const noexcept { return c_.d2; }
  double d3() const noexcept { return c_.d3; }
  double D1() const noexcept { return c_.D1; }
  double D2() const noexcept { return c_.D2; }
  double D3() const noexcept { return c_.D3; }
  double a() const noexcept { return c_.a; }
  double b() const noexcept { return c_.b; }
  double k() const noexcept { return c_.k; }
  double lambda() const noexcept { return c_.lambda; }
  double N() const noexcept { return c_.N; }

  double mu() const noexcept { return mu_; }
  double d() const noexcept { return d_; }
  double d0() const noexcept { return d0_; }

  /// Diffusivity of component i in (u, v, phi, w, z, psi) order.
  double diffusivity(int component) const noexcept;

 private:
  Parameters(const Coefficients& c, bool strict);

  Coefficients c_;
  double mu_;
  double d_;
  double d0_;
  bool strict_;
};

/// Concentrations at one point, in the order (u, v, phi, w, z, psi).
/// No sign constraint.
struct PointState {
  double u = 0, v = 0, phi = 0, w = 0, z = 0, psi = 0;

  static PointState from_array(const std::array<double, 6>& s) {
    return {s[0], s[1], s[2], s[3], s[4], s[5]};
  }
  std::array<double, 6> to_array() const { return {u, v, phi, w, z, psi}; }
};

using Rates = std::array<double, 6>;
using Jacobian = std::array<std::array<double, 6>, 6>;

/// Reaction right-hand side at one point. Throws ebrus::Error naming the
/// offending component when an input is not finite.
Rates reaction_pointwise(const PointState& s, const Parameters& prm);

/// Pointwise Jacobian of reaction_pointwise with respect to the state.
Jacobian reaction_jacobian_pointwise(const PointState& s, const Parameters& prm);

/// Exchange (u, v, phi) <-> (w, z, psi).
PointState swap_compartments(const PointState& s);

/// Grouped variables: y = u+v+w+z, xi = phi+psi, p = u+v-w-z,
/// theta = phi-psi, Xi = xi/mu, Theta = theta/mu.
struct GroupedView {
  double y = 0, xi = 0, p = 0, theta = 0, Xi = 0, Theta = 0;
};

GroupedView group_forward(const PointState& s, const Parameters& prm);

struct UngroupedPart {
  double u = 0, w = 0, phi = 0, psi = 0;
};

/// Recovers (u, w, phi, psi) from the grouped variables and (v, z).
UngroupedPart group_inverse(const GroupedView& gv, double v, double z);

namespace detail {

/// Unchecked kernel shared by the Galerkin projection; the affine feed `a`
/// is excluded (the caller projects it analytically).
inline void reaction_without_feed(const Parameters& prm, double u, double v, double phi,
                                  double w, double z, double psi, double* out) {
  const double bk = prm.b() + prm.k();
  const double ln = prm.lambda() + prm.N();
  const double u2v = u * u * v;
  const double w2z = w * w * z;
  out[0] = -bk * u + u2v + prm.D1() * (w - u) + prm.N() * phi;
  out[1] = prm.b() * u - u2v + prm.D2() * (z - v);
  out[2] = prm.k() * u - ln * phi + prm.D3() * (psi - phi);
  out[3] = -bk * w + w2z + prm.D1() * (u - w) + prm.N() * psi;
  out[4] = prm.b() * w - w2z + prm.D2() * (v - z);
  out[5] = prm.k() * w - ln * psi + prm.D3() * (phi - psi);
}

/// Max absolute row sum of the pointwise Jacobian.
double jacobian_row_norm(const Parameters& prm, double u, double v, double w, double z);

}  // namespace detail
}  // namespace ebrus
