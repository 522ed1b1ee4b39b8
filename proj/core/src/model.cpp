#include "ebrus/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ebrus/error.hpp"

namespace ebrus {

const std::array<const char*, Coefficients::kCount>& Coefficients::names() {
  static const std::array<const char*, kCount> n = {"d1", "d2", "d3", "D1", "D2", "D3",
                                                    "a",  "b",  "k",  "lambda", "N"};
  return n;
}

double& Coefficients::operator[](std::size_t i) {
  double* fields[kCount] = {&d1, &d2, &d3, &D1, &D2, &D3, &a, &b, &k, &lambda, &N};
  if (i >= kCount) throw Error("model", "coefficient index out of range");
  return *fields[i];
}

double Coefficients::operator[](std::size_t i) const {
  return const_cast<Coefficients&>(*this)[i];
}

Parameters::Parameters(const Coefficients& c) : Parameters(c, true) {}

Parameters Parameters::relaxed(const Coefficients& c) { return Parameters(c, false); }

Parameters::Parameters(const Coefficients& c, bool strict) : c_(c), strict_(strict) {
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    const double x = c_[i];
    const std::string name = Coefficients::names()[i];
    if (!std::isfinite(x)) throw Error("model", "coefficient '" + name + "' is not finite");
    if (strict && !(x > 0.0)) {
      throw Error("model", "coefficient '" + name +
                               "' must be strictly positive (all diffusion, coupling and "
                               "rate coefficients of the system are positive constants)");
    }
    if (!strict && x < 0.0) throw Error("model", "coefficient '" + name + "' is negative");
  }
  mu_ = c_.N > 0.0 ? c_.k / c_.N : std::numeric_limits<double>::quiet_NaN();
  d_ = std::min(c_.d1, c_.d3);
  d0_ = std::min({c_.d1, c_.d2, c_.d3});
}

double Parameters::diffusivity(int component) const noexcept {
  switch (component % 3) {
    case 0: return c_.d1;
    case 1: return c_.d2;
    default: return c_.d3;
  }
}

namespace {

void require_finite(const PointState& s) {
  static const char* names[6] = {"u", "v", "phi", "w", "z", "psi"};
  const auto arr = s.to_array();
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(arr[i])) {
      throw Error("model", std::string("non-finite state component '") + names[i] + "'");
    }
  }
}

}  // namespace

Rates reaction_pointwise(const PointState& s, const Parameters& prm) {
  require_finite(s);
  Rates r{};
  detail::reaction_without_feed(prm, s.u, s.v, s.phi, s.w, s.z, s.psi, r.data());
  r[0] += prm.a();
  r[3] += prm.a();
  return r;
}

Jacobian reaction_jacobian_pointwise(const PointState& s, const Parameters& prm) {
  require_finite(s);
  Jacobian m{};
  const double bk = prm.b() + prm.k();
  const double ln = prm.lambda() + prm.N();

  // (u, v, phi) rows
  m[0][0] = 2 * s.u * s.v - bk - prm.D1();
  m[0][1] = s.u * s.u;
  m[0][2] = prm.N();
  m[0][3] = prm.D1();
  m[1][0] = prm.b() - 2 * s.u * s.v;
  m[1][1] = -s.u * s.u - prm.D2();
  m[1][4] = prm.D2();
  m[2][0] = prm.k();
  m[2][2] = -ln - prm.D3();
  m[2][5] = prm.D3();

  // (w, z, psi) rows, couplings reversed
  m[3][3] = 2 * s.w * s.z - bk - prm.D1();
  m[3][4] = s.w * s.w;
  m[3][5] = prm.N();
  m[3][0] = prm.D1();
  m[4][3] = prm.b() - 2 * s.w * s.z;
  m[4][4] = -s.w * s.w - prm.D2();
  m[4][1] = prm.D2();
  m[5][3] = prm.k();
  m[5][5] = -ln - prm.D3();
  m[5][2] = prm.D3();
  return m;
}

PointState swap_compartments(const PointState& s) { return {s.w, s.z, s.psi, s.u, s.v, s.phi}; }

GroupedView group_forward(const PointState& s, const Parameters& prm) {
  GroupedView g;
  g.y = s.u + s.v + s.w + s.z;
  g.xi = s.phi + s.psi;
  g.p = s.u + s.v - s.w - s.z;
  g.theta = s.phi - s.psi;
  g.Xi = g.xi / prm.mu();
  g.Theta = g.theta / prm.mu();
  return g;
}

UngroupedPart group_inverse(const GroupedView& gv, double v, double z) {
  const double sum = gv.y - (v + z);   // u + w
  const double diff = gv.p - (v - z);  // u - w
  UngroupedPart r;
  r.u = 0.5 * (sum + diff);
  r.w = 0.5 * (sum - diff);
  r.phi = 0.5 * (gv.xi + gv.theta);
  r.psi = 0.5 * (gv.xi - gv.theta);
  return r;
}

namespace detail {

double jacobian_row_norm(const Parameters& prm, double u, double v, double w, double z) {
  const double bk = prm.b() + prm.k();
  const double ln = prm.lambda() + prm.N();
  auto rows = [&](double p, double q) {
    const double r1 = std::abs(2 * p * q - bk - prm.D1()) + p * p + prm.N() + prm.D1();
    const double r2 = std::abs(prm.b() - 2 * p * q) + p * p + 2 * prm.D2();
    const double r3 = prm.k() + ln + 2 * prm.D3();
    return std::max({r1, r2, r3});
  };
  return std::max(rows(u, v), rows(w, z));
}

}  // namespace detail
}  // namespace ebrus
