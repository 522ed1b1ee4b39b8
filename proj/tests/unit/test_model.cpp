#include <random>

#include "doctest.h"
#include "ebrus/error.hpp"
#include "ebrus/model.hpp"

using namespace ebrus;

namespace {

Rates fd_column(const PointState& s, const Parameters& prm, int j, double h) {
  auto a = s.to_array(), b = s.to_array();
  a[j] += h;
  b[j] -= h;
  const Rates fa = reaction_pointwise(PointState::from_array(a), prm);
  const Rates fb = reaction_pointwise(PointState::from_array(b), prm);
  Rates col;
  for (int i = 0; i < 6; ++i) col[i] = (fa[i] - fb[i]) / (2 * h);
  return col;
}

PointState random_state(std::mt19937_64& rng, double mag) {
  std::uniform_real_distribution<double> U(-mag, mag);
  return {U(rng), U(rng), U(rng), U(rng), U(rng), U(rng)};
}

}  // namespace

TEST_CASE("parameters: derived scalars") {
  Coefficients c;
  c.d1 = 2.0;
  c.d2 = 0.5;
  c.d3 = 1.5;
  c.k = 3.0;
  c.N = 4.0;
  const Parameters p(c);
  CHECK(p.mu() == 3.0 / 4.0);
  CHECK(p.d() == 1.5);
  CHECK(p.d0() == 0.5);
  CHECK(p.diffusivity(0) == 2.0);
  CHECK(p.diffusivity(4) == 0.5);
  CHECK(p.diffusivity(5) == 1.5);
}

TEST_CASE("parameters: strict validation names the coefficient") {
  for (std::size_t i = 0; i < Coefficients::kCount; ++i) {
    Coefficients c;
    c[i] = 0.0;
    try {
      Parameters p(c);
      FAIL("accepted a zero coefficient");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(Coefficients::names()[i]) != std::string::npos);
      CHECK(std::string(e.what()).find("positive") != std::string::npos);
    }
  }
  Coefficients c;
  c.a = 0.0;
  CHECK_NOTHROW(Parameters::relaxed(c));
  c.a = -1.0;
  CHECK_THROWS_AS(Parameters::relaxed(c), Error);
}

TEST_CASE("reaction: zero state gives the feed") {
  Coefficients c;
  c.a = 1.7;
  const Rates r = reaction_pointwise({}, Parameters(c));
  CHECK(r == Rates{1.7, 0, 0, 1.7, 0, 0});
}

TEST_CASE("reaction: unit state at the default scenario") {
  const Rates r = reaction_pointwise({1, 1, 1, 1, 1, 1}, Parameters());
  const Rates want{0, 1, -1, 0, 1, -1};
  for (int i = 0; i < 6; ++i) CHECK(r[i] == doctest::Approx(want[i]).epsilon(1e-15));
}

TEST_CASE("reaction: synchronized input gives synchronized output") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    PointState s = random_state(rng, 5.0);
    s.w = s.u;
    s.z = s.v;
    s.psi = s.phi;
    const Rates r = reaction_pointwise(s, Parameters());
    CHECK(r[0] == r[3]);
    CHECK(r[1] == r[4]);
    CHECK(r[2] == r[5]);
  }
}

TEST_CASE("reaction: swap equivariance") {
  std::mt19937_64 rng(6);
  const Parameters prm;
  for (int t = 0; t < 200; ++t) {
    const PointState s = random_state(rng, 10.0);
    const Rates a = reaction_pointwise(swap_compartments(s), prm);
    const Rates b = reaction_pointwise(s, prm);
    const Rates bs = swap_compartments(PointState::from_array(b)).to_array();
    for (int i = 0; i < 6; ++i) CHECK(a[i] == bs[i]);
  }
}

TEST_CASE("reaction: non-finite input names the component") {
  PointState s;
  s.phi = NAN;
  try {
    reaction_pointwise(s, Parameters());
    FAIL("accepted NaN");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("phi") != std::string::npos);
  }
  s.phi = 0;
  s.z = INFINITY;
  CHECK_THROWS_WITH_AS(reaction_jacobian_pointwise(s, Parameters()),
                       doctest::Contains("z"), Error);
}

TEST_CASE("jacobian: constant matrix at zero") {
  const Parameters p;
  const Jacobian J = reaction_jacobian_pointwise({}, p);
  const double bk = p.b() + p.k(), ln = p.lambda() + p.N();
  CHECK(J[0][0] == -bk - p.D1());
  CHECK(J[0][1] == 0.0);
  CHECK(J[0][2] == p.N());
  CHECK(J[0][3] == p.D1());
  CHECK(J[1][0] == p.b());
  CHECK(J[1][1] == -p.D2());
  CHECK(J[1][4] == p.D2());
  CHECK(J[2][0] == p.k());
  CHECK(J[2][2] == -ln - p.D3());
  CHECK(J[2][5] == p.D3());
  CHECK(J[3][3] == -bk - p.D1());
  CHECK(J[3][0] == p.D1());
  CHECK(J[4][3] == p.b());
  CHECK(J[5][2] == p.D3());
  int nonzero = 0;
  for (const auto& row : J) {
    for (double x : row) nonzero += x != 0.0;
  }
  CHECK(nonzero == 18);
}

TEST_CASE("jacobian: matches central differences") {
  std::mt19937_64 rng(11);
  const Parameters prm;
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    const PointState s = random_state(rng, 10.0);
    const Jacobian J = reaction_jacobian_pointwise(s, prm);
    double scale = 0;
    for (const auto& row : J) {
      for (double x : row) scale = std::max(scale, std::abs(x));
    }
    for (int j = 0; j < 6; ++j) {
      const Rates col = fd_column(s, prm, j, 1e-6);
      for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(col[i] - J[i][j]) / scale);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("jacobian: commutes with the swap on synchronized states") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    PointState s = random_state(rng, 4.0);
    s.w = s.u;
    s.z = s.v;
    const Jacobian J = reaction_jacobian_pointwise(s, Parameters());
    // P J P == J where P swaps index i with i+3.
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) CHECK(J[(i + 3) % 6][(j + 3) % 6] == J[i][j]);
    }
  }
}

TEST_CASE("grouping: worked example and its inverse") {
  Coefficients c;
  c.k = 1;
  c.N = 1;
  const GroupedView g = group_forward({1, 2, 3, 4, 5, 6}, Parameters(c));
  CHECK(g.y == 12);
  CHECK(g.xi == 9);
  CHECK(g.p == -6);
  CHECK(g.theta == -3);
  CHECK(g.Xi == 9);
  CHECK(g.Theta == -3);
  const UngroupedPart u = group_inverse(g, 2, 5);
  CHECK(u.u == 1);
  CHECK(u.w == 4);
  CHECK(u.phi == 3);
  CHECK(u.psi == 6);
}

TEST_CASE("grouping: synchronized and zero states") {
  const GroupedView g = group_forward({1.5, -2, 0.25, 1.5, -2, 0.25}, Parameters());
  CHECK(g.p == 0);
  CHECK(g.theta == 0);
  const GroupedView z = group_forward({}, Parameters());
  CHECK(z.y == 0);
  CHECK(z.Xi == 0);
  const UngroupedPart u = group_inverse({}, 0, 0);
  CHECK(u.u == 0);
  CHECK(u.psi == 0);
}

TEST_CASE("grouping: round trip and rescaling") {
  std::mt19937_64 rng(13);
  Coefficients c;
  c.k = 2.5;
  c.N = 0.7;
  const Parameters prm(c);
  for (int t = 0; t < 1000; ++t) {
    const PointState s = random_state(rng, 10.0);
    const GroupedView g = group_forward(s, prm);
    CHECK(g.Xi * prm.mu() == doctest::Approx(g.xi).epsilon(1e-15));
    CHECK(g.Theta * prm.mu() == doctest::Approx(g.theta).epsilon(1e-15));
    const UngroupedPart u = group_inverse(g, s.v, s.z);
    CHECK(std::abs(u.u - s.u) <= 1e-14 * 40);
    CHECK(std::abs(u.w - s.w) <= 1e-14 * 40);
    CHECK(std::abs(u.phi - s.phi) <= 1e-14 * 20);
    CHECK(std::abs(u.psi - s.psi) <= 1e-14 * 20);
  }
}
