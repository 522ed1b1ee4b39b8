#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ebrus/error.hpp"
#include "ebrus/tangent.hpp"
#include "helpers.hpp"

using namespace ebrus;
using std::numbers::pi;

namespace {

/// Per-mode 6x6 generator -diag(d_i) lambda_j + f'(0); at the zero state the
/// linearized flow decouples across modes.
Eigen::Matrix<double, 6, 6> mode_generator(const Parameters& prm, double lambda) {
  const Jacobian J = reaction_jacobian_pointwise({}, prm);
  Eigen::Matrix<double, 6, 6> A;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) A(i, j) = J[i][j];
    A(i, i) -= prm.diffusivity(i) * lambda;
  }
  return A;
}

/// Real parts of all eigenvalues of the zero-state generator, descending.
std::vector<double> dense_spectrum(const SineBasis& b, const Parameters& prm) {
  std::vector<double> out;
  for (double lam : b.eigenvalues()) {
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(mode_generator(prm, lam));
    for (int i = 0; i < 6; ++i) out.push_back(es.eigenvalues()[i].real());
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

Parameters no_feed() {
  Coefficients c;
  c.a = 0;
  return Parameters::relaxed(c);
}

IntegratorConfig rk4(double dt, double t_end, bool adaptive = false) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.scheme = Scheme::IfRk4;
  cfg.adaptive = adaptive;
  return cfg;
}

ModalState axpy(const ModalState& x, double a, const ModalState& y) {
  ModalState r = x;
  for (std::size_t i = 0; i < r.coef.size(); ++i) r.coef[i] += a * y.coef[i];
  return r;
}

ModalState unit(const SineBasis& b, int component, std::size_t mode) {
  ModalState z(b.mode_count());
  z.block(component)[mode] = 1.0;
  return z;
}

}  // namespace

TEST_CASE("tangent rhs: zero base is the per-mode generator") {
  const SineBasis b(testing::interval(), 8);
  const Parameters prm;
  const ModalState G = testing::smooth(b, 5);
  const ModalState out = tangent_rhs(ModalState(b.mode_count()), G, b, prm);
  const std::size_t M = b.mode_count();
  for (std::size_t j = 0; j < M; ++j) {
    Eigen::Matrix<double, 6, 1> g;
    for (int c = 0; c < 6; ++c) g(c) = G.coef[c * M + j];
    const Eigen::Matrix<double, 6, 1> want = mode_generator(prm, b.eigenvalue(j)) * g;
    for (int c = 0; c < 6; ++c) CHECK(out.coef[c * M + j] == doctest::Approx(want(c)).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("tangent rhs: matches a directional difference of the vector field") {
  const SineBasis b(testing::box(2, pi), 5);
  const Parameters prm;
  const ModalState q = testing::smooth(b, 1, 3.0);
  const ModalState G = testing::smooth(b, 2);
  const double eps = 1e-5;
  const ModalState fp = galerkin_rhs(axpy(q, eps, G), b, prm);
  const ModalState fm = galerkin_rhs(axpy(q, -eps, G), b, prm);
  const ModalState jv = tangent_rhs(q, G, b, prm);
  std::vector<double> fd(jv.coef.size());
  for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (fp.coef[i] - fm.coef[i]) / (2 * eps);
  CHECK(testing::l2_diff(fd, jv.coef) <= 1e-7 * testing::l2(jv.coef));
}

TEST_CASE("propagation: agrees with finite differences of the flow") {
  const SineBasis b(testing::interval(), 16);
  const Parameters prm;
  const ModalState g0 = testing::smooth(b, 3, 5.0);
  const ModalState G = testing::smooth(b, 4, 1.0);
  for (bool adaptive : {false, true}) {
    const IntegratorConfig cfg = rk4(0.01, 0.5, adaptive);
    const auto [base, dG] = propagate_tangent(g0, G, b, prm, cfg);
    const double eps = 1e-6;
    const ModalState p = propagate_tangent(axpy(g0, eps, G), G, b, prm, cfg).first;
    const ModalState m = propagate_tangent(axpy(g0, -eps, G), G, b, prm, cfg).first;
    std::vector<double> fd(p.coef.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (p.coef[i] - m.coef[i]) / (2 * eps);
    INFO("adaptive ", adaptive);
    CHECK(testing::l2_diff(fd, dG.coef) <= 1e-6 * testing::l2(dG.coef));
    CHECK(base.time == doctest::Approx(0.5));
  }
}

TEST_CASE("propagation: base matches the plain stepper") {
  const SineBasis b(testing::interval(), 12);
  const ModalState g0 = testing::smooth(b, 8, 2.0);
  const IntegratorConfig cfg = rk4(0.02, 1.0);
  const auto [base, dG] = propagate_tangent(g0, unit(b, 0, 0), b, Parameters(), cfg);
  const ModalState plain = simulate(g0, b, Parameters(), cfg).final_state;
  CHECK(testing::l2_diff(base.coef, plain.coef) <= 1e-13 * testing::l2(plain.coef));
}

TEST_CASE("propagation: linear in the direction") {
  const SineBasis b(testing::interval(), 12);
  const ModalState g0 = testing::smooth(b, 8, 4.0);
  const ModalState G1 = testing::smooth(b, 9), G2 = testing::smooth(b, 10);
  const IntegratorConfig cfg = rk4(0.01, 0.5, true);
  ModalState comb = G1;
  for (std::size_t i = 0; i < comb.coef.size(); ++i) comb.coef[i] = 2 * G1.coef[i] - 3 * G2.coef[i];
  const ModalState d1 = propagate_tangent(g0, G1, b, Parameters(), cfg).second;
  const ModalState d2 = propagate_tangent(g0, G2, b, Parameters(), cfg).second;
  const ModalState dc = propagate_tangent(g0, comb, b, Parameters(), cfg).second;
  std::vector<double> want(dc.coef.size());
  for (std::size_t i = 0; i < want.size(); ++i) want[i] = 2 * d1.coef[i] - 3 * d2.coef[i];
  CHECK(testing::l2_diff(dc.coef, want) <= 1e-12 * testing::l2(want));
}

TEST_CASE("lyapunov: zero state matches the dense spectrum") {
  const SineBasis b(testing::interval(), 8);
  const Parameters prm = no_feed();
  TangentConfig tc;
  tc.m = 8;
  tc.renorm_every = 10;
  tc.discard_time = 80;
  const LyapunovReport rep = evolve_tangents(ModalState(b.mode_count()), b, prm, rk4(0.01, 160), tc);
  const std::vector<double> want = dense_spectrum(b, prm);
  REQUIRE(rep.exponents.size() == 8);
  double partial = 0;
  for (std::size_t j = 0; j < 8; ++j) {
    partial += want[j];
    INFO("j = ", j);
    CHECK(std::abs(rep.exponents[j] - want[j]) <= 1e-6);
    CHECK(std::abs(rep.qm[j] - partial) <= 1e-6);
  }
  CHECK(rep.m_star == 1);
  CHECK(rep.kaplan_yorke == 0.0);
  CHECK(rep.averaging_time == doctest::Approx(80.0));
  CHECK(rep.history.size() == rep.history_times.size());
}

TEST_CASE("lyapunov: strong contraction forces more frequent renormalization") {
  // gamma = 100 pi^2: one step of 0.01 contracts by about e^-10, so 400
  // steps between renormalizations would underflow.
  const SineBasis b(testing::interval(0.1), 4);
  TangentConfig tc;
  tc.m = 1;
  tc.renorm_every = 400;
  tc.discard_time = 1.0;
  const LyapunovReport rep =
      evolve_tangents(ModalState(b.mode_count()), b, no_feed(), rk4(0.01, 4.0), tc);
  CHECK(rep.renorm_every < 400);
  CHECK(rep.min_log_diag > std::log(1e-280));
  CHECK(rep.exponents[0] == doctest::Approx(dense_spectrum(b, no_feed())[0]).epsilon(1e-4));
}

TEST_CASE("lyapunov: argument checks") {
  const SineBasis b(testing::interval(), 4);
  const ModalState g0(b.mode_count());
  TangentConfig tc;
  tc.m = 25;
  CHECK_THROWS_AS(evolve_tangents(g0, b, Parameters(), rk4(0.01, 1.0), tc), Error);
  tc.m = 2;
  tc.discard_time = 1.0;
  CHECK_THROWS_AS(evolve_tangents(g0, b, Parameters(), rk4(0.01, 1.0), tc), Error);
  tc.discard_time = 0;
  tc.renorm_every = 0;
  CHECK_THROWS_AS(evolve_tangents(g0, b, Parameters(), rk4(0.01, 1.0), tc), Error);
}

TEST_CASE("kaplan-yorke: partial sums") {
  CHECK(kaplan_yorke({0.5, -0.2, -1.0}) == doctest::Approx(2.3));
  CHECK(kaplan_yorke({-1.0, -2.0}) == 0.0);
  CHECK(kaplan_yorke({1.0, 0.5}) == 2.0);
  CHECK(kaplan_yorke({0.0, -1.0}) == doctest::Approx(1.0));
  CHECK(kaplan_yorke({}) == 0.0);
}

TEST_CASE("trace: single direction at the zero state") {
  const SineBasis b(testing::interval(), 8);
  const ModalState zero(b.mode_count());
  // -d1 lambda_1 - (b + k) - D1 at the default scenario.
  CHECK(trace_qm(zero, {unit(b, 0, 0)}, b, Parameters()) == doctest::Approx(-4.1).epsilon(1e-14));
  CHECK(trace_qm(zero, {unit(b, 1, 2)}, b, Parameters()) == doctest::Approx(-9.1).epsilon(1e-14));
}

TEST_CASE("trace: invariant under rotations of the frame") {
  const SineBasis b(testing::interval(), 10);
  const ModalState base = testing::smooth(b, 6, 3.0);
  ModalState e1 = testing::smooth(b, 7), e2 = testing::smooth(b, 8);
  // Gram-Schmidt by hand.
  const double n1 = testing::l2(e1.coef);
  for (double& x : e1.coef) x /= n1;
  double d = 0;
  for (std::size_t i = 0; i < e1.coef.size(); ++i) d += e1.coef[i] * e2.coef[i];
  e2 = axpy(e2, -d, e1);
  const double n2 = testing::l2(e2.coef);
  for (double& x : e2.coef) x /= n2;

  const double t0 = trace_qm(base, {e1, e2}, b, Parameters());
  for (double th : {0.3, 1.1, 2.7}) {
    ModalState r1 = e1, r2 = e2;
    for (std::size_t i = 0; i < e1.coef.size(); ++i) {
      r1.coef[i] = std::cos(th) * e1.coef[i] + std::sin(th) * e2.coef[i];
      r2.coef[i] = -std::sin(th) * e1.coef[i] + std::cos(th) * e2.coef[i];
    }
    CHECK(trace_qm(base, {r1, r2}, b, Parameters()) == doctest::Approx(t0).epsilon(1e-12));
  }
  ModalState skew = axpy(e2, 1e-3, e1);
  CHECK_THROWS_AS(trace_qm(base, {e1, skew}, b, Parameters()), Error);
}

TEST_CASE("q3: closed form agrees with direct maximization") {
  for (int n : {1, 2, 3}) {
    for (double q : {0.5, 3.0, 40.0}) {
      const double delta = 0.7, c = 0.9, d0 = 0.8;
      const double K = 5 * delta * c * c * q;
      const double closed = q3_constant(n, delta, c, Magnitude(q), d0).to_double();
      INFO("n = ", n, " q = ", q);
      CHECK(closed == doctest::Approx(q3_numeric(n, K, d0)).epsilon(1e-9));
    }
  }
  CHECK(q3_constant(1, 0.7, 0.9, Magnitude(0.0), 1.0) == Magnitude(0.0));
  CHECK_THROWS_AS(q3_constant(4, 0.7, 0.9, Magnitude(1.0), 1.0), Error);
  // Huge inputs stay finite in the tower representation.
  const Magnitude big = q3_constant(1, 0.7, 0.9, exp(Magnitude(1e6)), 1.0);
  CHECK(big.level() == 1);
  CHECK(big.x() == doctest::Approx(4.0 / 3.0 * 1e6).epsilon(1e-6));
}

TEST_CASE("dimension bound: integer rounding and monotonicity") {
  const Parameters prm;
  const DimensionBound db = analytic_dimension_bound(prm, 2, 1.0, 1.0, Magnitude(2.0));
  CHECK(db.B.to_double() == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(db.m.to_double() == 11.0);
  CHECK(db.dH == db.m);
  CHECK(db.dF.to_double() == 22.0);

  const DimensionBound more_q3 = analytic_dimension_bound(prm, 2, 1.0, 1.0, Magnitude(5.0));
  const DimensionBound more_qs = analytic_dimension_bound(prm, 2, 1.0, 2.0, Magnitude(2.0));
  const DimensionBound more_vol = analytic_dimension_bound(prm, 2, 3.0, 1.0, Magnitude(2.0));
  CHECK(more_q3.B > db.B);
  CHECK(more_qs.B < db.B);
  CHECK(more_vol.B > db.B);
  CHECK_THROWS_AS(analytic_dimension_bound(prm, 2, 1.0, 0.0, Magnitude(2.0)), Error);
}

TEST_CASE("dimension bound: numerical m* lies below the analytic m") {
  const SineBasis b(testing::interval(), 16);
  const Parameters prm;
  TangentConfig tc;
  tc.m = 12;
  tc.discard_time = 2;
  const LyapunovReport rep = evolve_tangents(testing::smooth(b, 3, 4.0), b, prm, rk4(0.01, 6.0, true), tc);
  const QmSummary qs = qm_average({rep, rep});
  CHECK(qs.runs == 2);
  CHECK(qs.m_star == rep.m_star);
  REQUIRE(rep.m_star >= 1);
  const EmbeddingConstants ec = embedding_constants(b, 1000);
  const BoundSet bs = compute_bound_set(prm, BasisConstants::from(b, ec));
  const Magnitude q3 = q3_constant(1, ec.delta, ec.c_gn, bs.Q1 + bs.Q2, prm.d0());
  const DimensionBound db = analytic_dimension_bound(prm, 1, b.volume(), 1.0, q3);
  CHECK(Magnitude(rep.m_star) <= db.m);
}
