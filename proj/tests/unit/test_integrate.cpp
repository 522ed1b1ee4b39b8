#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ebrus/error.hpp"
#include "ebrus/integrate.hpp"
#include "helpers.hpp"

using namespace ebrus;
using std::numbers::pi;

namespace {

/// Reaction switched off except for what the caller keeps.
Coefficients no_reaction() {
  Coefficients c;
  c.D1 = c.D2 = c.D3 = 0;
  c.a = c.b = c.k = c.lambda = c.N = 0;
  return c;
}

IntegratorConfig fixed(double dt, double t_end, Scheme s = Scheme::IfRk2) {
  IntegratorConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.scheme = s;
  cfg.adaptive = false;
  cfg.sample_every = 1000000;
  return cfg;
}

std::vector<double> fd_initial(const ModalState& ms, const SineBasis& b, int nodes) {
  const int n = nodes - 2;
  const double h = b.domain().lengths[0] / (nodes - 1);
  std::vector<double> out(std::size_t(6) * n);
  for (int c = 0; c < 6; ++c) {
    for (int i = 0; i < n; ++i) out[std::size_t(c) * n + i] = b.evaluate(ms.block(c), {(i + 1) * h, 0, 0});
  }
  return out;
}

}  // namespace

TEST_CASE("config: validation and scheme names") {
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.dt = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.sample_every = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  for (Scheme s : {Scheme::IfEuler, Scheme::IfRk2, Scheme::IfRk4}) {
    CHECK(scheme_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_WITH_AS(scheme_from_string("rk45"), doctest::Contains("if_rk2"), Error);
}

TEST_CASE("step: zero is an equilibrium without feed") {
  const SineBasis b(testing::interval(), 8);
  Coefficients c;
  c.a = 0;
  const Parameters prm = Parameters::relaxed(c);
  const Trajectory tr = simulate(ModalState(b.mode_count()), b, prm, fixed(0.05, 5.0));
  for (double x : tr.final_state.coef) CHECK(x == 0.0);
  CHECK(tr.final_state.time == doctest::Approx(5.0));
}

TEST_CASE("step: pure diffusion is exact") {
  const SineBasis b(testing::box(2, 1.5), 5);
  const Parameters prm = Parameters::relaxed(no_reaction());
  ModalState g0(b.mode_count());
  // Only u and phi carry data; v and z stay zero so the cubic term vanishes.
  for (std::size_t k = 0; k < b.mode_count(); ++k) {
    g0.block(0)[k] = 1.0 / (k + 1);
    g0.block(2)[k] = -0.5 / (k + 1);
  }
  for (Scheme s : {Scheme::IfEuler, Scheme::IfRk2, Scheme::IfRk4}) {
    const Trajectory tr = simulate(g0, b, prm, fixed(0.1, 0.7, s));
    for (std::size_t k = 0; k < b.mode_count(); ++k) {
      const double decay = std::exp(-b.eigenvalue(k) * 0.7);
      CHECK(tr.final_state.block(0)[k] == doctest::Approx(g0.block(0)[k] * decay).epsilon(1e-12));
      CHECK(tr.final_state.block(2)[k] == doctest::Approx(g0.block(2)[k] * decay).epsilon(1e-12));
    }
  }
}

TEST_CASE("step: self-convergence orders") {
  const SineBasis b(testing::interval(), 16);
  const Parameters prm;
  const ModalState g0 = testing::smooth(b, 21, 2.0);
  const double T = 0.5;
  struct Case {
    Scheme s;
    double order;
  };
  for (Case cs : {Case{Scheme::IfEuler, 2.0}, Case{Scheme::IfRk2, 4.0}, Case{Scheme::IfRk4, 16.0}}) {
    const double dt = cs.s == Scheme::IfRk4 ? 0.004 : 0.005;
    const auto a = simulate(g0, b, prm, fixed(dt, T, cs.s)).final_state;
    const auto a2 = simulate(g0, b, prm, fixed(dt / 2, T, cs.s)).final_state;
    const auto a4 = simulate(g0, b, prm, fixed(dt / 4, T, cs.s)).final_state;
    const double ratio = testing::l2_diff(a.coef, a2.coef) / testing::l2_diff(a2.coef, a4.coef);
    INFO(to_string(cs.s), " ratio ", ratio);
    CHECK(ratio == doctest::Approx(cs.order).epsilon(0.15));
  }
}

TEST_CASE("step: synchronized data stays synchronized") {
  const SineBasis b(testing::interval(), 8);
  ModalState g0 = testing::smooth(b, 31, 3.0);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < b.mode_count(); ++k) g0.block(c + 3)[k] = g0.block(c)[k];
  }
  IntegratorConfig cfg = fixed(1e-3, 10.0);
  cfg.adaptive = true;
  const Trajectory tr = simulate(g0, b, Parameters(), cfg);
  double gap = 0;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < b.mode_count(); ++k) {
      gap = std::max(gap, std::abs(tr.final_state.block(c)[k] - tr.final_state.block(c + 3)[k]));
    }
  }
  CHECK(gap <= 1e-12);
}

TEST_CASE("simulate: sampling layout") {
  const SineBasis b(testing::interval(), 4);
  IntegratorConfig cfg = fixed(0.1, 1.05);
  cfg.sample_every = 3;
  cfg.store_every = 5;
  const Trajectory tr = simulate(testing::smooth(b, 2), b, Parameters(), cfg);
  // 11 steps: samples at 0, 3, 6, 9, 11; stores at 0, 5, 10, 11.
  REQUIRE(tr.samples.size() == 5);
  CHECK(tr.samples[1].time == doctest::Approx(0.3));
  CHECK(tr.samples.back().time == doctest::Approx(1.05));
  REQUIRE(tr.states.size() == 4);
  CHECK(tr.states[2].time == doctest::Approx(1.0));
  CHECK(tr.final_state == tr.states.back());
}

TEST_CASE("simulate: deterministic to the bit") {
  const SineBasis b(testing::box(2, pi), 6);
  IntegratorConfig cfg;
  cfg.t_end = 2.0;
  const ModalState g0 = testing::smooth(b, 8, 5.0);
  const Trajectory a = simulate(g0, b, Parameters(), cfg);
  const Trajectory c = simulate(g0, b, Parameters(), cfg);
  CHECK(a.final_state == c.final_state);
  CHECK(a.substeps == c.substeps);
}

TEST_CASE("simulate: adaptive substeps tame large data") {
  const SineBasis b(testing::interval(), 8);
  const ModalState g0 = testing::smooth(b, 4, 10.0);
  IntegratorConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  const Trajectory tr = simulate(g0, b, Parameters(), cfg);
  CHECK(tr.substeps > 20);
  for (double x : tr.final_state.coef) CHECK(std::isfinite(x));
}

TEST_CASE("simulate: blow-up is reported") {
  const SineBasis b(testing::interval(), 8);
  const ModalState g0 = testing::smooth(b, 4, 1e3);
  try {
    simulate(g0, b, Parameters(), fixed(0.5, 50.0));
    FAIL("no blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.module() == "integrate");
    CHECK(e.time() > 0);
  }
  ModalState bad(b.mode_count());
  bad.coef[3] = NAN;
  CHECK_THROWS_AS(simulate(bad, b, Parameters(), fixed(0.1, 1.0)), Error);
}

TEST_CASE("fd reference: second-order diffusion") {
  const Parameters prm = Parameters::relaxed(no_reaction());
  const DomainSpec d = testing::interval();
  const double T = 0.5;
  double prev = 0;
  for (int nodes : {33, 65, 129}) {
    const int n = nodes - 2;
    const double h = pi / (nodes - 1);
    std::vector<double> init(std::size_t(6) * n, 0.0);
    for (int i = 0; i < n; ++i) init[i] = std::sin((i + 1) * h);
    const FdTrajectory fd = fd_reference_simulate(init, nodes, d, prm, fixed(0.01, T));
    double err = 0;
    for (int i = 0; i < n; ++i) {
      err = std::max(err, std::abs(fd.final_values[i] - std::exp(-T) * std::sin((i + 1) * h)));
    }
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("fd reference: agrees with the spectral solution") {
  const SineBasis b(testing::interval(), 16);
  const ModalState g0 = testing::smooth(b, 17, 3.0, 6);
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  const int nodes = 129;
  const Trajectory sp = simulate(g0, b, Parameters(), cfg);
  const FdTrajectory fd = fd_reference_simulate(fd_initial(g0, b, nodes), nodes, b.domain(),
                                                Parameters(), cfg);
  const std::vector<double> want = fd_initial(sp.final_state, b, nodes);
  CHECK(testing::l2_diff(fd.final_values, want) <= 1e-3 * testing::l2(want));
  CHECK(fd.v2z2.back() == doctest::Approx(sp.samples.back().v2z2()).epsilon(1e-3));
  CHECK_THROWS_AS(fd_reference_simulate({}, nodes, testing::box(2, 1.0), Parameters(), cfg), Error);
}
