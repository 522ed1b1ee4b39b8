#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ebrus/bounds.hpp"
#include "ebrus/error.hpp"
#include "helpers.hpp"

using namespace ebrus;
using std::numbers::pi;

namespace {

BasisConstants interval_constants(double delta = 0.7, double eta = 0.65) {
  BasisConstants bc;
  bc.dim = 1;
  bc.gamma = 1.0;
  bc.volume = pi;
  bc.delta = delta;
  bc.eta = eta;
  return bc;
}

NormReport sample(double t, double v2z2) {
  NormReport r;
  r.time = t;
  r.l2[1] = v2z2;
  r.sup = 1.0;
  return r;
}

const BoundVerdict& find(const std::vector<BoundVerdict>& vs, const std::string& name) {
  for (const auto& v : vs) {
    if (v.name == name) return v;
  }
  throw std::runtime_error("no verdict " + name);
}

Trajectory generic_run(const SineBasis& b, double t_end, int store_every = 0) {
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = t_end;
  cfg.sample_every = 5;
  cfg.store_every = store_every;
  return simulate(testing::smooth(b, 77, 6.0), b, Parameters(), cfg);
}

}  // namespace

TEST_CASE("bound set: default scenario values") {
  const BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  CHECK(testing::rel_err(bs.R0, 4 * pi) <= 1e-12);
  CHECK(testing::rel_err(bs.R1, 1 + 36 * pi) <= 1e-12);
  CHECK(testing::rel_err(bs.R2, 1 + 30 * pi) <= 1e-12);
  CHECK(testing::rel_err(bs.K1, 6 + 226 * pi) <= 1e-12);
  CHECK(testing::rel_err(bs.K2, 1 + 16 * pi / 3) <= 1e-12);
  CHECK(testing::rel_err(bs.K3, 1 + 9.6 * pi) <= 1e-12);
  CHECK(bs.K1 == doctest::Approx(7 * bs.R0 + 3 * (bs.R1 + bs.R2)).epsilon(1e-15));
  CHECK(bs.C16 > bs.C14 + bs.C15);
  CHECK(bs.Q1.level() == 1);
  CHECK(bs.Q2.level() == 2);
  CHECK(bs.Q2 > bs.Q1);
  CHECK(bs.C18 == doctest::Approx(bs.K1 / 2 * 3 * std::exp(4.0)));
}

TEST_CASE("bound set: entries are complete and ordered") {
  const BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  const auto e = bs.entries();
  const std::vector<std::string> names{"R0", "R1", "R2", "K1", "K2", "K3", "C14",
                                       "C15", "C16", "Q1", "C17", "C18", "Q2"};
  REQUIRE(e.size() == names.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(e[i].name == names[i]);
    CHECK(!e[i].formula.empty());
  }
  CHECK(e[3].value == Magnitude(bs.K1));
}

TEST_CASE("bound set: monotone in b and |Omega|") {
  const BoundSet base = compute_bound_set(Parameters(), interval_constants());
  Coefficients c;
  c.b = 2.5;
  const BoundSet big_b = compute_bound_set(Parameters(c), interval_constants());
  BasisConstants bc = interval_constants();
  bc.volume *= 2;
  const BoundSet big_v = compute_bound_set(Parameters(), bc);
  for (const BoundSet* o : {&big_b, &big_v}) {
    CHECK(o->R0 > base.R0);
    CHECK(o->R1 > base.R1);
    CHECK(o->R2 > base.R2);
    CHECK(o->K1 > base.K1);
    CHECK(o->K2 > base.K2);
    CHECK(o->K3 > base.K3);
    CHECK(o->C16 > base.C16);
    CHECK(o->Q1 > base.Q1);
  }
}

TEST_CASE("bound set: invalid inputs") {
  Coefficients c;
  c.a = 0;
  CHECK_THROWS_AS(compute_bound_set(Parameters::relaxed(c), interval_constants()), Error);
  CHECK_THROWS_AS(compute_bound_set(Parameters(), interval_constants(0.0)), Error);
  const BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  CHECK_THROWS_AS(bs.scaled(0.0), Error);
}

TEST_CASE("bound set: scaling") {
  const BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  const BoundSet s = bs.scaled(0.01);
  CHECK(s.R0 == doctest::Approx(0.01 * bs.R0));
  CHECK(s.K3 == doctest::Approx(0.01 * bs.K3));
  CHECK(s.sup_factor == doctest::Approx(0.015));
  CHECK(s.scale == 0.01);
  CHECK(s.Q1 < bs.Q1);
  // A factor of 0.01 is below the resolution of a level-2 value.
  CHECK(s.Q2 <= bs.Q2);
}

TEST_CASE("beta: closed-form values") {
  const Parameters prm;
  CHECK(beta(0.0, prm, 1.0) == 0.0);
  CHECK(beta(1.0, prm, 1.0) == doctest::Approx(std::exp(-1.0) - std::exp(-2.0)).epsilon(1e-14));
  CHECK(beta(100.0, prm, 1.0) < 1e-10);
  CHECK_THROWS_AS(beta(-1.0, prm, 1.0), Error);

  Coefficients c;
  c.d1 = 2.0;
  c.d3 = 2.0;
  const Parameters tie(c);
  CHECK(beta(1.5, tie, 1.0) == doctest::Approx(1.5 * std::exp(-3.0)).epsilon(1e-14));
  c.d1 = c.d3 = 2.0 + 1e-9;
  const Parameters near(c);
  CHECK(beta(1.5, near, 1.0) == doctest::Approx(beta(1.5, tie, 1.0)).epsilon(1e-6));
}

TEST_CASE("envelope: formula and verdict") {
  const Parameters prm;
  CHECK(transient_envelope_vz(3.0, prm, 1.0, pi, 0.0) == doctest::Approx(3.0 + 2 * pi));
  CHECK(transient_envelope_vz(3.0, prm, 1.0, pi, 50.0) == doctest::Approx(2 * pi));

  Trajectory ok;
  ok.samples = {sample(0, 10), sample(1, 5), sample(2, 6)};
  const BoundVerdict v = verify_envelope(ok, prm, 1.0, pi);
  CHECK(v.pass);
  CHECK(v.observed == doctest::Approx(6.0 / (10.0 * std::exp(-4.0) + 2 * pi)));

  Trajectory bad = ok;
  bad.samples[2] = sample(2, 2 * pi * 1.1);
  const BoundVerdict w = verify_envelope(bad, prm, 1.0, pi);
  CHECK_FALSE(w.pass);
  CHECK(w.observed > 1.05);
}

TEST_CASE("verdicts: tail window and violations") {
  BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  Trajectory tr;
  for (int i = 0; i <= 10; ++i) tr.samples.push_back(sample(i, i < 6 ? 1000.0 : 1.0));
  // Transient excursions before the tail do not count.
  auto vs = verify_absorption(tr, bs);
  CHECK(find(vs, "R0").pass);
  CHECK(find(vs, "R0").observed == 1.0);
  CHECK(find(vs, "R0").t_tail == doctest::Approx(6.0));
  CHECK(find(vs, "supnorm").pass);
  CHECK(vs.size() == 9);

  tr.samples[8].l2[4] = 20.0;
  vs = verify_absorption(tr, bs);
  CHECK_FALSE(find(vs, "R0").pass);
  CHECK(find(vs, "R0").violations == 1);
  CHECK(find(vs, "K1").pass);

  tr.samples[10].sup = 2.0;
  CHECK_FALSE(find(verify_absorption(tr, bs), "supnorm").pass);

  tr.samples[9].l2[0] = NAN;
  CHECK_FALSE(find(verify_absorption(tr, bs), "K1").pass);
  CHECK_THROWS_AS(verify_absorption(tr, bs, 0.0), Error);
}

TEST_CASE("verdicts: merging keeps the worst run") {
  BoundVerdict a{"R0", "x", 0, 1, 3.0, Magnitude(10.0), 0.3, 1, 0, true};
  BoundVerdict b{"R0", "x", 0, 1, 12.0, Magnitude(10.0), 1.2, 1, 1, false};
  BoundVerdict c{"K1", "y", 0, 1, 1.0, Magnitude(10.0), 0.1, 1, 0, true};
  const auto m = merge_verdicts({{a, c}, {b, c}, {a, c}});
  REQUIRE(m.size() == 2);
  CHECK(m[0].runs == 3);
  CHECK(m[0].violations == 1);
  CHECK_FALSE(m[0].pass);
  CHECK(m[0].observed == 12.0);
  CHECK(m[1].pass);
}

TEST_CASE("verdicts: generic run passes, scaled bounds fail") {
  const SineBasis b(testing::interval(), 16);
  const BoundSet bs = compute_bound_set(Parameters(), BasisConstants::from(b, embedding_constants(b, 1000)));
  const Trajectory tr = generic_run(b, 20.0);
  for (const auto& v : verify_absorption(tr, bs)) {
    INFO(v.name, " observed ", v.observed);
    CHECK(v.pass);
  }
  CHECK(verify_envelope(tr, Parameters(), b.gamma(), b.volume()).pass);
  int failing = 0;
  for (const auto& v : verify_absorption(tr, bs.scaled(0.01))) failing += !v.pass;
  CHECK(failing >= 1);
}

TEST_CASE("ladder terms: energy identity by quadrature") {
  for (int dim : {1, 2}) {
    const SineBasis b(testing::box(dim, 2.0), dim == 1 ? 12 : 6);
    Coefficients c;
    c.d2 = 0.7;
    c.b = 1.3;
    const Parameters prm(c);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const LadderTerms lt = ladder_terms(testing::smooth(b, seed, 4.0), b, prm);
      const double rhs = 2.0 * (-prm.d2() * lt.h1_vz + lt.energy_integral);
      CHECK(std::abs(lt.ddt_l2_vz - rhs) <= 1e-8 * (std::abs(rhs) + lt.h1_vz));
    }
  }
}

TEST_CASE("ladder terms: time derivatives match the flow") {
  const SineBasis b(testing::interval(), 12);
  const Parameters prm;
  const ModalState g0 = testing::smooth(b, 3, 3.0);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::IfRk4;
  cfg.adaptive = false;
  Stepper st(b, prm, cfg);
  const double h = 1e-5;
  ModalState fwd = g0, bwd = g0;
  st.step(fwd, h);
  st.step(bwd, -h);
  const LadderTerms l0 = ladder_terms(g0, b, prm);
  const LadderTerms lp = ladder_terms(fwd, b, prm);
  const LadderTerms lm = ladder_terms(bwd, b, prm);
  CHECK(l0.ddt_l2_vz == doctest::Approx((lp.l2_vz - lm.l2_vz) / (2 * h)).epsilon(1e-6));
  CHECK(l0.ddt_l4_vz == doctest::Approx((lp.l4_vz - lm.l4_vz) / (2 * h)).epsilon(1e-6));
  CHECK(l0.ddt_l6_vz == doctest::Approx((lp.l6_vz - lm.l6_vz) / (2 * h)).epsilon(1e-6));
  CHECK(l0.ddt_h1_phipsi ==
        doctest::Approx((lp.h1_phipsi - lm.h1_phipsi) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("residuals: generic run satisfies the ladders") {
  const SineBasis b(testing::interval(), 16);
  const BoundSet bs = compute_bound_set(Parameters(), interval_constants());
  const Trajectory tr = generic_run(b, 5.0, 1);
  const ResidualReport rep = inequality_residuals(tr, b, Parameters(), bs.K1);
  REQUIRE(rep.checks.size() == 4);
  for (const auto& c : rep.checks) {
    INFO(c.name, " worst ", c.worst_ratio);
    CHECK(c.pass);
    CHECK(c.evaluated > 0);
  }
  CHECK(rep.pass());
  CHECK(rep.times.size() == tr.states.size() - 2);
}

TEST_CASE("residuals: an inflated trajectory is rejected") {
  const SineBasis b(testing::interval(), 8);
  Trajectory tr;
  for (int i = 0; i < 5; ++i) {
    ModalState s = testing::smooth(b, 1, 2.0);
    for (double& x : s.coef) x *= 1.0 + 5.0 * i;
    s.time = 0.01 * i;
    tr.states.push_back(s);
  }
  const ResidualReport rep = inequality_residuals(tr, b, Parameters(), 1e9);
  CHECK_FALSE(rep.pass());
  CHECK_FALSE(rep.checks[0].pass);
  tr.states.resize(2);
  CHECK_THROWS_AS(inequality_residuals(tr, b, Parameters(), 1e9), Error);
}
