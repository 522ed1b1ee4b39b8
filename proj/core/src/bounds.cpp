#include "ebrus/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ebrus/error.hpp"

namespace ebrus {

BasisConstants BasisConstants::from(const SineBasis& basis, const EmbeddingConstants& ec) {
  BasisConstants bc;
  bc.dim = basis.dim();
  bc.gamma = basis.gamma();
  bc.volume = basis.volume();
  bc.delta = ec.delta;
  bc.eta = ec.eta;
  return bc;
}

BoundSet compute_bound_set(const Parameters& prm, const BasisConstants& bc) {
  if (!prm.strict()) throw Error("bounds", "bound formulas need strictly positive coefficients");
  if (!(bc.gamma > 0) || !(bc.volume > 0) || !(bc.delta > 0) || !(bc.eta > 0)) {
    throw Error("bounds", "gamma, |Omega|, delta and eta must be positive");
  }
  const double d1 = prm.d1(), d2 = prm.d2(), d3 = prm.d3();
  const double D1 = prm.D1(), D2 = prm.D2(), D3 = prm.D3();
  const double a = prm.a(), b = prm.b(), k = prm.k(), lam = prm.lambda(), N = prm.N();
  const double mu = prm.mu(), d = prm.d();
  const double g = bc.gamma, vol = bc.volume;
  const double b2 = b * b, a2 = a * a;
  const double dd = (d1 - d2) * (d1 - d2);
  const double mx = std::max(1.0, mu);
  const double kD = k + 2.0 * (D1 - D2);

  BoundSet bs;
  bs.coefficients = prm.coefficients();
  bs.inputs = bc;

  bs.R0 = b2 * vol / (g * d2);
  bs.R1 = 1.0 + mx *
                    (4.0 * b2 / (g * g * g * d * d1 * d2) + 16.0 * a2 / (g * g * d * d1) +
                     k * k * b2 / (mu * g * g * g * d * d2 * d3) +
                     2.0 * dd / (g * d1 * d2) * (1.0 / d + 1.0 / d2) * b2) *
                    vol;
  bs.R2 = 1.0 + mx *
                    (2.0 * dd / (g * d1 * d2) * (1.0 / d + 1.0 / d2) +
                     1.0 / (2.0 * g * g * d * d2) * (kD * kD / D1 + k * k / (2.0 * mu * D3))) *
                    b2 * vol;
  bs.K1 = 7.0 * bs.R0 + 3.0 * (bs.R1 + bs.R2);
  bs.K2 = 1.0 + b2 * b2 * vol / (3.0 * g * g * d2 * d2);
  bs.K3 = 1.0 + 3.0 * b2 * b2 * b2 * vol / (20.0 * g * g * g * d2 * d2 * d2);

  const double K1 = bs.K1;
  const double vz_mean = K1 + (1.0 + 1.0 / (2.0 * g * d2)) * b2 * vol;
  bs.C14 = 4.0 * dd / (d1 * d1 * d2) * vz_mean +
           (1.0 / d1) * ((4.0 * k / mu + 1.0) * K1 + (8.0 / g) * (K1 + 2.0 * a2 * vol));
  bs.C15 = (dd / (2.0 * d1 * d1)) * (4.0 / d2) * vz_mean +
           (1.0 / d1) * (K1 + (1.0 / (2.0 * D1)) * kD * kD * K1 + 2.0 * k / mu * K1);
  bs.C16 = bs.C14 + bs.C15 + (4.0 / d2) * vz_mean;
  const double delta = bc.delta, eta = bc.eta;
  bs.Q1 = Magnitude(bs.C16 + 2.0 / d1 * (a2 * vol + N * N * K1)) *
          exp(Magnitude(delta * delta * K1 * bs.C16 / d1));
  const double eta6 = std::pow(eta, 6);
  const Magnitude expo = Magnitude(2.0 * eta6 / d2) * pow(bs.Q1, 2.0);
  bs.C17 = Magnitude((1.0 / d2) * vz_mean + K1 * (d2 + 2.0 * b2 / d2)) * exp(expo);
  bs.C18 = K1 / (2.0 * d3) * (1.0 + k + k * k) * std::exp(2.0 * (lam + N));
  bs.Q2 = bs.C17 + Magnitude(bs.C18);
  return bs;
}

std::vector<BoundEntry> BoundSet::entries() const {
  return {
      {"R0", R0, "b^2 |Omega| / (gamma d2)"},
      {"R1", R1,
       "1 + max(1,mu) (4 b^2/(gamma^3 d d1 d2) + 16 a^2/(gamma^2 d d1) + k^2 b^2/(mu gamma^3 d "
       "d2 d3) + 2 |d1-d2|^2/(gamma d1 d2) (1/d + 1/d2) b^2) |Omega|"},
      {"R2", R2,
       "1 + max(1,mu) [2 |d1-d2|^2/(gamma d1 d2) (1/d + 1/d2) + 1/(2 gamma^2 d d2) "
       "(|k + 2(D1-D2)|^2/D1 + k^2/(2 mu D3))] b^2 |Omega|"},
      {"K1", K1, "7 R0 + 3 (R1 + R2)"},
      {"K2", K2, "1 + b^4 |Omega| / (3 gamma^2 d2^2)"},
      {"K3", K3, "1 + 3 b^6 |Omega| / (20 gamma^3 d2^3)"},
      {"C14", C14,
       "4 |d1-d2|^2/(d1^2 d2) [K1 + (1 + 1/(2 gamma d2)) b^2 |Omega|] + (1/d1) ((4 k/mu + 1) K1 "
       "+ (8/gamma) (K1 + 2 a^2 |Omega|))"},
      {"C15", C15,
       "(|d1-d2|^2/(2 d1^2)) (4/d2) [K1 + (1 + 1/(2 gamma d2)) b^2 |Omega|] + (1/d1) [K1 + "
       "|k + 2(D1-D2)|^2 K1/(2 D1) + 2 k K1/mu]  (implementer-derived)"},
      {"C16", C16, "C14 + C15 + (4/d2) [K1 + (1 + 1/(2 gamma d2)) b^2 |Omega|]"},
      {"Q1", Q1, "(C16 + 2/d1 (a^2 |Omega| + N^2 K1)) exp(delta^2 K1 C16 / d1)"},
      {"C17", C17,
       "((1/d2) [K1 + (1 + 1/(2 gamma d2)) b^2 |Omega|] + K1 [d2 + 2 b^2/d2]) exp(2 eta^6 Q1^2 "
       "/ d2)"},
      {"C18", C18, "K1/(2 d3) (1 + k + k^2) exp(2 (lambda + N))"},
      {"Q2", Q2, "C17 + C18"},
  };
}

BoundSet BoundSet::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error("bounds", "scale factor must be positive");
  BoundSet s = *this;
  for (double* p : {&s.R0, &s.R1, &s.R2, &s.K1, &s.K2, &s.K3, &s.C14, &s.C15, &s.C16, &s.C18,
                    &s.sup_factor}) {
    *p *= factor;
  }
  s.Q1 *= Magnitude(factor);
  s.C17 *= Magnitude(factor);
  s.Q2 *= Magnitude(factor);
  s.scale *= factor;
  return s;
}

double beta(double t, const Parameters& prm, double gamma) {
  if (!(t >= 0.0)) throw Error("bounds", "beta needs t >= 0");
  const double c = gamma * (prm.d1() - 2.0 * prm.d2());
  const double decay = std::exp(-gamma * prm.d() * t);
  if (c == 0.0) return t * decay;
  // e^{-2 gamma d2 t} - e^{-gamma d t} = e^{-gamma d t} (e^{(gamma d - 2 gamma d2) t} - 1)
  const double r = gamma * prm.d() - 2.0 * gamma * prm.d2();
  return std::abs(decay * std::expm1(r * t)) / std::abs(c);
}

double transient_envelope_vz(double v0z0, const Parameters& prm, double gamma, double volume,
                             double t) {
  if (!(t >= 0.0)) throw Error("bounds", "envelope needs t >= 0");
  const double b = prm.b();
  return std::exp(-2.0 * gamma * prm.d2() * t) * v0z0 + b * b * volume / (2.0 * gamma * prm.d2());
}

namespace {

BoundVerdict make_verdict(std::string name, std::string observable, double t_tail, double t_end,
                          double observed, const Magnitude& bound, double tol) {
  BoundVerdict v;
  v.name = std::move(name);
  v.observable = std::move(observable);
  v.t_tail = t_tail;
  v.t_end = t_end;
  v.observed = observed;
  v.bound = bound;
  v.margin = bound.representable() && bound.x() > 0 ? observed / bound.x() : 0.0;
  if (bound.representable()) {
    v.pass = std::isfinite(observed) && observed <= bound.x() * (1.0 + tol);
  } else {
    v.pass = std::isfinite(observed);
  }
  v.violations = v.pass ? 0 : 1;
  return v;
}

}  // namespace

std::vector<BoundVerdict> verify_absorption(const Trajectory& traj, const BoundSet& bs,
                                            double tail_fraction, double tol) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error("bounds", "tail_fraction must lie in (0, 1]");
  }
  if (traj.samples.empty()) throw Error("bounds", "empty trajectory");
  const double t0 = traj.samples.front().time;
  const double t1 = traj.samples.back().time;
  const double tt = t1 - tail_fraction * (t1 - t0);
  std::vector<const NormReport*> tail;
  for (const auto& s : traj.samples) {
    if (s.time >= tt) tail.push_back(&s);
  }
  if (tail.empty() || t1 <= t0) throw Error("bounds", "tail window is empty");

  auto tail_max = [&](auto&& f) {
    double m = 0.0;
    for (const auto* s : tail) {
      const double x = f(*s);
      if (!std::isfinite(x)) return x;
      m = std::max(m, x);
    }
    return m;
  };

  std::vector<BoundVerdict> out;
  out.push_back(make_verdict("R0", "|(v,z)|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.v2z2(); }), bs.R0, tol));
  out.push_back(make_verdict("R1", "|y|^2+|xi|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.y2xi2(); }), bs.R1, tol));
  out.push_back(make_verdict("R2", "|p|^2+|theta|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.p2theta2(); }), bs.R2,
                             tol));
  out.push_back(make_verdict("K1", "|g|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.g2(); }), bs.K1, tol));
  out.push_back(make_verdict("K2", "|(v,z)|_L4^4", tt, t1,
                             tail_max([](const NormReport& r) { return r.l4_vz(); }), bs.K2, tol));
  out.push_back(make_verdict("K3", "|(v,z)|_L6^6", tt, t1,
                             tail_max([](const NormReport& r) { return r.l6_vz(); }), bs.K3, tol));
  out.push_back(make_verdict("Q1", "|grad(u,w)|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.h1_uw(); }), bs.Q1, tol));
  out.push_back(make_verdict("Q2", "|grad(v,z)|^2+|grad(phi,psi)|^2", tt, t1,
                             tail_max([](const NormReport& r) { return r.h1_vzphipsi(); }), bs.Q2,
                             tol));

  // Sup-norm: no growth across the tail.
  const std::size_t half = (tail.size() + 1) / 2;
  double first = 0.0, second = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < tail.size(); ++i) {
    const double s = tail[i]->sup;
    if (!std::isfinite(s)) finite = false;
    (i < half ? first : second) = std::max(i < half ? first : second, s);
  }
  if (tail.size() == 1) second = first;
  auto sup = make_verdict("supnorm", "max|g(x)|", tt, t1, finite ? second : NAN,
                          Magnitude(bs.sup_factor * first), tol);
  out.push_back(sup);
  return out;
}

BoundVerdict verify_envelope(const Trajectory& traj, const Parameters& prm, double gamma,
                             double volume, double tol) {
  if (traj.samples.empty()) throw Error("bounds", "empty trajectory");
  const NormReport& s0 = traj.samples.front();
  const double v0z0 = s0.v2z2();
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double env = transient_envelope_vz(v0z0, prm, gamma, volume, s.time - s0.time);
    const double r = s.v2z2() / env;
    if (!std::isfinite(r)) {
      worst = r;
      break;
    }
    worst = std::max(worst, r);
  }
  return make_verdict("envelope_vz", "|(v,z)|^2 / envelope", s0.time, traj.samples.back().time,
                      worst, Magnitude(1.0), tol);
}

std::vector<BoundVerdict> merge_verdicts(const std::vector<std::vector<BoundVerdict>>& runs) {
  std::vector<BoundVerdict> out;
  std::map<std::string, std::size_t> where;
  for (const auto& run : runs) {
    for (const auto& v : run) {
      auto it = where.find(v.name);
      if (it == where.end()) {
        where.emplace(v.name, out.size());
        out.push_back(v);
        continue;
      }
      BoundVerdict& m = out[it->second];
      m.runs += v.runs;
      m.violations += v.violations;
      m.pass = m.pass && v.pass;
      if (!(v.observed <= m.observed) || (v.margin > m.margin)) {
        m.observed = v.observed;
        m.margin = v.margin;
        m.bound = v.bound;
      }
    }
  }
  return out;
}

}  // namespace ebrus
