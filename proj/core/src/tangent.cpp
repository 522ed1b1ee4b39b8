#include "ebrus/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ebrus/error.hpp"

namespace ebrus {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool all_finite(const std::vector<double>& q) {
  return std::all_of(q.begin(), q.end(), [](double x) { return std::isfinite(x); });
}

// Modified Gram-Schmidt in place; returns the diagonal of R.
std::vector<double> orthonormalize(std::vector<ModalState>& vs) {
  std::vector<double> diag(vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    auto& v = vs[j].coef;
    for (std::size_t i = 0; i < j; ++i) {
      const double r = dot(vs[i].coef, v);
      const auto& e = vs[i].coef;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= r * e[k];
    }
    const double n = std::sqrt(dot(v, v));
    diag[j] = n;
    if (!(n > 0.0) || !std::isfinite(n)) continue;
    for (double& x : v) x /= n;
  }
  return diag;
}

struct Degenerate {};

}  // namespace

ModalState tangent_rhs(const ModalState& base, const ModalState& G, const SineBasis& basis,
                       const Parameters& prm) {
  if (base.modes() != basis.mode_count() || G.modes() != basis.mode_count()) {
    throw Error("tangent", "tangent_rhs: state/basis mismatch");
  }
  Galerkin gal(basis, prm);
  gal.set_base(base.coef);
  ModalState out(basis.mode_count());
  out.time = base.time;
  gal.jacobian_action(G.coef, out.coef);
  std::vector<double> lin(out.coef.size());
  gal.diffusion(G.coef, lin);
  for (std::size_t i = 0; i < lin.size(); ++i) out.coef[i] += lin[i];
  return out;
}

// ---- TangentStepper ---------------------------------------------------------

TangentStepper::TangentStepper(const SineBasis& basis, const Parameters& prm,
                               const IntegratorConfig& cfg)
    : basis_(basis), prm_(prm), cfg_(cfg), gal_(basis, prm) {
  cfg_.validate();
}

void TangentStepper::step(ModalState& base, std::vector<ModalState>& tangents, double h0) {
  int level = 0;
  if (cfg_.adaptive) {
    tmp_.resize(base.coef.size());
    const double jn = gal_.nonlinear(base.coef, tmp_);
    if (h0 * jn > cfg_.safety) {
      level = std::min(24, static_cast<int>(std::ceil(std::log2(h0 * jn / cfg_.safety))));
    }
  }
  const long long n = 1LL << level;
  const double h = std::ldexp(h0, -level);
  for (long long i = 0; i < n; ++i) substep(base.coef, tangents, h);
  if (!all_finite(base.coef)) {
    throw BlowUpError("non-finite base state in tangent integration", base.time, 0.0);
  }
  base.time += h0;
}

void TangentStepper::substep(std::vector<double>& q, std::vector<ModalState>& tangents,
                             double h) {
  const std::size_t n = q.size();
  const std::size_t M = basis_.mode_count();
  if (h != cached_h_) {
    E_.resize(n);
    Eh_.resize(n);
    for (int c = 0; c < kComponents; ++c) {
      const double dc = prm_.diffusivity(c);
      for (std::size_t k = 0; k < M; ++k) {
        E_[c * M + k] = std::exp(-dc * basis_.eigenvalue(k) * h);
        Eh_[c * M + k] = std::exp(-0.5 * dc * basis_.eigenvalue(k) * h);
      }
    }
    cached_h_ = h;
  }
  const auto& E = E_;
  const auto& Eh = Eh_;
  const Scheme scheme = cfg_.scheme;
  const int nstages = scheme == Scheme::IfEuler ? 1 : scheme == Scheme::IfRk2 ? 2 : 4;
  stages_.resize(nstages);

  // Base stages; the final update mirrors the plain integrator.
  stages_[0] = q;
  std::vector<double> k1(n), k2, k3, k4;
  gal_.nonlinear(stages_[0], k1);
  if (scheme == Scheme::IfEuler) {
    for (std::size_t i = 0; i < n; ++i) q[i] = E[i] * (q[i] + h * k1[i]);
  } else if (scheme == Scheme::IfRk2) {
    stages_[1].resize(n);
    k2.resize(n);
    for (std::size_t i = 0; i < n; ++i) stages_[1][i] = Eh[i] * (q[i] + 0.5 * h * k1[i]);
    gal_.nonlinear(stages_[1], k2);
    for (std::size_t i = 0; i < n; ++i) q[i] = E[i] * q[i] + h * Eh[i] * k2[i];
  } else {
    for (int s = 1; s < 4; ++s) stages_[s].resize(n);
    k2.resize(n);
    k3.resize(n);
    k4.resize(n);
    for (std::size_t i = 0; i < n; ++i) stages_[1][i] = Eh[i] * (q[i] + 0.5 * h * k1[i]);
    gal_.nonlinear(stages_[1], k2);
    for (std::size_t i = 0; i < n; ++i) stages_[2][i] = Eh[i] * q[i] + 0.5 * h * k2[i];
    gal_.nonlinear(stages_[2], k3);
    for (std::size_t i = 0; i < n; ++i) stages_[3][i] = E[i] * q[i] + h * Eh[i] * k3[i];
    gal_.nonlinear(stages_[3], k4);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = E[i] * q[i] + h / 6.0 * (E[i] * k1[i] + 2.0 * Eh[i] * (k2[i] + k3[i]) + k4[i]);
    }
  }

  // Linearized stages, one base stage at a time.
  const std::size_t m = tangents.size();
  dk_.resize(2 * m);
  for (auto& v : dk_) v.resize(n);
  std::vector<double> d(n);
  // dk_[t] = argument of the next Jacobian application, dk_[m + t] = accumulator.
  gal_.set_base(stages_[0]);
  for (std::size_t t = 0; t < m; ++t) {
    auto& G = tangents[t].coef;
    gal_.jacobian_action(G, d);
    auto& arg = dk_[t];
    auto& acc = dk_[m + t];
    switch (scheme) {
      case Scheme::IfEuler:
        for (std::size_t i = 0; i < n; ++i) G[i] = E[i] * (G[i] + h * d[i]);
        break;
      case Scheme::IfRk2:
        for (std::size_t i = 0; i < n; ++i) arg[i] = Eh[i] * (G[i] + 0.5 * h * d[i]);
        break;
      case Scheme::IfRk4:
        for (std::size_t i = 0; i < n; ++i) {
          acc[i] = E[i] * d[i];
          arg[i] = Eh[i] * (G[i] + 0.5 * h * d[i]);
        }
        break;
    }
  }
  if (scheme == Scheme::IfEuler) return;

  gal_.set_base(stages_[1]);
  for (std::size_t t = 0; t < m; ++t) {
    auto& G = tangents[t].coef;
    auto& arg = dk_[t];
    auto& acc = dk_[m + t];
    gal_.jacobian_action(arg, d);
    if (scheme == Scheme::IfRk2) {
      for (std::size_t i = 0; i < n; ++i) G[i] = E[i] * G[i] + h * Eh[i] * d[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        acc[i] += 2.0 * Eh[i] * d[i];
        arg[i] = Eh[i] * G[i] + 0.5 * h * d[i];
      }
    }
  }
  if (scheme == Scheme::IfRk2) return;

  gal_.set_base(stages_[2]);
  for (std::size_t t = 0; t < m; ++t) {
    auto& G = tangents[t].coef;
    auto& arg = dk_[t];
    auto& acc = dk_[m + t];
    gal_.jacobian_action(arg, d);
    for (std::size_t i = 0; i < n; ++i) {
      acc[i] += 2.0 * Eh[i] * d[i];
      arg[i] = E[i] * G[i] + h * Eh[i] * d[i];
    }
  }
  gal_.set_base(stages_[3]);
  for (std::size_t t = 0; t < m; ++t) {
    auto& G = tangents[t].coef;
    auto& arg = dk_[t];
    auto& acc = dk_[m + t];
    gal_.jacobian_action(arg, d);
    for (std::size_t i = 0; i < n; ++i) G[i] = E[i] * G[i] + h / 6.0 * (acc[i] + d[i]);
  }
}

std::pair<ModalState, ModalState> propagate_tangent(const ModalState& g0, const ModalState& G,
                                                    const SineBasis& basis,
                                                    const Parameters& prm,
                                                    const IntegratorConfig& cfg) {
  cfg.validate();
  TangentStepper ts(basis, prm, cfg);
  ModalState base = g0;
  std::vector<ModalState> tg{G};
  const double t0 = g0.time;
  const auto n = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  for (long long i = 1; i <= n; ++i) {
    const double h = i == n ? cfg.t_end - static_cast<double>(n - 1) * cfg.dt : cfg.dt;
    ts.step(base, tg, h);
    base.time = i == n ? t0 + cfg.t_end : t0 + static_cast<double>(i) * cfg.dt;
  }
  tg[0].time = base.time;
  return {base, tg[0]};
}

// ---- Lyapunov spectrum and traces ----------------------------------------

double trace_qm(const ModalState& base, const std::vector<ModalState>& zetas,
                const SineBasis& basis, const Parameters& prm) {
  const std::size_t n = kComponents * basis.mode_count();
  double defect = 0.0;
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    if (zetas[i].coef.size() != n) throw Error("tangent", "trace_qm: direction/basis mismatch");
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = dot(zetas[i].coef, zetas[j].coef) - (i == j ? 1.0 : 0.0);
      defect = std::max(defect, std::abs(g));
    }
  }
  if (defect > 1e-8) {
    throw Error("tangent", "trace_qm: directions are not orthonormal (Gram defect " +
                               std::to_string(defect) + ")");
  }
  Galerkin gal(basis, prm);
  gal.set_base(base.coef);
  std::vector<double> jz(n), lz(n);
  double tr = 0.0;
  for (const auto& z : zetas) {
    gal.jacobian_action(z.coef, jz);
    gal.diffusion(z.coef, lz);
    tr += dot(z.coef, jz) + dot(z.coef, lz);
  }
  return tr;
}

namespace {

LyapunovReport run_lyapunov(const ModalState& g0, const SineBasis& basis, const Parameters& prm,
                            const IntegratorConfig& cfg, const TangentConfig& tc) {
  const std::size_t n = kComponents * basis.mode_count();
  const auto m = static_cast<std::size_t>(tc.m);
  std::mt19937_64 rng(tc.seed);
  std::normal_distribution<double> nd;
  std::vector<ModalState> frame(m, ModalState(basis.mode_count()));
  for (auto& f : frame) {
    for (double& x : f.coef) x = nd(rng);
  }
  orthonormalize(frame);

  TangentStepper ts(basis, prm, cfg);
  Galerkin gal(basis, prm);
  std::vector<double> jz(n), lz(n);

  LyapunovReport rep;
  rep.renorm_every = tc.renorm_every;
  std::vector<double> logsum(m, 0.0), tr(m, 0.0), tr1(m, 0.0), tr2(m, 0.0);
  double avg_time = 0.0, t1 = 0.0, t2 = 0.0;
  double min_log = std::numeric_limits<double>::infinity();
  ModalState base = g0;
  const double t0 = g0.time;
  const double tmid = t0 + tc.discard_time + 0.5 * (cfg.t_end - tc.discard_time);
  const auto steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  double interval_start = t0;
  for (long long i = 1; i <= steps; ++i) {
    const double h = i == steps ? cfg.t_end - static_cast<double>(steps - 1) * cfg.dt : cfg.dt;
    ts.step(base, frame, h);
    base.time = i == steps ? t0 + cfg.t_end : t0 + static_cast<double>(i) * cfg.dt;
    if (i % tc.renorm_every != 0 && i != steps) continue;

    const std::vector<double> diag = orthonormalize(frame);
    ++rep.renormalizations;
    for (double r : diag) {
      if (!(r > 1e-280) || !std::isfinite(r)) throw Degenerate{};
      min_log = std::min(min_log, std::log(r));
    }
    const double len = base.time - interval_start;
    const bool in_window = interval_start >= t0 + tc.discard_time - 1e-12;
    interval_start = base.time;
    if (!in_window) continue;

    avg_time += len;
    for (std::size_t j = 0; j < m; ++j) logsum[j] += std::log(diag[j]);
    // Traces over the nested orthonormal frame.
    gal.set_base(base.coef);
    double partial = 0.0;
    const bool first_half = base.time - 0.5 * len < tmid;
    (first_half ? t1 : t2) += len;
    for (std::size_t j = 0; j < m; ++j) {
      gal.jacobian_action(frame[j].coef, jz);
      gal.diffusion(frame[j].coef, lz);
      partial += dot(frame[j].coef, jz) + dot(frame[j].coef, lz);
      tr[j] += partial * len;
      (first_half ? tr1 : tr2)[j] += partial * len;
    }
    rep.history_times.push_back(base.time);
    std::vector<double> run(m);
    for (std::size_t j = 0; j < m; ++j) run[j] = logsum[j] / avg_time;
    rep.history.push_back(std::move(run));
  }
  if (!(avg_time > 0.0)) {
    throw Error("tangent", "averaging window is empty (discard_time >= t_end?)");
  }
  rep.averaging_time = avg_time;
  rep.min_log_diag = min_log;
  rep.exponents.resize(m);
  rep.qm.resize(m);
  rep.qm_first.assign(m, 0.0);
  rep.qm_second.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    rep.exponents[j] = logsum[j] / avg_time;
    rep.qm[j] = tr[j] / avg_time;
    if (t1 > 0) rep.qm_first[j] = tr1[j] / t1;
    if (t2 > 0) rep.qm_second[j] = tr2[j] / t2;
  }
  std::vector<double> sorted = rep.exponents;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  rep.exponents = sorted;
  rep.kaplan_yorke = kaplan_yorke(sorted);
  for (std::size_t j = 0; j < m; ++j) {
    if (rep.qm[j] < 0.0) {
      rep.m_star = static_cast<int>(j + 1);
      break;
    }
  }
  return rep;
}

}  // namespace

LyapunovReport evolve_tangents(const ModalState& g0, const SineBasis& basis,
                               const Parameters& prm, const IntegratorConfig& cfg,
                               const TangentConfig& tc) {
  cfg.validate();
  if (g0.modes() != basis.mode_count()) throw Error("tangent", "initial state/basis mismatch");
  if (tc.m < 1 || static_cast<std::size_t>(tc.m) > kComponents * basis.mode_count()) {
    throw Error("tangent", "m must lie in [1, 6 * modes]");
  }
  if (tc.renorm_every < 1) throw Error("tangent", "renorm_every must be >= 1");
  if (!(tc.discard_time >= 0.0) || tc.discard_time >= cfg.t_end) {
    throw Error("tangent", "discard_time must lie in [0, t_end)");
  }
  TangentConfig c = tc;
  for (;;) {
    try {
      return run_lyapunov(g0, basis, prm, cfg, c);
    } catch (const Degenerate&) {
      if (c.renorm_every == 1) {
        throw Error("tangent", "degenerate R diagonal even with renormalization every step");
      }
      c.renorm_every = std::max(1, c.renorm_every / 2);
    }
  }
}

QmSummary qm_average(const std::vector<LyapunovReport>& reports) {
  QmSummary s;
  s.runs = reports.size();
  for (const auto& r : reports) {
    if (s.qm.empty()) {
      s.qm = r.qm;
      continue;
    }
    if (r.qm.size() != s.qm.size()) throw Error("tangent", "qm_average: mixed m");
    for (std::size_t j = 0; j < s.qm.size(); ++j) s.qm[j] = std::max(s.qm[j], r.qm[j]);
  }
  for (std::size_t j = 0; j < s.qm.size(); ++j) {
    if (s.qm[j] < 0.0) {
      s.m_star = static_cast<int>(j + 1);
      break;
    }
  }
  return s;
}

double kaplan_yorke(const std::vector<double>& ex) {
  if (ex.empty() || ex[0] < 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < ex.size(); ++j) {
    if (s + ex[j] < 0.0) return static_cast<double>(j) + s / std::abs(ex[j]);
    s += ex[j];
  }
  return static_cast<double>(ex.size());
}

// ---- analytic dimension bound ------------------------------------------------

Magnitude q3_constant(int n, double delta, double c_gn, const Magnitude& q1_plus_q2, double d0) {
  if (n < 1 || n > 3) throw Error("tangent", "q3_constant: n must be 1, 2 or 3");
  if (!(d0 > 0.0)) throw Error("tangent", "q3_constant: d0 must be positive");
  const Magnitude K = Magnitude(5.0 * delta * c_gn * c_gn) * q1_plus_q2;
  if (K <= Magnitude(0.0)) return Magnitude(0.0);
  const Magnitude s = pow(Magnitude(n / (2.0 * d0)) * K, 4.0 / (4.0 - n));
  return s * Magnitude(d0 * (4.0 - n) / (2.0 * n));
}

double q3_numeric(int n, double K, double d0) {
  if (!(K > 0.0)) return 0.0;
  const double p = n / 4.0;
  auto f = [&](double ls) {
    const double s = std::exp(ls);
    return K * std::pow(s, p) - 0.5 * d0 * s;
  };
  double best = -1e300, arg = 0.0;
  const double lo = -200.0, hi = 200.0;
  const int grid = 4000;
  for (int i = 0; i <= grid; ++i) {
    const double ls = lo + (hi - lo) * i / grid;
    const double v = f(ls);
    if (v > best) {
      best = v;
      arg = ls;
    }
  }
  double a = arg - (hi - lo) / grid, b = arg + (hi - lo) / grid;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return std::max(0.0, f(0.5 * (a + b)));
}

DimensionBound analytic_dimension_bound(const Parameters& prm, int n, double volume,
                                        double Qstar, const Magnitude& Q3) {
  if (!(Qstar > 0.0)) throw Error("tangent", "Q* must be positive");
  if (n < 1 || n > 3) throw Error("tangent", "dimension bound: n must be 1, 2 or 3");
  DimensionBound db;
  db.Q3 = Q3;
  db.Qstar = Qstar;
  const Magnitude inner = Magnitude(2.0 / (prm.d0() * Qstar)) * (Q3 + Magnitude(prm.b() + prm.k()));
  db.B = pow(inner, n / 2.0) * Magnitude(volume);
  db.m = floor_plus_one(db.B);
  db.dH = db.m;
  db.dF = db.m * Magnitude(2.0);
  return db;
}

}  // namespace ebrus
