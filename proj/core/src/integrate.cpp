#include "ebrus/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ebrus/error.hpp"
#include "if_scheme.hpp"

namespace ebrus {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::IfEuler: return "if_euler";
    case Scheme::IfRk2: return "if_rk2";
    case Scheme::IfRk4: return "if_rk4";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "if_euler") return Scheme::IfEuler;
  if (s == "if_rk2") return Scheme::IfRk2;
  if (s == "if_rk4") return Scheme::IfRk4;
  throw Error("integrate", "unknown scheme '" + s + "' (expected if_euler, if_rk2 or if_rk4)");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("integrate", "dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error("integrate", "t_end must be positive");
  if (sample_every < 1) throw Error("integrate", "sample_every must be >= 1");
  if (store_every < 0) throw Error("integrate", "store_every must be >= 0");
  if (!(safety > 0.0)) throw Error("integrate", "safety must be positive");
}

ModalState galerkin_rhs(const ModalState& ms, const SineBasis& basis, const Parameters& prm) {
  if (ms.modes() != basis.mode_count()) throw Error("integrate", "rhs: state/basis mismatch");
  Galerkin g(basis, prm);
  ModalState out(basis.mode_count());
  out.time = ms.time;
  g.nonlinear(ms.coef, out.coef);
  std::vector<double> lin(out.coef.size());
  g.diffusion(ms.coef, lin);
  for (std::size_t i = 0; i < lin.size(); ++i) out.coef[i] += lin[i];
  return out;
}

// ---- Stepper ----------------------------------------------------------------

namespace {

constexpr int kMaxLevel = 24;

bool all_finite(const std::vector<double>& q) {
  return std::all_of(q.begin(), q.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(const std::vector<double>& q) {
  double m = 0.0;
  for (double x : q) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Stepper::Stepper(const SineBasis& basis, const Parameters& prm, const IntegratorConfig& cfg)
    : basis_(basis), prm_(prm), cfg_(cfg), galerkin_(basis, prm) {
  cfg_.validate();
}

const Stepper::Factors& Stepper::factors(double h) {
  for (const auto& f : cache_) {
    if (f.h == h) return f;
  }
  Factors f;
  f.h = h;
  const std::size_t M = basis_.mode_count();
  f.full.resize(kComponents * M);
  f.half.resize(kComponents * M);
  for (int c = 0; c < kComponents; ++c) {
    const double dc = prm_.diffusivity(c);
    for (std::size_t k = 0; k < M; ++k) {
      const double rate = -dc * basis_.eigenvalue(k);
      f.full[c * M + k] = std::exp(rate * h);
      f.half[c * M + k] = std::exp(rate * 0.5 * h);
    }
  }
  if (cache_.size() > 64) cache_.clear();
  cache_.push_back(std::move(f));
  return cache_.back();
}

void Stepper::raw_step(std::vector<double>& q, double h) {
  const Factors& f = factors(h);
  detail::IfBuffers buf;
  auto N = [this](const std::vector<double>& x, std::vector<double>& out) {
    return galerkin_.nonlinear(x, out);
  };
  detail::if_step(cfg_.scheme, q, h, f.full, f.half, N, buf,
                  std::numeric_limits<double>::infinity());
  ++substeps_;
}

void Stepper::step(ModalState& ms, std::optional<double> h_opt) {
  const double h0 = h_opt.value_or(cfg_.dt);
  if (ms.modes() != basis_.mode_count()) throw Error("integrate", "step: state/basis mismatch");
  auto N = [this](const std::vector<double>& x, std::vector<double>& out) {
    const double j = galerkin_.nonlinear(x, out);
    return j;
  };
  static thread_local detail::IfBuffers buf;

  if (!cfg_.adaptive) {
    const Factors& f = factors(h0);
    save_ = ms.coef;
    detail::if_step(cfg_.scheme, ms.coef, h0, f.full, f.half, N, buf,
                    std::numeric_limits<double>::infinity());
    ++substeps_;
    if (!all_finite(ms.coef)) {
      throw BlowUpError("non-finite state after step at t = " + std::to_string(ms.time) +
                            " (dt too large for the reaction term?)",
                        ms.time, max_abs(save_));
    }
    ms.time += h0;
    return;
  }

  double rem = h0;
  int level = 0;
  if (last_jnorm_ > 0.0 && h0 * last_jnorm_ > cfg_.safety) {
    level = static_cast<int>(std::ceil(std::log2(h0 * last_jnorm_ / cfg_.safety)));
  }
  int forced = 0;  // extra halvings after non-finite output
  while (rem > 0.0) {
    const int lv = std::min(std::max(level, forced), kMaxLevel);
    double h = std::ldexp(h0, -lv);
    if (h > rem) h = rem;
    const Factors& f = factors(h);
    save_ = ms.coef;
    const double limit = lv >= kMaxLevel ? std::numeric_limits<double>::infinity() : cfg_.safety;
    const bool ok = detail::if_step(cfg_.scheme, ms.coef, h, f.full, f.half, N, buf, limit);
    if (!ok) {
      ++level;
      continue;
    }
    ++substeps_;
    if (!all_finite(ms.coef)) {
      ms.coef = save_;
      if (lv >= kMaxLevel) {
        throw BlowUpError("non-finite state at t = " + std::to_string(ms.time + (h0 - rem)) +
                              " even with step " + std::to_string(h),
                          ms.time + (h0 - rem), max_abs(save_));
      }
      forced = lv + 1;
      continue;
    }
    rem -= h;
    // Allow the step to grow again once the state is tame.
    if (level > 0) --level;
  }
  // Estimate for the next base step, from the final state.
  n0_.resize(ms.coef.size());
  last_jnorm_ = galerkin_.nonlinear(ms.coef, n0_);
  ms.time += h0;
}

ModalState step(const ModalState& ms, const SineBasis& basis, const Parameters& prm,
                const IntegratorConfig& cfg) {
  Stepper s(basis, prm, cfg);
  ModalState out = ms;
  s.step(out);
  return out;
}

Trajectory simulate(const ModalState& g0, const SineBasis& basis, const Parameters& prm,
                    const IntegratorConfig& cfg) {
  cfg.validate();
  if (g0.modes() != basis.mode_count()) throw Error("integrate", "simulate: state/basis mismatch");
  for (double x : g0.coef) {
    if (!std::isfinite(x)) throw Error("integrate", "simulate: initial state is not finite");
  }
  Stepper stepper(basis, prm, cfg);
  Trajectory traj;
  traj.initial = g0;
  ModalState ms = g0;
  const double t0 = g0.time;
  traj.samples.push_back(norms(ms, basis));
  if (cfg.store_every > 0) traj.states.push_back(ms);

  const auto n = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  for (long long i = 1; i <= n; ++i) {
    const double h = i == n ? cfg.t_end - static_cast<double>(n - 1) * cfg.dt : cfg.dt;
    stepper.step(ms, h);
    ms.time = i == n ? t0 + cfg.t_end : t0 + static_cast<double>(i) * cfg.dt;
    if (i % cfg.sample_every == 0 || i == n) traj.samples.push_back(norms(ms, basis));
    if (cfg.store_every > 0 && (i % cfg.store_every == 0 || i == n)) traj.states.push_back(ms);
  }
  traj.final_state = ms;
  traj.substeps = stepper.substeps();
  return traj;
}

}  // namespace ebrus
