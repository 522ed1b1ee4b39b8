#include <algorithm>
#include <cmath>
#include <random>

#include "ebrus/error.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

namespace {

enum class Ratio { L4, L6, GN };

struct Moments {
  double l2 = 0, h1 = 0, i4 = 0, i6 = 0;
};

class RatioEvaluator {
 public:
  explicit RatioEvaluator(const SineBasis& basis) : basis_(basis) {}

  Moments moments(std::span<const double> q) {
    Moments m;
    const auto& lam = basis_.eigenvalues();
    for (std::size_t k = 0; k < q.size(); ++k) {
      m.l2 += q[k] * q[k];
      m.h1 += lam[k] * q[k] * q[k];
    }
    const Collocation& G = basis_.norm_grid();
    basis_.to_grid(q, G, grid_);
    for (double x : grid_) {
      const double x2 = x * x;
      m.i4 += x2 * x2;
      m.i6 += x2 * x2 * x2;
    }
    m.i4 *= G.cell_volume;
    m.i6 *= G.cell_volume;
    return m;
  }

  double log_value(Ratio r, const Moments& m) const {
    const double n = basis_.dim();
    switch (r) {
      case Ratio::L4: return 0.5 * std::log(m.i4) - std::log(m.h1);
      case Ratio::L6: return std::log(m.i6) / 3.0 - std::log(m.h1);
      case Ratio::GN:
        return 0.25 * std::log(m.i4) - (n / 8.0) * std::log(m.h1) -
               ((4.0 - n) / 8.0) * std::log(m.l2);
    }
    return 0.0;
  }

  // Gradient of log_value; assumes grid_ holds the field of q.
  void gradient(Ratio r, std::span<const double> q, const Moments& m, std::vector<double>& g) {
    const Collocation& G = basis_.norm_grid();
    const double n = basis_.dim();
    const auto& lam = basis_.eigenvalues();
    pow_.resize(grid_.size());
    const int power = r == Ratio::L6 ? 5 : 3;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double x = grid_[i];
      pow_[i] = power == 3 ? x * x * x : x * x * x * x * x;
    }
    basis_.to_modes(pow_, G, proj_);
    g.resize(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      switch (r) {
        case Ratio::L4: g[k] = 2.0 * proj_[k] / m.i4 - 2.0 * lam[k] * q[k] / m.h1; break;
        case Ratio::L6: g[k] = 2.0 * proj_[k] / m.i6 - 2.0 * lam[k] * q[k] / m.h1; break;
        case Ratio::GN:
          g[k] = proj_[k] / m.i4 - (n / 4.0) * lam[k] * q[k] / m.h1 -
                 ((4.0 - n) / 4.0) * q[k] / m.l2;
          break;
      }
    }
  }

 private:
  const SineBasis& basis_;
  std::vector<double> grid_, pow_, proj_;
};

void normalize(std::vector<double>& q) {
  double s = 0;
  for (double x : q) s += x * x;
  s = std::sqrt(s);
  for (double& x : q) x /= s;
}

// Projected gradient ascent with backtracking on the (scale-invariant) log ratio.
double refine(RatioEvaluator& ev, Ratio r, std::vector<double>& q) {
  normalize(q);
  Moments m = ev.moments(q);
  double f = ev.log_value(r, m);
  std::vector<double> g, trial;
  double step = 0.1;
  for (int it = 0; it < 400; ++it) {
    ev.gradient(r, q, m, g);
    double gn = 0;
    for (double x : g) gn += x * x;
    if (!(gn > 0) || std::sqrt(gn) < 1e-13) break;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls) {
      trial = q;
      for (std::size_t k = 0; k < q.size(); ++k) trial[k] += step * g[k];
      normalize(trial);
      const Moments mt = ev.moments(trial);
      const double ft = ev.log_value(r, mt);
      if (std::isfinite(ft) && ft > f) {
        const double gain = ft - f;
        q = trial;
        f = ft;
        step *= 2.0;
        improved = true;
        if (gain < 1e-14) it = 1 << 20;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    m = ev.moments(q);
  }
  return f;
}

}  // namespace

double l4_ratio(std::span<const double> modal, const SineBasis& basis) {
  RatioEvaluator ev(basis);
  return std::exp(ev.log_value(Ratio::L4, ev.moments(modal)));
}

double l6_ratio(std::span<const double> modal, const SineBasis& basis) {
  RatioEvaluator ev(basis);
  return std::exp(ev.log_value(Ratio::L6, ev.moments(modal)));
}

double gn_ratio(std::span<const double> modal, const SineBasis& basis) {
  RatioEvaluator ev(basis);
  return std::exp(ev.log_value(Ratio::GN, ev.moments(modal)));
}

EmbeddingConstants embedding_constants(const SineBasis& basis, std::size_t sample_budget,
                                       std::uint64_t seed) {
  if (basis.mode_count() == 0) throw Error("spectral", "embedding constants: empty basis");
  if (sample_budget < 1000) {
    throw Error("spectral", "embedding constants: sample budget must be >= 1000");
  }
  const std::size_t M = basis.mode_count();
  RatioEvaluator ev(basis);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> decay(0.0, 3.0);

  constexpr std::size_t kKeep = 4;
  constexpr Ratio kRatios[3] = {Ratio::L4, Ratio::L6, Ratio::GN};
  struct Candidate {
    double value;
    std::vector<double> q;
  };
  std::array<std::vector<Candidate>, 3> best;

  auto offer = [&](int r, double val, const std::vector<double>& q) {
    auto& list = best[r];
    if (list.size() < kKeep) {
      list.push_back({val, q});
    } else {
      auto worst = std::min_element(list.begin(), list.end(),
                                    [](const auto& x, const auto& y) { return x.value < y.value; });
      if (val <= worst->value) return;
      *worst = {val, q};
    }
  };

  std::vector<double> q(M);
  for (std::size_t s = 0; s < sample_budget; ++s) {
    if (s == 0) {
      std::fill(q.begin(), q.end(), 0.0);
      q[0] = 1.0;
    } else {
      const double p = decay(rng);
      for (std::size_t k = 0; k < M; ++k) {
        const double scale = std::pow(basis.eigenvalue(k) / basis.gamma(), -0.5 * p);
        q[k] = normal(rng) * scale;
      }
    }
    const Moments m = ev.moments(q);
    if (!(m.h1 > 0)) continue;
    for (int r = 0; r < 3; ++r) offer(r, ev.log_value(kRatios[r], m), q);
  }

  EmbeddingConstants out;
  out.samples = sample_budget;
  out.seed = seed;
  std::array<double, 3> vals{};
  std::array<std::vector<double>, 3> args;
  for (int r = 0; r < 3; ++r) {
    std::sort(best[r].begin(), best[r].end(),
              [](const auto& x, const auto& y) { return x.value > y.value; });
    double top = -INFINITY;
    for (auto& c : best[r]) {
      std::vector<double> x = c.q;
      const double f = refine(ev, kRatios[r], x);
      if (f > top) {
        top = f;
        args[r] = x;
      }
    }
    vals[r] = std::exp(top);
  }
  out.delta = vals[0];
  out.eta = vals[1];
  out.c_gn = vals[2];
  out.delta_maximizer = std::move(args[0]);
  out.eta_maximizer = std::move(args[1]);
  out.c_gn_maximizer = std::move(args[2]);
  return out;
}

}  // namespace ebrus
