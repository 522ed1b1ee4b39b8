#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ebrus/error.hpp"
#include "ebrus/integrate.hpp"
#include "if_scheme.hpp"

namespace ebrus {

namespace {

// Eigenvectors of the centered second difference with Dirichlet ends:
// v_j(i) = sin(j pi (i+1) / (n+1)), orthogonal with squared norm (n+1)/2.
struct FdModes {
  int n = 0;
  std::vector<double> s;       // n x n, s[j * n + i]
  std::vector<double> lambda;  // (4/h^2) sin^2(j pi / (2(n+1)))

  FdModes(int interior, double h) : n(interior), s(std::size_t(interior) * interior),
                                    lambda(interior) {
    const double np1 = n + 1.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        s[std::size_t(j) * n + i] = std::sin(std::numbers::pi * (j + 1.0) * (i + 1.0) / np1);
      }
      const double sj = std::sin(std::numbers::pi * (j + 1.0) / (2.0 * np1));
      lambda[j] = 4.0 / (h * h) * sj * sj;
    }
  }

  void forward(const double* u, double* c) const {
    const double scale = 2.0 / (n + 1.0);
    for (int j = 0; j < n; ++j) {
      const double* row = &s[std::size_t(j) * n];
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += row[i] * u[i];
      c[j] = scale * acc;
    }
  }

  void inverse(const double* c, double* u) const {
    for (int i = 0; i < n; ++i) u[i] = 0.0;
    for (int j = 0; j < n; ++j) {
      const double* row = &s[std::size_t(j) * n];
      const double cj = c[j];
      for (int i = 0; i < n; ++i) u[i] += cj * row[i];
    }
  }
};

double v2z2_trapezoid(const std::vector<double>& values, int n, double h) {
  // Boundary values are zero, so the trapezoid rule is h * sum of interior.
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = values[std::size_t(1) * n + i];
    const double z = values[std::size_t(4) * n + i];
    acc += v * v + z * z;
  }
  return h * acc;
}

}  // namespace

FdTrajectory fd_reference_simulate(const std::vector<double>& initial_interior, int nodes,
                                   const DomainSpec& domain, const Parameters& prm,
                                   const IntegratorConfig& cfg) {
  domain.validate();
  cfg.validate();
  if (domain.dim != 1) throw Error("integrate", "finite-difference reference is 1-D only");
  if (nodes < 3) throw Error("integrate", "finite-difference reference needs >= 3 nodes");
  const int n = nodes - 2;
  if (initial_interior.size() != std::size_t(kComponents) * n) {
    throw Error("integrate", "finite-difference initial data must have 6 * (nodes - 2) values");
  }
  const double L = domain.lengths[0];
  const double h = L / (nodes - 1);
  const FdModes modes(n, h);

  FdTrajectory out;
  out.grid.nodes = nodes;
  out.grid.length = L;
  out.grid.x.resize(n);
  for (int i = 0; i < n; ++i) out.grid.x[i] = (i + 1) * h;

  std::vector<double> q(initial_interior.size());
  for (int c = 0; c < kComponents; ++c) {
    modes.forward(&initial_interior[std::size_t(c) * n], &q[std::size_t(c) * n]);
  }

  std::vector<double> grid(q.size()), rate(q.size());
  auto N = [&](const std::vector<double>& x, std::vector<double>& res) {
    for (int c = 0; c < kComponents; ++c) {
      modes.inverse(&x[std::size_t(c) * n], &grid[std::size_t(c) * n]);
    }
    double jn = 0.0;
    double r[6];
    for (int i = 0; i < n; ++i) {
      const double u = grid[i], v = grid[n + i], phi = grid[2 * n + i];
      const double w = grid[3 * n + i], z = grid[4 * n + i], psi = grid[5 * n + i];
      detail::reaction_without_feed(prm, u, v, phi, w, z, psi, r);
      r[0] += prm.a();
      r[3] += prm.a();
      for (int c = 0; c < kComponents; ++c) rate[std::size_t(c) * n + i] = r[c];
      jn = std::max(jn, detail::jacobian_row_norm(prm, u, v, w, z));
    }
    for (int c = 0; c < kComponents; ++c) {
      modes.forward(&rate[std::size_t(c) * n], &res[std::size_t(c) * n]);
    }
    return jn;
  };

  std::vector<double> E(q.size()), Eh(q.size());
  double cached_h = -1.0;
  auto set_factors = [&](double step) {
    if (step == cached_h) return;
    cached_h = step;
    for (int c = 0; c < kComponents; ++c) {
      const double dc = prm.diffusivity(c);
      for (int j = 0; j < n; ++j) {
        E[std::size_t(c) * n + j] = std::exp(-dc * modes.lambda[j] * step);
        Eh[std::size_t(c) * n + j] = std::exp(-0.5 * dc * modes.lambda[j] * step);
      }
    }
  };

  auto record = [&](double t) {
    for (int c = 0; c < kComponents; ++c) {
      modes.inverse(&q[std::size_t(c) * n], &grid[std::size_t(c) * n]);
    }
    out.times.push_back(t);
    out.v2z2.push_back(v2z2_trapezoid(grid, n, h));
  };

  detail::IfBuffers buf;
  const double inf = std::numeric_limits<double>::infinity();
  record(0.0);
  const auto steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  for (long long s = 1; s <= steps; ++s) {
    const double h0 = s == steps ? cfg.t_end - static_cast<double>(steps - 1) * cfg.dt : cfg.dt;
    double rem = h0;
    int level = 0;
    while (rem > 0.0) {
      double hs = std::ldexp(h0, -level);
      if (hs > rem) hs = rem;
      set_factors(hs);
      const double limit = cfg.adaptive && level < 24 ? cfg.safety : inf;
      if (!detail::if_step(cfg.scheme, q, hs, E, Eh, N, buf, limit)) {
        ++level;
        continue;
      }
      for (double x : q) {
        if (!std::isfinite(x)) {
          throw BlowUpError("finite-difference reference blew up", s * cfg.dt, 0.0);
        }
      }
      rem -= hs;
    }
    record(s == steps ? cfg.t_end : static_cast<double>(s) * cfg.dt);
  }

  out.final_values.resize(q.size());
  for (int c = 0; c < kComponents; ++c) {
    modes.inverse(&q[std::size_t(c) * n], &out.final_values[std::size_t(c) * n]);
  }
  return out;
}

}  // namespace ebrus
