#include <algorithm>
#include <cmath>

#include "ebrus/bounds.hpp"
#include "ebrus/error.hpp"

namespace ebrus {

LadderTerms ladder_terms(const ModalState& ms, const SineBasis& basis, const Parameters& prm) {
  const std::size_t M = basis.mode_count();
  if (ms.modes() != M) throw Error("bounds", "ladder_terms: state/basis mismatch");
  const Collocation& grid = basis.norm_grid();
  const ModalState rate = galerkin_rhs(ms, basis, prm);

  LadderTerms lt;
  lt.t = ms.time;
  const auto& lam = basis.eigenvalues();
  for (std::size_t j = 0; j < M; ++j) {
    const double v = ms.coef[M + j], z = ms.coef[4 * M + j];
    const double ph = ms.coef[2 * M + j], ps = ms.coef[5 * M + j];
    const double u = ms.coef[j], w = ms.coef[3 * M + j];
    lt.l2_vz += v * v + z * z;
    lt.l2_uw += u * u + w * w;
    lt.h1_vz += lam[j] * (v * v + z * z);
    lt.h1_phipsi += lam[j] * (ph * ph + ps * ps);
    lt.ddt_l2_vz += 2.0 * (v * rate.coef[M + j] + z * rate.coef[4 * M + j]);
    lt.ddt_h1_phipsi +=
        2.0 * lam[j] * (ph * rate.coef[2 * M + j] + ps * rate.coef[5 * M + j]);
  }

  std::vector<double> u, v, w, z, vt, zt, g;
  basis.to_grid(ms.block(0), grid, u);
  basis.to_grid(ms.block(1), grid, v);
  basis.to_grid(ms.block(3), grid, w);
  basis.to_grid(ms.block(4), grid, z);
  basis.to_grid(rate.block(1), grid, vt);
  basis.to_grid(rate.block(4), grid, zt);
  std::vector<double> gv2(grid.size, 0.0), gz2(grid.size, 0.0);
  for (int ax = 0; ax < basis.dim(); ++ax) {
    basis.gradient_to_grid(ms.block(1), ax, grid, g);
    for (std::size_t i = 0; i < grid.size; ++i) gv2[i] += g[i] * g[i];
    basis.gradient_to_grid(ms.block(4), ax, grid, g);
    for (std::size_t i = 0; i < grid.size; ++i) gz2[i] += g[i] * g[i];
  }

  const double b = prm.b(), D2 = prm.D2();
  double l4 = 0, l6 = 0, d4 = 0, d6 = 0, s2 = 0, s3 = 0, e = 0;
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double vi = v[i], zi = z[i];
    const double v2 = vi * vi, z2 = zi * zi;
    l4 += v2 * v2 + z2 * z2;
    l6 += v2 * v2 * v2 + z2 * z2 * z2;
    d4 += 4.0 * (v2 * vi * vt[i] + z2 * zi * zt[i]);
    d6 += 6.0 * (v2 * v2 * vi * vt[i] + z2 * z2 * zi * zt[i]);
    s2 += 4.0 * (v2 * gv2[i] + z2 * gz2[i]);
    s3 += 9.0 * (v2 * v2 * gv2[i] + z2 * z2 * gz2[i]);
    const double uv = u[i] * vi, wz = w[i] * zi;
    e += -uv * uv + b * uv - wz * wz + b * wz - D2 * (vi - zi) * (vi - zi);
  }
  const double h = grid.cell_volume;
  lt.l4_vz = h * l4;
  lt.l6_vz = h * l6;
  lt.ddt_l4_vz = h * d4;
  lt.ddt_l6_vz = h * d6;
  lt.grad_sq2 = h * s2;
  lt.grad_sq3 = h * s3;
  lt.energy_integral = h * e;
  return lt;
}

bool ResidualReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ResidualCheck& c) { return c.pass; });
}

ResidualReport inequality_residuals(const Trajectory& traj, const SineBasis& basis,
                                    const Parameters& prm, double K1, double tol_rel,
                                    double tol_abs) {
  const auto& st = traj.states;
  if (st.size() < 3) {
    throw Error("bounds", "inequality residuals need at least 3 stored states (set store_every)");
  }
  std::vector<LadderTerms> lt;
  lt.reserve(st.size());
  for (const auto& s : st) lt.push_back(ladder_terms(s, basis, prm));
  for (std::size_t i = 1; i < st.size(); ++i) {
    if (!(st[i].time > st[i - 1].time)) throw Error("bounds", "stored states are not time-ordered");
  }

  const double vol = basis.volume();
  const double b2 = prm.b() * prm.b();
  ResidualReport rep;
  rep.checks = {{"energy_vz"}, {"ladder_l4"}, {"ladder_l6"}, {"gradient_phipsi"}};
  for (auto& c : rep.checks) c.tol_rel = tol_rel;

  auto apply = [&](ResidualCheck& c, double lhs, double rhs) {
    ++c.evaluated;
    const double ex = lhs - rhs;
    const double ratio = rhs != 0.0 ? ex / std::abs(rhs) : (ex > 0 ? INFINITY : 0.0);
    if (c.evaluated == 1 || ex > c.max_excess) c.max_excess = ex;
    if (c.evaluated == 1 || ratio > c.worst_ratio) {
      c.worst_ratio = ratio;
      c.rhs_at_worst = rhs;
    }
    if (!(ex <= tol_abs + tol_rel * std::abs(rhs))) c.pass = false;
  };

  for (std::size_t i = 1; i + 1 < st.size(); ++i) {
    const double h1 = st[i].time - st[i - 1].time;
    const double h2 = st[i + 1].time - st[i].time;
    const double cm = -h2 / (h1 * (h1 + h2));
    const double c0 = (h2 - h1) / (h1 * h2);
    const double cp = h1 / (h2 * (h1 + h2));
    auto ddt = [&](double LadderTerms::*f) {
      return cm * lt[i - 1].*f + c0 * lt[i].*f + cp * lt[i + 1].*f;
    };
    const LadderTerms& x = lt[i];
    rep.times.push_back(x.t);
    apply(rep.checks[0], 0.5 * ddt(&LadderTerms::l2_vz) + prm.d2() * x.h1_vz, 0.5 * b2 * vol);
    apply(rep.checks[1], ddt(&LadderTerms::l4_vz) + 3.0 * prm.d2() * x.grad_sq2,
          2.0 * b2 * x.l2_vz);
    apply(rep.checks[2], ddt(&LadderTerms::l6_vz) + (10.0 / 3.0) * prm.d2() * x.grad_sq3,
          3.0 * b2 * x.l4_vz);
    if (x.l2_uw <= K1) {
      apply(rep.checks[3],
            ddt(&LadderTerms::h1_phipsi) + 2.0 * (prm.lambda() + prm.N()) * x.h1_phipsi,
            prm.k() * prm.k() * K1 / (2.0 * prm.d3()));
    }
  }
  return rep;
}

}  // namespace ebrus
