#include "ebrus/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ebrus/error.hpp"

namespace ebrus {

namespace {

constexpr double kPi = std::numbers::pi;

double axis_mode(double L, int j, double x) {
  return std::sqrt(2.0 / L) * std::sin(j * kPi * x / L);
}

}  // namespace

double DomainSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= lengths[a];
  return v;
}

void DomainSpec::validate() const {
  if (dim < 1 || dim > 3) throw Error("spectral", "domain dimension must be 1, 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw Error("spectral", "domain lengths must be positive and finite");
    }
  }
}

SineBasis::SineBasis(const DomainSpec& domain, int modes_per_axis)
    : domain_(domain), modes_per_axis_(modes_per_axis) {
  domain_.validate();
  if (modes_per_axis < 1) throw Error("spectral", "modes per axis must be >= 1");
  for (int a = domain_.dim; a < 3; ++a) domain_.lengths[a] = 1.0;
  volume_ = domain_.volume();

  double total = 1.0;
  for (int a = 0; a < domain_.dim; ++a) total *= modes_per_axis;
  if (total > static_cast<double>(kMaxModes)) {
    throw Error("spectral", "requested " + std::to_string(static_cast<long long>(total)) +
                                " modes exceeds the memory budget of " +
                                std::to_string(kMaxModes));
  }
  const auto count = static_cast<std::size_t>(total);
  const int M = modes_per_axis;

  struct Entry {
    double lambda;
    std::array<int, 3> idx;
    std::size_t offset;
  };
  std::vector<Entry> entries;
  entries.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    std::array<int, 3> idx{1, 1, 1};
    std::size_t rem = t;
    for (int a = domain_.dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % M) + 1;
      rem /= M;
    }
    std::array<double, 3> terms{0.0, 0.0, 0.0};
    for (int a = 0; a < domain_.dim; ++a) {
      const double q = idx[a] / domain_.lengths[a];
      terms[a] = q * q;
    }
    // Summing sorted terms makes permuted tuples on equal sides tie exactly.
    std::sort(terms.begin(), terms.begin() + domain_.dim);
    const double s = std::accumulate(terms.begin(), terms.begin() + domain_.dim, 0.0);
    entries.push_back({kPi * kPi * s, idx, t});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.lambda != y.lambda) return x.lambda < y.lambda;
    return x.idx < y.idx;
  });

  eigenvalues_.reserve(count);
  indices_.reserve(count);
  tensor_offset_.reserve(count);
  mean_projection_.reserve(count);
  for (const auto& e : entries) {
    eigenvalues_.push_back(e.lambda);
    indices_.push_back(e.idx);
    tensor_offset_.push_back(e.offset);
    double mean = 1.0;
    for (int a = 0; a < domain_.dim; ++a) {
      const int j = e.idx[a];
      const double L = domain_.lengths[a];
      mean *= (j % 2 == 1) ? std::sqrt(2.0 / L) * 2.0 * L / (j * kPi) : 0.0;
    }
    mean_projection_.push_back(mean);
  }

  dealias_ = make_collocation(2 * M + 1);
  norm_ = make_collocation(3 * M + 1);
}

Collocation SineBasis::make_collocation(int points) const {
  if (points < modes_per_axis_) {
    throw Error("spectral", "collocation grid must have at least as many points as modes");
  }
  Collocation c;
  c.points = points;
  c.modes = modes_per_axis_;
  c.dim = domain_.dim;
  c.size = 1;
  c.cell_volume = 1.0;
  const int M = modes_per_axis_;
  for (int a = 0; a < domain_.dim; ++a) {
    const double L = domain_.lengths[a];
    const double h = L / (points + 1);
    c.size *= static_cast<std::size_t>(points);
    c.cell_volume *= h;
    c.nodes[a].resize(points);
    c.synth[a].assign(static_cast<std::size_t>(points) * M, 0.0);
    c.analysis[a].assign(static_cast<std::size_t>(points) * M, 0.0);
    c.deriv[a].assign(static_cast<std::size_t>(points) * M, 0.0);
    const double norm = std::sqrt(2.0 / L);
    for (int i = 0; i < points; ++i) {
      c.nodes[a][i] = (i + 1) * h;
      for (int j = 0; j < M; ++j) {
        // Exact integer phase keeps the discrete orthogonality sharp.
        const double phase = kPi * static_cast<double>((j + 1) * (i + 1)) / (points + 1);
        const double s = norm * std::sin(phase);
        c.synth[a][static_cast<std::size_t>(i) * M + j] = s;
        c.analysis[a][static_cast<std::size_t>(j) * points + i] = h * s;
        c.deriv[a][static_cast<std::size_t>(i) * M + j] =
            norm * ((j + 1) * kPi / L) * std::cos(phase);
      }
    }
  }
  return c;
}

void SineBasis::apply_axes(const double* in, const std::array<int, 3>& in_shape,
                           const std::array<const std::vector<double>*, 3>& mats,
                           const std::array<int, 3>& out_shape, std::vector<double>& out) const {
  const int dim = domain_.dim;
  std::array<int, 3> shape = in_shape;
  std::vector<double> cur(in, in + static_cast<std::size_t>(shape[0]) * shape[1] * shape[2]);
  std::vector<double> next;
  for (int a = 0; a < dim; ++a) {
    const int n_in = shape[a];
    const int n_out = out_shape[a];
    std::size_t outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < 3; ++b) inner *= shape[b];
    next.assign(outer * n_out * inner, 0.0);
    const std::vector<double>& m = *mats[a];
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = cur.data() + o * n_in * inner;
      double* dst = next.data() + o * n_out * inner;
      for (int r = 0; r < n_out; ++r) {
        const double* row = m.data() + static_cast<std::size_t>(r) * n_in;
        double* drow = dst + r * inner;
        for (int i = 0; i < n_in; ++i) {
          const double w = row[i];
          const double* srow = src + i * inner;
          for (std::size_t s = 0; s < inner; ++s) drow[s] += w * srow[s];
        }
      }
    }
    shape[a] = n_out;
    cur.swap(next);
  }
  out.swap(cur);
}

void SineBasis::to_grid(std::span<const double> modal, const Collocation& grid,
                        std::vector<double>& out) const {
  if (modal.size() != mode_count()) throw Error("spectral", "to_grid: modal size mismatch");
  const int M = modes_per_axis_;
  if (domain_.dim == 1) {
    const int P = grid.points;
    out.assign(P, 0.0);
    const double* S = grid.synth[0].data();
    for (int i = 0; i < P; ++i) {
      const double* row = S + static_cast<std::size_t>(i) * M;
      double acc = 0.0;
      for (int j = 0; j < M; ++j) acc += row[j] * modal[j];
      out[i] = acc;
    }
    return;
  }
  std::vector<double> tensor(mode_count(), 0.0);
  for (std::size_t k = 0; k < mode_count(); ++k) tensor[tensor_offset_[k]] = modal[k];
  std::array<int, 3> in_shape{1, 1, 1}, out_shape{1, 1, 1};
  std::array<const std::vector<double>*, 3> mats{};
  for (int a = 0; a < domain_.dim; ++a) {
    in_shape[a] = M;
    out_shape[a] = grid.points;
    mats[a] = &grid.synth[a];
  }
  apply_axes(tensor.data(), in_shape, mats, out_shape, out);
}

void SineBasis::gradient_to_grid(std::span<const double> modal, int axis,
                                 const Collocation& grid, std::vector<double>& out) const {
  if (modal.size() != mode_count()) throw Error("spectral", "gradient: modal size mismatch");
  if (axis < 0 || axis >= domain_.dim) throw Error("spectral", "gradient: bad axis");
  const int M = modes_per_axis_;
  std::vector<double> tensor(mode_count(), 0.0);
  for (std::size_t k = 0; k < mode_count(); ++k) tensor[tensor_offset_[k]] = modal[k];
  std::array<int, 3> in_shape{1, 1, 1}, out_shape{1, 1, 1};
  std::array<const std::vector<double>*, 3> mats{};
  for (int a = 0; a < domain_.dim; ++a) {
    in_shape[a] = M;
    out_shape[a] = grid.points;
    mats[a] = a == axis ? &grid.deriv[a] : &grid.synth[a];
  }
  apply_axes(tensor.data(), in_shape, mats, out_shape, out);
}

void SineBasis::to_modes(std::span<const double> field, const Collocation& grid,
                         std::vector<double>& out) const {
  if (field.size() != grid.size) throw Error("spectral", "to_modes: grid size mismatch");
  const int M = modes_per_axis_;
  if (domain_.dim == 1) {
    const int P = grid.points;
    out.assign(M, 0.0);
    const double* A = grid.analysis[0].data();
    for (int j = 0; j < M; ++j) {
      const double* row = A + static_cast<std::size_t>(j) * P;
      double acc = 0.0;
      for (int i = 0; i < P; ++i) acc += row[i] * field[i];
      out[j] = acc;
    }
    return;
  }
  std::array<int, 3> in_shape{1, 1, 1}, out_shape{1, 1, 1};
  std::array<const std::vector<double>*, 3> mats{};
  for (int a = 0; a < domain_.dim; ++a) {
    in_shape[a] = grid.points;
    out_shape[a] = M;
    mats[a] = &grid.analysis[a];
  }
  std::vector<double> tensor;
  apply_axes(field.data(), in_shape, mats, out_shape, tensor);
  out.resize(mode_count());
  for (std::size_t k = 0; k < mode_count(); ++k) out[k] = tensor[tensor_offset_[k]];
}

double SineBasis::evaluate(std::span<const double> modal, const std::array<double, 3>& x) const {
  if (modal.size() != mode_count()) throw Error("spectral", "evaluate: modal size mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < mode_count(); ++k) {
    double e = 1.0;
    for (int a = 0; a < domain_.dim; ++a) e *= axis_mode(domain_.lengths[a], indices_[k][a], x[a]);
    acc += modal[k] * e;
  }
  return acc;
}

GridState to_grid(const ModalState& ms, const SineBasis& basis, const Collocation& grid) {
  if (ms.modes() != basis.mode_count()) throw Error("spectral", "to_grid: state/basis mismatch");
  GridState gs(grid.size);
  std::vector<double> buf;
  for (int c = 0; c < kComponents; ++c) {
    basis.to_grid(ms.block(c), grid, buf);
    std::copy(buf.begin(), buf.end(), gs.block(c).begin());
  }
  return gs;
}

ModalState to_modes(const GridState& gs, const SineBasis& basis, const Collocation& grid) {
  if (gs.points != grid.size) throw Error("spectral", "to_modes: grid size mismatch");
  ModalState ms(basis.mode_count());
  std::vector<double> buf;
  for (int c = 0; c < kComponents; ++c) {
    basis.to_modes(gs.block(c), grid, buf);
    std::copy(buf.begin(), buf.end(), ms.block(c).begin());
  }
  return ms;
}

// ---- Galerkin evaluator -----------------------------------------------------

Galerkin::Galerkin(const SineBasis& basis, const Parameters& prm) : basis_(&basis), prm_(prm) {
  const std::size_t P = basis.dealias_grid().size;
  grid_.assign(kComponents * P, 0.0);
  base_grid_.assign(kComponents * P, 0.0);
  rate_.assign(kComponents * P, 0.0);
}

double Galerkin::nonlinear(std::span<const double> q, std::span<double> out) {
  const SineBasis& B = *basis_;
  const Collocation& G = B.dealias_grid();
  const std::size_t M = B.mode_count();
  const std::size_t P = G.size;
  if (q.size() != kComponents * M || out.size() != kComponents * M) {
    throw Error("spectral", "nonlinear: state size mismatch");
  }
  for (int c = 0; c < kComponents; ++c) {
    B.to_grid(q.subspan(c * M, M), G, tmp_);
    std::copy(tmp_.begin(), tmp_.end(), grid_.begin() + c * P);
  }
  const double* u = grid_.data();
  const double* v = u + P;
  const double* ph = v + P;
  const double* w = ph + P;
  const double* z = w + P;
  const double* ps = z + P;
  double jnorm = 0.0;
  double r[6];
  for (std::size_t i = 0; i < P; ++i) {
    detail::reaction_without_feed(prm_, u[i], v[i], ph[i], w[i], z[i], ps[i], r);
    for (int c = 0; c < kComponents; ++c) rate_[c * P + i] = r[c];
    jnorm = std::max(jnorm, detail::jacobian_row_norm(prm_, u[i], v[i], w[i], z[i]));
  }
  for (int c = 0; c < kComponents; ++c) {
    B.to_modes(std::span<const double>(rate_.data() + c * P, P), G, modal_tmp_);
    std::copy(modal_tmp_.begin(), modal_tmp_.end(), out.begin() + c * M);
  }
  const auto& mean = B.mean_projection();
  for (std::size_t k = 0; k < M; ++k) {
    out[k] += prm_.a() * mean[k];
    out[3 * M + k] += prm_.a() * mean[k];
  }
  return jnorm;
}

void Galerkin::set_base(std::span<const double> q) {
  const SineBasis& B = *basis_;
  const Collocation& G = B.dealias_grid();
  const std::size_t M = B.mode_count();
  const std::size_t P = G.size;
  if (q.size() != kComponents * M) throw Error("spectral", "set_base: state size mismatch");
  for (int c = 0; c < kComponents; ++c) {
    B.to_grid(q.subspan(c * M, M), G, tmp_);
    std::copy(tmp_.begin(), tmp_.end(), base_grid_.begin() + c * P);
  }
}

void Galerkin::jacobian_action(std::span<const double> Gm, std::span<double> out) {
  const SineBasis& B = *basis_;
  const Collocation& G = B.dealias_grid();
  const std::size_t M = B.mode_count();
  const std::size_t P = G.size;
  if (Gm.size() != kComponents * M || out.size() != kComponents * M) {
    throw Error("spectral", "jacobian_action: size mismatch");
  }
  for (int c = 0; c < kComponents; ++c) {
    B.to_grid(Gm.subspan(c * M, M), G, tmp_);
    std::copy(tmp_.begin(), tmp_.end(), grid_.begin() + c * P);
  }
  const double bk = prm_.b() + prm_.k();
  const double ln = prm_.lambda() + prm_.N();
  const double* u = base_grid_.data();
  const double* v = u + P;
  const double* w = u + 3 * P;
  const double* z = u + 4 * P;
  const double* g = grid_.data();
  for (std::size_t i = 0; i < P; ++i) {
    const double U = g[i], V = g[P + i], Ph = g[2 * P + i];
    const double W = g[3 * P + i], Z = g[4 * P + i], Ps = g[5 * P + i];
    const double uv2 = 2 * u[i] * v[i], uu = u[i] * u[i];
    const double wz2 = 2 * w[i] * z[i], ww = w[i] * w[i];
    rate_[i] = uv2 * U + uu * V - bk * U + prm_.D1() * (W - U) + prm_.N() * Ph;
    rate_[P + i] = -uv2 * U - uu * V + prm_.b() * U + prm_.D2() * (Z - V);
    rate_[2 * P + i] = prm_.k() * U - ln * Ph + prm_.D3() * (Ps - Ph);
    rate_[3 * P + i] = wz2 * W + ww * Z - bk * W + prm_.D1() * (U - W) + prm_.N() * Ps;
    rate_[4 * P + i] = -wz2 * W - ww * Z + prm_.b() * W + prm_.D2() * (V - Z);
    rate_[5 * P + i] = prm_.k() * W - ln * Ps + prm_.D3() * (Ph - Ps);
  }
  for (int c = 0; c < kComponents; ++c) {
    B.to_modes(std::span<const double>(rate_.data() + c * P, P), G, modal_tmp_);
    std::copy(modal_tmp_.begin(), modal_tmp_.end(), out.begin() + c * M);
  }
}

void Galerkin::diffusion(std::span<const double> q, std::span<double> out) const {
  const std::size_t M = basis_->mode_count();
  const auto& lam = basis_->eigenvalues();
  for (int c = 0; c < kComponents; ++c) {
    const double dc = prm_.diffusivity(c);
    for (std::size_t k = 0; k < M; ++k) out[c * M + k] = -dc * lam[k] * q[c * M + k];
  }
}

ModalState nonlinear_galerkin(const ModalState& ms, const SineBasis& basis,
                              const Parameters& prm) {
  if (ms.modes() != basis.mode_count()) {
    throw Error("spectral", "nonlinear_galerkin: state/basis mismatch");
  }
  Galerkin g(basis, prm);
  ModalState out(basis.mode_count());
  out.time = ms.time;
  g.nonlinear(ms.coef, out.coef);
  return out;
}

// ---- norms ------------------------------------------------------------------

NormReport norms(const ModalState& ms, const SineBasis& basis) {
  if (ms.modes() != basis.mode_count()) throw Error("spectral", "norms: state/basis mismatch");
  NormReport r;
  r.time = ms.time;
  const std::size_t M = basis.mode_count();
  const auto& lam = basis.eigenvalues();
  for (int c = 0; c < kComponents; ++c) {
    const auto b = ms.block(c);
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      l2 += b[k] * b[k];
      h1 += lam[k] * b[k] * b[k];
    }
    r.l2[c] = l2;
    r.h1[c] = h1;
  }
  const auto u = ms.block(0), v = ms.block(1), ph = ms.block(2);
  const auto w = ms.block(3), z = ms.block(4), ps = ms.block(5);
  for (std::size_t k = 0; k < M; ++k) {
    const double y = u[k] + v[k] + w[k] + z[k];
    const double xi = ph[k] + ps[k];
    const double p = u[k] + v[k] - w[k] - z[k];
    const double th = ph[k] - ps[k];
    r.y2 += y * y;
    r.xi2 += xi * xi;
    r.p2 += p * p;
    r.theta2 += th * th;
  }
  const Collocation& G = basis.norm_grid();
  std::vector<double> buf;
  for (int c = 0; c < kComponents; ++c) {
    basis.to_grid(ms.block(c), G, buf);
    double s4 = 0.0, s6 = 0.0;
    for (double x : buf) {
      const double x2 = x * x;
      s4 += x2 * x2;
      s6 += x2 * x2 * x2;
      r.sup = std::max(r.sup, std::abs(x));
    }
    r.l4[c] = s4 * G.cell_volume;
    r.l6[c] = s6 * G.cell_volume;
  }
  return r;
}

}  // namespace ebrus
