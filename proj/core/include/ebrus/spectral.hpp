#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ebrus/model.hpp"

namespace ebrus {

inline constexpr int kComponents = 6;

/// Box (0, L1) x ... x (0, Ln), n <= 3, with homogeneous Dirichlet walls.
struct DomainSpec {
  int dim = 1;
  std::array<double, 3> lengths{std::numbers::pi, std::numbers::pi, std::numbers::pi};

  double volume() const;
  void validate() const;
  bool operator==(const DomainSpec&) const = default;
};

/// Interior collocation points of one padded grid, with per-axis synthesis,
/// analysis and derivative matrices for the sine basis.
struct Collocation {
  int points = 0;   // interior points per axis
  int modes = 0;    // modes per axis
  int dim = 1;
  std::size_t size = 0;        // points^dim
  double cell_volume = 0.0;    // product of per-axis spacings (quadrature weight)
  std::array<std::vector<double>, 3> synth;     // points x modes: e_j(x_i)
  std::array<std::vector<double>, 3> analysis;  // modes x points: h * e_j(x_i)
  std::array<std::vector<double>, 3> deriv;     // points x modes: e_j'(x_i)
  std::array<std::vector<double>, 3> nodes;     // x_i per axis
};

/// Coefficients of the six components in the sine basis, block-major:
/// coef[c * modes + k] is the k-th (eigenvalue-sorted) mode of component c.
struct ModalState {
  std::vector<double> coef;
  double time = 0.0;

  ModalState() = default;
  explicit ModalState(std::size_t modes) : coef(kComponents * modes, 0.0) {}

  std::size_t modes() const { return coef.size() / kComponents; }
  std::span<double> block(int c) { return {coef.data() + c * modes(), modes()}; }
  std::span<const double> block(int c) const { return {coef.data() + c * modes(), modes()}; }
  bool operator==(const ModalState&) const = default;
};

/// Grid values of the six components, block-major like ModalState.
struct GridState {
  std::vector<double> values;
  std::size_t points = 0;

  GridState() = default;
  explicit GridState(std::size_t n) : values(kComponents * n, 0.0), points(n) {}
  std::span<double> block(int c) { return {values.data() + c * points, points}; }
  std::span<const double> block(int c) const { return {values.data() + c * points, points}; }
};

/// Sine-basis Galerkin space on a box: tensor products of
/// sqrt(2/L) sin(j pi x / L), j = 1..M per axis, ordered by eigenvalue with
/// ties broken lexicographically on the index tuple.
class SineBasis {
 public:
  /// Resource limit on M^dim; larger requests throw.
  static constexpr std::size_t kMaxModes = std::size_t{1} << 22;

  SineBasis(const DomainSpec& domain, int modes_per_axis);

  const DomainSpec& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim; }
  int modes_per_axis() const noexcept { return modes_per_axis_; }
  std::size_t mode_count() const noexcept { return eigenvalues_.size(); }
  double volume() const noexcept { return volume_; }

  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  double eigenvalue(std::size_t k) const { return eigenvalues_[k]; }
  /// Smallest Dirichlet eigenvalue (Poincare constant).
  double gamma() const noexcept { return eigenvalues_.front(); }
  /// 1-based per-axis indices of sorted mode k.
  const std::array<int, 3>& index(std::size_t k) const { return indices_[k]; }

  /// Integral of e_k over the box, in closed form.
  const std::vector<double>& mean_projection() const noexcept { return mean_projection_; }

  /// 2M+1 points per axis: exact for products of degree <= 4 (Galerkin
  /// projection of cubic terms, Jacobian quadratic forms).
  const Collocation& dealias_grid() const noexcept { return dealias_; }
  /// 3M+1 points per axis: exact for degree-6 integrands (L6 norms).
  const Collocation& norm_grid() const noexcept { return norm_; }

  /// Builds a collocation grid with `points` interior nodes per axis.
  Collocation make_collocation(int points) const;

  // Transforms of one scalar block. Buffers are resized as needed.
  void to_grid(std::span<const double> modal, const Collocation& grid,
               std::vector<double>& out) const;
  void to_modes(std::span<const double> field, const Collocation& grid,
                std::vector<double>& out) const;
  /// Grid values of d/dx_axis of the series.
  void gradient_to_grid(std::span<const double> modal, int axis, const Collocation& grid,
                        std::vector<double>& out) const;

  /// Point evaluation of a scalar series at x (dim entries used).
  double evaluate(std::span<const double> modal, const std::array<double, 3>& x) const;

  /// Scatter sorted-mode coefficients into the M^dim tensor layout.
  std::size_t tensor_offset(std::size_t k) const { return tensor_offset_[k]; }

 private:
  void apply_axes(const double* in, const std::array<int, 3>& in_shape,
                  const std::array<const std::vector<double>*, 3>& mats,
                  const std::array<int, 3>& out_shape, std::vector<double>& out) const;

  DomainSpec domain_;
  int modes_per_axis_;
  double volume_;
  std::vector<double> eigenvalues_;
  std::vector<std::array<int, 3>> indices_;
  std::vector<std::size_t> tensor_offset_;
  std::vector<double> mean_projection_;
  Collocation dealias_;
  Collocation norm_;
};

// ---- whole-state transforms --------------------------------------------

GridState to_grid(const ModalState& ms, const SineBasis& basis, const Collocation& grid);
ModalState to_modes(const GridState& gs, const SineBasis& basis, const Collocation& grid);

/// Modal coefficients of the L2 projection of the reaction term f(g_m).
ModalState nonlinear_galerkin(const ModalState& ms, const SineBasis& basis,
                              const Parameters& prm);

/// Reusable evaluator for the projected nonlinearity and its linearization.
/// Holds scratch buffers; one instance per thread.
class Galerkin {
 public:
  Galerkin(const SineBasis& basis, const Parameters& prm);

  const SineBasis& basis() const noexcept { return *basis_; }
  const Parameters& parameters() const noexcept { return prm_; }

  /// out = P f(q). Returns the max Jacobian row norm over the dealias grid.
  double nonlinear(std::span<const double> q, std::span<double> out);

  /// Caches the base state on the dealias grid for jacobian_action.
  void set_base(std::span<const double> q);
  /// out = P [f'(base) G].
  void jacobian_action(std::span<const double> G, std::span<double> out);

  /// Applies the diagonal diffusion operator: out = -d_i lambda_j q.
  void diffusion(std::span<const double> q, std::span<double> out) const;

 private:
  const SineBasis* basis_;
  Parameters prm_;
  std::vector<double> grid_;       // 6 blocks on dealias grid
  std::vector<double> base_grid_;  // 6 blocks, cached base state
  std::vector<double> rate_;       // 6 blocks of pointwise output
  std::vector<double> tmp_;
  std::vector<double> modal_tmp_;
};

// ---- norms ----------------------------------------------------------------

struct NormReport {
  double time = 0.0;
  std::array<double, 6> l2{};   ///< ||c||^2 per component (Parseval)
  std::array<double, 6> h1{};   ///< ||grad c||^2 per component
  std::array<double, 6> l4{};   ///< integral of c^4
  std::array<double, 6> l6{};   ///< integral of c^6
  double sup = 0.0;             ///< max |c(x)| over components and grid
  double y2 = 0.0, xi2 = 0.0, p2 = 0.0, theta2 = 0.0;

  double v2z2() const { return l2[1] + l2[4]; }
  double y2xi2() const { return y2 + xi2; }
  double p2theta2() const { return p2 + theta2; }
  double g2() const { return l2[0] + l2[1] + l2[2] + l2[3] + l2[4] + l2[5]; }
  double l4_vz() const { return l4[1] + l4[4]; }
  double l6_vz() const { return l6[1] + l6[4]; }
  double h1_uw() const { return h1[0] + h1[3]; }
  double h1_vzphipsi() const { return h1[1] + h1[4] + h1[2] + h1[5]; }
};

NormReport norms(const ModalState& ms, const SineBasis& basis);

// ---- embedding constants --------------------------------------------------

struct EmbeddingConstants {
  double delta = 0.0;  ///< sup ||z||_{L4}^2 / ||grad z||^2
  double eta = 0.0;    ///< sup ||z||_{L6}^2 / ||grad z||^2
  double c_gn = 0.0;   ///< sup ||z||_{L4} / (||grad z||^{n/4} ||z||^{1-n/4})
  std::vector<double> delta_maximizer;
  std::vector<double> eta_maximizer;
  std::vector<double> c_gn_maximizer;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Ratio functionals on a scalar block (exposed for tests and reports).
double l4_ratio(std::span<const double> modal, const SineBasis& basis);
double l6_ratio(std::span<const double> modal, const SineBasis& basis);
double gn_ratio(std::span<const double> modal, const SineBasis& basis);

/// Subspace estimates (lower witnesses) of the embedding constants by random
/// search followed by gradient ascent from the best candidates.
EmbeddingConstants embedding_constants(const SineBasis& basis, std::size_t sample_budget,
                                       std::uint64_t seed = 20240601);

}  // namespace ebrus
