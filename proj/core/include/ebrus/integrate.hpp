#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ebrus/model.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

/// Integrating-factor schemes: diffusion is integrated exactly, the reaction
/// term explicitly (Euler, midpoint, or classical RK4 in the transformed
/// variable).
enum class Scheme { IfEuler, IfRk2, IfRk4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct IntegratorConfig {
  double dt = 0.01;
  Scheme scheme = Scheme::IfRk2;
  double t_end = 1.0;
  int sample_every = 10;  ///< base steps between NormReport samples
  int store_every = 0;    ///< base steps between stored states (0: none)
  bool adaptive = true;   ///< dyadic substeps when dt * ||f'|| > safety
  double safety = 0.1;

  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

struct Trajectory {
  std::vector<NormReport> samples;
  std::vector<ModalState> states;  ///< stored checkpoints (store_every)
  ModalState initial;
  ModalState final_state;
  std::size_t substeps = 0;  ///< total number of (sub)steps taken
};

/// diag(-d_i lambda_j) q + P f(q).
ModalState galerkin_rhs(const ModalState& ms, const SineBasis& basis, const Parameters& prm);

/// Single-trajectory integrator with cached integrating factors.
class Stepper {
 public:
  Stepper(const SineBasis& basis, const Parameters& prm, const IntegratorConfig& cfg);

  /// Advances by one base step cfg.dt (or `h` if given), subdividing when
  /// the adaptive policy asks for it. Throws BlowUpError on non-finite output.
  void step(ModalState& ms, std::optional<double> h = std::nullopt);

  /// One fixed step of size h with no adaptivity or finiteness checks.
  void raw_step(std::vector<double>& q, double h);

  std::size_t substeps() const noexcept { return substeps_; }
  Galerkin& galerkin() noexcept { return galerkin_; }
  const IntegratorConfig& config() const noexcept { return cfg_; }

 private:
  struct Factors {
    double h = 0;
    std::vector<double> full, half;
  };
  const Factors& factors(double h);

  const SineBasis& basis_;
  Parameters prm_;
  IntegratorConfig cfg_;
  Galerkin galerkin_;
  std::vector<Factors> cache_;
  std::vector<double> n0_, save_;
  double last_jnorm_ = 0.0;
  std::size_t substeps_ = 0;
};

/// Advances ms by one step of cfg (see Stepper::step).
ModalState step(const ModalState& ms, const SineBasis& basis, const Parameters& prm,
                const IntegratorConfig& cfg);

/// Integrates from g0 (time taken from g0.time) for cfg.t_end time units.
Trajectory simulate(const ModalState& g0, const SineBasis& basis, const Parameters& prm,
                    const IntegratorConfig& cfg);

// ---- finite-difference oracle ---------------------------------------------

struct FdGrid {
  int nodes = 257;  ///< including both boundary nodes
  double length = 0.0;
  std::vector<double> x;  ///< interior node positions
};

struct FdTrajectory {
  FdGrid grid;
  std::vector<double> times;
  /// Interior values per component at the final time, block-major.
  std::vector<double> final_values;
  /// ||v||^2 + ||z||^2 (trapezoid) at each time.
  std::vector<double> v2z2;
};

/// Method-of-lines reference on a uniform grid (1-D only): second-order
/// centered Laplacian, pointwise reaction, same integrating-factor scheme on
/// the diagonalized FD operator. Independent of the sine-basis code.
FdTrajectory fd_reference_simulate(const std::vector<double>& initial_interior, int nodes,
                                   const DomainSpec& domain, const Parameters& prm,
                                   const IntegratorConfig& cfg);

}  // namespace ebrus
