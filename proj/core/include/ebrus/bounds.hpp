#pragma once

#include <string>
#include <vector>

#include "ebrus/integrate.hpp"
#include "ebrus/magnitude.hpp"
#include "ebrus/model.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

/// Basis-dependent inputs of the bound formulas.
struct BasisConstants {
  int dim = 1;
  double gamma = 1.0;   ///< smallest Dirichlet eigenvalue
  double volume = 0.0;  ///< |Omega|
  double delta = 0.0;   ///< L4 embedding constant (squared form)
  double eta = 0.0;     ///< L6 embedding constant (squared form)

  static BasisConstants from(const SineBasis& basis, const EmbeddingConstants& ec);
};

struct BoundEntry {
  std::string name;
  Magnitude value;
  std::string formula;
};

/// Closed-form absorbing-set constants.
struct BoundSet {
  Coefficients coefficients;
  BasisConstants inputs;

  double R0 = 0, R1 = 0, R2 = 0, K1 = 0;  // L2 absorption
  double K2 = 0, K3 = 0;                  // L4, L6 absorption
  double C14 = 0, C15 = 0, C16 = 0, C18 = 0;
  Magnitude Q1, C17, Q2;                  // H1 bounds
  /// Allowed tail growth of the grid sup-norm (no closed form exists).
  double sup_factor = 1.5;
  /// Product of all factors applied through scaled().
  double scale = 1.0;

  /// Every entry with the formula it was computed from, in a fixed order.
  std::vector<BoundEntry> entries() const;
  /// Copy with every bound multiplied by `factor` (negative control).
  BoundSet scaled(double factor) const;
};

BoundSet compute_bound_set(const Parameters& prm, const BasisConstants& bc);

/// |e^{-2 gamma d2 t} - e^{-gamma d t}| / |gamma (d1 - 2 d2)|, or
/// t e^{-gamma d t} when d1 == 2 d2.
double beta(double t, const Parameters& prm, double gamma);

/// e^{-2 gamma d2 t} (|v0|^2 + |z0|^2) + b^2 |Omega| / (2 gamma d2).
double transient_envelope_vz(double v0z0, const Parameters& prm, double gamma, double volume,
                             double t);

struct BoundVerdict {
  std::string name;
  std::string observable;
  double t_tail = 0.0;
  double t_end = 0.0;
  double observed = 0.0;  ///< tail maximum (worst over an ensemble)
  Magnitude bound;
  double margin = 0.0;  ///< observed / bound (0 when the bound overflows)
  int runs = 1;
  int violations = 0;
  bool pass = true;
};

/// Tail-window verdicts for R0, R1, R2, K1, K2, K3, Q1, Q2 and the sup-norm.
std::vector<BoundVerdict> verify_absorption(const Trajectory& traj, const BoundSet& bs,
                                            double tail_fraction = 0.4, double tol = 0.0);

/// Pointwise-in-time check of the (v, z) envelope; `observed` is the worst
/// ratio |(v,z)|^2 / envelope over all samples and the bound is 1.
BoundVerdict verify_envelope(const Trajectory& traj, const Parameters& prm, double gamma,
                             double volume, double tol = 0.05);

/// Worst case per verdict name over an ensemble of runs.
std::vector<BoundVerdict> merge_verdicts(const std::vector<std::vector<BoundVerdict>>& runs);

// ---- differential inequalities along stored states ---------------------

/// Instantaneous terms of the energy ladders at one state, from the exact
/// Galerkin time derivative.
struct LadderTerms {
  double t = 0.0;
  double l2_vz = 0, h1_vz = 0, l4_vz = 0, l6_vz = 0;
  double l2_uw = 0, h1_phipsi = 0;
  double grad_sq2 = 0;  ///< |grad v^2|^2 + |grad z^2|^2
  double grad_sq3 = 0;  ///< |grad v^3|^2 + |grad z^3|^2
  double ddt_l2_vz = 0, ddt_l4_vz = 0, ddt_l6_vz = 0, ddt_h1_phipsi = 0;
  /// Right-hand integral of the (v, z) energy identity:
  /// int -u^2v^2 + buv - w^2z^2 + bwz - D2 (v - z)^2.
  double energy_integral = 0;
};

LadderTerms ladder_terms(const ModalState& ms, const SineBasis& basis, const Parameters& prm);

struct ResidualCheck {
  std::string name;
  std::size_t evaluated = 0;  ///< states where the inequality was tested
  double max_excess = 0.0;    ///< max of lhs - rhs
  double worst_ratio = 0.0;   ///< max of (lhs - rhs) / rhs
  double rhs_at_worst = 0.0;
  double tol_rel = 0.05;
  bool pass = true;
};

struct ResidualReport {
  std::vector<ResidualCheck> checks;
  std::vector<double> times;  ///< interior stored-state times
  bool pass() const;
};

/// Differential inequalities (v, z energy, L4 and L6 ladders, phi/psi
/// gradient) with time derivatives taken by central differences of the
/// stored states. Needs at least three stored states.
ResidualReport inequality_residuals(const Trajectory& traj, const SineBasis& basis,
                                    const Parameters& prm, double K1, double tol_rel = 0.05,
                                    double tol_abs = 1e-12);

}  // namespace ebrus
