#pragma once

#include <vector>

#include "ebrus/bounds.hpp"
#include "ebrus/integrate.hpp"
#include "ebrus/magnitude.hpp"
#include "ebrus/spectral.hpp"

namespace ebrus {

/// diag(-d_i lambda_j) G + P [f'(base) G].
ModalState tangent_rhs(const ModalState& base, const ModalState& G, const SineBasis& basis,
                       const Parameters& prm);

/// Base state and tangent directions advanced together with the exact
/// linearization of the integrating-factor scheme (fixed dt per base step,
/// subdivided dyadically like Stepper when cfg.adaptive is set).
class TangentStepper {
 public:
  TangentStepper(const SineBasis& basis, const Parameters& prm, const IntegratorConfig& cfg);

  void step(ModalState& base, std::vector<ModalState>& tangents, double h);

 private:
  void substep(std::vector<double>& q, std::vector<ModalState>& tangents, double h);

  const SineBasis& basis_;
  Parameters prm_;
  IntegratorConfig cfg_;
  Galerkin gal_;
  std::vector<double> E_, Eh_;
  double cached_h_ = -1.0;
  std::vector<std::vector<double>> stages_;
  std::vector<double> tmp_;
  std::vector<std::vector<double>> dk_;
};

/// Propagates g0 and one direction G for cfg.t_end; returns (S(T) g0, DS G).
std::pair<ModalState, ModalState> propagate_tangent(const ModalState& g0, const ModalState& G,
                                                    const SineBasis& basis,
                                                    const Parameters& prm,
                                                    const IntegratorConfig& cfg);

struct TangentConfig {
  int m = 24;               ///< number of tangent directions
  int renorm_every = 10;    ///< base steps between QR renormalizations
  double discard_time = 0;  ///< transient excluded from all averages
  std::uint64_t seed = 7;   ///< initial frame
};

struct LyapunovReport {
  std::vector<double> exponents;            ///< descending
  std::vector<double> qm;                   ///< time-averaged traces, m = 1..m
  std::vector<double> qm_first, qm_second;  ///< halves of the averaging window
  int m_star = 0;                           ///< smallest m with q_m < 0 (0: none)
  double kaplan_yorke = 0.0;
  double averaging_time = 0.0;
  std::size_t renormalizations = 0;
  int renorm_every = 0;
  double min_log_diag = 0.0;  ///< smallest log R_ii seen
  std::vector<double> history_times;
  std::vector<std::vector<double>> history;  ///< running exponents
};

/// Co-evolves m tangents with the base flow from g0 for cfg.t_end and
/// QR-renormalizes every renorm_every steps.
LyapunovReport evolve_tangents(const ModalState& g0, const SineBasis& basis,
                               const Parameters& prm, const IntegratorConfig& cfg,
                               const TangentConfig& tc);

/// Sum over j of <(A + f'(base)) zeta_j, zeta_j>. The zetas must be
/// orthonormal to 1e-8.
double trace_qm(const ModalState& base, const std::vector<ModalState>& zetas,
                const SineBasis& basis, const Parameters& prm);

/// Ensemble maximum of q_m per m (a lower witness of the sup over data).
struct QmSummary {
  std::vector<double> qm;
  int m_star = 0;
  std::size_t runs = 0;
};
QmSummary qm_average(const std::vector<LyapunovReport>& reports);

/// Kaplan-Yorke dimension from descending exponents.
double kaplan_yorke(const std::vector<double>& exponents);

/// max_s>=0 K s^{n/4} - (d0/2) s with K = 5 delta (Q1+Q2) C^2.
Magnitude q3_constant(int n, double delta, double c_gn, const Magnitude& q1_plus_q2, double d0);
/// Same maximum by direct 1-D search for a representable K (test oracle).
double q3_numeric(int n, double K, double d0);

struct DimensionBound {
  Magnitude B;   ///< (2 (Q3 + b + k) / (d0 Q*))^{n/2} |Omega|
  Magnitude m;   ///< floor(B) + 1
  Magnitude dH;  ///< = m
  Magnitude dF;  ///< = 2m
  Magnitude Q3;
  double Qstar = 1.0;
};

DimensionBound analytic_dimension_bound(const Parameters& prm, int n, double volume,
                                        double Qstar, const Magnitude& Q3);

}  // namespace ebrus
