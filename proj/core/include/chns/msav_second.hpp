#pragma once

// Second-order MSAV step: BDF2 time derivatives, extrapolated explicit terms
// (bar_x = 2 x^n - x^{n-1}) and a rotational pressure-correction projection.
//
// The rotational projection solves
//   3(u - u~) / (2dt) + grad(p^{n+1} - p^n + nu div u~) = 0,  div u = 0,
// and the auxiliary sequence g^{n+1} = nu div u~^{n+1} + g^n, H = p + g is
// carried along for the energy audit.

#include <array>

#include "chns/msav_first.hpp"

namespace chns {

struct SchemeState2 {
  SchemeState current;   ///< level n
  SchemeState previous;  ///< level n-1
  CellField g;
  CellField H;
};

struct Extrapolants {
  CellField phi;
  MacVector u;
  CellField mu;
};

Extrapolants extrapolate(const SchemeState2& state);

/// One first-order step from t = 0, packaged as a two-level state with
/// g^1 = nu div u~^1 and H^1 = p^1 + g^1.
SchemeState2 bootstrap(const SchemeState& state0, const PhysParams& params, double dt,
                       const StepOptions& options = {});

std::pair<ChPair, ChPair> ch_substeps_bdf2(const SchemeState2& state, const Extrapolants& ext,
                                           const PhysParams& params, double dt, const Tolerances& tol = {});
std::array<MacVector, 3> velocity_substeps_bdf2(const SchemeState2& state, const Extrapolants& ext,
                                                const PhysParams& params, double dt, const Tolerances& tol = {});
/// Rotational projections with coefficient 2dt/3. p0 carries p^n; every p_i
/// has the divergence correction -nu div u~_i folded in.
ProjectedSubsteps projection_substeps_rotational(const std::array<MacVector, 3>& u_tilde, const CellField& p_n,
                                                 double viscosity, double dt, const Tolerances& tol = {});
XiSystem assemble_xi_system_bdf2(const SchemeState2& state, const Extrapolants& ext, const Substeps& substeps,
                                 const PhysParams& params, double dt,
                                 PairingQuadrature quadrature = PairingQuadrature::Consistent);

struct SecondOrderStep {
  SchemeState2 next;
  Substeps substeps;
  XiSystem system;
  double xi1 = 0.0;
  double xi2 = 0.0;
};

SecondOrderStep advance_second_order(const SchemeState2& state, const PhysParams& params, double dt,
                                     const StepOptions& options = {});
SchemeState2 step_second_order(const SchemeState2& state, const PhysParams& params, double dt,
                               const StepOptions& options = {});

/// Components of the second-order modified energy at the current level and
/// the dissipation of the step that produced it.
struct Energy2Report {
  double velocity = 0.0;      ///< 1/2|u|^2 + 1/2|2u - u^n|^2
  double pressure = 0.0;      ///< 2/3 dt^2 |grad H|^2
  double g_term = 0.0;        ///< dt / nu |g|^2
  double phi_gradient = 0.0;  ///< 1/2|grad phi|^2 + 1/2|2 grad phi - grad phi^n|^2
  double phi_l2 = 0.0;        ///< gamma_eff/2 (|phi|^2 + |2phi - phi^n|^2)
  double r_term = 0.0;        ///< r^2 + (2r - r^n)^2
  double q_term = 0.0;        ///< 1/2 q^2 + 1/2 (2q - q^n)^2

  double diss_mu = 0.0;           ///< 2 M dt |grad mu|^2
  double diss_utilde = 0.0;       ///< nu dt |grad u~|^2
  double diss_curl = 0.0;         ///< nu dt |curl u^{n+1}|^2 (node curl)
  double diss_curl_adjusted = 0.0;///< nu dt (|grad u~|^2 - |div u~|^2)
  double diss_q = 0.0;            ///< 2 dt / T q^2

  double total() const { return velocity + pressure + g_term + phi_gradient + phi_l2 + r_term + q_term; }
  double dissipation_raw() const { return diss_mu + diss_utilde + diss_curl + diss_q; }
  double dissipation_adjusted() const { return diss_mu + diss_utilde + diss_curl_adjusted + diss_q; }
};

Energy2Report energy2_report(const SchemeState2& state, const PhysParams& params, double dt);

}  // namespace chns
