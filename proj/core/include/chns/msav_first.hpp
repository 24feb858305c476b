#pragma once

/// @file msav_first.hpp
/// @brief First-order fully decoupled MSAV step for the Cahn-Hilliard /
/// Navier-Stokes system, plus the scalar-auxiliary-variable plumbing shared
/// with the BDF2 stepper.
///
/// A step never solves a coupled or nonlinear system. Every unknown is
/// written as X = X0 + xi1 X1 + xi2 X2, where
///   xi1 = r^{n+1} / sqrt(E1(phi^n) + delta),   xi2 = exp(t^{n+1}/T) q^{n+1},
/// the X_i come from constant-coefficient solves (two Cahn-Hilliard, three
/// Helmholtz, three Poisson), and (xi1, xi2) solve a 2x2 system built from
/// the r- and q-equations.

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

#include "chns/elliptic.hpp"
#include "chns/grid.hpp"

namespace chns {

struct PhysParams {
  double epsilon = 0.3;    ///< interface width
  double mobility = 1e-3;  ///< M
  double viscosity = 1e-3; ///< nu
  double gamma = 1.0;      ///< linear stabilization
  double beta = 5.0;       ///< potential shift
  double delta = 0.0;      ///< SAV shift, E1 + delta must stay positive
  double horizon = 0.1;    ///< T in q(t) = exp(-t/T)

  /// gamma + beta / eps^2, the linear coefficient in the mu-equation.
  double gamma_eff() const { return gamma + beta / (epsilon * epsilon); }
  void validate() const;
};

struct Tolerances {
  double poisson = 1e-12;
  double helmholtz = 1e-11;
  double cahn_hilliard = 1e-12;
};

/// How the (u~, mu grad phi) pairing in the r-equation is evaluated.
/// Consistent uses the face quadrature of the momentum forcing, which makes
/// the energy cancellation exact. The corrupted variant drops the y-face
/// terms; it exists only as a negative control for the energy audit.
enum class PairingQuadrature { Consistent, CorruptedForTesting };

struct StepOptions {
  Tolerances tol;
  PairingQuadrature pairing = PairingQuadrature::Consistent;
};

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(const std::string& what, double determinant)
      : std::runtime_error(what), determinant_(determinant) {}
  double determinant() const { return determinant_; }

 private:
  double determinant_;
};

struct SavState {
  double r = 0.0;
  double q = 1.0;
};

struct SchemeState {
  double t = 0.0;
  CellField phi;
  CellField mu;
  MacVector u;        ///< divergence-free velocity
  MacVector u_tilde;  ///< intermediate velocity of the last step
  CellField p;        ///< zero-mean pressure
  SavState sav;
};

struct XiSystem {
  double A0 = 0.0, A1 = 0.0, A2 = 0.0;
  double B0 = 0.0, B1 = 0.0, B2 = 0.0;
  double determinant() const { return A1 * B2 - A2 * B1; }
};

struct ChPair {
  CellField phi;
  CellField mu;
};

/// Substep fields; the xi2 Cahn-Hilliard pair is identically zero and not stored.
struct Substeps {
  ChPair ch0, ch1;
  std::array<MacVector, 3> u_tilde;
  std::array<MacVector, 3> u;
  std::array<CellField, 3> p;
};

/// F'(phi) = phi (phi^2 - 1 - beta) / eps^2
CellField potential_F_prime(const CellField& phi, const PhysParams& params);
/// E1(phi) = (1 / 4eps^2) sum h^2 (phi^2 - 1 - beta)^2
double energy_E1(const CellField& phi, const PhysParams& params);
/// sqrt(E1(phi) + delta); throws StateError when E1 + delta <= 1e-14.
double sav_scale(const CellField& phi, const PhysParams& params);

/// Builds the state at t = 0: r = sqrt(E1 + delta), q = 1,
/// mu = -lap phi + gamma_eff phi + F'(phi), u_tilde = u.
SchemeState make_initial_state(const CellField& phi, const MacVector& u, const CellField& p,
                               const PhysParams& params);

// Pairings used by the r- and q-equations. The same discrete forms are used
// by the forcing terms so the energy identities hold exactly.
double advection_pairing(const CellField& mu, const CellField& advection);
double force_pairing(const MacVector& u_tilde, const MacVector& force,
                     PairingQuadrature quadrature = PairingQuadrature::Consistent);
double convection_pairing(const MacVector& convection, const MacVector& u_tilde);

std::pair<ChPair, ChPair> ch_substeps(const SchemeState& state, const PhysParams& params, double dt,
                                      const Tolerances& tol = {});
std::array<MacVector, 3> velocity_substeps(const SchemeState& state, const PhysParams& params, double dt,
                                           const Tolerances& tol = {});

struct ProjectedSubsteps {
  std::array<MacVector, 3> u;
  std::array<CellField, 3> p;
};

/// u0 uses grad(p0 - p^n); u1, u2 use grad(p_i).
ProjectedSubsteps projection_substeps(const std::array<MacVector, 3>& u_tilde, const CellField& p_n, double dt,
                                      const Tolerances& tol = {});

XiSystem assemble_xi_system(const SchemeState& state, const Substeps& substeps, const PhysParams& params,
                            double dt, PairingQuadrature quadrature = PairingQuadrature::Consistent);

/// Cramer solve; throws SingularSystemError when
/// |det| <= 1e-14 * max(|A1 B2|, |A2 B1|).
std::pair<double, double> solve_xi(const XiSystem& sys);

struct FirstOrderStep {
  SchemeState next;
  Substeps substeps;
  XiSystem system;
  double xi1 = 0.0;
  double xi2 = 0.0;
};

FirstOrderStep advance_first_order(const SchemeState& state, const PhysParams& params, double dt,
                                   const StepOptions& options = {});
SchemeState step_first_order(const SchemeState& state, const PhysParams& params, double dt,
                             const StepOptions& options = {});

/// Recombines X0 + xi1 X1 + xi2 X2 into the next state; pressure is re-centered.
SchemeState recombine(const Substeps& s, double xi1, double xi2, double t_next, double scale,
                      const PhysParams& params);

}  // namespace chns
