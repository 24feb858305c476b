#include "chns/msav_first.hpp"

#include <algorithm>
#include <cmath>

namespace chns {

void PhysParams::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  auto nonnegative = [](double x) { return x >= 0.0 && std::isfinite(x); };
  if (!positive(epsilon)) throw std::invalid_argument("epsilon must be > 0");
  if (!positive(mobility)) throw std::invalid_argument("mobility must be > 0");
  if (!positive(viscosity)) throw std::invalid_argument("viscosity must be > 0");
  if (!positive(horizon)) throw std::invalid_argument("horizon_T must be > 0");
  if (!nonnegative(gamma)) throw std::invalid_argument("gamma must be >= 0");
  if (!nonnegative(beta)) throw std::invalid_argument("beta must be >= 0");
  if (!nonnegative(delta)) throw std::invalid_argument("delta must be >= 0");
}

CellField potential_F_prime(const CellField& phi, const PhysParams& params) {
  const double inv_eps2 = 1.0 / (params.epsilon * params.epsilon);
  const double shift = 1.0 + params.beta;
  CellField out(phi.grid());
  auto src = phi.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = inv_eps2 * src[k] * (src[k] * src[k] - shift);
  return out;
}

double energy_E1(const CellField& phi, const PhysParams& params) {
  const double shift = 1.0 + params.beta;
  double s = 0.0;
  for (double x : phi.values()) {
    const double w = x * x - shift;
    s += w * w;
  }
  return phi.grid().cell_area() * s / (4.0 * params.epsilon * params.epsilon);
}

double sav_scale(const CellField& phi, const PhysParams& params) {
  const double base = energy_E1(phi, params) + params.delta;
  if (!(base > 1e-14))
    throw StateError("E1(phi) + delta = " + std::to_string(base) + " is not positive; increase delta");
  return std::sqrt(base);
}

SchemeState make_initial_state(const CellField& phi, const MacVector& u, const CellField& p,
                               const PhysParams& params) {
  params.validate();
  if (!phi.all_finite() || !u.all_finite() || !p.all_finite()) throw InputError("non-finite initial data");
  SchemeState s;
  s.t = 0.0;
  s.phi = phi;
  s.u = u;
  s.u_tilde = u;
  s.p = p;
  for (double& x : s.p.values()) x -= p.mean();
  s.sav.r = sav_scale(phi, params);
  s.sav.q = 1.0;
  s.mu = -1.0 * lap_cell(phi);
  s.mu.axpy(params.gamma_eff(), phi);
  s.mu += potential_F_prime(phi, params);
  return s;
}

double advection_pairing(const CellField& mu, const CellField& advection) { return dot_cell(mu, advection); }

double force_pairing(const MacVector& u_tilde, const MacVector& force, PairingQuadrature quadrature) {
  if (quadrature == PairingQuadrature::Consistent) return dot_face(u_tilde, force);
  // Skips the y-faces entirely.
  MacVector x_only = u_tilde;
  for (double& v : x_only.v_values()) v = 0.0;
  return dot_face(x_only, force);
}

double convection_pairing(const MacVector& convection, const MacVector& u_tilde) {
  return dot_face(convection, u_tilde);
}

std::pair<ChPair, ChPair> ch_substeps(const SchemeState& state, const PhysParams& params, double dt,
                                      const Tolerances& tol) {
  const double geff = params.gamma_eff();
  const ChOperatorSpec op{params.mobility * dt, geff};
  const CellField fprime = potential_F_prime(state.phi, params);

  ChPair zero;
  zero.phi = solve_ch_system(op, state.phi, tol.cahn_hilliard).solution;
  zero.mu = -1.0 * lap_cell(zero.phi);
  zero.mu.axpy(geff, zero.phi);

  CellField rhs1 = -dt * advect_scalar(state.u, state.phi);
  rhs1.axpy(params.mobility * dt, lap_cell(fprime));
  ChPair one;
  one.phi = solve_ch_system(op, rhs1, tol.cahn_hilliard).solution;
  one.mu = -1.0 * lap_cell(one.phi);
  one.mu.axpy(geff, one.phi);
  one.mu += fprime;
  return {std::move(zero), std::move(one)};
}

std::array<MacVector, 3> velocity_substeps(const SchemeState& state, const PhysParams& params, double dt,
                                           const Tolerances& tol) {
  const HelmholtzSpec op{params.viscosity * dt};
  MacVector rhs0 = state.u;
  rhs0.axpy(-dt, grad_cell_to_face(state.p));
  const MacVector rhs1 = dt * chemical_force(state.mu, state.phi);
  const MacVector rhs2 = -dt * advect_velocity(state.u);
  return {solve_velocity_helmholtz(op, rhs0, tol.helmholtz).solution,
          solve_velocity_helmholtz(op, rhs1, tol.helmholtz).solution,
          solve_velocity_helmholtz(op, rhs2, tol.helmholtz).solution};
}

ProjectedSubsteps projection_substeps(const std::array<MacVector, 3>& u_tilde, const CellField& p_n, double dt,
                                      const Tolerances& tol) {
  ProjectedSubsteps out;
  for (int i = 0; i < 3; ++i) {
    Projection proj = project(u_tilde[i], dt, tol.poisson);
    out.u[i] = std::move(proj.velocity);
    out.p[i] = std::move(proj.psi);
  }
  out.p[0] += p_n;
  return out;
}

XiSystem assemble_xi_system(const SchemeState& state, const Substeps& s, const PhysParams& params, double dt,
                            PairingQuadrature quadrature) {
  const double scale = sav_scale(state.phi, params);
  const double half_inv = 0.5 / scale;
  const double t_next = state.t + dt;
  const double grow = std::exp(t_next / params.horizon);
  const double decay = std::exp(-t_next / params.horizon);

  const CellField fprime = potential_F_prime(state.phi, params);
  const CellField advection = advect_scalar(state.u, state.phi);
  const MacVector force = chemical_force(state.mu, state.phi);
  const MacVector convection = advect_velocity(state.u);

  XiSystem sys;
  sys.A0 = state.sav.r / dt +
           half_inv * (dot_cell(fprime, (1.0 / dt) * (s.ch0.phi - state.phi)) +
                       advection_pairing(s.ch0.mu, advection) - force_pairing(s.u_tilde[0], force, quadrature));
  sys.A1 = scale / dt - half_inv * (dot_cell(fprime, s.ch1.phi) / dt + advection_pairing(s.ch1.mu, advection) -
                                    force_pairing(s.u_tilde[1], force, quadrature));
  sys.A2 = half_inv * force_pairing(s.u_tilde[2], force, quadrature);
  sys.B0 = state.sav.q / dt + grow * convection_pairing(convection, s.u_tilde[0]);
  sys.B1 = -grow * convection_pairing(convection, s.u_tilde[1]);
  sys.B2 = decay / dt + decay / params.horizon - grow * convection_pairing(convection, s.u_tilde[2]);
  return sys;
}

std::pair<double, double> solve_xi(const XiSystem& sys) {
  const double values[] = {sys.A0, sys.A1, sys.A2, sys.B0, sys.B1, sys.B2};
  for (double v : values)
    if (!std::isfinite(v)) throw SingularSystemError("non-finite xi-system coefficient", NAN);
  const double det = sys.determinant();
  const double scale = std::max(std::abs(sys.A1 * sys.B2), std::abs(sys.A2 * sys.B1));
  if (!(std::abs(det) > 1e-14 * scale))
    throw SingularSystemError("xi system is singular (det = " + std::to_string(det) + "); reduce dt", det);
  const double xi1 = (sys.A0 * sys.B2 - sys.A2 * sys.B0) / det;
  const double xi2 = (sys.A1 * sys.B0 - sys.A0 * sys.B1) / det;
  return {xi1, xi2};
}

SchemeState recombine(const Substeps& s, double xi1, double xi2, double t_next, double scale,
                      const PhysParams& params) {
  SchemeState next;
  next.t = t_next;
  next.phi = s.ch0.phi;
  next.phi.axpy(xi1, s.ch1.phi);
  next.mu = s.ch0.mu;
  next.mu.axpy(xi1, s.ch1.mu);
  next.u_tilde = s.u_tilde[0];
  next.u_tilde.axpy(xi1, s.u_tilde[1]).axpy(xi2, s.u_tilde[2]);
  next.u = s.u[0];
  next.u.axpy(xi1, s.u[1]).axpy(xi2, s.u[2]);
  next.p = s.p[0];
  next.p.axpy(xi1, s.p[1]).axpy(xi2, s.p[2]);
  const double m = next.p.mean();
  for (double& x : next.p.values()) x -= m;
  next.sav.r = xi1 * scale;
  next.sav.q = xi2 * std::exp(-t_next / params.horizon);
  return next;
}

FirstOrderStep advance_first_order(const SchemeState& state, const PhysParams& params, double dt,
                                   const StepOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be > 0");
  params.validate();
  const double scale = sav_scale(state.phi, params);

  FirstOrderStep out;
  auto [ch0, ch1] = ch_substeps(state, params, dt, options.tol);
  out.substeps.ch0 = std::move(ch0);
  out.substeps.ch1 = std::move(ch1);
  out.substeps.u_tilde = velocity_substeps(state, params, dt, options.tol);
  ProjectedSubsteps proj = projection_substeps(out.substeps.u_tilde, state.p, dt, options.tol);
  out.substeps.u = std::move(proj.u);
  out.substeps.p = std::move(proj.p);

  out.system = assemble_xi_system(state, out.substeps, params, dt, options.pairing);
  std::tie(out.xi1, out.xi2) = solve_xi(out.system);
  out.next = recombine(out.substeps, out.xi1, out.xi2, state.t + dt, scale, params);
  return out;
}

SchemeState step_first_order(const SchemeState& state, const PhysParams& params, double dt,
                             const StepOptions& options) {
  return advance_first_order(state, params, dt, options).next;
}

}  // namespace chns
