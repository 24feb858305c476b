#include "chns/msav_second.hpp"

#include <cmath>
#include <tuple>

namespace chns {

Extrapolants extrapolate(const SchemeState2& s) {
  Extrapolants e;
  e.phi = 2.0 * s.current.phi;
  e.phi -= s.previous.phi;
  e.u = 2.0 * s.current.u;
  e.u -= s.previous.u;
  e.mu = 2.0 * s.current.mu;
  e.mu -= s.previous.mu;
  return e;
}

SchemeState2 bootstrap(const SchemeState& state0, const PhysParams& params, double dt,
                       const StepOptions& options) {
  SchemeState2 s;
  s.current = step_first_order(state0, params, dt, options);
  s.previous = state0;
  s.g = params.viscosity * div_face_to_cell(s.current.u_tilde);
  s.H = s.current.p + s.g;
  return s;
}

std::pair<ChPair, ChPair> ch_substeps_bdf2(const SchemeState2& state, const Extrapolants& ext,
                                           const PhysParams& params, double dt, const Tolerances& tol) {
  const double geff = params.gamma_eff();
  const double c = 2.0 * dt / 3.0;
  const ChOperatorSpec op{params.mobility * c, geff};
  const CellField fprime = potential_F_prime(ext.phi, params);

  CellField rhs0 = (4.0 / 3.0) * state.current.phi;
  rhs0.axpy(-1.0 / 3.0, state.previous.phi);
  ChPair zero;
  zero.phi = solve_ch_system(op, rhs0, tol.cahn_hilliard).solution;
  zero.mu = -1.0 * lap_cell(zero.phi);
  zero.mu.axpy(geff, zero.phi);

  CellField rhs1 = -c * advect_scalar(ext.u, ext.phi);
  rhs1.axpy(params.mobility * c, lap_cell(fprime));
  ChPair one;
  one.phi = solve_ch_system(op, rhs1, tol.cahn_hilliard).solution;
  one.mu = -1.0 * lap_cell(one.phi);
  one.mu.axpy(geff, one.phi);
  one.mu += fprime;
  return {std::move(zero), std::move(one)};
}

std::array<MacVector, 3> velocity_substeps_bdf2(const SchemeState2& state, const Extrapolants& ext,
                                                const PhysParams& params, double dt, const Tolerances& tol) {
  const double c = 2.0 * dt / 3.0;
  const HelmholtzSpec op{params.viscosity * c};
  MacVector rhs0 = (4.0 / 3.0) * state.current.u;
  rhs0.axpy(-1.0 / 3.0, state.previous.u);
  rhs0.axpy(-c, grad_cell_to_face(state.current.p));
  const MacVector rhs1 = c * chemical_force(ext.mu, ext.phi);
  const MacVector rhs2 = -c * advect_velocity(ext.u);
  return {solve_velocity_helmholtz(op, rhs0, tol.helmholtz).solution,
          solve_velocity_helmholtz(op, rhs1, tol.helmholtz).solution,
          solve_velocity_helmholtz(op, rhs2, tol.helmholtz).solution};
}

ProjectedSubsteps projection_substeps_rotational(const std::array<MacVector, 3>& u_tilde, const CellField& p_n,
                                                 double viscosity, double dt, const Tolerances& tol) {
  const double c = 2.0 * dt / 3.0;
  ProjectedSubsteps out;
  for (int i = 0; i < 3; ++i) {
    Projection proj = project(u_tilde[i], c, tol.poisson);
    out.u[i] = std::move(proj.velocity);
    out.p[i] = std::move(proj.psi);
    out.p[i].axpy(-viscosity, div_face_to_cell(u_tilde[i]));
  }
  out.p[0] += p_n;
  return out;
}

XiSystem assemble_xi_system_bdf2(const SchemeState2& state, const Extrapolants& ext, const Substeps& s,
                                 const PhysParams& params, double dt, PairingQuadrature quadrature) {
  const SchemeState& now = state.current;
  const SchemeState& before = state.previous;
  const double scale = sav_scale(ext.phi, params);
  const double half_inv = 0.5 / scale;
  const double t_next = now.t + dt;
  const double grow = std::exp(t_next / params.horizon);
  const double decay = std::exp(-t_next / params.horizon);
  const double inv2dt = 1.0 / (2.0 * dt);

  const CellField fprime = potential_F_prime(ext.phi, params);
  const CellField advection = advect_scalar(ext.u, ext.phi);
  const MacVector force = chemical_force(ext.mu, ext.phi);
  const MacVector convection = advect_velocity(ext.u);

  CellField bdf0 = 3.0 * s.ch0.phi;
  bdf0.axpy(-4.0, now.phi).axpy(1.0, before.phi);
  bdf0 *= inv2dt;

  XiSystem sys;
  sys.A0 = (4.0 * now.sav.r - before.sav.r) * inv2dt +
           half_inv * (dot_cell(fprime, bdf0) + advection_pairing(s.ch0.mu, advection) -
                       force_pairing(s.u_tilde[0], force, quadrature));
  sys.A1 = 3.0 * scale * inv2dt - half_inv * (3.0 * inv2dt * dot_cell(fprime, s.ch1.phi) +
                                              advection_pairing(s.ch1.mu, advection) -
                                              force_pairing(s.u_tilde[1], force, quadrature));
  sys.A2 = half_inv * force_pairing(s.u_tilde[2], force, quadrature);
  sys.B0 = (4.0 * now.sav.q - before.sav.q) * inv2dt + grow * convection_pairing(convection, s.u_tilde[0]);
  sys.B1 = -grow * convection_pairing(convection, s.u_tilde[1]);
  sys.B2 = decay * (3.0 * inv2dt + 1.0 / params.horizon) - grow * convection_pairing(convection, s.u_tilde[2]);
  return sys;
}

SecondOrderStep advance_second_order(const SchemeState2& state, const PhysParams& params, double dt,
                                     const StepOptions& options) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("dt must be > 0");
  params.validate();
  const Extrapolants ext = extrapolate(state);
  const double scale = sav_scale(ext.phi, params);

  SecondOrderStep out;
  auto [ch0, ch1] = ch_substeps_bdf2(state, ext, params, dt, options.tol);
  out.substeps.ch0 = std::move(ch0);
  out.substeps.ch1 = std::move(ch1);
  out.substeps.u_tilde = velocity_substeps_bdf2(state, ext, params, dt, options.tol);
  ProjectedSubsteps proj =
      projection_substeps_rotational(out.substeps.u_tilde, state.current.p, params.viscosity, dt, options.tol);
  out.substeps.u = std::move(proj.u);
  out.substeps.p = std::move(proj.p);

  out.system = assemble_xi_system_bdf2(state, ext, out.substeps, params, dt, options.pairing);
  std::tie(out.xi1, out.xi2) = solve_xi(out.system);

  out.next.current = recombine(out.substeps, out.xi1, out.xi2, state.current.t + dt, scale, params);
  out.next.previous = state.current;
  out.next.g = state.g;
  out.next.g.axpy(params.viscosity, div_face_to_cell(out.next.current.u_tilde));
  out.next.H = out.next.current.p + out.next.g;
  return out;
}

SchemeState2 step_second_order(const SchemeState2& state, const PhysParams& params, double dt,
                               const StepOptions& options) {
  return advance_second_order(state, params, dt, options).next;
}

Energy2Report energy2_report(const SchemeState2& state, const PhysParams& params, double dt) {
  const SchemeState& a = state.current;
  const SchemeState& b = state.previous;
  const double geff = params.gamma_eff();
  auto sq = [](double x) { return x * x; };

  Energy2Report e;
  MacVector u_ext = 2.0 * a.u;
  u_ext -= b.u;
  e.velocity = 0.5 * dot_face(a.u, a.u) + 0.5 * dot_face(u_ext, u_ext);
  e.pressure = (2.0 / 3.0) * dt * dt * sq(norm_h1_semi(state.H));
  e.g_term = dt / params.viscosity * dot_cell(state.g, state.g);
  CellField phi_ext = 2.0 * a.phi;
  phi_ext -= b.phi;
  e.phi_gradient = 0.5 * sq(norm_h1_semi(a.phi)) + 0.5 * sq(norm_h1_semi(phi_ext));
  e.phi_l2 = 0.5 * geff * (dot_cell(a.phi, a.phi) + dot_cell(phi_ext, phi_ext));
  e.r_term = sq(a.sav.r) + sq(2.0 * a.sav.r - b.sav.r);
  e.q_term = 0.5 * sq(a.sav.q) + 0.5 * sq(2.0 * a.sav.q - b.sav.q);

  const double grad_ut2 = sq(norm_h1_semi_velocity(a.u_tilde));
  const double div_ut2 = sq(norm_l2_cell(div_face_to_cell(a.u_tilde)));
  e.diss_mu = 2.0 * params.mobility * dt * sq(norm_h1_semi(a.mu));
  e.diss_utilde = params.viscosity * dt * grad_ut2;
  e.diss_curl = params.viscosity * dt * sq(norm_l2_node(curl_at_nodes(a.u)));
  e.diss_curl_adjusted = params.viscosity * dt * (grad_ut2 - div_ut2);
  e.diss_q = 2.0 * dt / params.horizon * sq(a.sav.q);
  return e;
}

}  // namespace chns
