#include "chns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace chns {

namespace {

double sq(double x) { return x * x; }

CellField centered(CellField f) {
  const double m = f.mean();
  for (double& x : f.values()) x -= m;
  return f;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

double mass(const CellField& phi) {
  double s = 0.0;
  for (double x : phi.values()) s += x;
  return phi.grid().cell_area() * s;
}

double kinetic_energy(const MacVector& u) { return 0.5 * dot_face(u, u); }

double total_energy(const SchemeState& state, const PhysParams& params) {
  const double eps2 = params.epsilon * params.epsilon;
  const double lin = 0.5 * params.gamma + params.beta / (2.0 * eps2);
  const double constant = (params.beta * params.beta + 2.0 * params.beta) / (4.0 * eps2);
  return kinetic_energy(state.u) + 0.5 * sq(norm_h1_semi(state.phi)) + lin * dot_cell(state.phi, state.phi) +
         energy_E1(state.phi, params) - constant * state.phi.grid().area();
}

Energy1Report energy1_report(const SchemeState& s, const PhysParams& params, double dt) {
  Energy1Report e;
  e.phi_gradient = sq(norm_h1_semi(s.phi));
  e.phi_l2 = params.gamma_eff() * dot_cell(s.phi, s.phi);
  e.r_term = 2.0 * sq(s.sav.r);
  e.velocity = dot_face(s.u, s.u);
  e.pressure = sq(dt * norm_h1_semi(s.p));
  e.q_term = sq(s.sav.q);
  e.diss_mu = 2.0 * params.mobility * dt * sq(norm_h1_semi(s.mu));
  e.diss_utilde = 2.0 * params.viscosity * dt * sq(norm_h1_semi_velocity(s.u_tilde));
  e.diss_q = 2.0 * dt / params.horizon * sq(s.sav.q);
  return e;
}

namespace {

void fill_common(EnergyAudit& a, int step, const SchemeState& after, const PhysParams& params) {
  a.step = step;
  a.t = after.t;
  a.E_total = total_energy(after, params);
  a.mass = mass(after.phi);
  a.div_norm = norm_l2_cell(div_face_to_cell(after.u));
  a.r = after.sav.r;
  a.q = after.sav.q;
}

}  // namespace

EnergyAudit audit_first_order(int step, const SchemeState& before, const SchemeState& after,
                              const PhysParams& params, double dt) {
  const Energy1Report e0 = energy1_report(before, params, dt);
  const Energy1Report e1 = energy1_report(after, params, dt);
  EnergyAudit a;
  fill_common(a, step, after, params);
  a.Etilde = e1.total();
  a.decay_defect = e1.total() - e0.total() + e1.dissipation();
  a.decay_defect_raw = a.decay_defect;
  a.diss_mu = e1.diss_mu;
  a.diss_utilde = e1.diss_utilde;
  a.diss_q = e1.diss_q;
  a.slack = kEnergySlack * std::max(1.0, e0.total());
  return a;
}

EnergyAudit audit_second_order(int step, const SchemeState2& before, const SchemeState2& after,
                               const PhysParams& params, double dt) {
  const Energy2Report e0 = energy2_report(before, params, dt);
  const Energy2Report e1 = energy2_report(after, params, dt);
  EnergyAudit a;
  fill_common(a, step, after.current, params);
  a.Etilde = e1.total();
  a.decay_defect = e1.total() - e0.total() + e1.dissipation_adjusted();
  a.decay_defect_raw = e1.total() - e0.total() + e1.dissipation_raw();
  a.diss_mu = e1.diss_mu;
  a.diss_utilde = e1.diss_utilde;
  a.diss_q = e1.diss_q;
  a.diss_curl = e1.diss_curl;
  a.slack = kEnergySlack * std::max(1.0, e0.total());
  return a;
}

std::string audit_csv_header() {
  return "step,t,E_total,Etilde,mass,div_norm,r,q,decay_defect,decay_defect_raw,slack,"
         "diss_mu,diss_utilde,diss_q,diss_curl";
}

std::string audit_csv_row(const EnergyAudit& a) {
  std::ostringstream os;
  os << a.step;
  for (double x : {a.t, a.E_total, a.Etilde, a.mass, a.div_norm, a.r, a.q, a.decay_defect, a.decay_defect_raw,
                   a.slack, a.diss_mu, a.diss_utilde, a.diss_q, a.diss_curl})
    os << ',' << format_number(x);
  return os.str();
}

// Cauchy errors ---------------------------------------------------------------

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::Phi: return "e_phi_linf";
    case Quantity::GradPhi: return "e_grad_phi_linf";
    case Quantity::R: return "e_r_inf";
    case Quantity::U: return "e_u_linf";
    case Quantity::GradUTilde: return "e_grad_utilde_l2";
    case Quantity::P: return "e_p_l2";
    case Quantity::Q: return "e_q_inf";
  }
  return "?";
}

LevelSample sample_of(const SchemeState& s) {
  return LevelSample{s.t, s.phi, s.u, s.u_tilde, s.p, s.sav.r, s.sav.q};
}

CauchyAccumulator::CauchyAccumulator(double dt_coarse) : dt_(dt_coarse) {
  if (!(dt_coarse > 0.0)) throw AlignmentError("coarse dt must be > 0");
}

void CauchyAccumulator::add(const LevelSample& c, const LevelSample& f) {
  if (!(c.phi.grid() == f.phi.grid())) throw AlignmentError("paired runs use different grids");
  if (std::abs(c.t - f.t) > 1e-9 * std::max(1.0, std::abs(c.t)))
    throw AlignmentError("paired samples are at different times (" + format_number(c.t) + " vs " +
                         format_number(f.t) + ")");
  const CellField e_phi = c.phi - f.phi;
  const MacVector e_u = c.u - f.u;
  const MacVector e_ut = c.u_tilde - f.u_tilde;
  const CellField e_p = centered(c.p - f.p);

  auto& a = acc_;
  a[0] = std::max(a[0], norm_l2_cell(e_phi));
  a[1] = std::max(a[1], norm_h1_semi(e_phi));
  a[2] = std::max(a[2], std::abs(c.r - f.r));
  a[3] = std::max(a[3], norm_l2_face(e_u));
  a[4] += dt_ * sq(norm_h1_semi_velocity(e_ut));
  a[5] += dt_ * dot_cell(e_p, e_p);
  a[6] = std::max(a[6], std::abs(c.q - f.q));
  ++levels_;
}

ErrorRecord CauchyAccumulator::finish() const {
  ErrorRecord rec;
  rec.dt = dt_;
  rec.errors = acc_;
  rec.errors[4] = std::sqrt(acc_[4]);
  rec.errors[5] = std::sqrt(acc_[5]);
  return rec;
}

ErrorRecord cauchy_errors(const std::vector<LevelSample>& coarse, const std::vector<LevelSample>& fine,
                          double dt_coarse) {
  if (coarse.size() != fine.size())
    throw AlignmentError("paired runs store different numbers of levels");
  CauchyAccumulator acc(dt_coarse);
  for (std::size_t n = 0; n < coarse.size(); ++n) acc.add(coarse[n], fine[n]);
  return acc.finish();
}

std::optional<double> observed_rate(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0)) return std::nullopt;
  return std::log2(e_coarse / e_fine);
}

void fill_rates(std::vector<ErrorRecord>& records) {
  for (std::size_t k = 0; k < records.size(); ++k) {
    records[k].rates.fill(std::nullopt);
    if (k == 0) continue;
    // Table convention: the rate sits on the finer row.
    for (int q = 0; q < kQuantityCount; ++q)
      records[k].rates[q] = observed_rate(records[k - 1].errors[q], records[k].errors[q]);
  }
}

std::string table_csv_header() {
  std::string h = "dt";
  for (Quantity q : kAllQuantities) {
    h += ',';
    h += quantity_name(q);
    h += ",rate";
  }
  return h;
}

std::string table_csv_row(const ErrorRecord& rec) {
  std::ostringstream os;
  os << format_number(rec.dt);
  for (int q = 0; q < kQuantityCount; ++q) {
    os << ',' << format_number(rec.errors[q]) << ',';
    if (rec.rates[q]) os << std::fixed << std::setprecision(4) << *rec.rates[q] << std::defaultfloat;
  }
  return os.str();
}

}  // namespace chns
