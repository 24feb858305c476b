#pragma once

/// @file diagnostics.hpp
/// @brief Energy audits, conserved-quantity monitors and Cauchy-error
/// convergence bookkeeping.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chns/msav_first.hpp"
#include "chns/msav_second.hpp"

namespace chns {

/// Relative slack allowed on the discrete energy inequality.
inline constexpr double kEnergySlack = 1e-9;

double mass(const CellField& phi);
/// 1/2 |u|^2
double kinetic_energy(const MacVector& u);
/// Total energy including the constant -(beta^2 + 2 beta)/(4 eps^2) |Omega|.
double total_energy(const SchemeState& state, const PhysParams& params);

/// Components of the first-order modified energy
///   |grad phi|^2 + gamma_eff |phi|^2 + 2 r^2 + |u|^2 + dt^2 |grad p|^2 + q^2
/// and the dissipation of the step that produced the state.
struct Energy1Report {
  double phi_gradient = 0.0;
  double phi_l2 = 0.0;
  double r_term = 0.0;
  double velocity = 0.0;
  double pressure = 0.0;
  double q_term = 0.0;

  double diss_mu = 0.0;      ///< 2 M dt |grad mu|^2
  double diss_utilde = 0.0;  ///< 2 nu dt |grad u~|^2
  double diss_q = 0.0;       ///< 2 dt / T q^2

  double total() const { return phi_gradient + phi_l2 + r_term + velocity + pressure + q_term; }
  double dissipation() const { return diss_mu + diss_utilde + diss_q; }
};

Energy1Report energy1_report(const SchemeState& state, const PhysParams& params, double dt);

struct EnergyAudit {
  int step = 0;
  double t = 0.0;
  double E_total = 0.0;
  double Etilde = 0.0;
  double mass = 0.0;
  double div_norm = 0.0;
  double r = 0.0;
  double q = 0.0;
  /// Etilde^{n+1} - Etilde^n + dissipation; the gated quantity.
  double decay_defect = 0.0;
  /// Same with the node-curl dissipation (second order); equal to
  /// decay_defect for the first-order scheme.
  double decay_defect_raw = 0.0;
  double diss_mu = 0.0;
  double diss_utilde = 0.0;
  double diss_q = 0.0;
  double diss_curl = 0.0;
  double slack = 0.0;  ///< kEnergySlack * max(1, Etilde^n)

  bool passes() const { return decay_defect <= slack; }
};

EnergyAudit audit_first_order(int step, const SchemeState& before, const SchemeState& after,
                              const PhysParams& params, double dt);
EnergyAudit audit_second_order(int step, const SchemeState2& before, const SchemeState2& after,
                               const PhysParams& params, double dt);

/// CSV header shared by both schemes.
std::string audit_csv_header();
std::string audit_csv_row(const EnergyAudit& a);

// Cauchy errors ---------------------------------------------------------------

/// The quantities tracked by the convergence tables, in table order.
enum class Quantity { Phi, GradPhi, R, U, GradUTilde, P, Q };
inline constexpr int kQuantityCount = 7;
inline constexpr std::array<Quantity, kQuantityCount> kAllQuantities = {
    Quantity::Phi, Quantity::GradPhi, Quantity::R, Quantity::U, Quantity::GradUTilde, Quantity::P, Quantity::Q};
const char* quantity_name(Quantity q);

/// State sample at one time level, as compared between paired runs.
struct LevelSample {
  double t = 0.0;
  CellField phi;
  MacVector u;
  MacVector u_tilde;
  CellField p;
  double r = 0.0;
  double q = 0.0;
};

LevelSample sample_of(const SchemeState& s);

struct ErrorRecord {
  double dt = 0.0;
  /// Indexed by Quantity: |e_phi|_linf, |grad e_phi|_linf, |e_r|_inf,
  /// |e_u|_linf, |grad e_u~|_l2, |e_p|_l2, |e_q|_inf.
  std::array<double, kQuantityCount> errors{};
  std::array<std::optional<double>, kQuantityCount> rates{};

  double error(Quantity q) const { return errors[static_cast<int>(q)]; }
  std::optional<double> rate(Quantity q) const { return rates[static_cast<int>(q)]; }
};

class AlignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Streams coarse/fine level pairs into the l-infinity and l2 accumulators.
class CauchyAccumulator {
 public:
  explicit CauchyAccumulator(double dt_coarse);
  void add(const LevelSample& coarse, const LevelSample& fine);
  ErrorRecord finish() const;
  int levels() const { return levels_; }

 private:
  double dt_;
  int levels_ = 0;
  std::array<double, kQuantityCount> acc_{};
};

/// Both histories hold levels t^1..t^N of the coarse run; the fine history is
/// subsampled to the same levels.
ErrorRecord cauchy_errors(const std::vector<LevelSample>& coarse, const std::vector<LevelSample>& fine,
                          double dt_coarse);

/// log2(e_coarse / e_fine); nullopt unless both are positive.
std::optional<double> observed_rate(double e_coarse, double e_fine);

/// Fills rates[k] of each record from the previous (coarser) record; the
/// first record has no rates.
void fill_rates(std::vector<ErrorRecord>& records);

std::string table_csv_header();
std::string table_csv_row(const ErrorRecord& rec);

}  // namespace chns
