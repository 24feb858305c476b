#pragma once

/// @file harness.hpp
/// @brief Batch drivers behind the `chns` command line: single runs,
/// Cauchy-error convergence studies and energy audits.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chns/config.hpp"
#include "chns/diagnostics.hpp"

namespace chns {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitSingular = 4,
  kExitAudit = 5,
};

/// u0 = [sin^2(pi x) sin(2 pi y), -sin^2(pi y) sin(2 pi x)], p0 = 0,
/// phi0 = cos(pi x) cos(pi y).
SchemeState swirl_initial_state(const GridSpec& grid, const PhysParams& params);
/// u0 = 0, p0 = 0, phi0 = 0 (a root of F'), a fixed point of both schemes.
SchemeState rest_initial_state(const GridSpec& grid, const PhysParams& params);
/// Dispatches on config.initial.
SchemeState initial_state(const RunConfig& config);

/// Called with every new level (step >= 1).
using LevelCallback = std::function<void(int step, const SchemeState& state)>;

struct RunResult {
  std::vector<EnergyAudit> audits;
  SchemeState final_state;
  int steps = 0;
};

/// Error raised by a run, tagged with the failing step.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, int step, int exit_code)
      : std::runtime_error(what), step_(step), exit_code_(exit_code) {}
  int step() const { return step_; }
  int exit_code() const { return exit_code_; }

 private:
  int step_;
  int exit_code_;
};

/// Runs the configured scheme from `state0` to t_final with step dt. Second
/// order bootstraps its first level with one first-order step; that step is
/// audited against the first-order energy law.
RunResult run_simulation(const RunConfig& config, const SchemeState& state0, double dt, double t_final,
                         const LevelCallback& on_level = {}, const StepOptions& options = {});

/// Runs dt and dt/2 and accumulates the Cauchy errors at the coarse levels.
ErrorRecord run_cauchy_pair(const RunConfig& config, double dt);

struct ConvergenceRow {
  double dt = 0.0;
  std::optional<ErrorRecord> record;
  std::string error;  ///< nonempty when the row failed
};

/// One Cauchy pair per ladder entry; rows run concurrently on `threads`
/// workers and fail independently. Rates are filled between adjacent
/// successful rows.
std::vector<ConvergenceRow> run_convergence(const RunConfig& config, int threads = 1);

struct AuditOutcome {
  double dt = 0.0;
  int steps = 0;
  bool passed = true;
  double worst_defect = 0.0;       ///< max over steps of decay_defect / slack scale
  double worst_raw_defect = 0.0;   ///< same for the raw (node-curl) inequality
  int offending_step = -1;
  std::vector<EnergyAudit> audits;
};

AuditOutcome run_energy_audit(const RunConfig& config, double dt, const StepOptions& options = {});

// Subcommands; each returns an ExitCode and writes artifacts under outdir.
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_converge(const RunConfig& config, std::ostream& log, int threads = 1);
int cmd_audit(const RunConfig& config, std::ostream& log, const StepOptions& options = {}, int threads = 1);

}  // namespace chns
