#include "chns/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "chns/field_io.hpp"

namespace chns {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string dt_tag(double dt) {
  std::ostringstream os;
  os << std::setprecision(6) << dt;
  return os.str();
}

/// Maps library exceptions onto StepFailure with the right exit code.
template <class Fn>
auto guarded_step(int step, Fn&& fn) {
  try {
    return fn();
  } catch (const SingularSystemError& e) {
    throw StepFailure(std::string("step ") + std::to_string(step) + ": " + e.what(), step, kExitSingular);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepFailure(std::string("step ") + std::to_string(step) + ": " + e.what(), step, kExitSolver);
  }
}

Snapshot load_snapshot(const std::string& stem) {
  if (fs::exists(stem + ".csv")) return read_csv(stem + ".csv");
  if (fs::exists(stem + ".bin")) return read_binary(stem + ".bin");
  throw ConfigError("missing snapshot " + stem + ".csv or .bin");
}

void write_state_snapshots(const fs::path& dir, const std::string& stem, const SchemeState& s, bool binary) {
  const auto write = [&](const std::string& suffix, const Snapshot& snap) {
    if (binary) write_binary(dir / (stem + suffix + ".bin"), snap);
    else write_csv(dir / (stem + suffix + ".csv"), snap);
  };
  write("_phi", snapshot_of(s.phi));
  write("_u", snapshot_of_x(s.u));
  write("_v", snapshot_of_y(s.u));
  write("_p", snapshot_of(s.p));
}

void write_audit_csv(const fs::path& path, const std::vector<EnergyAudit>& audits) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << audit_csv_header() << '\n';
  for (const auto& a : audits) out << audit_csv_row(a) << '\n';
}

int exit_code_of(const std::exception_ptr& ep, std::ostream& log) {
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StepFailure& e) {
    log << "run failed: " << e.what() << '\n';
    return e.exit_code();
  } catch (const SingularSystemError& e) {
    log << "singular xi system: " << e.what() << '\n';
    return kExitSingular;
  } catch (const std::exception& e) {
    log << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace

SchemeState swirl_initial_state(const GridSpec& grid, const PhysParams& params) {
  const CellField phi = CellField::sample(grid, [](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y); });
  MacVector u = MacVector::sample(
      grid,
      [](double x, double y) { return std::pow(std::sin(kPi * x), 2) * std::sin(2 * kPi * y); },
      [](double x, double y) { return -std::pow(std::sin(kPi * y), 2) * std::sin(2 * kPi * x); });
  u.zero_normal_boundary();
  return make_initial_state(phi, u, CellField(grid), params);
}

SchemeState rest_initial_state(const GridSpec& grid, const PhysParams& params) {
  return make_initial_state(CellField(grid), MacVector(grid), CellField(grid), params);
}

SchemeState initial_state(const RunConfig& config) {
  if (config.initial == "swirl") return swirl_initial_state(config.grid, config.params);
  if (config.initial == "rest") return rest_initial_state(config.grid, config.params);
  if (config.initial.rfind("snapshot:", 0) == 0) {
    const std::string prefix = config.initial.substr(9);
    try {
      CellField phi = cell_field_from(load_snapshot(prefix + "_phi"));
      MacVector u = mac_vector_from(load_snapshot(prefix + "_u"), load_snapshot(prefix + "_v"));
      CellField p(phi.grid());
      if (fs::exists(prefix + "_p.csv") || fs::exists(prefix + "_p.bin")) p = cell_field_from(load_snapshot(prefix + "_p"));
      if (phi.nx() != config.grid.nx || phi.ny() != config.grid.ny)
        throw ConfigError("snapshot grid does not match nx/ny");
      // Re-sample onto the configured extents.
      CellField phi_g(config.grid), p_g(config.grid);
      std::copy(phi.values().begin(), phi.values().end(), phi_g.values().begin());
      std::copy(p.values().begin(), p.values().end(), p_g.values().begin());
      MacVector u_g(config.grid);
      std::copy(u.u_values().begin(), u.u_values().end(), u_g.u_values().begin());
      std::copy(u.v_values().begin(), u.v_values().end(), u_g.v_values().begin());
      return make_initial_state(phi_g, u_g, p_g, config.params);
    } catch (const SnapshotError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown initial data '" + config.initial + "'");
}

RunResult run_simulation(const RunConfig& config, const SchemeState& state0, double dt, double t_final,
                         const LevelCallback& on_level, const StepOptions& options) {
  const int steps = whole_steps(t_final, dt);
  const PhysParams& params = config.params;
  RunResult result;
  result.steps = steps;
  result.audits.reserve(steps);

  if (config.scheme == Scheme::Msav1) {
    SchemeState s = state0;
    for (int n = 1; n <= steps; ++n) {
      SchemeState next = guarded_step(n, [&] { return step_first_order(s, params, dt, options); });
      result.audits.push_back(audit_first_order(n, s, next, params, dt));
      s = std::move(next);
      if (on_level) on_level(n, s);
    }
    result.final_state = std::move(s);
    return result;
  }

  SchemeState2 s2 = guarded_step(1, [&] { return bootstrap(state0, params, dt, options); });
  result.audits.push_back(audit_first_order(1, state0, s2.current, params, dt));
  if (on_level) on_level(1, s2.current);
  for (int n = 2; n <= steps; ++n) {
    SchemeState2 next = guarded_step(n, [&] { return step_second_order(s2, params, dt, options); });
    result.audits.push_back(audit_second_order(n, s2, next, params, dt));
    s2 = std::move(next);
    if (on_level) on_level(n, s2.current);
  }
  result.final_state = std::move(s2.current);
  return result;
}

ErrorRecord run_cauchy_pair(const RunConfig& config, double dt) {
  const SchemeState state0 = initial_state(config);
  const StepOptions options{config.tol, PairingQuadrature::Consistent};

  std::vector<LevelSample> coarse;
  coarse.reserve(whole_steps(config.t_final, dt));
  run_simulation(config, state0, dt, config.t_final,
                 [&](int, const SchemeState& s) { coarse.push_back(sample_of(s)); }, options);

  CauchyAccumulator acc(dt);
  run_simulation(config, state0, 0.5 * dt, config.t_final,
                 [&](int step, const SchemeState& s) {
                   if (step % 2 == 0) acc.add(coarse[step / 2 - 1], sample_of(s));
                 },
                 options);
  return acc.finish();
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& config, int threads) {
  validate_ladder(config.ladder, config.t_final);
  std::vector<ConvergenceRow> rows(config.ladder.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      rows[k].dt = config.ladder[k];
      try {
        rows[k].record = run_cauchy_pair(config, config.ladder[k]);
      } catch (const std::exception& e) {
        rows[k].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(rows.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  // Rates between adjacent rows that both succeeded.
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!rows[k].record || !rows[k - 1].record) continue;
    for (int q = 0; q < kQuantityCount; ++q)
      rows[k].record->rates[q] = observed_rate(rows[k - 1].record->errors[q], rows[k].record->errors[q]);
  }
  return rows;
}

AuditOutcome run_energy_audit(const RunConfig& config, double dt, const StepOptions& options) {
  AuditOutcome out;
  out.dt = dt;
  const SchemeState state0 = initial_state(config);
  RunResult run = run_simulation(config, state0, dt, config.t_final, {}, options);
  out.steps = run.steps;
  out.worst_defect = -std::numeric_limits<double>::infinity();
  out.worst_raw_defect = -std::numeric_limits<double>::infinity();
  for (const auto& a : run.audits) {
    out.worst_defect = std::max(out.worst_defect, a.decay_defect);
    out.worst_raw_defect = std::max(out.worst_raw_defect, a.decay_defect_raw);
    if (!a.passes() && out.passed) {
      out.passed = false;
      out.offending_step = a.step;
    }
  }
  out.audits = std::move(run.audits);
  return out;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  try {
    validate(config);
    const fs::path dir = config.outdir;
    fs::create_directories(dir);
    const SchemeState state0 = initial_state(config);
    write_state_snapshots(dir, "snapshot_0", state0, false);
    const StepOptions options{config.tol, PairingQuadrature::Consistent};
    RunResult run = run_simulation(
        config, state0, config.dt, config.t_final,
        [&](int step, const SchemeState& s) {
          if (config.snapshot_every > 0 && step % config.snapshot_every == 0)
            write_state_snapshots(dir, "snapshot_" + std::to_string(step), s, false);
        },
        options);
    write_state_snapshots(dir, "final", run.final_state, false);
    write_state_snapshots(dir, "final", run.final_state, true);
    const fs::path audit_path = dir / ("audit_" + std::string(to_string(config.scheme)) + "_dt" + dt_tag(config.dt) + ".csv");
    write_audit_csv(audit_path, run.audits);

    int violations = 0;
    for (const auto& a : run.audits) violations += a.passes() ? 0 : 1;
    log << to_string(config.scheme) << ": " << run.steps << " steps to t = " << run.final_state.t
        << ", energy audit " << (violations ? "VIOLATED" : "ok") << ", audit -> " << audit_path.string() << '\n';
    return kExitOk;
  } catch (...) {
    return exit_code_of(std::current_exception(), log);
  }
}

int cmd_converge(const RunConfig& config, std::ostream& log, int threads) {
  std::vector<ConvergenceRow> rows;
  try {
    validate(config);
    if (config.ladder.empty()) throw ConfigError("converge needs a non-empty ladder");
    fs::create_directories(config.outdir);
    rows = run_convergence(config, threads);
  } catch (...) {
    return exit_code_of(std::current_exception(), log);
  }

  const fs::path table_path = fs::path(config.outdir) / ("table_" + std::string(to_string(config.scheme)) + ".csv");
  std::ofstream table(table_path);
  table << table_csv_header() << '\n';
  int failed = 0;
  int worst_code = kExitOk;
  log << std::left << std::setw(12) << "dt";
  for (Quantity q : kAllQuantities) log << std::setw(24) << quantity_name(q);
  log << '\n';
  for (const auto& row : rows) {
    if (!row.record) {
      ++failed;
      worst_code = kExitSolver;
      log << std::setw(12) << row.dt << "FAILED: " << row.error << '\n';
      continue;
    }
    table << table_csv_row(*row.record) << '\n';
    log << std::setw(12) << row.dt;
    for (int q = 0; q < kQuantityCount; ++q) {
      std::ostringstream cell;
      cell << std::scientific << std::setprecision(3) << row.record->errors[q];
      if (row.record->rates[q]) cell << " (" << std::fixed << std::setprecision(2) << *row.record->rates[q] << ")";
      log << std::setw(24) << cell.str();
    }
    log << '\n';
  }
  log << "table -> " << table_path.string() << '\n';
  return failed ? worst_code : kExitOk;
}

int cmd_audit(const RunConfig& config, std::ostream& log, const StepOptions& options_in, int threads) {
  std::vector<AuditOutcome> outcomes;
  try {
    validate(config);
    if (config.audit_dts.empty()) throw ConfigError("audit needs at least one dt");
    for (double dt : config.audit_dts) whole_steps(config.t_final, dt);
    fs::create_directories(config.outdir);
    StepOptions options = options_in;
    options.tol = config.tol;
    outcomes.resize(config.audit_dts.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(outcomes.size());
    auto worker = [&] {
      for (std::size_t k = next++; k < outcomes.size(); k = next++) {
        try {
          outcomes[k] = run_energy_audit(config, config.audit_dts[k], options);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    };
    const int n = std::max(1, std::min<int>(threads, static_cast<int>(outcomes.size())));
    if (n == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } catch (...) {
    return exit_code_of(std::current_exception(), log);
  }

  bool ok = true;
  for (const auto& o : outcomes) {
    write_audit_csv(fs::path(config.outdir) / ("audit_" + std::string(to_string(config.scheme)) + "_dt" + dt_tag(o.dt) + ".csv"),
                    o.audits);
    log << to_string(config.scheme) << " dt=" << o.dt << " steps=" << o.steps << " worst decay_defect="
        << std::scientific << std::setprecision(3) << o.worst_defect << " raw=" << o.worst_raw_defect
        << std::defaultfloat << (o.passed ? "  PASS" : "  FAIL at step " + std::to_string(o.offending_step)) << '\n';
    ok = ok && o.passed;
  }
  return ok ? kExitOk : kExitAudit;
}

}  // namespace chns
