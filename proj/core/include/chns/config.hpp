#pragma once

// Run configuration: flat key=value text, one setting per line, '#' starts a
// comment. Recognized keys:
//   nx, ny, scheme (msav1|msav2), dt, t_final, epsilon, mobility, viscosity,
//   gamma, beta, delta, horizon_T, tol_poisson, tol_helmholtz,
//   snapshot_every, outdir, ladder (comma-separated dt values),
//   audit_dt (comma-separated dt values), initial (swirl|rest|snapshot:<prefix>)

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chns/grid.hpp"
#include "chns/msav_first.hpp"

namespace chns {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Scheme { Msav1, Msav2 };

const char* to_string(Scheme s);

struct RunConfig {
  PhysParams params;
  GridSpec grid = GridSpec::unit_square(160, 160);
  Scheme scheme = Scheme::Msav1;
  double dt = 1e-3;
  double t_final = 0.1;
  Tolerances tol;
  int snapshot_every = 0;  ///< 0 disables intermediate snapshots
  std::string outdir = "out";
  std::vector<double> ladder;
  std::vector<double> audit_dts{1e-1, 1e-2, 1e-3};
  std::string initial = "swirl";
};

void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
/// Parses key=value text on top of `base`; unknown keys are errors.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Number of whole steps of size dt in t_final; throws ConfigError unless
/// t_final / dt is an integer to within a few ulps.
int whole_steps(double t_final, double dt);

/// Checks parameters, grid, dt/t_final alignment and the ladder.
void validate(const RunConfig& config);
void validate_ladder(const std::vector<double>& ladder, double t_final);

}  // namespace chns
