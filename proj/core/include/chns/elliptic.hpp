#pragma once

/// @file elliptic.hpp
/// @brief Constant-coefficient solvers needed once per time step.
///
/// Three problem classes:
///   - Neumann Poisson  lap(psi) = rhs, zero-mean psi,
///   - Cahn-Hilliard    (I + m lap^2 - m g lap) phi = rhs, Neumann on phi and lap(phi),
///   - Helmholtz        (I - c lap) w = rhs for a no-slip velocity.
///
/// Cell-centered problems are diagonalized by a 2-D type-II cosine transform
/// (the mirror ghost convention makes lap_cell exactly transform-diagonal).
/// An unpreconditioned conjugate-gradient path exists for cross-checking.
/// The Helmholtz problem uses Jacobi-preconditioned conjugate gradients.

#include <stdexcept>
#include <string>

#include "chns/grid.hpp"

namespace chns {

struct SolveReport {
  int iterations = 0;
  /// Normwise backward error |rhs - A x| / (|A| |x| + |rhs|).
  double residual = 0.0;
  /// Mean removed from a slightly incompatible Neumann right-hand side.
  double mean_removed = 0.0;
};

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport report) : std::runtime_error(what), report_(report) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Raised when a Neumann right-hand side has a mean far from zero.
class CompatibilityError : public SolverError {
 public:
  CompatibilityError(const std::string& what, double defect) : SolverError(what, {}), defect_(defect) {}
  /// |mean(rhs)| * sqrt(area) / |rhs|
  double defect() const { return defect_; }

 private:
  double defect_;
};

struct ChOperatorSpec {
  double mobility_dt = 0.0;  ///< M * dt (or M * 2dt/3 for BDF2)
  double gamma_eff = 1.0;    ///< gamma + beta / eps^2
  void validate() const;
};

struct HelmholtzSpec {
  double visc_dt = 0.0;  ///< nu * dt (or nu * 2dt/3 for BDF2)
  void validate() const;
};

enum class CellSolverPath { Transform, Iterative };

/// Relative mean defect below which a Neumann rhs is treated as compatible.
inline constexpr double kCompatibleDefect = 1e-10;
/// Relative mean defect above which a Neumann rhs is rejected.
inline constexpr double kIncompatibleDefect = 1e-6;

struct CellSolve {
  CellField solution;
  SolveReport report;
};

struct VelocitySolve {
  MacVector solution;
  SolveReport report;
};

struct Projection {
  MacVector velocity;  ///< w - coef * grad(psi), discretely divergence-free
  CellField psi;       ///< zero-mean potential with lap(psi) = div(w) / coef
  SolveReport report;  ///< residual is |div u| / |div w|
};

/// Discrete 1-D Neumann eigenvalue -(2/h^2)(1 - cos(k pi / n)).
double neumann_eigenvalue(int k, int n, double h);

CellField apply_ch_operator(const ChOperatorSpec& op, const CellField& phi);
MacVector apply_helmholtz(const HelmholtzSpec& op, const MacVector& w);

CellSolve solve_neumann_poisson(const CellField& rhs, double tol,
                                CellSolverPath path = CellSolverPath::Transform);
CellSolve solve_ch_system(const ChOperatorSpec& op, const CellField& rhs, double tol,
                          CellSolverPath path = CellSolverPath::Transform);
/// max_iterations <= 0 selects a size-based default.
VelocitySolve solve_velocity_helmholtz(const HelmholtzSpec& op, const MacVector& rhs, double tol,
                                       int max_iterations = 0);
/// Projects w onto discretely divergence-free fields with zero normal
/// boundary values (the normal components of w are discarded). dt_over_coef is dt for
/// the first-order scheme and 2dt/3 for BDF2.
Projection project(const MacVector& w, double dt_over_coef, double tol);

}  // namespace chns
