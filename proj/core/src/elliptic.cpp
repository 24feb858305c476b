#include "chns/elliptic.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace chns {

namespace {

// Cosine-transform plans -------------------------------------------------------

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(static_cast<double*>(fftw_malloc(n * sizeof(double)))) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* data;
};

struct CosinePlans {
  fftw_plan forward = nullptr;   // REDFT10 in both directions
  fftw_plan backward = nullptr;  // REDFT01 in both directions
  ~CosinePlans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// Plans are created under the lock; fftw_execute_r2r on distinct arrays is
// thread-safe, so lookups hand out shared plans.
const CosinePlans& cosine_plans(int nx, int ny) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<CosinePlans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{nx, ny}];
  if (!slot) {
    auto plans = std::make_unique<CosinePlans>();
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    FftwBuffer in(n), out(n);
    plans->forward = fftw_plan_r2r_2d(ny, nx, in.data, out.data, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
    plans->backward = fftw_plan_r2r_2d(ny, nx, in.data, out.data, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    if (!plans->forward || !plans->backward) throw std::runtime_error("FFTW planning failed");
    slot = std::move(plans);
  }
  return *slot;
}

/// Applies the inverse of a transform-diagonal operator. symbol(k, l) is the
/// eigenvalue on mode cos(k pi x) cos(l pi y); a zero symbol zeroes the mode.
template <class Symbol>
CellField transform_solve(const CellField& rhs, Symbol&& symbol) {
  const GridSpec& g = rhs.grid();
  const std::size_t n = g.cell_count();
  const CosinePlans& plans = cosine_plans(g.nx, g.ny);
  FftwBuffer a(n), b(n);
  std::copy(rhs.values().begin(), rhs.values().end(), a.data);
  fftw_execute_r2r(plans.forward, a.data, b.data);
  const double scale = 1.0 / (4.0 * g.nx * g.ny);
  for (int l = 0; l < g.ny; ++l) {
    for (int k = 0; k < g.nx; ++k) {
      const double s = symbol(k, l);
      double& c = b.data[static_cast<std::size_t>(l) * g.nx + k];
      c = (s == 0.0) ? 0.0 : c * scale / s;
    }
  }
  fftw_execute_r2r(plans.backward, b.data, a.data);
  CellField out(g);
  std::copy(a.data, a.data + n, out.values().begin());
  return out;
}

std::vector<double> eigenvalues(int n, double h) {
  std::vector<double> lam(n);
  for (int k = 0; k < n; ++k) lam[k] = neumann_eigenvalue(k, n, h);
  return lam;
}

// Conjugate gradients ----------------------------------------------------------

/// Preconditioned CG for an SPD operator. Field must support axpy, *=, copy.
/// Returns iterations; `residual` receives the normwise backward error
/// |r| / (anorm |x| + |b|) at exit.
template <class Field, class Apply, class Precond, class Dot>
int conjugate_gradient(Field& x, const Field& b, Apply&& apply, Precond&& precond, Dot&& dot, double anorm,
                       double tol, int max_iterations, double& residual) {
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    x *= 0.0;
    residual = 0.0;
    return 0;
  }
  Field r = b;
  r -= apply(x);
  Field z = precond(r);
  Field p = z;
  double rz = dot(r, z);
  auto backward = [&] { return std::sqrt(dot(r, r)) / (anorm * std::sqrt(dot(x, x)) + bnorm); };
  residual = backward();
  int it = 0;
  while (residual > tol && it < max_iterations) {
    const Field ap = apply(p);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    ++it;
    residual = backward();
    if (residual <= tol) break;
    z = precond(r);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    p *= beta;
    p += z;
  }
  return it;
}

CellField remove_mean(CellField f) {
  const double m = f.mean();
  for (double& x : f.values()) x -= m;
  return f;
}

/// Checks finiteness and the Neumann compatibility condition; returns the
/// zero-mean right-hand side and the removed mean.
std::pair<CellField, double> compatible_rhs(const CellField& rhs) {
  if (!rhs.all_finite()) throw InputError("non-finite right-hand side");
  const double norm = norm_l2_cell(rhs);
  const double m = rhs.mean();
  if (norm == 0.0) return {rhs, 0.0};
  const double defect = std::abs(m) * std::sqrt(rhs.grid().area()) / norm;
  if (defect > kIncompatibleDefect)
    throw CompatibilityError("Neumann right-hand side violates compatibility (relative mean defect " +
                                 std::to_string(defect) + ")",
                             defect);
  return {remove_mean(rhs), m};
}

/// Normwise backward error |b - A x| / (|A| |x| + |b|); 0 when both vanish.
double backward_error(const CellField& rhs, const CellField& x, const CellField& applied, double anorm) {
  const double scale = anorm * norm_l2_cell(x) + norm_l2_cell(rhs);
  if (scale == 0.0) return 0.0;
  return norm_l2_cell(rhs - applied) / scale;
}

constexpr int kMaxRefinements = 4;

}  // namespace

double neumann_eigenvalue(int k, int n, double h) {
  return -(2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * k / n));
}

void ChOperatorSpec::validate() const {
  if (!(mobility_dt >= 0.0) || !std::isfinite(mobility_dt)) throw InputError("mobility_dt must be >= 0");
  if (!(gamma_eff > 0.0) || !std::isfinite(gamma_eff)) throw InputError("gamma_eff must be > 0");
}

void HelmholtzSpec::validate() const {
  if (!(visc_dt > 0.0) || !std::isfinite(visc_dt)) throw InputError("visc_dt must be > 0");
}

CellField apply_ch_operator(const ChOperatorSpec& op, const CellField& phi) {
  const CellField lap = lap_cell(phi);
  CellField out = phi;
  out.axpy(op.mobility_dt, lap_cell(lap));
  out.axpy(-op.mobility_dt * op.gamma_eff, lap);
  return out;
}

MacVector apply_helmholtz(const HelmholtzSpec& op, const MacVector& w) {
  MacVector out = w;
  out.axpy(-op.visc_dt, lap_velocity(w));
  out.zero_normal_boundary();
  return out;
}

CellSolve solve_neumann_poisson(const CellField& rhs, double tol, CellSolverPath path) {
  auto [b, removed] = compatible_rhs(rhs);
  const GridSpec& g = rhs.grid();
  SolveReport report;
  report.mean_removed = removed;
  CellField x(g);
  const double anorm = 4.0 / (g.hx() * g.hx()) + 4.0 / (g.hy() * g.hy());

  if (path == CellSolverPath::Transform) {
    const auto lx = eigenvalues(g.nx, g.hx());
    const auto ly = eigenvalues(g.ny, g.hy());
    auto symbol = [&](int k, int l) { return lx[k] + ly[l]; };
    x = transform_solve(b, symbol);
    report.residual = backward_error(b, x, lap_cell(x), anorm);
    while (report.residual > tol && report.iterations < kMaxRefinements) {
      x += transform_solve(remove_mean(b - lap_cell(x)), symbol);
      report.residual = backward_error(b, x, lap_cell(x), anorm);
      ++report.iterations;
    }
  } else {
    auto apply = [](const CellField& f) { return -1.0 * lap_cell(f); };
    auto identity = [](const CellField& f) { return remove_mean(f); };
    CellField minus_b = -1.0 * b;
    report.iterations = conjugate_gradient(x, minus_b, apply, identity, dot_cell, anorm, tol,
                                           10 * static_cast<int>(g.cell_count()) + 100, report.residual);
  }
  x = remove_mean(std::move(x));
  if (report.residual > tol) throw SolverError("Neumann Poisson solve did not reach tolerance", report);
  return {std::move(x), report};
}

CellSolve solve_ch_system(const ChOperatorSpec& op, const CellField& rhs, double tol, CellSolverPath path) {
  op.validate();
  if (!rhs.all_finite()) throw InputError("non-finite right-hand side");
  const GridSpec& g = rhs.grid();
  SolveReport report;
  CellField x(g);
  auto apply = [&](const CellField& f) { return apply_ch_operator(op, f); };
  const double lam_max = 4.0 / (g.hx() * g.hx()) + 4.0 / (g.hy() * g.hy());
  const double anorm = 1.0 + op.mobility_dt * lam_max * (lam_max + op.gamma_eff);

  if (path == CellSolverPath::Transform) {
    const auto lx = eigenvalues(g.nx, g.hx());
    const auto ly = eigenvalues(g.ny, g.hy());
    auto symbol = [&](int k, int l) {
      const double lam = lx[k] + ly[l];
      return 1.0 + op.mobility_dt * lam * lam - op.mobility_dt * op.gamma_eff * lam;
    };
    x = transform_solve(rhs, symbol);
    report.residual = backward_error(rhs, x, apply(x), anorm);
    while (report.residual > tol && report.iterations < kMaxRefinements) {
      x += transform_solve(rhs - apply(x), symbol);
      report.residual = backward_error(rhs, x, apply(x), anorm);
      ++report.iterations;
    }
  } else {
    auto identity = [](const CellField& f) { return f; };
    report.iterations = conjugate_gradient(x, rhs, apply, identity, dot_cell, anorm, tol,
                                           10 * static_cast<int>(g.cell_count()) + 100, report.residual);
  }
  if (report.residual > tol) throw SolverError("Cahn-Hilliard solve did not reach tolerance", report);
  return {std::move(x), report};
}

VelocitySolve solve_velocity_helmholtz(const HelmholtzSpec& op, const MacVector& rhs, double tol,
                                       int max_iterations) {
  op.validate();
  if (!rhs.all_finite()) throw InputError("non-finite right-hand side");
  const GridSpec& g = rhs.grid();
  MacVector b = rhs;
  b.zero_normal_boundary();

  // Jacobi diagonal; tangential ghosts add one extra 1/h^2 next to a wall.
  const double cx = op.visc_dt / (g.hx() * g.hx());
  const double cy = op.visc_dt / (g.hy() * g.hy());
  MacVector inv_diag(g);
  for (int j = 0; j < g.ny; ++j) {
    const double ywall = (j == 0 || j == g.ny - 1) ? 3.0 : 2.0;
    for (int i = 1; i < g.nx; ++i) inv_diag.u(i, j) = 1.0 / (1.0 + 2.0 * cx + ywall * cy);
  }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double xwall = (i == 0 || i == g.nx - 1) ? 3.0 : 2.0;
      inv_diag.v(i, j) = 1.0 / (1.0 + xwall * cx + 2.0 * cy);
    }

  auto apply = [&](const MacVector& w) { return apply_helmholtz(op, w); };
  auto precond = [&](const MacVector& r) {
    MacVector z = r;
    auto zu = z.u_values();
    auto du = inv_diag.u_values();
    for (std::size_t k = 0; k < zu.size(); ++k) zu[k] *= du[k];
    auto zv = z.v_values();
    auto dv = inv_diag.v_values();
    for (std::size_t k = 0; k < zv.size(); ++k) zv[k] *= dv[k];
    return z;
  };
  if (max_iterations <= 0) max_iterations = 10 * static_cast<int>(g.cell_count()) + 100;

  // Start from the rhs: the operator is a small perturbation of identity.
  MacVector x = b;
  SolveReport report;
  // Gershgorin bound; wall rows carry one extra 1/h^2 from the ghost.
  const double anorm = 1.0 + 2.0 * (3.0 * cx + 3.0 * cy);
  report.iterations =
      conjugate_gradient(x, b, apply, precond, dot_face, anorm, tol, max_iterations, report.residual);
  if (report.residual > tol) throw SolverError("velocity Helmholtz solve did not reach tolerance", report);
  x.zero_normal_boundary();
  return {std::move(x), report};
}

Projection project(const MacVector& w, double dt_over_coef, double tol) {
  if (!(dt_over_coef > 0.0)) throw InputError("projection coefficient must be > 0");
  if (!w.all_finite()) throw InputError("non-finite velocity");
  MacVector u = w;
  u.zero_normal_boundary();
  // With zero normal flux div(u) telescopes to zero mean; whatever mean is
  // left is rounding, so it is removed here instead of being judged by the
  // compatibility check (which would reject an already solenoidal field).
  const CellField div_w = remove_mean(div_face_to_cell(u));
  const double div_norm = norm_l2_cell(div_w);
  CellSolve potential = solve_neumann_poisson((1.0 / dt_over_coef) * div_w, tol);
  u.axpy(-dt_over_coef, grad_cell_to_face(potential.solution));
  SolveReport report = potential.report;
  report.residual = div_norm == 0.0 ? 0.0 : norm_l2_cell(div_face_to_cell(u)) / div_norm;
  return {std::move(u), std::move(potential.solution), report};
}

}  // namespace chns
