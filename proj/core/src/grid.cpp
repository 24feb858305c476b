#include "chns/grid.hpp"

#include <algorithm>
#include <cmath>

namespace chns {

namespace {

void require_same(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string("grid mismatch in ") + what);
}

double sum_products(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

void GridSpec::validate() const {
  if (nx < 4 || ny < 4) throw DimensionError("grid needs at least 4 cells per direction");
  if (!(x1 > x0) || !(y1 > y0)) throw DimensionError("grid extents must be positive");
}

// CellField -----------------------------------------------------------------

CellField::CellField(const GridSpec& grid, double value)
    : grid_(grid), data_(grid.cell_count(), value) {}

CellField& CellField::operator+=(const CellField& other) {
  require_same(grid_, other.grid_, "CellField +=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

CellField& CellField::operator-=(const CellField& other) {
  require_same(grid_, other.grid_, "CellField -=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

CellField& CellField::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

CellField& CellField::axpy(double s, const CellField& other) {
  require_same(grid_, other.grid_, "CellField axpy");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * other.data_[k];
  return *this;
}

double CellField::mean() const {
  double s = 0.0;
  for (double x : data_) s += x;
  return data_.empty() ? 0.0 : s / static_cast<double>(data_.size());
}

bool CellField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

CellField operator+(CellField a, const CellField& b) { return a += b; }
CellField operator-(CellField a, const CellField& b) { return a -= b; }
CellField operator*(double s, CellField a) { return a *= s; }

// MacVector -----------------------------------------------------------------

MacVector::MacVector(const GridSpec& grid)
    : grid_(grid),
      u_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, 0.0),
      v_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), 0.0) {}

MacVector& MacVector::operator+=(const MacVector& other) {
  require_same(grid_, other.grid_, "MacVector +=");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += other.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += other.v_[k];
  return *this;
}

MacVector& MacVector::operator-=(const MacVector& other) {
  require_same(grid_, other.grid_, "MacVector -=");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] -= other.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= other.v_[k];
  return *this;
}

MacVector& MacVector::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}

MacVector& MacVector::axpy(double s, const MacVector& other) {
  require_same(grid_, other.grid_, "MacVector axpy");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += s * other.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += s * other.v_[k];
  return *this;
}

void MacVector::zero_normal_boundary() {
  for (int j = 0; j < grid_.ny; ++j) {
    u(0, j) = 0.0;
    u(grid_.nx, j) = 0.0;
  }
  for (int i = 0; i < grid_.nx; ++i) {
    v(i, 0) = 0.0;
    v(i, grid_.ny) = 0.0;
  }
}

double MacVector::max_normal_boundary() const {
  double m = 0.0;
  for (int j = 0; j < grid_.ny; ++j) m = std::max({m, std::abs(u(0, j)), std::abs(u(grid_.nx, j))});
  for (int i = 0; i < grid_.nx; ++i) m = std::max({m, std::abs(v(i, 0)), std::abs(v(i, grid_.ny))});
  return m;
}

bool MacVector::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(u_.begin(), u_.end(), finite) && std::all_of(v_.begin(), v_.end(), finite);
}

MacVector operator+(MacVector a, const MacVector& b) { return a += b; }
MacVector operator-(MacVector a, const MacVector& b) { return a -= b; }
MacVector operator*(double s, MacVector a) { return a *= s; }

NodeField::NodeField(const GridSpec& grid)
    : grid_(grid), data_(static_cast<std::size_t>(grid.nx + 1) * (grid.ny + 1), 0.0) {}

// Operators -----------------------------------------------------------------

MacVector grad_cell_to_face(const CellField& p) {
  const GridSpec& g = p.grid();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  MacVector w(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) w.u(i, j) = (p(i, j) - p(i - 1, j)) * ihx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.v(i, j) = (p(i, j) - p(i, j - 1)) * ihy;
  return w;
}

CellField div_face_to_cell(const MacVector& w) {
  const GridSpec& g = w.grid();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  CellField d(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      d(i, j) = (w.u(i + 1, j) - w.u(i, j)) * ihx + (w.v(i, j + 1) - w.v(i, j)) * ihy;
  return d;
}

CellField lap_cell(const CellField& f) {
  const GridSpec& g = f.grid();
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  CellField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = f(i, j);
      const double w = i > 0 ? f(i - 1, j) : c;
      const double e = i + 1 < g.nx ? f(i + 1, j) : c;
      const double s = j > 0 ? f(i, j - 1) : c;
      const double n = j + 1 < g.ny ? f(i, j + 1) : c;
      out(i, j) = (w - 2.0 * c + e) * ihx2 + (s - 2.0 * c + n) * ihy2;
    }
  }
  return out;
}

MacVector lap_velocity(const MacVector& w) {
  const GridSpec& g = w.grid();
  const double ihx2 = 1.0 / (g.hx() * g.hx());
  const double ihy2 = 1.0 / (g.hy() * g.hy());
  MacVector out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double c = w.u(i, j);
      const double s = j > 0 ? w.u(i, j - 1) : -c;
      const double n = j + 1 < g.ny ? w.u(i, j + 1) : -c;
      out.u(i, j) = (w.u(i - 1, j) - 2.0 * c + w.u(i + 1, j)) * ihx2 + (s - 2.0 * c + n) * ihy2;
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = w.v(i, j);
      const double west = i > 0 ? w.v(i - 1, j) : -c;
      const double east = i + 1 < g.nx ? w.v(i + 1, j) : -c;
      out.v(i, j) = (west - 2.0 * c + east) * ihx2 + (w.v(i, j - 1) - 2.0 * c + w.v(i, j + 1)) * ihy2;
    }
  }
  return out;
}

CellField advect_scalar(const MacVector& w, const CellField& f) {
  const GridSpec& g = w.grid();
  require_same(g, f.grid(), "advect_scalar");
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  CellField out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double fw = i > 0 ? w.u(i, j) * 0.5 * (f(i - 1, j) + f(i, j)) : 0.0;
      const double fe = i + 1 < g.nx ? w.u(i + 1, j) * 0.5 * (f(i, j) + f(i + 1, j)) : 0.0;
      const double fs = j > 0 ? w.v(i, j) * 0.5 * (f(i, j - 1) + f(i, j)) : 0.0;
      const double fn = j + 1 < g.ny ? w.v(i, j + 1) * 0.5 * (f(i, j) + f(i, j + 1)) : 0.0;
      out(i, j) = (fe - fw) * ihx + (fn - fs) * ihy;
    }
  }
  return out;
}

MacVector advect_velocity(const MacVector& w) {
  const GridSpec& g = w.grid();
  const double ihx2 = 0.5 / g.hx();
  const double ihy2 = 0.5 / g.hy();
  MacVector out(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double c = w.u(i, j);
      const double s = j > 0 ? w.u(i, j - 1) : -c;
      const double n = j + 1 < g.ny ? w.u(i, j + 1) : -c;
      const double vbar = 0.25 * (w.v(i - 1, j) + w.v(i, j) + w.v(i - 1, j + 1) + w.v(i, j + 1));
      out.u(i, j) = c * (w.u(i + 1, j) - w.u(i - 1, j)) * ihx2 + vbar * (n - s) * ihy2;
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = w.v(i, j);
      const double west = i > 0 ? w.v(i - 1, j) : -c;
      const double east = i + 1 < g.nx ? w.v(i + 1, j) : -c;
      const double ubar = 0.25 * (w.u(i, j - 1) + w.u(i + 1, j - 1) + w.u(i, j) + w.u(i + 1, j));
      out.v(i, j) = ubar * (east - west) * ihx2 + c * (w.v(i, j + 1) - w.v(i, j - 1)) * ihy2;
    }
  }
  return out;
}

MacVector chemical_force(const CellField& mu, const CellField& phi) {
  const GridSpec& g = mu.grid();
  require_same(g, phi.grid(), "chemical_force");
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  MacVector out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      out.u(i, j) = 0.5 * (mu(i - 1, j) + mu(i, j)) * (phi(i, j) - phi(i - 1, j)) * ihx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.v(i, j) = 0.5 * (mu(i, j - 1) + mu(i, j)) * (phi(i, j) - phi(i, j - 1)) * ihy;
  return out;
}

NodeField curl_at_nodes(const MacVector& w) {
  const GridSpec& g = w.grid();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  NodeField c(g);
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      // v on horizontal face j at columns i-1 and i; ghost = -interior.
      double dvdx = 0.0;
      if (g.nx > 0) {
        const double right = i < g.nx ? w.v(i, j) : -w.v(g.nx - 1, j);
        const double left = i > 0 ? w.v(i - 1, j) : -w.v(0, j);
        dvdx = (right - left) * ihx;
      }
      const double top = j < g.ny ? w.u(i, j) : -w.u(i, g.ny - 1);
      const double bottom = j > 0 ? w.u(i, j - 1) : -w.u(i, 0);
      const double dudy = (top - bottom) * ihy;
      c(i, j) = dvdx - dudy;
    }
  }
  return c;
}

double dot_cell(const CellField& a, const CellField& b) {
  require_same(a.grid(), b.grid(), "dot_cell");
  return a.grid().cell_area() * sum_products(a.values(), b.values());
}

double dot_face(const MacVector& a, const MacVector& b) {
  require_same(a.grid(), b.grid(), "dot_face");
  return a.grid().cell_area() *
         (sum_products(a.u_values(), b.u_values()) + sum_products(a.v_values(), b.v_values()));
}

double dot_node(const NodeField& a, const NodeField& b) {
  const GridSpec& g = a.grid();
  require_same(g, b.grid(), "dot_node");
  double s = 0.0;
  for (int j = 0; j <= g.ny; ++j) {
    const double wy = (j == 0 || j == g.ny) ? 0.5 : 1.0;
    for (int i = 0; i <= g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx) ? 0.5 : 1.0;
      s += wx * wy * a(i, j) * b(i, j);
    }
  }
  return g.cell_area() * s;
}

double norm_l2_cell(const CellField& f) { return std::sqrt(dot_cell(f, f)); }
double norm_l2_face(const MacVector& w) { return std::sqrt(dot_face(w, w)); }
double norm_l2_node(const NodeField& f) { return std::sqrt(dot_node(f, f)); }

double norm_h1_semi(const CellField& f) { return norm_l2_face(grad_cell_to_face(f)); }

double norm_h1_semi_velocity(const MacVector& w) {
  const GridSpec& g = w.grid();
  const double ihx = 1.0 / g.hx();
  const double ihy = 1.0 / g.hy();
  double s = 0.0;
  // x-component: d/dx at cell centers, d/dy at nodes with half-weight walls.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w.u(i + 1, j) - w.u(i, j)) * ihx;
      s += d * d;
    }
  for (int j = 0; j <= g.ny; ++j) {
    const double wy = (j == 0 || j == g.ny) ? 0.5 : 1.0;
    for (int i = 1; i < g.nx; ++i) {
      const double top = j < g.ny ? w.u(i, j) : -w.u(i, g.ny - 1);
      const double bottom = j > 0 ? w.u(i, j - 1) : -w.u(i, 0);
      const double d = (top - bottom) * ihy;
      s += wy * d * d;
    }
  }
  // y-component, mirrored roles.
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w.v(i, j + 1) - w.v(i, j)) * ihy;
      s += d * d;
    }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i <= g.nx; ++i) {
      const double wx = (i == 0 || i == g.nx) ? 0.5 : 1.0;
      const double right = i < g.nx ? w.v(i, j) : -w.v(g.nx - 1, j);
      const double left = i > 0 ? w.v(i - 1, j) : -w.v(0, j);
      const double d = (right - left) * ihx;
      s += wx * d * d;
    }
  }
  return std::sqrt(g.cell_area() * s);
}

}  // namespace chns
