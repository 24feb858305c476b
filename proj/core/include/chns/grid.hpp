#pragma once

/// @file grid.hpp
/// @brief Uniform MAC staggered grid, field containers and the discrete
/// operators used by the phase-field and momentum equations.
///
/// Layout on an nx-by-ny rectangle:
///   - CellField: one value per cell center ((i+1/2)hx, (j+1/2)hy).
///   - MacVector: x-component on vertical faces (i*hx, (j+1/2)hy), i = 0..nx,
///     y-component on horizontal faces ((i+1/2)hx, j*hy), j = 0..ny.
///   - NodeField: one value per grid node (i*hx, j*hy).
///
/// Boundary conventions: phi, mu and p are homogeneous Neumann (mirror ghost
/// cells). Velocities are no-slip: normal components sit on the wall and are
/// zero, tangential ghost values are the odd reflection of the first interior
/// value.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chns {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  static GridSpec unit_square(int nx, int ny) { return GridSpec{nx, ny, 0.0, 1.0, 0.0, 1.0}; }

  double hx() const { return (x1 - x0) / nx; }
  double hy() const { return (y1 - y0) / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return (x1 - x0) * (y1 - y0); }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }

  /// Throws DimensionError unless nx, ny >= 4 and the extents are positive.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

enum class BcKind { NeumannCell, DirichletVelocity, NeumannPressure };

class CellField {
 public:
  CellField() = default;
  explicit CellField(const GridSpec& grid, double value = 0.0);

  const GridSpec& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::size_t size() const { return data_.size(); }

  double x(int i) const { return grid_.x0 + (i + 0.5) * grid_.hx(); }
  double y(int j) const { return grid_.y0 + (j + 0.5) * grid_.hy(); }

  CellField& operator+=(const CellField& other);
  CellField& operator-=(const CellField& other);
  CellField& operator*=(double s);
  /// this += s * other
  CellField& axpy(double s, const CellField& other);

  double mean() const;
  bool all_finite() const;

  template <class Fn>
  static CellField sample(const GridSpec& grid, Fn&& fn) {
    CellField f(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) f(i, j) = fn(f.x(i), f.y(j));
    return f;
  }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * grid_.nx + i; }

  GridSpec grid_;
  std::vector<double> data_;
};

CellField operator+(CellField a, const CellField& b);
CellField operator-(CellField a, const CellField& b);
CellField operator*(double s, CellField a);

class MacVector {
 public:
  MacVector() = default;
  explicit MacVector(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }

  /// x-component on vertical face i (0..nx), row j (0..ny-1).
  double& u(int i, int j) { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double u(int i, int j) const { return u_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  /// y-component on horizontal face j (0..ny), column i (0..nx-1).
  double& v(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  double v(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx + i]; }

  std::span<double> u_values() { return u_; }
  std::span<const double> u_values() const { return u_; }
  std::span<double> v_values() { return v_; }
  std::span<const double> v_values() const { return v_; }

  double u_x(int i) const { return grid_.x0 + i * grid_.hx(); }
  double u_y(int j) const { return grid_.y0 + (j + 0.5) * grid_.hy(); }
  double v_x(int i) const { return grid_.x0 + (i + 0.5) * grid_.hx(); }
  double v_y(int j) const { return grid_.y0 + j * grid_.hy(); }

  MacVector& operator+=(const MacVector& other);
  MacVector& operator-=(const MacVector& other);
  MacVector& operator*=(double s);
  MacVector& axpy(double s, const MacVector& other);

  /// Sets the wall-normal components (u on x-walls, v on y-walls) to zero.
  void zero_normal_boundary();
  /// Largest absolute wall-normal component.
  double max_normal_boundary() const;
  bool all_finite() const;

  template <class FnU, class FnV>
  static MacVector sample(const GridSpec& grid, FnU&& fu, FnV&& fv) {
    MacVector w(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i <= grid.nx; ++i) w.u(i, j) = fu(w.u_x(i), w.u_y(j));
    for (int j = 0; j <= grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) w.v(i, j) = fv(w.v_x(i), w.v_y(j));
    return w;
  }

 private:
  GridSpec grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

MacVector operator+(MacVector a, const MacVector& b);
MacVector operator-(MacVector a, const MacVector& b);
MacVector operator*(double s, MacVector a);

/// Scalar on grid nodes, (nx+1)*(ny+1) values.
class NodeField {
 public:
  NodeField() = default;
  explicit NodeField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i]; }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(j) * (grid_.nx + 1) + i];
  }
  std::span<const double> values() const { return data_; }

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

// Differential operators.

/// Face-centered gradient of a cell field; boundary faces carry zero
/// (homogeneous Neumann).
MacVector grad_cell_to_face(const CellField& p);
CellField div_face_to_cell(const MacVector& w);
/// 5-point Laplacian with mirrored (Neumann) ghost cells.
CellField lap_cell(const CellField& f);
/// Component-wise 5-point Laplacian under no-slip ghosting. Wall-normal
/// entries of the result are zero.
MacVector lap_velocity(const MacVector& w);
/// Conservative advection div(w f) with centered face interpolation of f.
CellField advect_scalar(const MacVector& w, const CellField& f);
/// Centered convection (w . grad) w at face locations.
MacVector advect_velocity(const MacVector& w);
/// Face-centered mu * grad(phi), zero on wall faces.
MacVector chemical_force(const CellField& mu, const CellField& phi);
/// dv/dx - du/dy at grid nodes. Wall nodes use the odd-reflection ghost of
/// the tangential component, which makes the value 2*u_t/h there.
NodeField curl_at_nodes(const MacVector& w);

// Inner products and norms; all are area-weighted sums.

double dot_cell(const CellField& a, const CellField& b);
/// Sums over every face; wall-normal entries contribute if nonzero.
double dot_face(const MacVector& a, const MacVector& b);
/// Trapezoidal weights: 1/2 on wall nodes, 1/4 on corners.
double dot_node(const NodeField& a, const NodeField& b);
double norm_l2_cell(const CellField& f);
double norm_l2_face(const MacVector& w);
double norm_l2_node(const NodeField& f);
/// |grad f| in the face norm.
double norm_h1_semi(const CellField& f);
/// <-lap_velocity w, w>^{1/2}: the discrete Dirichlet energy of a velocity.
double norm_h1_semi_velocity(const MacVector& w);

}  // namespace chns
