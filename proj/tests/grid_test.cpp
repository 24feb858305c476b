#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "chns/grid.hpp"
#include "chns/msav_first.hpp"
#include "dense_ops.hpp"
#include "random_fields.hpp"

using namespace chns;
using namespace chns::testing;
using std::numbers::pi;

namespace {

double max_abs(const CellField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

/// Max difference over the active (non wall-normal) faces.
double max_abs_active(const MacVector& a, const MacVector& b) {
  const GridSpec& g = a.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) m = std::max(m, std::abs(a.u(i, j) - b.u(i, j)));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m = std::max(m, std::abs(a.v(i, j) - b.v(i, j)));
  return m;
}

double rate_of(const std::function<double(int)>& error_at, int n) {
  return std::log2(error_at(n) / error_at(2 * n));
}

// Divergence-free, vanishing on the boundary of the unit square.
double wu(double x, double y) { return std::pow(std::sin(pi * x), 2) * std::sin(2 * pi * y); }
double wv(double x, double y) { return -std::pow(std::sin(pi * y), 2) * std::sin(2 * pi * x); }

MacVector manufactured(const GridSpec& g) { return MacVector::sample(g, wu, wv); }

}  // namespace

TEST(GridSpec, UnitSquareSpacing) {
  const GridSpec g = GridSpec::unit_square(8, 4);
  EXPECT_DOUBLE_EQ(g.hx(), 0.125);
  EXPECT_DOUBLE_EQ(g.hy(), 0.25);
  EXPECT_DOUBLE_EQ(g.area(), 1.0);
}

TEST(GridSpec, RejectsTinyOrInvertedGrids) {
  EXPECT_THROW(GridSpec::unit_square(3, 8).validate(), DimensionError);
  EXPECT_THROW((GridSpec{8, 8, 1.0, 0.0, 0.0, 1.0}).validate(), DimensionError);
  EXPECT_NO_THROW(GridSpec::unit_square(4, 4).validate());
}

TEST(Gradient, ConstantFieldHasZeroGradient) {
  const GridSpec g = GridSpec::unit_square(10, 7);
  EXPECT_EQ(norm_l2_face(grad_cell_to_face(CellField(g, 3.5))), 0.0);
}

TEST(Gradient, LinearFieldIsExactOnInteriorFaces) {
  const GridSpec g = GridSpec::unit_square(9, 6);
  const MacVector d = grad_cell_to_face(CellField::sample(g, [](double x, double) { return x; }));
  for (int j = 0; j < g.ny; ++j) {
    EXPECT_EQ(d.u(0, j), 0.0);
    EXPECT_EQ(d.u(g.nx, j), 0.0);
    for (int i = 1; i < g.nx; ++i) EXPECT_NEAR(d.u(i, j), 1.0, 1e-13);
  }
  for (double v : d.v_values()) EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(Gradient, AdjointToDivergence) {
  std::mt19937_64 rng(1);
  for (const GridSpec& g : {GridSpec::unit_square(8, 8), GridSpec{13, 9, -1.0, 2.0, 0.0, 0.5}}) {
    for (int trial = 0; trial < 5; ++trial) {
      const CellField p = random_cell(g, rng);
      const MacVector w = random_mac(g, rng);
      const double lhs = dot_face(grad_cell_to_face(p), w);
      const double rhs = -dot_cell(p, div_face_to_cell(w));
      EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + std::abs(rhs)));
    }
  }
}

TEST(Divergence, ZeroInZeroOut) {
  const GridSpec g = GridSpec::unit_square(6, 6);
  EXPECT_EQ(max_abs(div_face_to_cell(MacVector(g))), 0.0);
}

TEST(Divergence, DivGradConvergesAtSecondOrder) {
  auto err = [](int n) {
    const GridSpec g = GridSpec::unit_square(n, n);
    const CellField p = CellField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    CellField e = div_face_to_cell(grad_cell_to_face(p));
    e.axpy(2 * pi * pi, p);
    return max_abs(e);
  };
  EXPECT_GT(rate_of(err, 16), 1.9);
  EXPECT_GT(rate_of(err, 32), 1.95);
}

TEST(LapCell, ConstantIsAnnihilated) {
  const GridSpec g = GridSpec::unit_square(7, 11);
  EXPECT_LT(max_abs(lap_cell(CellField(g, -2.0))), 1e-12);
}

TEST(LapCell, CosineModesAreEigenfields) {
  const GridSpec g = GridSpec::unit_square(16, 12);
  for (int k = 0; k < 16; ++k) {
    const CellField f = CellField::sample(g, [&](double x, double) { return std::cos(k * pi * x); });
    const double lambda = -(2.0 / (g.hx() * g.hx())) * (1.0 - std::cos(k * pi * g.hx()));
    CellField e = lap_cell(f);
    e.axpy(-lambda, f);
    EXPECT_LT(max_abs(e), 1e-10 * std::max(1.0, std::abs(lambda))) << "k=" << k;
  }
}

TEST(LapCell, SymmetricAndNegativeSemidefinite) {
  std::mt19937_64 rng(2);
  const GridSpec g{12, 9, 0.0, 1.0, 0.0, 2.0};
  for (int trial = 0; trial < 10; ++trial) {
    const CellField f = random_cell(g, rng), h = random_cell(g, rng);
    const double a = dot_cell(lap_cell(f), h), b = dot_cell(f, lap_cell(h));
    EXPECT_NEAR(a, b, 1e-13 * (std::abs(a) + std::abs(b)));
    EXPECT_LE(dot_cell(lap_cell(f), f), 0.0);
  }
}

TEST(LapCell, MatchesAssembledMatrix) {
  std::mt19937_64 rng(3);
  const GridSpec g{7, 5, 0.0, 1.0, 0.0, 0.8};
  const DofMap m(g);
  const CellField f = random_cell(g, rng);
  const VectorXd expect = neumann_laplacian(m) * m.pack(f);
  EXPECT_LT((m.pack(lap_cell(f)) - expect).norm(), 1e-12 * expect.norm());
}

TEST(LapVelocity, ZeroInZeroOut) {
  const GridSpec g = GridSpec::unit_square(6, 6);
  EXPECT_EQ(norm_l2_face(lap_velocity(MacVector(g))), 0.0);
}

TEST(LapVelocity, SymmetricAndNegativeDefinite) {
  std::mt19937_64 rng(4);
  const GridSpec g{10, 14, 0.0, 1.0, 0.0, 1.3};
  for (int trial = 0; trial < 10; ++trial) {
    const MacVector a = random_mac(g, rng), b = random_mac(g, rng);
    const double x = dot_face(lap_velocity(a), b), y = dot_face(a, lap_velocity(b));
    EXPECT_NEAR(x, y, 1e-12 * (std::abs(x) + std::abs(y)));
    EXPECT_LT(dot_face(lap_velocity(a), a), 0.0);
  }
}

TEST(LapVelocity, MatchesAssembledMatrix) {
  std::mt19937_64 rng(5);
  const GridSpec g{6, 8, 0.0, 1.5, 0.0, 1.0};
  const DofMap m(g);
  const MacVector w = random_mac(g, rng);
  const VectorXd expect = velocity_laplacian(m) * m.pack(w);
  EXPECT_LT((m.pack(lap_velocity(w)) - expect).norm(), 1e-12 * expect.norm());
}

TEST(LapVelocity, ManufacturedFieldConvergesAtSecondOrder) {
  auto err = [](int n) {
    const GridSpec g = GridSpec::unit_square(n, n);
    const MacVector exact = MacVector::sample(
        g,
        [](double x, double y) {
          return 2 * pi * pi * std::cos(2 * pi * x) * std::sin(2 * pi * y) -
                 4 * pi * pi * std::pow(std::sin(pi * x), 2) * std::sin(2 * pi * y);
        },
        [](double x, double y) {
          return -2 * pi * pi * std::cos(2 * pi * y) * std::sin(2 * pi * x) +
                 4 * pi * pi * std::pow(std::sin(pi * y), 2) * std::sin(2 * pi * x);
        });
    return max_abs_active(lap_velocity(manufactured(g)), exact);
  };
  EXPECT_GT(rate_of(err, 16), 1.9);
  EXPECT_GT(rate_of(err, 32), 1.9);
}

TEST(AdvectScalar, ConstantIsTransportedWithoutSources) {
  std::mt19937_64 rng(6);
  const GridSpec g = GridSpec::unit_square(16, 16);
  // Discretely divergence-free: a discrete stream function curl.
  const CellField s = random_cell(g, rng);
  MacVector w(g);
  // u = d(psi)/dy, v = -d(psi)/dx with psi at nodes, zero on the boundary.
  auto psi = [&](int i, int j) {
    if (i == 0 || j == 0 || i == g.nx || j == g.ny) return 0.0;
    return s(i - 1, j - 1);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) w.u(i, j) = (psi(i, j + 1) - psi(i, j)) / g.hy();
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.v(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.hx();
  ASSERT_LT(max_abs(div_face_to_cell(w)), 1e-10);
  EXPECT_LT(max_abs(advect_scalar(w, CellField(g, 2.5))), 1e-12 * norm_l2_face(w) * 2.5 / g.hx());
}

TEST(AdvectScalar, ZeroVelocityGivesZero) {
  std::mt19937_64 rng(7);
  const GridSpec g = GridSpec::unit_square(8, 8);
  EXPECT_EQ(max_abs(advect_scalar(MacVector(g), random_cell(g, rng))), 0.0);
}

TEST(AdvectScalar, IntegratesToZero) {
  std::mt19937_64 rng(8);
  const GridSpec g{11, 7, 0.0, 1.0, 0.0, 0.6};
  for (int trial = 0; trial < 5; ++trial) {
    const MacVector w = random_mac(g, rng);
    const CellField f = random_cell(g, rng);
    const CellField a = advect_scalar(w, f);
    double total = 0.0;
    for (double x : a.values()) total += x;
    EXPECT_LE(std::abs(total * g.cell_area()), 1e-12 * norm_l2_face(w) * norm_l2_cell(f));
  }
}

TEST(AdvectVelocity, ZeroInZeroOut) {
  const GridSpec g = GridSpec::unit_square(8, 8);
  EXPECT_EQ(norm_l2_face(advect_velocity(MacVector(g))), 0.0);
}

TEST(AdvectVelocity, ManufacturedFieldConvergesAtSecondOrder) {
  auto err = [](int n) {
    const GridSpec g = GridSpec::unit_square(n, n);
    const MacVector exact = MacVector::sample(
        g,
        [](double x, double y) {
          const double ux = pi * std::sin(2 * pi * x) * std::sin(2 * pi * y);
          const double uy = 2 * pi * std::pow(std::sin(pi * x), 2) * std::cos(2 * pi * y);
          return wu(x, y) * ux + wv(x, y) * uy;
        },
        [](double x, double y) {
          const double vx = -2 * pi * std::pow(std::sin(pi * y), 2) * std::cos(2 * pi * x);
          const double vy = -pi * std::sin(2 * pi * y) * std::sin(2 * pi * x);
          return wu(x, y) * vx + wv(x, y) * vy;
        });
    return max_abs_active(advect_velocity(manufactured(g)), exact);
  };
  EXPECT_GT(rate_of(err, 16), 1.9);
  EXPECT_GT(rate_of(err, 32), 1.9);
}

TEST(ChemicalForce, ConstantPhaseExertsNoForce) {
  std::mt19937_64 rng(9);
  const GridSpec g = GridSpec::unit_square(8, 8);
  EXPECT_EQ(norm_l2_face(chemical_force(random_cell(g, rng), CellField(g, 0.7))), 0.0);
}

TEST(ChemicalForce, ConstantPotentialFactorsOut) {
  std::mt19937_64 rng(10);
  const GridSpec g = GridSpec::unit_square(9, 8);
  const CellField phi = random_cell(g, rng);
  const MacVector f = chemical_force(CellField(g, -1.5), phi);
  const MacVector expect = -1.5 * grad_cell_to_face(phi);
  EXPECT_LT(max_abs_active(f, expect), 1e-13);
  for (int j = 0; j < g.ny; ++j) EXPECT_EQ(f.u(0, j), 0.0);
}

TEST(ChemicalForce, FaceAndCellQuadraturesAgreeAtSecondOrder) {
  auto gap = [](int n) {
    const GridSpec g = GridSpec::unit_square(n, n);
    const CellField phi = CellField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
    const CellField mu = CellField::sample(g, [](double x, double y) { return std::sin(pi * x) + y * y; });
    const MacVector f = chemical_force(mu, phi);
    const MacVector w = manufactured(g);
    // Both factors averaged to cell centers.
    double cell = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        cell += 0.25 * ((w.u(i, j) + w.u(i + 1, j)) * (f.u(i, j) + f.u(i + 1, j)) +
                        (w.v(i, j) + w.v(i, j + 1)) * (f.v(i, j) + f.v(i, j + 1)));
    cell *= g.cell_area();
    return std::abs(force_pairing(w, f) - cell);
  };
  EXPECT_GT(rate_of(gap, 16), 1.8);
  EXPECT_GT(rate_of(gap, 32), 1.8);
}

TEST(ChemicalForce, CorruptedPairingDropsYFaces) {
  std::mt19937_64 rng(11);
  const GridSpec g = GridSpec::unit_square(8, 8);
  const MacVector w = random_mac(g, rng), f = random_mac(g, rng);
  MacVector x_only = w;
  for (double& v : x_only.v_values()) v = 0.0;
  EXPECT_DOUBLE_EQ(force_pairing(w, f, PairingQuadrature::CorruptedForTesting), dot_face(x_only, f));
  EXPECT_DOUBLE_EQ(force_pairing(w, f), dot_face(w, f));
}

TEST(Norms, ZeroAndUnitFields) {
  const GridSpec g = GridSpec::unit_square(5, 9);
  EXPECT_EQ(norm_l2_cell(CellField(g)), 0.0);
  EXPECT_EQ(norm_l2_face(MacVector(g)), 0.0);
  EXPECT_NEAR(norm_l2_cell(CellField(g, 1.0)), 1.0, 1e-14);
  const GridSpec r{4, 4, 0.0, 2.0, 0.0, 3.0};
  EXPECT_NEAR(norm_l2_cell(CellField(r, 1.0)), std::sqrt(6.0), 1e-14);
}

TEST(Norms, MismatchedGridsAreRejected) {
  const CellField a(GridSpec::unit_square(4, 4)), b(GridSpec::unit_square(5, 4));
  EXPECT_THROW(dot_cell(a, b), DimensionError);
  const MacVector u(GridSpec::unit_square(4, 4)), v(GridSpec::unit_square(4, 6));
  EXPECT_THROW(dot_face(u, v), DimensionError);
}

TEST(Curl, VorticityIdentityIsExactOnTheGrid) {
  // |curl w|^2 + |div w|^2 = |grad w|^2 = -<lap w, w> for every w with zero
  // normal boundary values, not only in the limit.
  std::mt19937_64 rng(12);
  for (const GridSpec& g : {GridSpec::unit_square(8, 8), GridSpec{12, 7, 0.0, 1.2, 0.0, 0.7}}) {
    const MacVector w = random_mac(g, rng);
    const double curl2 = std::pow(norm_l2_node(curl_at_nodes(w)), 2);
    const double div2 = std::pow(norm_l2_cell(div_face_to_cell(w)), 2);
    const double grad2 = std::pow(norm_h1_semi_velocity(w), 2);
    EXPECT_NEAR(curl2 + div2, grad2, 1e-12 * grad2);
    EXPECT_NEAR(-dot_face(lap_velocity(w), w), grad2, 1e-12 * grad2);
  }
}

TEST(Curl, GradientNormConvergesForSmoothField) {
  // The manufactured field has |grad w|^2 = 2 pi^2 exactly.
  auto err = [](int n) {
    return std::abs(std::pow(norm_h1_semi_velocity(manufactured(GridSpec::unit_square(n, n))), 2) - 2 * pi * pi);
  };
  EXPECT_GT(rate_of(err, 16), 1.8);
}

TEST(Curl, RigidRotationSample) {
  // Rotation about the center: u = -(y - 1/2), v = x - 1/2, curl = 2 away from walls.
  const GridSpec g = GridSpec::unit_square(8, 8);
  MacVector w = MacVector::sample(g, [](double, double y) { return -(y - 0.5); }, [](double x, double) { return x - 0.5; });
  const NodeField c = curl_at_nodes(w);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) EXPECT_NEAR(c(i, j), 2.0, 1e-12);
}

TEST(Operators, AreLinear) {
  std::mt19937_64 rng(11);
  const GridSpec g{9, 12, 0.0, 1.0, 0.0, 1.0};
  const CellField a = random_cell(g, rng), b = random_cell(g, rng), f = random_cell(g, rng);
  const MacVector x = random_mac(g, rng), y = random_mac(g, rng), w = random_mac(g, rng);
  const double al = 0.3, be = -2.1;
  CellField ab = al * a;
  ab.axpy(be, b);
  MacVector xy = al * x;
  xy.axpy(be, y);
  auto check_cell = [&](const CellField& lhs, const CellField& ra, const CellField& rb) {
    CellField d = lhs;
    d.axpy(-al, ra).axpy(-be, rb);
    EXPECT_LE(norm_l2_cell(d), 1e-13 * (std::abs(al) * norm_l2_cell(ra) + std::abs(be) * norm_l2_cell(rb)));
  };
  auto check_face = [&](const MacVector& lhs, const MacVector& ra, const MacVector& rb) {
    MacVector d = lhs;
    d.axpy(-al, ra).axpy(-be, rb);
    EXPECT_LE(norm_l2_face(d), 1e-13 * (std::abs(al) * norm_l2_face(ra) + std::abs(be) * norm_l2_face(rb)));
  };
  check_face(grad_cell_to_face(ab), grad_cell_to_face(a), grad_cell_to_face(b));
  check_cell(div_face_to_cell(xy), div_face_to_cell(x), div_face_to_cell(y));
  check_cell(lap_cell(ab), lap_cell(a), lap_cell(b));
  check_face(lap_velocity(xy), lap_velocity(x), lap_velocity(y));
  check_cell(advect_scalar(w, ab), advect_scalar(w, a), advect_scalar(w, b));
  check_cell(advect_scalar(xy, f), advect_scalar(x, f), advect_scalar(y, f));
  check_face(chemical_force(ab, f), chemical_force(a, f), chemical_force(b, f));
}
