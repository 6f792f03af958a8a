#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "nsch/fem.hpp"
#include "nsch/mesh.hpp"
#include "oracles.hpp"

using namespace nsch;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const P2Space> square_space(int n) {
  return build_p2_space(std::make_shared<const Mesh>(build_rect_mesh(n, n)));
}

Bary random_bary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a + b > 1) {
    a = 1 - a;
    b = 1 - b;
  }
  return {1 - a - b, a, b};
}

double integrate_ref(const QuadratureRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
  }
  return 0.5 * s;
}

// -Lap u = f with u = g on the wall; returns the nodal solution.
Vector solve_poisson(const P2Space& s, const AssemblyPattern& pat,
                     const std::function<double(Point)>& f,
                     const std::function<double(Point)>& g) {
  const QuadratureRule rule = quadrature(6);
  SparseMatrix k = assemble_stiffness(pat, rule);
  Vector b;
  assemble(
      pat, rule,
      [&](const ElementValues& ev, LocalSystem& loc) {
        for (std::size_t q = 0; q < ev.jxw.size(); ++q) {
          const double fq = f(ev.x[q]);
          for (int a = 0; a < 6; ++a) loc.vec[a] += ev.jxw[q] * fq * ev.phi[q][a];
        }
      },
      nullptr, &b);
  const auto& wall = s.boundary_dofs();
  Vector vals;
  for (int d : wall) vals.push_back(g(s.dof_coords()[d]));
  ReducedSystem red = apply_dirichlet(k, b, wall, vals);
  return red.expand(solve_sparse(red.matrix, red.rhs));
}

double l2_error(const P2Space& s, const Vector& u, const std::function<double(Point)>& exact) {
  const auto& rule = oracle::degree10();
  double e = 0.0;
  for (int t = 0; t < s.num_elements(); ++t) {
    ElementMap map(s.mesh(), t);
    for (const auto& p : rule) {
      const Bary b{1 - p.x - p.y, p.x, p.y};
      const double d = eval_p2(s, u, t, b) - exact(map.map(b));
      e += 2.0 * map.area() * p.w * d * d;
    }
  }
  return std::sqrt(e);
}

}  // namespace

TEST(P2Basis, PartitionOfUnity) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto b = p2_basis(random_bary(rng));
    double s = 0.0, gx = 0.0, gy = 0.0;
    for (int k = 0; k < 6; ++k) {
      s += b.value[k];
      gx += b.grad[k][0];
      gy += b.grad[k][1];
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(gx, 0.0, 1e-13);
    EXPECT_NEAR(gy, 0.0, 1e-13);
  }
}

TEST(P2Basis, LagrangeProperty) {
  const auto& nodes = p2_nodes();
  for (int j = 0; j < 6; ++j) {
    const auto b = p2_basis(nodes[j]);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(b.value[i], i == j ? 1.0 : 0.0, 1e-15);
  }
  // midpoint dof 3 + i sits opposite vertex i
  for (int i = 0; i < 3; ++i) EXPECT_EQ(nodes[3 + i][i], 0.0);
}

TEST(P2Basis, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(22);
  const double h = 1e-6;
  for (int i = 0; i < 20; ++i) {
    Bary l = random_bary(rng);
    const double xi = l[1], eta = l[2];
    auto at = [](double x, double y) { return p2_basis({1 - x - y, x, y}); };
    const auto b = at(xi, eta);
    const auto px = at(xi + h, eta), mx = at(xi - h, eta);
    const auto py = at(xi, eta + h), my = at(xi, eta - h);
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(b.grad[k][0], (px.value[k] - mx.value[k]) / (2 * h), 1e-8);
      EXPECT_NEAR(b.grad[k][1], (py.value[k] - my.value[k]) / (2 * h), 1e-8);
    }
  }
}

TEST(Quadrature, WeightsPositiveAndNormalised) {
  for (int d = 1; d <= 8; ++d) {
    const auto r = quadrature(d);
    EXPECT_GE(r.degree, d);
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-14) << "degree " << d;
    for (const auto& p : r.points) {
      EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-14);
      for (double l : p) EXPECT_GE(l, 0.0);
    }
  }
}

TEST(Quadrature, UnsupportedDegrees) {
  EXPECT_THROW(quadrature(0), std::invalid_argument);
  EXPECT_THROW(quadrature(9), std::invalid_argument);
}

TEST(Quadrature, MonomialExactnessSweep) {
  for (int d = 1; d <= 8; ++d) {
    const auto r = quadrature(d);
    for (int a = 0; a <= r.degree; ++a) {
      for (int b = 0; a + b <= r.degree; ++b) {
        EXPECT_NEAR(integrate_ref(r, a, b), oracle::monomial_integral(a, b), 1e-14)
            << "rule " << d << " monomial x^" << a << " y^" << b;
      }
    }
  }
}

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(oracle::monomial_integral(2, 1), 1.0 / 60.0, 1e-16);
  for (int d = 3; d <= 8; ++d) EXPECT_NEAR(integrate_ref(quadrature(d), 2, 1), 1.0 / 60.0, 1e-14);
  EXPECT_NEAR(integrate_ref(quadrature(2), 0, 0), 0.5, 1e-15);
}

TEST(Quadrature, DegreeFiveFailsOnDegreeSix) {
  const auto r = quadrature(5);
  ASSERT_EQ(r.degree, 5);
  EXPECT_NEAR(integrate_ref(r, 5, 0), oracle::monomial_integral(5, 0), 1e-15);
  const double err = std::abs(integrate_ref(r, 6, 0) - oracle::monomial_integral(6, 0));
  EXPECT_GT(err / oracle::monomial_integral(6, 0), 1e-6);
}

TEST(Oracle, CollapsedRuleIsExactToDegreeTen) {
  for (int a = 0; a <= 10; ++a) {
    for (int b = 0; a + b <= 10; ++b) {
      double s = 0.0;
      for (const auto& p : oracle::degree10()) s += p.w * std::pow(p.x, a) * std::pow(p.y, b);
      EXPECT_NEAR(s, oracle::monomial_integral(a, b), 1e-15);
    }
  }
}

TEST(SparseMatrix, TripletsSumDuplicates) {
  std::vector<std::array<int, 2>> ij{{0, 0}, {1, 2}, {0, 0}, {2, 1}, {1, 1}};
  std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  auto m = SparseMatrix::from_triplets(3, ij, v);
  EXPECT_EQ(m.nnz(), 4);
  EXPECT_EQ(m.coeff(0, 0), 4.0);
  EXPECT_EQ(m.coeff(1, 2), 2.0);
  EXPECT_EQ(m.coeff(2, 2), 0.0);
  EXPECT_EQ(m.find(2, 2), -1);
  EXPECT_THROW(m.add(2, 2, 1.0), std::out_of_range);
  std::vector<std::array<int, 2>> bad{{0, 3}};
  std::vector<double> one{1.0};
  EXPECT_THROW(SparseMatrix::from_triplets(3, bad, one), std::out_of_range);
}

TEST(SparseMatrix, MultiplyMatchesDense) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<std::array<int, 2>> ij;
  std::vector<double> v;
  const int n = 12;
  for (int k = 0; k < 40; ++k) {
    ij.push_back({int(rng() % n), int(rng() % n)});
    v.push_back(u(rng));
  }
  auto m = SparseMatrix::from_triplets(n, ij, v);
  auto dense = m.to_dense();
  Vector x(n);
  for (auto& e : x) e = u(rng);
  Vector y = m * x;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += dense[i * n + j] * x[j];
    EXPECT_NEAR(y[i], s, 1e-14);
  }
}

TEST(SparseMatrix, PruneDropsExplicitZeros) {
  std::vector<std::array<int, 2>> ij{{0, 0}, {0, 1}, {1, 1}};
  std::vector<double> v{1.0, 0.0, 2.0};
  auto m = SparseMatrix::from_triplets(2, ij, v);
  m.prune();
  EXPECT_EQ(m.nnz(), 2);
  EXPECT_EQ(m.find(0, 1), -1);
  EXPECT_EQ(m.coeff(1, 1), 2.0);
}

TEST(Assembly, PatternIsStructurallySymmetric) {
  AssemblyPattern p(square_space(3), 5);
  EXPECT_TRUE(p.make_matrix().structurally_symmetric());
  EXPECT_EQ(p.size(), 5 * p.space().num_dofs());
}

TEST(Assembly, MassRowSumsIntegrateBasis) {
  auto s = square_space(6);
  AssemblyPattern pat(s, 1);
  const auto m = assemble_mass(pat, quadrature(4));
  Vector ones(s->num_dofs(), 1.0);
  Vector rows = m * ones;
  double total = 0.0;
  for (double r : rows) total += r;
  EXPECT_NEAR(total, 4.0, 1e-12);
  // integral of a P2 vertex function is 0, of a midpoint function area / 3
  std::vector<double> expect(s->num_dofs(), 0.0);
  for (int t = 0; t < s->num_elements(); ++t) {
    for (int a = 3; a < 6; ++a) expect[s->element_dofs(t)[a]] += s->mesh().signed_area(t) / 3.0;
  }
  for (int i = 0; i < s->num_dofs(); ++i) EXPECT_NEAR(rows[i], expect[i], 1e-14);
}

TEST(Assembly, StiffnessAnnihilatesConstants) {
  auto s = square_space(5);
  AssemblyPattern pat(s, 1);
  const auto k = assemble_stiffness(pat, quadrature(2));
  Vector ones(s->num_dofs(), 1.0);
  for (double r : k * ones) EXPECT_NEAR(r, 0.0, 1e-12);
}

TEST(Assembly, LinearInTheKernel) {
  auto s = square_space(4);
  AssemblyPattern pat(s, 2);
  const auto rule = quadrature(4);
  auto k1 = [](const ElementValues& ev, LocalSystem& loc) {
    for (std::size_t q = 0; q < ev.jxw.size(); ++q)
      for (int a = 0; a < 6; ++a) {
        loc.vec[a] += ev.jxw[q] * ev.phi[q][a] * ev.x[q].x;
        for (int b = 0; b < 6; ++b) loc.A(a, 6 + b) += ev.jxw[q] * ev.phi[q][a] * ev.grad[q][b][1];
      }
  };
  auto k2 = [](const ElementValues& ev, LocalSystem& loc) {
    for (std::size_t q = 0; q < ev.jxw.size(); ++q)
      for (int a = 0; a < 6; ++a) {
        loc.vec[6 + a] += ev.jxw[q] * ev.phi[q][a];
        for (int b = 0; b < 6; ++b)
          loc.A(6 + a, 6 + b) += ev.jxw[q] * ev.grad[q][a][0] * ev.grad[q][b][0];
      }
  };
  const double al = 2.5, be = -0.75;
  auto combo = [&](const ElementValues& ev, LocalSystem& loc) {
    LocalSystem a(2), b(2);
    k1(ev, a);
    k2(ev, b);
    for (int i = 0; i < loc.n; ++i) loc.vec[i] = al * a.vec[i] + be * b.vec[i];
    for (std::size_t i = 0; i < loc.mat.size(); ++i) loc.mat[i] = al * a.mat[i] + be * b.mat[i];
  };
  SparseMatrix m1, m2, mc;
  Vector v1, v2, vc;
  assemble(pat, rule, k1, &m1, &v1);
  assemble(pat, rule, k2, &m2, &v2);
  assemble(pat, rule, combo, &mc, &vc);
  for (int i = 0; i < mc.nnz(); ++i) {
    EXPECT_NEAR(mc.values()[i], al * m1.values()[i] + be * m2.values()[i], 1e-14);
  }
  for (std::size_t i = 0; i < vc.size(); ++i) EXPECT_NEAR(vc[i], al * v1[i] + be * v2[i], 1e-14);
}

TEST(Assembly, ParallelIsBitwiseSerial) {
  auto s = square_space(12);
  AssemblyPattern pat(s, 1);
  const auto rule = quadrature(6);
  auto k = [](const ElementValues& ev, LocalSystem& loc) {
    for (std::size_t q = 0; q < ev.jxw.size(); ++q)
      for (int a = 0; a < 6; ++a) {
        loc.vec[a] += ev.jxw[q] * std::sin(3 * ev.x[q].x) * ev.phi[q][a];
        for (int b = 0; b < 6; ++b)
          loc.A(a, b) += ev.jxw[q] * std::exp(ev.x[q].y) * ev.grad[q][a][0] * ev.grad[q][b][1];
      }
  };
  SparseMatrix ms;
  Vector vs;
  assemble(pat, rule, k, &ms, &vs, Exec::serial);
  const int saved = assembly_threads();
  for (int threads : {1, 2, 3, 4}) {
    set_assembly_threads(threads);
    SparseMatrix mp;
    Vector vp;
    assemble(pat, rule, k, &mp, &vp, Exec::parallel);
    EXPECT_EQ(mp.values(), ms.values()) << threads << " threads";
    EXPECT_EQ(vp, vs) << threads << " threads";
  }
  set_assembly_threads(saved);
}

TEST(Assembly, PoissonConvergesCubically) {
  auto exact = [](Point p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  auto f = [&](Point p) { return 2 * kPi * kPi * exact(p); };
  std::vector<double> err;
  for (int n : {4, 8, 16}) {
    auto s = square_space(n);
    AssemblyPattern pat(s, 1);
    err.push_back(l2_error(*s, solve_poisson(*s, pat, f, exact), exact));
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    EXPECT_GT(std::log2(err[k - 1] / err[k]), 2.7) << err[k - 1] << " -> " << err[k];
  }
}

TEST(Dirichlet, NonzeroBoundaryDataIsImposedExactly) {
  auto exact = [](Point p) { return std::exp(p.x) * std::cos(p.y); };  // harmonic
  std::vector<double> err;
  for (int n : {8, 16}) {
    auto s = square_space(n);
    AssemblyPattern pat(s, 1);
    Vector u = solve_poisson(*s, pat, [](Point) { return 0.0; }, exact);
    for (int d : s->boundary_dofs()) EXPECT_NEAR(u[d], exact(s->dof_coords()[d]), 1e-14);
    err.push_back(l2_error(*s, u, exact));
  }
  EXPECT_GT(std::log2(err[0] / err[1]), 2.7) << err[0] << " -> " << err[1];
}

TEST(Dirichlet, AllConstrainedGivesPrescribedData) {
  auto s = square_space(2);
  AssemblyPattern pat(s, 1);
  const auto m = assemble_mass(pat, quadrature(4));
  std::vector<int> all(s->num_dofs());
  Vector vals(s->num_dofs()), rhs(s->num_dofs(), 1.0);
  for (int i = 0; i < s->num_dofs(); ++i) {
    all[i] = i;
    vals[i] = 0.1 * i;
  }
  ReducedSystem r = apply_dirichlet(m, rhs, all, vals);
  EXPECT_EQ(r.matrix.rows(), 0);
  EXPECT_EQ(r.expand({}), vals);
}

TEST(Dirichlet, ZeroDataLeavesInteriorBlock) {
  auto s = square_space(3);
  AssemblyPattern pat(s, 1);
  const auto k = assemble_stiffness(pat, quadrature(4));
  const auto& wall = s->boundary_dofs();
  Vector rhs(s->num_dofs());
  for (int i = 0; i < s->num_dofs(); ++i) rhs[i] = std::cos(i);
  ReducedSystem r = apply_dirichlet(k, rhs, wall, Vector(wall.size(), 0.0));
  const int m = r.matrix.rows();
  ASSERT_EQ(m, s->num_dofs() - static_cast<int>(wall.size()));
  for (int a = 0; a < m; ++a) {
    EXPECT_EQ(r.rhs[a], rhs[r.free_dofs[a]]);
    for (int b = 0; b < m; ++b) {
      EXPECT_EQ(r.matrix.coeff(a, b), k.coeff(r.free_dofs[a], r.free_dofs[b]));
    }
  }
  EXPECT_THROW(apply_dirichlet(k, rhs, std::vector<int>{s->num_dofs()}, Vector{0.0}),
               std::out_of_range);
}
