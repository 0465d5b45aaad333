#include <gtest/gtest.h>

#include "support.hpp"

namespace mkdual {
namespace {

using Q = Rational;
using testing::Rng;

TEST(ExtendCouplingTest, SingletonPartitionReturnsT) {
  Weights<Q> mu{Q(1, 4), Q(1, 4), Q(1, 2)}, nu{Q(1, 3), Q(2, 3)};
  auto t = *solve_alpha(CostMatrix<Q>::from_rows({{1, 0}, {0, 1}, {2, 2}}), mu, nu).coupling;
  CoarseCoupling<Q> coarse{Partition::singletons(3), t.matrix, nu};
  EXPECT_EQ(extend_coupling(coarse, mu).matrix, t.matrix);
}

TEST(ExtendCouplingTest, OneCellGivesProduct) {
  Weights<Q> mu{Q(1, 5), Q(3, 5), Q(1, 5)}, nu{Q(1, 2), Q(1, 6), Q(1, 3)};
  Matrix<Q> row(1, 3);
  for (std::size_t y = 0; y < 3; ++y) row(0, y) = nu[y];
  CoarseCoupling<Q> coarse{Partition::from_cells(3, {{0, 1, 2}}), row, nu};
  EXPECT_EQ(extend_coupling(coarse, mu).matrix, product_coupling(mu, nu).matrix);
}

TEST(ExtendCouplingTest, TwoHalfCellsOnFourPoints) {
  Weights<Q> mu(4, Q(1, 4)), nu{Q(1, 4), Q(3, 4)};
  auto part = Partition::from_cells(4, {{0, 3}, {1, 2}});
  auto t = Matrix<Q>::from_rows({{Q(1, 4), Q(1, 4)}, {0, Q(1, 2)}});
  auto p = extend_coupling(CoarseCoupling<Q>{part, t, nu}, mu);
  EXPECT_EQ(p.matrix, Matrix<Q>::from_rows({{Q(1, 8), Q(1, 8)}, {0, Q(1, 4)}, {0, Q(1, 4)}, {Q(1, 8), Q(1, 8)}}));
  EXPECT_EQ(p.matrix.row_sums(), mu);
  EXPECT_EQ(coarsen(p, part), t);
}

TEST(ExtendCouplingTest, MismatchedMarginalsThrow) {
  Weights<Q> mu(2, Q(1, 2)), nu{Q(1)};
  auto part = Partition::from_cells(2, {{0}, {1}});
  EXPECT_THROW(extend_coupling(CoarseCoupling<Q>{part, Matrix<Q>::from_rows({{Q(1, 4)}, {Q(3, 4)}}), nu}, mu),
               MarginalMismatch);
  EXPECT_THROW(extend_coupling(CoarseCoupling<Q>{part, Matrix<Q>(3, 1), nu}, mu), MarginalMismatch);
}

TEST(ExtendCouplingProperty, ExactMarginalsAndCoarseAgreement) {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nx = 1 + rng() % 7, ny = 1 + rng() % 4, k = 1 + rng() % nx;
    auto mu = testing::random_weights(rng, nx, true), nu = testing::random_weights(rng, ny, true);
    std::vector<std::vector<std::size_t>> cells(k);
    for (std::size_t i = 0; i < nx; ++i) cells[i < k ? i : rng() % k].push_back(i);
    auto part = Partition::from_cells(nx, cells);
    // coarse coupling: any optimal plan between cell masses and nu
    auto masses = cell_masses(mu, part);
    auto t_matrix = solve_alpha(CostMatrix<Q>(testing::random_matrix(rng, k, ny)), masses, nu).coupling->matrix;
    auto p = extend_coupling(CoarseCoupling<Q>{part, t_matrix, nu}, mu);
    EXPECT_EQ(coupling_defect(p), "");
    EXPECT_EQ(p.matrix.row_sums(), mu);
    EXPECT_EQ(p.matrix.col_sums(), nu);
    // P(A x B) = T(A x B) for every union of cells A and every B
    for (std::uint64_t am = 0; am < (1ULL << k); ++am)
      for (std::uint64_t bm = 0; bm < (1ULL << ny); ++bm) {
        Q fine(0), coarse(0);
        for (std::size_t c = 0; c < k; ++c) {
          if (!((am >> c) & 1)) continue;
          for (std::size_t y = 0; y < ny; ++y) {
            if (!((bm >> y) & 1)) continue;
            coarse += t_matrix(c, y);
            for (auto x : part.cells[c].indices()) fine += p.matrix(x, y);
          }
        }
        EXPECT_EQ(fine, coarse);
      }
    for (std::size_t i = 0; i < nx; ++i)
      if (masses[part.cell_of(nx)[i]] == 0)
        for (std::size_t y = 0; y < ny; ++y) EXPECT_EQ(p.matrix(i, y), 0);
  }
}

TEST(MongeCouplingTest, Examples) {
  Weights<Q> h{Q(1, 2), Q(1, 2)};
  EXPECT_EQ(monge_coupling(h, {0, 1}, h).matrix, diagonal_coupling(h).matrix);
  EXPECT_EQ(monge_coupling(Weights<Q>{Q(1, 3), Q(2, 3)}, {1, 1}, Weights<Q>{0, 1}).matrix,
            Matrix<Q>::from_rows({{0, Q(1, 3)}, {0, Q(2, 3)}}));
  EXPECT_EQ(monge_coupling(h, {1, 0}, h).matrix, Matrix<Q>::from_rows({{0, Q(1, 2)}, {Q(1, 2), 0}}));
}

TEST(MongeCouplingTest, ReportsDefectVector) {
  Weights<Q> mu{Q(1, 4), Q(3, 4)}, nu{Q(1, 2), Q(1, 2)};
  try {
    monge_coupling(mu, {0, 1}, nu);
    FAIL() << "expected NotMeasurePreserving";
  } catch (const NotMeasurePreserving& e) {
    EXPECT_EQ(e.defect(), (std::vector<double>{0.25, -0.25}));
    EXPECT_NE(std::string(e.what()).find("1/4"), std::string::npos);
  }
  EXPECT_THROW(monge_coupling(mu, {0, 2}, nu), IndexOutOfRange);
}

TEST(MongeCouplingProperty, ObjectiveIsIntegralAlongTheGraph) {
  Rng rng(42);
  for (int t = 0; t < 50; ++t) {
    const std::size_t nx = 1 + rng() % 6, ny = 1 + rng() % 6;
    auto mu = testing::random_weights(rng, nx, true);
    std::vector<std::size_t> map(nx);
    for (auto& v : map) v = rng() % ny;
    auto nu = pushforward(mu, map, ny);
    auto p = monge_coupling(mu, map, nu);
    EXPECT_EQ(coupling_defect(p), "");
    auto c = testing::random_matrix(rng, nx, ny);
    Q along(0);
    for (std::size_t x = 0; x < nx; ++x) along += mu[x] * c(x, map[x]);
    EXPECT_EQ(p.integrate(c), along);
    // P(H) = mu{x : (x, phi(x)) in H} for rectangle unions
    auto fam = testing::random_family(rng, nx, ny, 1 + rng() % 3);
    auto in = membership(fam, SetMode::union_of);
    Q graph_mass(0);
    for (std::size_t x = 0; x < nx; ++x)
      if (in[x * ny + map[x]]) graph_mass += mu[x];
    EXPECT_EQ(p.mass_of(in), graph_mass);
  }
}

TEST(ProductDiagonalTest, UniformTwoPoints) {
  Weights<Q> h{Q(1, 2), Q(1, 2)};
  EXPECT_EQ(product_coupling(h, h).matrix, Matrix<Q>(2, 2, Q(1, 4)));
  EXPECT_EQ(diagonal_coupling(h).matrix, Matrix<Q>::from_rows({{Q(1, 2), 0}, {0, Q(1, 2)}}));
}

TEST(ProductDiagonalTest, ProductMarginalsAndSpaceMismatch) {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    auto mu = testing::random_weights(rng, 1 + rng() % 5, true), nu = testing::random_weights(rng, 1 + rng() % 5);
    EXPECT_EQ(coupling_defect(product_coupling(mu, nu)), "");
  }
  auto x = ProbabilitySpace<Q>::uniform(3), y = ProbabilitySpace<Q>::uniform(2);
  EXPECT_THROW(diagonal_coupling(x, y), SpaceMismatch);
  EXPECT_NO_THROW(diagonal_coupling(x, x));
}

TEST(ProductDiagonalTest, DiagonalMassOfRectangleUnion) {
  // 4 points, mu = (1/8, 1/8, 1/4, 1/2); H = ({0,1} x {1,2}) ∪ ({2,3} x {3})
  Weights<Q> mu{Q(1, 8), Q(1, 8), Q(1, 4), Q(1, 2)};
  RectangleFamily fam(4, 4);
  fam.add({0, 1}, {1, 2});
  fam.add({2, 3}, {3});
  // A_1 ∩ B_1 = {1}, A_2 ∩ B_2 = {3}: mu = 1/8 + 1/2
  auto in = membership(fam, SetMode::union_of);
  EXPECT_EQ(diagonal_coupling(mu).mass_of(in), Q(5, 8));
}

}  // namespace
}  // namespace mkdual
