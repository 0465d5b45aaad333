#include <gtest/gtest.h>

#include <variant>

#include "support.hpp"

namespace mkdual {
namespace {

using Q = Rational;
using testing::Rng;

TEST(IndicatorCostTest, Examples) {
  RectangleFamily empty(2, 3);
  EXPECT_EQ(indicator_cost<Q>(empty, SetMode::union_of).values, Matrix<Q>(2, 3));
  EXPECT_EQ(indicator_cost<Q>(empty, SetMode::intersection_of).values, Matrix<Q>(2, 3, Q(1)));
  RectangleFamily diag(2, 2);
  diag.add({0}, {0});
  diag.add({1}, {1});
  EXPECT_EQ(indicator_cost<Q>(diag).values, Matrix<Q>::from_rows({{1, 0}, {0, 1}}));
  RectangleFamily cross(3, 3);
  cross.add({0, 1}, {0, 1, 2});
  cross.add({0, 1, 2}, {1, 2});
  EXPECT_EQ(indicator_cost<Q>(cross, SetMode::intersection_of).values,
            Matrix<Q>::from_rows({{0, 1, 1}, {0, 1, 1}, {0, 0, 0}}));
  EXPECT_THROW(diag.add({2}, {0}), IndexOutOfRange);
}

TEST(MinCoverTest, Examples) {
  Rng rng(51);
  auto mu = testing::random_weights(rng, 3), nu = testing::random_weights(rng, 4);
  RectangleFamily full(3, 4);
  full.add({0, 1, 2}, {0, 1, 2, 3});
  EXPECT_EQ(min_cover(full, mu, nu).value, 1);

  auto none = min_cover(RectangleFamily(3, 4), mu, nu);
  EXPECT_EQ(none.value, 0);
  EXPECT_TRUE(none.a.none() && none.b.none());

  Weights<Q> h{Q(1, 2), Q(1, 2)};
  RectangleFamily diag(2, 2);
  diag.add({0}, {0});
  diag.add({1}, {1});
  auto cells = membership(diag, SetMode::union_of);
  auto cover = min_cover(diag, h, h);
  EXPECT_EQ(cover.value, 1);
  EXPECT_EQ(testing::brute_force_cover_value(cells, h, h), 1);
  EXPECT_TRUE(covers(cover.a, cover.b, cells));
  // a = {0}, b = {1} is one of the optimal covers
  EXPECT_TRUE(covers(SubsetMask::from_indices(2, {0}), SubsetMask::from_indices(2, {1}), cells));
}

TEST(MinCoverProperty, MatchesBruteForceAndAlphaStar) {
  Rng rng(52);
  for (int t = 0; t < 80; ++t) {
    const std::size_t nx = 1 + rng() % 6, ny = 1 + rng() % 6;
    auto fam = testing::random_family(rng, nx, ny, rng() % 5);
    auto mu = testing::random_weights(rng, nx, true), nu = testing::random_weights(rng, ny, true);
    auto cover = min_cover(fam, mu, nu);
    auto cells = membership(fam, SetMode::union_of);
    EXPECT_TRUE(covers(cover.a, cover.b, cells));
    EXPECT_EQ(cover.value, testing::brute_force_cover_value(cells, mu, nu));
    EXPECT_EQ(cover.value, solve_alpha_star(indicator_cost<Q>(fam), mu, nu).value);
    EXPECT_EQ(cover.value, solve_beta_star(indicator_cost<Q>(fam), mu, nu).value);
  }
}

TEST(MinCoverProperty, FloatModeAgrees) {
  Rng rng(53);
  for (int t = 0; t < 30; ++t) {
    const std::size_t nx = 1 + rng() % 6, ny = 1 + rng() % 6;
    auto fam = testing::random_family(rng, nx, ny, 1 + rng() % 4);
    auto mu = testing::random_weights(rng, nx), nu = testing::random_weights(rng, ny);
    auto exact = min_cover(fam, mu, nu).value;
    auto approx = min_cover(fam, testing::to_double_vec(mu), testing::to_double_vec(nu));
    EXPECT_NEAR(approx.value, to_double(exact), 1e-9);
    EXPECT_TRUE(covers(approx.a, approx.b, membership(fam, SetMode::union_of)));
  }
}

TEST(ComplementationProperty, IntersectionViaUnionOfComplements) {
  // alpha(1_K) = 1 - alpha*(1_{K^c}) with K = ∩ (A_k x B_k)
  Rng rng(54);
  for (int t = 0; t < 40; ++t) {
    const std::size_t nx = 1 + rng() % 5, ny = 1 + rng() % 5;
    auto fam = testing::random_family(rng, nx, ny, 1 + rng() % 3);
    auto mu = testing::random_weights(rng, nx, true), nu = testing::random_weights(rng, ny, true);
    auto k_cells = membership(fam, SetMode::intersection_of);
    std::vector<bool> complement(k_cells.size());
    for (std::size_t i = 0; i < k_cells.size(); ++i) complement[i] = !k_cells[i];
    const auto alpha_k = solve_alpha(indicator_of<Q>(k_cells, nx, ny), mu, nu).value;
    const auto top = solve_alpha_star(indicator_of<Q>(complement, nx, ny), mu, nu).value;
    EXPECT_EQ(alpha_k, 1 - top);
    EXPECT_EQ(alpha_k, solve_beta(indicator_of<Q>(k_cells, nx, ny), mu, nu).value);
    EXPECT_EQ(top, min_cover_of(complement, mu, nu).value);
  }
}

TEST(MonotoneUnionProperty, PrefixValuesIncreaseToTheFamily) {
  Rng rng(55);
  for (int t = 0; t < 30; ++t) {
    const std::size_t nx = 2 + rng() % 4, ny = 2 + rng() % 4;
    auto fam = testing::random_family(rng, nx, ny, 1 + rng() % 5);
    auto mu = testing::random_weights(rng, nx), nu = testing::random_weights(rng, ny);
    Q previous(0);
    for (std::size_t n = 0; n <= fam.rects.size(); ++n) {
      auto v = solve_alpha_star(indicator_cost<Q>(fam.prefix(n)), mu, nu).value;
      EXPECT_GE(v, previous);
      previous = v;
    }
    EXPECT_EQ(previous, min_cover(fam, mu, nu).value);
  }
}

TEST(ArvesonTest, NullRowsGiveNullCover) {
  Weights<Q> mu{0, Q(1, 2), 0, Q(1, 2)}, nu{Q(1, 3), Q(2, 3)};
  RectangleFamily fam(4, 2);
  fam.add({0, 2}, {0, 1});
  auto r = arveson_witness(fam, mu, nu);
  ASSERT_TRUE(std::holds_alternative<Cover<Q>>(r));
  auto cover = std::get<Cover<Q>>(r);
  EXPECT_EQ(mass(mu, cover.a), 0);
  EXPECT_EQ(mass(nu, cover.b), 0);
  EXPECT_TRUE(covers(cover.a, cover.b, membership(fam, SetMode::union_of)));
}

TEST(ArvesonTest, FullSpaceIsNotNull) {
  Rng rng(56);
  auto mu = testing::random_weights(rng, 3), nu = testing::random_weights(rng, 3);
  RectangleFamily fam(3, 3);
  fam.add({0, 1, 2}, {0, 1, 2});
  auto r = arveson_witness(fam, mu, nu);
  ASSERT_TRUE(std::holds_alternative<NotNull<Q>>(r));
  EXPECT_EQ(std::get<NotNull<Q>>(r).alpha_star, 1);
  EXPECT_EQ(coupling_defect(std::get<NotNull<Q>>(r).coupling), "");
}

TEST(ArvesonTest, MixedThreeByThree) {
  Weights<Q> mu{0, Q(1, 2), Q(1, 2)}, nu{Q(1, 2), Q(1, 2), 0};
  RectangleFamily fam(3, 3);
  fam.add({0}, {0, 1, 2});
  fam.add({0, 1, 2}, {2});
  auto r = arveson_witness(fam, mu, nu);
  ASSERT_TRUE(std::holds_alternative<Cover<Q>>(r));
  auto cover = std::get<Cover<Q>>(r);
  EXPECT_EQ(cover.a, SubsetMask::from_indices(3, {0}));
  EXPECT_EQ(cover.b, SubsetMask::from_indices(3, {2}));
  EXPECT_EQ(cover.value, 0);
}

TEST(ArvesonProperty, NullCoverWheneverAlphaStarVanishes) {
  Rng rng(57);
  int null_cases = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t nx = 1 + rng() % 5, ny = 1 + rng() % 5;
    auto mu = testing::random_weights(rng, nx, true), nu = testing::random_weights(rng, ny, true);
    auto fam = testing::random_family(rng, nx, ny, 1 + rng() % 3);
    auto r = arveson_witness(fam, mu, nu);
    if (auto* cover = std::get_if<Cover<Q>>(&r)) {
      ++null_cases;
      EXPECT_EQ(mass(mu, cover->a), 0);
      EXPECT_EQ(mass(nu, cover->b), 0);
      EXPECT_TRUE(covers(cover->a, cover->b, membership(fam, SetMode::union_of)));
    } else {
      EXPECT_GT(std::get<NotNull<Q>>(r).alpha_star, 0);
    }
  }
  EXPECT_GT(null_cases, 0);
}

TEST(TruncationDualityTest, EmptyTailIsExact) {
  Rng rng(58);
  auto mu = testing::random_weights(rng, 4), nu = testing::random_weights(rng, 3);
  auto fam = testing::random_family(rng, 4, 3, 3);
  auto r = truncation_duality(fam, mu, nu, 3, Q(1, 10));
  EXPECT_EQ(r.tail_mass, 0);
  EXPECT_EQ(r.alpha_full, r.alpha_prefix);
  EXPECT_TRUE(r.certified);
  // trailing rectangle with an empty x-side leaves the tail empty at n < size
  fam.rects.push_back({SubsetMask::empty(4), SubsetMask::full(3)});
  auto r2 = truncation_duality(fam, mu, nu, 3, Q(1, 10));
  EXPECT_EQ(r2.tail_mass, 0);
  EXPECT_EQ(r2.alpha_full, r2.alpha_prefix);
  EXPECT_THROW(truncation_duality(fam, mu, nu, 5, Q(1)), IndexOutOfRange);
}

TEST(TruncationDualityTest, GeometricallyShrinkingSides) {
  // A_i = {i} with mu{i} = 2^-(i+1) (last point takes the remainder), B_i random
  const std::size_t m = 8;
  Weights<Q> mu(m);
  for (std::size_t i = 0; i + 1 < m; ++i) mu[i] = Q(1, 1L << (i + 1));
  mu[m - 1] = Q(1, 1L << (m - 1));
  Rng rng(59);
  auto nu = testing::random_weights(rng, 4);
  RectangleFamily fam(m, 4);
  for (std::size_t i = 0; i < m; ++i) fam.add({i}, {rng() % 4, rng() % 4});
  for (std::size_t n = 1; n < m; ++n) {
    const Q eps(1, 1L << n);
    auto r = truncation_duality(fam, mu, nu, n, eps);
    EXPECT_EQ(r.tail_mass, Q(1, 1L << n));  // mass of points n..m-1
    EXPECT_FALSE(r.tail_below_eps);
    EXPECT_TRUE(r.certified);
    EXPECT_LE(r.alpha_full, r.beta_prefix + r.tail_mass);
    EXPECT_TRUE(r.within_two_eps);
    EXPECT_EQ(r.alpha_prefix, r.beta_prefix);
  }
}

TEST(TruncationDualityTest, SingleRectangleBoundIsTight) {
  Rng rng(60);
  auto mu = testing::random_weights(rng, 3), nu = testing::random_weights(rng, 2);
  RectangleFamily fam(3, 2);
  fam.add({0, 1, 2}, {0, 1});
  auto r = truncation_duality(fam, mu, nu, 0, Q(2));
  EXPECT_EQ(r.alpha_full, 1);
  EXPECT_EQ(r.bound, r.alpha_full);
  auto r1 = truncation_duality(fam, mu, nu, 1, Q(1, 100));
  EXPECT_EQ(r1.bound, r1.alpha_full);
  EXPECT_TRUE(r1.tail_below_eps);
}

}  // namespace
}  // namespace mkdual
