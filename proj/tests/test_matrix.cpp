#include <gtest/gtest.h>

#include <random>

#include "figures.hpp"
#include "oracles.hpp"
#include "owl/matrix.hpp"
#include "owl/sequence.hpp"

using namespace owl;

namespace {

BoolMatrix random_matrix(int h, std::mt19937_64& rng, double density = 0.4) {
  std::bernoulli_distribution bit(density);
  BoolMatrix m(h);
  for (int i = 1; i <= h; ++i) {
    for (int j = 1; j <= h; ++j) {
      if (bit(rng)) m.set(i, j);
    }
  }
  return m;
}

}  // namespace

TEST(Matrix, ConstructionLimits) {
  EXPECT_THROW(BoolMatrix(0), std::invalid_argument);
  EXPECT_THROW(BoolMatrix(65), std::invalid_argument);
  EXPECT_NO_THROW(BoolMatrix(64));
  BoolMatrix m(3);
  EXPECT_THROW(m.get(0, 1), std::out_of_range);
  EXPECT_THROW(m.set(1, 4), std::out_of_range);
}

TEST(Matrix, IdentityAndZero) {
  for (int h : {1, 2, 5, 64}) {
    EXPECT_EQ(multiply(identity(h), identity(h)), identity(h));
    EXPECT_TRUE(zero(h).is_zero());
    EXPECT_EQ(identity(h).popcount(), static_cast<std::size_t>(h));
    EXPECT_EQ(all_ones(h).popcount(), static_cast<std::size_t>(h * h));
  }
}

TEST(Matrix, MultiplyMatchesNaiveProduct) {
  std::mt19937_64 rng(1);
  for (int h : {1, 2, 3, 7, 13, 32, 63, 64}) {
    for (int k = 0; k < 30; ++k) {
      const auto a = random_matrix(h, rng, 0.2);
      const auto b = random_matrix(h, rng, 0.2);
      EXPECT_EQ(multiply(a, b), oracle::from_grid(oracle::naive_multiply(oracle::to_grid(a), oracle::to_grid(b))))
          << "h=" << h;
    }
  }
}

TEST(Matrix, DimensionMismatchThrows) {
  EXPECT_THROW(multiply(identity(2), identity(3)), std::invalid_argument);
  EXPECT_THROW(add(identity(2), identity(3)), std::invalid_argument);
}

TEST(Matrix, SemiringLaws) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const int h = 1 + static_cast<int>(rng() % 8);
    const auto a = random_matrix(h, rng);
    const auto b = random_matrix(h, rng);
    const auto c = random_matrix(h, rng);
    ASSERT_EQ(multiply(multiply(a, b), c), multiply(a, multiply(b, c)));
    ASSERT_EQ(add(add(a, b), c), add(a, add(b, c)));
    ASSERT_EQ(multiply(a, add(b, c)), add(multiply(a, b), multiply(a, c)));
    ASSERT_EQ(multiply(add(a, b), c), add(multiply(a, c), multiply(b, c)));
    ASSERT_EQ(multiply(identity(h), a), a);
    ASSERT_EQ(multiply(a, identity(h)), a);
    ASSERT_EQ(multiply(zero(h), a), zero(h));
    ASSERT_EQ(add(a, zero(h)), a);
    ASSERT_EQ(add(a, a), a);
  }
}

TEST(Matrix, MultiplyIsMonotone) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 500; ++k) {
    const int h = 1 + static_cast<int>(rng() % 8);
    const auto a = random_matrix(h, rng);
    const auto extra = random_matrix(h, rng);
    const auto a2 = add(a, extra);
    const auto b = random_matrix(h, rng);
    ASSERT_TRUE(a.leq(a2));
    ASSERT_TRUE(multiply(a, b).leq(multiply(a2, b)));
  }
}

TEST(Matrix, FigureProductsAndSums) {
  const auto seq = build_sequence(5);
  EXPECT_EQ(multiply(figures::c0(), figures::c6()), figures::c6());
  // C_6 is C_5 with the sixth cell's row tail added.
  EXPECT_EQ(add(seq[5], e_prime(6, 5)), figures::c6());
  EXPECT_TRUE(is_idempotent(figures::c12()));
  EXPECT_TRUE(is_idempotent(identity(4)));
  BoolMatrix single(2);
  single.set(1, 2);
  EXPECT_FALSE(is_idempotent(single));
  EXPECT_TRUE(multiply(single, single).is_zero());
}

TEST(Matrix, OuterAndInner) {
  EXPECT_EQ(outer(unit_column(5, 2), tail_row(5, 3)), figures::e8_prime());
  EXPECT_EQ(outer(ones_column(5), tail_row(5, 3)), figures::d12_prime());
  for (int h = 2; h <= 8; ++h) {
    for (int j = 2; j <= h; ++j) {
      for (int i = 1; i < j; ++i) EXPECT_FALSE(inner(tail_row(h, j), unit_column(h, i)));
      EXPECT_TRUE(inner(tail_row(h, j), ones_column(h)));
    }
  }
  EXPECT_THROW(outer(tail_row(3, 1), tail_row(3, 1)), std::invalid_argument);
  EXPECT_THROW(inner(tail_row(3, 1), unit_column(4, 1)), std::invalid_argument);
}

TEST(Matrix, MatrixVectorProducts) {
  const auto c = figures::c6();
  // Column e_1 picks column 1 of C; row r_5 times C picks rows.
  const auto col = multiply(c, unit_column(5, 5));
  for (int i = 1; i <= 5; ++i) EXPECT_EQ(col.get(i), c.get(i, 5));
  const auto row = multiply(tail_row(5, 5), c);
  for (int j = 1; j <= 5; ++j) EXPECT_EQ(row.get(j), c.get(5, j));
}

TEST(Matrix, ImageOfRowSet) {
  const auto c = figures::c6();
  // Rows 1 and 4: {1,5} union {4,5}.
  EXPECT_EQ(image(0b01001, c), 0b11001u);
  EXPECT_EQ(image(0, c), 0u);
}

TEST(Matrix, TextRoundTrip) {
  std::mt19937_64 rng(4);
  for (int h : {1, 3, 17, 64}) {
    const auto a = random_matrix(h, rng);
    EXPECT_EQ(from_text(to_text(a)), a);
  }
  EXPECT_EQ(to_text(identity(2)), "10\n01\n");
}

TEST(Matrix, TextRejectsMalformedInput) {
  EXPECT_THROW(from_text(""), std::invalid_argument);
  EXPECT_THROW(from_text("10\n0\n"), std::invalid_argument);
  EXPECT_THROW(from_text("12\n01\n"), std::invalid_argument);
  EXPECT_THROW(from_text("10\n01"), std::invalid_argument);
  EXPECT_THROW(from_text("100\n010\n"), std::invalid_argument);
}

TEST(Matrix, OrderingAndHash) {
  EXPECT_TRUE(zero(3) < identity(3) || identity(3) < zero(3));
  EXPECT_FALSE(identity(3) < identity(3));
  EXPECT_EQ(BoolMatrixHash{}(identity(4)), BoolMatrixHash{}(identity(4)));
  EXPECT_TRUE(identity(3).leq(all_ones(3)));
  EXPECT_FALSE(all_ones(3).leq(identity(3)));
}
