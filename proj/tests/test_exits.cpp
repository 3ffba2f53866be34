#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "owl/exits.hpp"
#include "owl/sampling.hpp"
#include "owl/sequence.hpp"

using namespace owl;

namespace {

std::set<StateId> as_set(const StateSet& s) { return {s.begin(), s.end()}; }

bool subset_of(const StateSet& a, const StateSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST(TraversalMap, SubsetSolverExamples) {
  const auto m = build_subset_solver(2);
  const auto id = traversal_map(m, single(identity_symbol(2)), Side::lr);
  EXPECT_EQ(id.exit_size(), 4u);
  EXPECT_EQ(id.per_state.size(), m.state_count());
  const auto dead = traversal_map(m, single(empty_symbol(2)), Side::lr);
  ASSERT_EQ(dead.exit_size(), 1u);
  EXPECT_EQ(m.name(dead.exits[0]), "{}");
  Rng rng(20);
  for (int k = 0; k < 50; ++k) {
    auto y = random_mixed_string(2, 5, rng);
    y.push_back(random_symbol(2, rng));
    EXPECT_EQ(exit_size(m, y, Side::rl), 0u);
  }
}

TEST(TraversalMap, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  Rng srng(21);
  const auto alphabet = all_symbols(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_machine(2, alphabet, 3 + static_cast<int>(rng() % 3), rng, 0.4);
    for (int k = 0; k < 10; ++k) {
      const auto y = random_mixed_string(2, 5, srng);
      EXPECT_EQ(as_set(exit_set(m, y, Side::lr)), oracle::exit_set(m, y, true));
      EXPECT_EQ(as_set(exit_set(m, y, Side::rl)), oracle::exit_set(m, y, false));
    }
  }
}

TEST(Alpha, EmptyExtensionIsIdentity) {
  const auto m = build_subset_solver(2);
  const auto y = single(OwlSymbol(2, {{1, 2}, {2, 2}}));
  const auto a = alpha(m, y, OwlString(2));
  EXPECT_EQ(a, identity_map(exit_set(m, y, Side::lr)));
  EXPECT_TRUE(is_permutation(a, a.domain()));
}

TEST(Alpha, CollapsingExtension) {
  const auto m = build_subset_solver(2);
  const auto y = single(identity_symbol(2));
  const auto z = single(empty_symbol(2));
  const auto a = alpha(m, y, z);
  EXPECT_EQ(a.domain().size(), 4u);
  EXPECT_EQ(a.image(), exit_set(m, y + z, Side::lr));
  EXPECT_EQ(a.image().size(), 1u);
  EXPECT_FALSE(is_permutation(a, a.domain()));
}

TEST(Monotonicity, RandomMachinesAndSolvers) {
  std::mt19937_64 rng(22);
  Rng srng(22);
  const auto alphabet = all_symbols(2);
  std::vector<Tdfa> machines{build_subset_solver(2), build_broken_solver(2, 1), oracle::two_pass_sweeper(2)};
  for (int k = 0; k < 20; ++k) machines.push_back(oracle::random_machine(2, alphabet, 4, rng, 0.4));
  for (const auto& m : machines) {
    for (int k = 0; k < 30; ++k) {
      const auto y = random_mixed_string(2, 4, srng);
      const auto z = random_mixed_string(2, 4, srng);
      const auto yz = y + z;
      const auto lr_yz = exit_set(m, yz, Side::lr);
      const auto rl_yz = exit_set(m, yz, Side::rl);
      ASSERT_TRUE(subset_of(lr_yz, exit_set(m, z, Side::lr)));
      ASSERT_LE(lr_yz.size(), exit_size(m, y, Side::lr));
      ASSERT_TRUE(subset_of(rl_yz, exit_set(m, y, Side::rl)));
      ASSERT_LE(rl_yz.size(), exit_size(m, z, Side::rl));
      ASSERT_EQ(alpha(m, y, z).image(), lr_yz);
      ASSERT_EQ(beta(m, y, z).image(), rl_yz);
    }
  }
}

TEST(Alpha, Composition) {
  std::mt19937_64 rng(23);
  Rng srng(23);
  const auto alphabet = all_symbols(2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = oracle::random_machine(2, alphabet, 4, rng, 0.3);
    for (int k = 0; k < 10; ++k) {
      const auto y = random_mixed_string(2, 3, srng);
      const auto z = random_mixed_string(2, 3, srng);
      const auto z2 = random_mixed_string(2, 3, srng);
      const auto direct = alpha(m, y, z + z2);
      const auto composed = compose(alpha(m, y + z, z2), alpha(m, y, z));
      ASSERT_EQ(direct.values(), composed.values());
      const auto bdirect = beta(m, z2 + z, y);
      const auto bcomposed = compose(beta(m, z2, z + y), beta(m, z, y));
      ASSERT_EQ(bdirect.values(), bcomposed.values());
    }
  }
}

TEST(Permutation, OrdersAndCycles) {
  const StateSet a{0, 1, 2, 3, 4};
  PartialMap f(a);
  f.define(0, 1);
  f.define(1, 0);
  f.define(2, 3);
  f.define(3, 4);
  f.define(4, 2);
  ASSERT_TRUE(is_permutation(f, a));
  EXPECT_EQ(cycle_lengths(f, a), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(permutation_order(f, a), 6u);
  EXPECT_EQ(oracle::iterate_order({1, 0, 3, 4, 2}), 6u);
  EXPECT_EQ(power(f, 6), identity_map(a));
  EXPECT_NE(power(f, 3), identity_map(a));
  EXPECT_EQ(permutation_order(identity_map(a), a), 1u);

  PartialMap g(a);
  for (StateId q : a) g.define(q, 0);
  EXPECT_FALSE(is_permutation(g, a));
  EXPECT_THROW(permutation_order(g, a), std::invalid_argument);
  PartialMap partial(a);
  partial.define(0, 0);
  EXPECT_FALSE(is_permutation(partial, a));
}

TEST(Permutation, RandomOrdersMatchIteration) {
  std::mt19937_64 rng(24);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng() % 9);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    StateSet dom;
    PartialMap f;
    for (int i = 0; i < n; ++i) dom.push_back(static_cast<StateId>(i));
    f = PartialMap(dom);
    for (int i = 0; i < n; ++i) f.define(static_cast<StateId>(i), static_cast<StateId>(perm[i]));
    ASSERT_EQ(permutation_order(f, dom), oracle::iterate_order(perm));
    ASSERT_EQ(power(f, permutation_order(f, dom)), identity_map(dom));
  }
  EXPECT_THROW(checked_lcm(std::uint64_t{1} << 40, (std::uint64_t{1} << 40) - 1), std::overflow_error);
}

TEST(Generic, AcceptAllHasExitSizeOne) {
  const auto m = build_accept_all(2);
  const auto bounds = SearchBounds{all_symbols(2), 1, 64};
  for (const auto& c : build_sequence(2).matrices) {
    const auto cert = descend_generic(m, c, bounds, Side::lr);
    EXPECT_EQ(cert.lr_size, 1u);
    EXPECT_EQ(cert.lr_descent, (std::vector<std::size_t>{1}));
    EXPECT_EQ(connectivity(cert.y), c);
  }
}

TEST(Generic, DescentIsStrictAndStaysInProperty) {
  const auto m = build_subset_solver(2);
  const SearchBounds bounds{all_symbols(2), 2, 64};
  const auto cert = descend_generic(m, identity(2), bounds, Side::lr);
  EXPECT_EQ(connectivity(cert.y), identity(2));
  for (std::size_t k = 1; k < cert.lr_descent.size(); ++k) EXPECT_LT(cert.lr_descent[k], cert.lr_descent[k - 1]);
  EXPECT_LE(cert.lr_descent.size(), m.state_count());
  EXPECT_TRUE(cert.converged);
  // No searched extension lowers the final exit size.
  for_each_word(
      2, all_symbols(2), 2,
      [&](const OwlString& z) {
        if (connectivity(cert.y + z) == identity(2)) EXPECT_GE(exit_size(m, cert.y + z, Side::lr), cert.lr_size);
        return true;
      },
      1);
}

TEST(Generic, ZeroRoundsReturnsRepresentative) {
  const auto m = build_subset_solver(2);
  const SearchBounds bounds{all_symbols(2), 1, 0};
  const auto c = build_sequence(2)[1];
  const auto cert = descend_generic(m, c, bounds, Side::lr);
  EXPECT_EQ(cert.y, representative(c));
  EXPECT_EQ(cert.lr_size, exit_size(m, representative(c), Side::lr));
  EXPECT_FALSE(cert.converged);
}

TEST(Generic, BadArguments) {
  const auto m = build_subset_solver(2);
  EXPECT_THROW(descend_generic(m, identity(2), SearchBounds{}, Side::lr), std::invalid_argument);
  const SearchBounds bounds{all_symbols(2), 1, 8};
  EXPECT_THROW(descend_generic(m, identity(2), bounds, Side::lr, single(empty_symbol(2))), std::invalid_argument);
  BoolMatrix two(3);
  two.set(1, 2);
  two.set(2, 3);
  EXPECT_THROW(certify_generic(build_subset_solver(3), two, SearchBounds{all_symbols(3), 1, 8}), std::invalid_argument);
}

TEST(Generic, BothSidesCertificate) {
  const auto m = oracle::two_pass_sweeper(2);
  const SearchBounds bounds{all_symbols(2), 1, 64};
  for (const auto& c : build_sequence(2).matrices) {
    const auto cert = certify_generic(m, c, bounds);
    EXPECT_EQ(connectivity(cert.y), c);
    EXPECT_EQ(cert.side, GenericSide::both);
    EXPECT_EQ(cert.lr_size, exit_size(m, cert.y, Side::lr));
    EXPECT_EQ(cert.rl_size, exit_size(m, cert.y, Side::rl));
    for_each_word(
        2, all_symbols(2), 1,
        [&](const OwlString& z) {
          if (connectivity(cert.y + z) == c) EXPECT_GE(exit_size(m, cert.y + z, Side::lr), cert.lr_size);
          if (connectivity(z + cert.y) == c) EXPECT_GE(exit_size(m, z + cert.y, Side::rl), cert.rl_size);
          return true;
        },
        1);
  }
}
