#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "owl/sampling.hpp"
#include "owl/tdfa.hpp"

using namespace owl;

namespace {

bool has_violation(const Tdfa& m, const std::string& state, const std::string& symbol) {
  for (const auto& v : validate(m)) {
    if (v.state == state && v.symbol == symbol) return true;
  }
  return false;
}

std::string name_of(Decision d) { return to_string(d); }

}  // namespace

TEST(Validate, BuiltinsAreWellFormed) {
  EXPECT_TRUE(validate(build_subset_solver(2)).empty());
  EXPECT_TRUE(validate(build_subset_solver(5)).empty());
  EXPECT_TRUE(validate(build_accept_all(3)).empty());
  EXPECT_TRUE(validate(build_broken_solver(3, 1)).empty());
  EXPECT_TRUE(validate(oracle::two_pass_sweeper(2)).empty());
  EXPECT_EQ(build_subset_solver(2).state_count(), 6u);
}

TEST(Validate, EndmarkerDiscipline) {
  auto m = build_accept_all(2);
  m.set_left_end(0, {0, Direction::left});
  EXPECT_TRUE(has_violation(m, "start", "LEND"));
  EXPECT_THROW(require_valid(m), std::invalid_argument);

  auto n = build_accept_all(2);
  n.set_right_end(0, {0, Direction::right});
  EXPECT_TRUE(has_violation(n, "start", "REND"));
  n.set_right_end(0, {2, Direction::right});  // into reject: allowed
  EXPECT_TRUE(validate(n).empty());
}

TEST(Validate, MissingRulesAndBadTargets) {
  Tdfa m(2, {"s", "a", "r"}, 0, 1, 2);
  const auto v = validate(m);
  EXPECT_TRUE(has_violation(m, "s", "LEND"));
  EXPECT_TRUE(has_violation(m, "s", "REND"));
  EXPECT_TRUE(has_violation(m, "s", "default"));
  EXPECT_FALSE(v.empty());

  Tdfa bad(2, {"s", "a", "r"}, 0, 1, 7);
  EXPECT_FALSE(validate(bad).empty());

  Tdfa dup(2, {"s", "s", "r"}, 0, 1, 2);
  EXPECT_FALSE(validate(dup).empty());

  auto t = build_accept_all(2);
  t.set_default(1, {9, Direction::right});
  EXPECT_TRUE(has_violation(t, "accept", "default"));
}

TEST(Validate, TotalTableNeedsNoDefault) {
  Tdfa m(1, {"s", "a", "r"}, 0, 1, 2);
  for (StateId q = 0; q < 3; ++q) {
    m.set_left_end(q, {q, Direction::right});
    m.set_right_end(q, {1, Direction::right});
    for (const auto& a : all_symbols(1)) m.set_symbol(q, a, {q, Direction::right});
  }
  EXPECT_TRUE(validate(m).empty());
}

TEST(Comp, SingleStepExits) {
  const auto m = build_accept_all(2);
  const OwlString z(2, {OwlSymbol(2)});
  const auto c = comp(m, 1, 1, z);
  EXPECT_EQ(c.outcome, Outcome::hit_right);
  EXPECT_EQ(c.state, 0u);
  EXPECT_EQ(c.steps, 1u);
  EXPECT_EQ(c.final_position, 2);

  const auto sw = oracle::two_pass_sweeper(2);
  const auto l = comp(sw, 1, 1, z);  // "back" moves left
  EXPECT_EQ(l.outcome, Outcome::hit_left);
  EXPECT_EQ(l.state, 1u);
  EXPECT_EQ(l.steps, 1u);
  EXPECT_EQ(l.final_position, 0);
}

TEST(Comp, StartPositionChecks) {
  const auto m = build_accept_all(2);
  const OwlString z(2, {OwlSymbol(2), OwlSymbol(2)});
  EXPECT_THROW(comp(m, 0, 4, z), std::out_of_range);
  EXPECT_THROW(comp(m, 0, -1, z), std::out_of_range);
  EXPECT_EQ(comp(m, 0, 0, z).outcome, Outcome::hit_left);
  EXPECT_EQ(comp(m, 0, 3, z).outcome, Outcome::hit_right);
}

TEST(Comp, OscillatorLoops) {
  const auto m = oracle::oscillator(2);
  const OwlString z(2, {OwlSymbol(2), OwlSymbol(2)});
  const auto c = comp(m, 0, 1, z);
  EXPECT_EQ(c.outcome, Outcome::loop);
  EXPECT_LE(c.steps, m.state_count() * 4);
  // The trace repeats a configuration before the budget ends.
  std::set<std::pair<StateId, std::int64_t>> seen;
  bool repeated = false;
  for (const auto& cfg : c.trace) repeated |= !seen.insert({cfg.state, cfg.position}).second;
  EXPECT_TRUE(repeated);
  EXPECT_EQ(decide(m, z), Decision::loop);
}

TEST(Comp, EmptyStringConvention) {
  const auto m = build_subset_solver(2);
  const OwlString e(2);
  for (StateId p = 0; p < m.state_count(); ++p) {
    const auto l = lcomp(m, p, e);
    EXPECT_EQ(l.outcome, Outcome::hit_right);
    EXPECT_EQ(l.state, p);
    EXPECT_EQ(l.steps, 0u);
    const auto r = rcomp(m, p, e);
    EXPECT_EQ(r.outcome, Outcome::hit_left);
    EXPECT_EQ(r.state, p);
  }
}

TEST(Comp, OneWayMachinesNeverHitLeft) {
  const auto m = build_subset_solver(2);
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    auto z = random_mixed_string(2, 6, rng);
    if (z.empty()) z.push_back(identity_symbol(2));
    for (StateId p = 0; p < m.state_count(); ++p) {
      EXPECT_EQ(lcomp(m, p, z, no_trace).outcome, Outcome::hit_right);
      EXPECT_EQ(rcomp(m, p, z, no_trace).outcome, Outcome::hit_right);
    }
  }
}

TEST(Comp, TraceIsConsistentAndDeterministic) {
  const auto m = oracle::two_pass_sweeper(3);
  Rng rng(14);
  const auto z = random_string(3, 5, rng);
  const auto a = run_machine(m, StringTape(z));
  const auto b = run_machine(m, StringTape(z));
  EXPECT_EQ(a.trace, b.trace);
  ASSERT_EQ(a.trace.size(), a.steps + 1);
  const StringTape inner(z);
  const EndmarkedTape<StringTape> tape(inner);
  for (std::size_t k = 0; k + 1 < a.trace.size(); ++k) {
    const auto mv = m.step(a.trace[k].state, tape.cell(a.trace[k].position));
    EXPECT_EQ(a.trace[k + 1].state, mv.next);
    EXPECT_EQ(a.trace[k + 1].position, a.trace[k].position + (mv.dir == Direction::right ? 1 : -1));
  }
  EXPECT_EQ(a.final_position, static_cast<std::int64_t>(z.size()) + 2);
}

TEST(Comp, TraceLimitDropsTrace) {
  const auto m = oracle::two_pass_sweeper(2);
  const OwlString z = power(single(identity_symbol(2)), 20);
  const auto c = run_machine(m, StringTape(z), SimOptions{5});
  EXPECT_TRUE(c.trace_truncated);
  EXPECT_TRUE(c.trace.empty());
  EXPECT_EQ(decision_of(m, c), Decision::accept);
}

TEST(Decide, ReferenceMachines) {
  const auto all = build_accept_all(3);
  const auto solver = build_subset_solver(2);
  EXPECT_EQ(decide(all, single(empty_symbol(3))), Decision::accept);
  EXPECT_EQ(decide(all, OwlString(3)), Decision::accept);
  EXPECT_EQ(decide(solver, single(empty_symbol(2))), Decision::reject);
  EXPECT_EQ(decide(solver, single(OwlSymbol(2, {{1, 1}}))), Decision::accept);
  Rng rng(15);
  for (int k = 0; k < 50; ++k) {
    const auto z = random_mixed_string(3, 8, rng);
    const auto c = run_machine(all, StringTape(z), no_trace);
    EXPECT_EQ(c.steps, z.size() + 2);
  }
}

TEST(Decide, SubsetSolverExhaustiveHeightTwo) {
  const auto m = build_subset_solver(2);
  for_each_word(2, all_symbols(2), 4, [&](const OwlString& z) {
    const bool live = nfa_live(z);
    EXPECT_EQ(decide(m, z) == Decision::accept, live);
    return !::testing::Test::HasFailure();
  });
}

TEST(Decide, SubsetSolverRandomHeightFour) {
  const auto m = build_subset_solver(4);
  Rng rng(16);
  for (int k = 0; k < 10000; ++k) {
    const auto z = random_mixed_string(4, 8, rng);
    ASSERT_EQ(decide(m, z) == Decision::accept, nfa_live(z));
  }
}

TEST(Decide, BrokenSolvers) {
  const auto full = build_broken_solver(3, 3);
  const auto reference = build_subset_solver(3);
  Rng rng(17);
  for (int k = 0; k < 1000; ++k) {
    const auto z = random_mixed_string(3, 6, rng);
    ASSERT_EQ(decide(full, z), decide(reference, z));
  }
  const auto one = build_broken_solver(3, 1);
  bool found = false;
  for_each_word(3, all_symbols(3), 3, [&](const OwlString& z) {
    found = (decide(one, z) == Decision::accept) != nfa_live(z);
    return !found;
  });
  EXPECT_TRUE(found);
  EXPECT_THROW(build_broken_solver(3, 0), std::invalid_argument);
  EXPECT_THROW(build_subset_solver(13), std::invalid_argument);
}

TEST(Decide, AgreesWithVisitedSetSimulator) {
  std::mt19937_64 rng(18);
  Rng srng(18);
  const auto alphabet = all_symbols(2);
  int loops = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = oracle::random_machine(2, alphabet, 2 + static_cast<int>(rng() % 4), rng, 0.35);
    ASSERT_TRUE(validate(m).empty());
    for (int k = 0; k < 20; ++k) {
      const auto z = random_mixed_string(2, 6, srng);
      const auto d = name_of(decide(m, z));
      ASSERT_EQ(d, oracle::decide(m, z));
      loops += d == "loop";
      for (StateId p = 0; p < m.state_count() && !z.empty(); ++p) {
        const auto c = lcomp(m, p, z, no_trace);
        const auto r = oracle::bare_run(m, p, 1, z);
        const Outcome expected = r.end == oracle::End::left    ? Outcome::hit_left
                                 : r.end == oracle::End::right ? Outcome::hit_right
                                                               : Outcome::loop;
        ASSERT_EQ(c.outcome, expected);
        if (c.outcome != Outcome::loop) {
          ASSERT_EQ(c.state, r.state);
          ASSERT_EQ(c.steps, r.steps);
        }
      }
    }
  }
  EXPECT_GT(loops, 0);  // the sample exercises loop detection
}

TEST(Tapes, ConcatTapeIndexing) {
  Rng rng(19);
  const auto a = random_string(2, 3, rng);
  const auto b = random_string(2, 2, rng);
  ConcatTape t(2);
  t.add(a).add(b, 3).add(OwlString(2), 5).add(a, 0).add(a);
  EXPECT_EQ(t.size(), 3u + 6u + 3u);
  EXPECT_EQ(t.materialize(), a + power(b, 3) + a);
  const auto lazy = decide_tape(build_subset_solver(2), t);
  EXPECT_EQ(lazy, decide(build_subset_solver(2), t.materialize()));
}
