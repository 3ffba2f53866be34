#pragma once

// Two-way deterministic finite automata over Sigma_h: machine description,
// validation of the endmarker discipline, exact simulation with loop
// detection, and a few reference machines.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "owl/owl.hpp"

namespace owl {

using StateId = std::uint32_t;

enum class Direction : std::uint8_t { left, right };

struct Move {
  StateId next;
  Direction dir;
  friend bool operator==(const Move&, const Move&) = default;
};

enum class TapeKind : std::uint8_t { left_end, right_end, symbol };

struct TapeCell {
  TapeKind kind;
  const OwlSymbol* symbol = nullptr;
};

class Tdfa {
 public:
  /// Programmatic transition on input symbols; returns nullopt to fall
  /// through to the state's default rule.
  using SymbolRule = std::function<std::optional<Move>(StateId, const OwlSymbol&)>;

  struct StateRules {
    std::optional<Move> left_end;
    std::optional<Move> right_end;
    std::optional<Move> fallback;
    std::unordered_map<OwlSymbol, Move, OwlSymbolHash> table;
  };

  Tdfa(int h, std::vector<std::string> names, StateId start, StateId accept, StateId reject)
      : h_(h), names_(std::move(names)), start_(start), accept_(accept), reject_(reject),
        rules_(names_.size()) {
    check_height(h);
  }

  int height() const noexcept { return h_; }
  std::size_t state_count() const noexcept { return names_.size(); }
  StateId start() const noexcept { return start_; }
  StateId accept() const noexcept { return accept_; }
  StateId reject() const noexcept { return reject_; }
  const std::string& name(StateId q) const { return names_.at(q); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const StateRules& rules(StateId q) const { return rules_.at(q); }
  bool has_symbol_rule() const noexcept { return static_cast<bool>(symbol_rule_); }

  std::optional<StateId> find_state(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<StateId>(it - names_.begin());
  }

  Tdfa& set_left_end(StateId q, Move m) {
    edit(q).left_end = m;
    return *this;
  }
  Tdfa& set_right_end(StateId q, Move m) {
    edit(q).right_end = m;
    return *this;
  }
  Tdfa& set_default(StateId q, Move m) {
    edit(q).fallback = m;
    return *this;
  }
  Tdfa& set_symbol(StateId q, const OwlSymbol& a, Move m) {
    edit(q).table.insert_or_assign(a, m);
    return *this;
  }
  Tdfa& set_symbol_rule(SymbolRule rule) {
    symbol_rule_ = std::move(rule);
    return *this;
  }

  /// delta(q, a); throws std::logic_error when the machine leaves it undefined.
  Move step(StateId q, const OwlSymbol& a) const {
    const auto& r = rules_.at(q);
    if (!r.table.empty()) {
      if (auto it = r.table.find(a); it != r.table.end()) return it->second;
    }
    if (symbol_rule_) {
      if (auto m = symbol_rule_(q, a)) return *m;
    }
    if (r.fallback) return *r.fallback;
    throw std::logic_error("transition undefined for state '" + names_[q] + "' on symbol " + to_hex(a));
  }

  Move step(StateId q, const TapeCell& cell) const {
    switch (cell.kind) {
      case TapeKind::left_end:
        if (const auto& m = rules_.at(q).left_end) return *m;
        throw std::logic_error("transition undefined for state '" + names_[q] + "' on LEND");
      case TapeKind::right_end:
        if (const auto& m = rules_.at(q).right_end) return *m;
        throw std::logic_error("transition undefined for state '" + names_[q] + "' on REND");
      case TapeKind::symbol:
        break;
    }
    return step(q, *cell.symbol);
  }

 private:
  StateRules& edit(StateId q) {
    if (q >= rules_.size()) throw std::out_of_range("state id out of range");
    return rules_[q];
  }

  int h_;
  std::vector<std::string> names_;
  StateId start_;
  StateId accept_;
  StateId reject_;
  std::vector<StateRules> rules_;
  SymbolRule symbol_rule_;
};

struct Violation {
  std::string state;
  std::string symbol;  // hex mask, LEND, REND, default, or empty for machine-level issues
  std::string message;
};

/// Empty result iff the machine is well-formed and respects the endmarkers.
inline std::vector<Violation> validate(const Tdfa& m) {
  std::vector<Violation> out;
  const auto n = m.state_count();
  if (n == 0) {
    out.push_back({"", "", "machine has no states"});
    return out;
  }
  {
    auto sorted = m.names();
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 1; k < sorted.size(); ++k) {
      if (sorted[k] == sorted[k - 1]) out.push_back({sorted[k], "", "duplicate state name"});
    }
  }
  for (auto [id, role] : {std::pair{m.start(), "start"}, {m.accept(), "accept"}, {m.reject(), "reject"}}) {
    if (id >= n) out.push_back({"", "", std::string(role) + " state is not in Q"});
  }
  if (!out.empty()) return out;

  auto in_range = [&](StateId q, const Move& mv, const std::string& key) {
    if (mv.next >= n) {
      out.push_back({m.name(q), key, "target state id " + std::to_string(mv.next) + " is not in Q"});
      return false;
    }
    return true;
  };

  for (StateId q = 0; q < n; ++q) {
    const auto& r = m.rules(q);
    if (!r.left_end) {
      out.push_back({m.name(q), "LEND", "missing transition on LEND"});
    } else if (in_range(q, *r.left_end, "LEND") && r.left_end->dir != Direction::right) {
      out.push_back({m.name(q), "LEND", "moves left off LEND"});
    }
    if (!r.right_end) {
      out.push_back({m.name(q), "REND", "missing transition on REND"});
    } else if (in_range(q, *r.right_end, "REND") && r.right_end->dir == Direction::right &&
               r.right_end->next != m.accept() && r.right_end->next != m.reject()) {
      out.push_back({m.name(q), "REND", "moves right off REND into a non-halting state"});
    }
    if (r.fallback) in_range(q, *r.fallback, "default");
    for (const auto& [a, mv] : r.table) {
      if (a.height() != m.height()) {
        out.push_back({m.name(q), to_hex(a), "symbol height does not match machine height"});
        continue;
      }
      in_range(q, mv, to_hex(a));
    }
    const int bits = m.height() * m.height();
    const bool table_total = bits < 32 && r.table.size() == (std::size_t{1} << bits);
    if (!r.fallback && !m.has_symbol_rule() && !table_total) {
      out.push_back({m.name(q), "default", "no default rule; unlisted symbols are undefined"});
    }
  }
  return out;
}

inline void require_valid(const Tdfa& m) {
  auto v = validate(m);
  if (!v.empty()) {
    throw std::invalid_argument("invalid machine: state '" + v.front().state + "' " + v.front().symbol + ": " +
                                v.front().message);
  }
}

// --- Tapes -------------------------------------------------------------------
//
// A tape exposes an inclusive position range [lo, hi]; a computation exits
// when the head reaches lo-1 (hits left) or hi+1 (hits right).

class StringTape {
 public:
  explicit StringTape(const OwlString& z) : symbols_(&z.symbols()) {}
  std::int64_t lo() const noexcept { return 1; }
  std::int64_t hi() const noexcept { return static_cast<std::int64_t>(symbols_->size()); }
  TapeCell cell(std::int64_t k) const { return {TapeKind::symbol, &(*symbols_)[static_cast<std::size_t>(k - 1)]}; }

 private:
  const std::vector<OwlSymbol>* symbols_;
};

/// Concatenation of pieces, each repeated a number of times, without
/// materialising the string.
class ConcatTape {
 public:
  explicit ConcatTape(int h) : h_(h) {}

  ConcatTape& add(const OwlString& piece, std::uint64_t repeat = 1) {
    if (piece.height() != h_) throw std::invalid_argument("tape piece height mismatch");
    if (piece.empty() || repeat == 0) return *this;
    pieces_.push_back({&piece.symbols(), total_, piece.size() * repeat});
    total_ += piece.size() * repeat;
    return *this;
  }

  int height() const noexcept { return h_; }
  std::uint64_t size() const noexcept { return total_; }
  std::int64_t lo() const noexcept { return 1; }
  std::int64_t hi() const noexcept { return static_cast<std::int64_t>(total_); }

  const OwlSymbol& symbol(std::uint64_t k) const {
    const auto offset = k - 1;
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), offset,
                               [](std::uint64_t v, const Piece& p) { return v < p.start; });
    const Piece& p = *(it - 1);
    return (*p.symbols)[(offset - p.start) % p.symbols->size()];
  }
  TapeCell cell(std::int64_t k) const { return {TapeKind::symbol, &symbol(static_cast<std::uint64_t>(k))}; }

  OwlString materialize() const {
    OwlString out(h_);
    for (std::uint64_t k = 1; k <= total_; ++k) out.push_back(symbol(k));
    return out;
  }

 private:
  struct Piece {
    const std::vector<OwlSymbol>* symbols;
    std::uint64_t start;
    std::uint64_t length;
  };
  int h_;
  std::uint64_t total_ = 0;
  std::vector<Piece> pieces_;
};

/// |- inner -| with the left endmarker at position 0.
template <class Inner>
class EndmarkedTape {
 public:
  explicit EndmarkedTape(const Inner& inner) : inner_(&inner) {}
  std::int64_t lo() const noexcept { return 0; }
  std::int64_t hi() const noexcept { return inner_->hi() + 1; }
  TapeCell cell(std::int64_t k) const {
    if (k == 0) return {TapeKind::left_end};
    if (k == hi()) return {TapeKind::right_end};
    return inner_->cell(k);
  }

 private:
  const Inner* inner_;
};

// --- Simulation -------------------------------------------------------------

enum class Outcome : std::uint8_t { hit_left, hit_right, loop };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::hit_left: return "hit_left";
    case Outcome::hit_right: return "hit_right";
    case Outcome::loop: return "loop";
  }
  return "?";
}

struct Configuration {
  StateId state;
  std::int64_t position;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

struct SimOptions {
  /// Keep the full trace only while it has at most this many configurations.
  std::size_t trace_limit = 100000;
};

inline constexpr SimOptions no_trace{0};

struct Computation {
  Outcome outcome = Outcome::loop;
  /// State at exit; for loops, the state at the moment the budget ran out.
  StateId state = 0;
  std::int64_t final_position = 0;
  std::uint64_t steps = 0;
  std::vector<Configuration> trace;
  bool trace_truncated = false;
};

/// Runs M from state p at position j until the head leaves [lo, hi].
/// Loop is reported once |Q| * (hi - lo + 1) steps pass without exiting,
/// which by pigeonhole means some configuration repeated.
template <class Tape>
Computation run(const Tdfa& m, StateId p, std::int64_t j, const Tape& tape, SimOptions opt = {}) {
  const std::int64_t lo = tape.lo();
  const std::int64_t hi = tape.hi();
  if (j < lo - 1 || j > hi + 1) throw std::out_of_range("start position " + std::to_string(j) + " outside tape");
  if (p >= m.state_count()) throw std::out_of_range("start state out of range");

  Computation c;
  c.state = p;
  c.final_position = j;
  bool keep = opt.trace_limit > 0;
  auto record = [&](StateId q, std::int64_t pos) {
    if (!keep) return;
    if (c.trace.size() >= opt.trace_limit) {
      keep = false;
      c.trace.clear();
      c.trace.shrink_to_fit();
      c.trace_truncated = true;
      return;
    }
    c.trace.push_back({q, pos});
  };
  record(p, j);

  if (j == lo - 1) {
    c.outcome = Outcome::hit_left;
    return c;
  }
  if (j == hi + 1) {
    c.outcome = Outcome::hit_right;
    return c;
  }

  const auto width = static_cast<std::uint64_t>(hi - lo + 1);
  const std::uint64_t budget = static_cast<std::uint64_t>(m.state_count()) * width;
  StateId q = p;
  std::int64_t pos = j;
  while (true) {
    if (c.steps == budget) {
      c.outcome = Outcome::loop;
      break;
    }
    const Move mv = m.step(q, tape.cell(pos));
    q = mv.next;
    pos += mv.dir == Direction::right ? 1 : -1;
    ++c.steps;
    record(q, pos);
    if (pos < lo) {
      c.outcome = Outcome::hit_left;
      break;
    }
    if (pos > hi) {
      c.outcome = Outcome::hit_right;
      break;
    }
  }
  c.state = q;
  c.final_position = pos;
  return c;
}

inline Computation comp(const Tdfa& m, StateId p, std::int64_t j, const OwlString& z, SimOptions opt = {}) {
  return run(m, p, j, StringTape(z), opt);
}

/// Left computation; on the empty string it hits right in p immediately.
inline Computation lcomp(const Tdfa& m, StateId p, const OwlString& z, SimOptions opt = {}) {
  return comp(m, p, 1, z, opt);
}

/// Right computation; on the empty string it hits left in p immediately.
inline Computation rcomp(const Tdfa& m, StateId p, const OwlString& z, SimOptions opt = {}) {
  return comp(m, p, static_cast<std::int64_t>(z.size()), z, opt);
}

enum class Decision : std::uint8_t { accept, reject, loop };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::accept: return "accept";
    case Decision::reject: return "reject";
    case Decision::loop: return "loop";
  }
  return "?";
}

/// Computation of M on |- z -| from the start state on the left endmarker.
/// Positions follow the endmarked tape: 0 is |-, |z|+1 is -|.
template <class Tape>
Computation run_machine(const Tdfa& m, const Tape& inner, SimOptions opt = {}) {
  return run(m, m.start(), 0, EndmarkedTape<Tape>(inner), opt);
}

inline Decision decision_of(const Tdfa& m, const Computation& c) {
  if (c.outcome != Outcome::hit_right) return Decision::loop;
  if (c.state == m.accept()) return Decision::accept;
  if (c.state == m.reject()) return Decision::reject;
  return Decision::loop;
}

template <class Tape>
Decision decide_tape(const Tdfa& m, const Tape& tape) {
  return decision_of(m, run_machine(m, tape, no_trace));
}

inline Decision decide(const Tdfa& m, const OwlString& z) { return decide_tape(m, StringTape(z)); }

// --- Reference machines -----------------------------------------------------

namespace detail {
inline std::string subset_name(std::uint64_t mask, int h) {
  std::string s = "{";
  bool first = true;
  for (int i = 1; i <= h; ++i) {
    if (!((mask >> (i - 1)) & 1u)) continue;
    if (!first) s += ",";
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

inline std::uint64_t keep_smallest(std::uint64_t mask, int cap) {
  std::uint64_t out = 0;
  for (int taken = 0; mask && taken < cap; ++taken) {
    const auto low = mask & (~mask + 1);
    out |= low;
    mask &= mask - 1;
  }
  return out;
}

inline Tdfa subset_machine(int h, int cap) {
  check_height(h);
  if (h > 12) throw std::invalid_argument("subset solver supports h <= 12 (2^h states)");
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  const std::uint64_t subsets = std::uint64_t{1} << h;
  std::vector<std::string> names;
  names.reserve(subsets + 2);
  for (std::uint64_t s = 0; s < subsets; ++s) names.push_back(subset_name(s, h));
  names.emplace_back("accept");
  names.emplace_back("reject");
  const auto full = static_cast<StateId>(subsets - 1);
  const auto accept = static_cast<StateId>(subsets);
  const auto reject = static_cast<StateId>(subsets + 1);
  const auto start = static_cast<StateId>(keep_smallest(full, cap));

  Tdfa m(h, std::move(names), start, accept, reject);
  for (StateId q = 0; q < subsets + 2; ++q) {
    m.set_left_end(q, {start, Direction::right});
    if (q == accept || q == reject) {
      m.set_right_end(q, {q, Direction::right});
    } else {
      m.set_right_end(q, {q == 0 ? reject : accept, Direction::right});
    }
  }
  // The halting states restart from the full set on symbols, so that every
  // exit state of a non-empty infix is a subset state.
  m.set_symbol_rule([=](StateId q, const OwlSymbol& a) -> std::optional<Move> {
    const std::uint64_t current = q >= accept ? full : q;
    const auto next = keep_smallest(image(current, a.matrix()), cap);
    return Move{static_cast<StateId>(next), Direction::right};
  });
  return m;
}
}  // namespace detail

/// One-way subset-construction solver for OWL_h: 2^h + 2 states.
inline Tdfa build_subset_solver(int h) { return detail::subset_machine(h, h); }

/// Subset solver that keeps only the `cap` smallest tracked nodes after every
/// step; wrong whenever cap < h.
inline Tdfa build_broken_solver(int h, int cap) {
  if (cap < 1) throw std::invalid_argument("cap must be at least 1");
  return detail::subset_machine(h, std::min(cap, h));
}

/// Accepts everything; every symbol sends every state to the start state.
inline Tdfa build_accept_all(int h) {
  Tdfa m(h, {"start", "accept", "reject"}, 0, 1, 2);
  for (StateId q = 0; q < 3; ++q) {
    m.set_left_end(q, {0, Direction::right});
    m.set_right_end(q, {q == 2 ? StateId{2} : StateId{1}, Direction::right});
    m.set_default(q, {0, Direction::right});
  }
  return m;
}

}  // namespace owl
