#pragma once

// Adversarial analysis of a claimed OWL_h solver.
//
// exit_chain() estimates the exit sizes (a_t, b_t) of the properties
// P(C_0), ..., P(C_N) with bounded generic-string certificates. For a
// correct solver each step lowers at least one component, which forces
// |Q| >= N/2. pump() runs the pumping construction at a single index t:
// when neither exit size drops, inserting t* copies of the block x.theta
// is invisible to the machine, yet flips liveness, so the machine errs on
// one of the two inputs. differential_fuzz() is a plain oracle comparison.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "owl/exits.hpp"
#include "owl/owl.hpp"
#include "owl/sampling.hpp"
#include "owl/sequence.hpp"
#include "owl/tdfa.hpp"

namespace owl {

/// All of Sigma_h for h <= 3; otherwise the chain representatives plus the
/// identity and complete symbols. Longer extensions only for h <= 2.
inline SearchBounds default_search_bounds(int h) {
  SearchBounds b;
  if (h <= 3) {
    b.generators = all_symbols(h);
  } else {
    const auto seq = build_sequence(h, Recurrence::plain);
    for (const auto& c : seq.matrices) b.generators.emplace_back(c);
    b.generators.push_back(identity_symbol(h));
    b.generators.push_back(complete_symbol(h));
  }
  b.max_ext_len = h <= 2 ? 2 : 1;
  b.max_rounds = 64;
  return b;
}

struct AdversaryBounds {
  SearchBounds search;
  /// Longest pumped input the simulator will run.
  std::uint64_t max_pumped_length = 1'000'000;
};

inline AdversaryBounds default_adversary_bounds(int h) { return {default_search_bounds(h), 1'000'000}; }

namespace detail {
inline void require_machine_height(const Tdfa& m, int h) {
  require_valid(m);
  if (m.height() != h) {
    throw std::invalid_argument("machine height " + std::to_string(m.height()) + " differs from requested height " +
                                std::to_string(h));
  }
}
}  // namespace detail

// --- Exit chains -----------------------------------------------------------------

struct ChainEntry {
  int t;
  GenericCertificate certificate;
  /// "representative" or "coupled" (previous theta . suffix witness . representative).
  std::string seed;
};

struct ExitChainReport {
  int h;
  std::size_t states;
  std::vector<ChainEntry> entries;  // t = 0..N
  std::size_t a_decrements = 0;
  std::size_t b_decrements = 0;
  /// Steps t where neither estimate dropped.
  std::vector<int> flat_steps;
  bool nonincreasing = true;
  std::size_t implied_bound = 0;
  std::string caveat;

  std::vector<std::size_t> a_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& e : entries) out.push_back(e.certificate.lr_size);
    return out;
  }
  std::vector<std::size_t> b_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& e : entries) out.push_back(e.certificate.rl_size);
    return out;
  }
};

inline ExitChainReport exit_chain(const Tdfa& m, int h, const SearchBounds& bounds) {
  detail::require_machine_height(m, h);
  const auto seq = build_sequence(h);
  ExitChainReport report;
  report.h = h;
  report.states = m.state_count();

  for (int t = 0; t <= seq.length; ++t) {
    const auto& c = seq[t];
    auto fresh = certify_generic(m, c, bounds);
    if (t == 0) {
      report.entries.push_back({t, std::move(fresh), "representative"});
      continue;
    }
    const auto& prev = report.entries.back().certificate;
    // prev.y is a prefix of the coupled seed, so both of its exit sizes
    // start at or below the previous estimates.
    const auto u = suffix_of_choice_witness(seq[t - 1], c);
    const OwlString coupled_seed = prev.y + single(u) + representative(c);
    auto coupled = certify_generic(m, c, bounds, coupled_seed);
    const bool fresh_dominates = fresh.lr_size <= prev.lr_size && fresh.rl_size <= prev.rl_size &&
                                 fresh.lr_size + fresh.rl_size < coupled.lr_size + coupled.rl_size;
    if (fresh_dominates) {
      report.entries.push_back({t, std::move(fresh), "representative"});
    } else {
      report.entries.push_back({t, std::move(coupled), "coupled"});
    }
  }

  for (std::size_t k = 1; k < report.entries.size(); ++k) {
    const auto& p = report.entries[k - 1].certificate;
    const auto& q = report.entries[k].certificate;
    if (q.lr_size > p.lr_size || q.rl_size > p.rl_size) report.nonincreasing = false;
    const bool a_down = q.lr_size < p.lr_size;
    const bool b_down = q.rl_size < p.rl_size;
    report.a_decrements += a_down;
    report.b_decrements += b_down;
    if (!a_down && !b_down) report.flat_steps.push_back(report.entries[k].t);
  }
  report.implied_bound = std::max(report.a_decrements, report.b_decrements);
  report.caveat = "exit sizes are upper estimates certified only against extensions of length <= " +
                  std::to_string(bounds.max_ext_len) + " over " +
                  std::to_string(detail::canonical_generators(bounds.generators).size()) +
                  " generator symbols with at most " + std::to_string(bounds.max_rounds) +
                  " descent rounds per pass";
  return report;
}

// --- Counterexamples ------------------------------------------------------------

enum class CounterexampleKind : std::uint8_t { pumped_pair, direct };

/// A machine error. For pumped_pair, the machine decides u.theta.v and
/// u.theta.(x.theta)^t*.v identically although exactly one is live. For
/// direct (from fuzzing), the machine's decision on `input` contradicts
/// its liveness.
struct Counterexample {
  Counterexample(CounterexampleKind k, int h) : kind(k), theta(h), x(h), input(h) {}

  CounterexampleKind kind;
  int t = 0;
  OwlString theta;
  OwlString x;
  std::optional<OwlSymbol> u;
  std::optional<OwlSymbol> v;
  std::uint64_t t_lr = 0;
  std::uint64_t t_rl = 0;
  std::uint64_t t_star = 0;
  /// u.theta.v, or the fuzzed input.
  OwlString input;
  std::uint64_t pumped_length = 0;
  Decision input_decision = Decision::loop;
  Decision pumped_decision = Decision::loop;
  bool input_live = false;
  bool pumped_live = false;
  /// "short" or "pumped" for pairs; "input" for direct.
  std::string erring;
};

/// The pumped input as a lazily indexed tape: u theta (x theta)^t* v.
struct PumpedTape {
  OwlString u;
  OwlString theta;
  OwlString block;
  OwlString v;
  ConcatTape tape;

  PumpedTape(const OwlSymbol& u_sym, const OwlString& th, const OwlString& x, std::uint64_t copies,
             const OwlSymbol& v_sym)
      : u(single(u_sym)), theta(th), block(x + th), v(single(v_sym)), tape(th.height()) {
    tape.add(u).add(theta).add(block, copies).add(v);
  }
  PumpedTape(const PumpedTape&) = delete;
  PumpedTape& operator=(const PumpedTape&) = delete;
};

/// Liveness by streaming subset simulation over any tape.
template <class Tape>
bool tape_live(int h, const Tape& tape) {
  std::uint64_t current = detail::low_bits(h);
  for (std::int64_t k = tape.lo(); k <= tape.hi(); ++k) {
    current = image(current, tape.cell(k).symbol->matrix());
    if (current == 0) return false;
  }
  return true;
}

inline bool accepts_matches(Decision d, bool live) { return (d == Decision::accept) == live; }

/// Independent re-check of a counterexample: fresh simulations and the
/// streaming liveness oracle.
inline bool verify_counterexample(const Tdfa& m, const Counterexample& cx) {
  const int h = m.height();
  if (cx.kind == CounterexampleKind::direct) {
    const auto d = decide(m, cx.input);
    return d == cx.input_decision && nfa_live(cx.input) == cx.input_live && !accepts_matches(d, cx.input_live);
  }
  if (!cx.u || !cx.v) return false;
  const OwlString expected_short = single(*cx.u) + cx.theta + single(*cx.v);
  if (!(expected_short == cx.input)) return false;
  const PumpedTape pumped(*cx.u, cx.theta, cx.x, cx.t_star, *cx.v);
  const auto d_short = decide(m, cx.input);
  const auto d_pumped = decide_tape(m, pumped.tape);
  const bool live_short = tape_live(h, StringTape(cx.input));
  const bool live_pumped = tape_live(h, pumped.tape);
  return d_short == d_pumped && live_short != live_pumped && d_short == cx.input_decision &&
         d_pumped == cx.pumped_decision && live_short == cx.input_live && live_pumped == cx.pumped_live &&
         pumped.tape.size() == cx.pumped_length;
}

// --- Pumping --------------------------------------------------------------------

enum class PumpStatus : std::uint8_t { counterexample, not_found, size_guard };

inline const char* to_string(PumpStatus s) {
  switch (s) {
    case PumpStatus::counterexample: return "counterexample";
    case PumpStatus::not_found: return "not_found";
    case PumpStatus::size_guard: return "size_guard";
  }
  return "?";
}

struct PumpResult {
  PumpStatus status = PumpStatus::not_found;
  std::string reason;
  int t = 0;
  std::optional<GenericCertificate> theta_certificate;
  std::size_t alpha_domain = 0;
  std::size_t alpha_image = 0;
  std::size_t beta_domain = 0;
  std::size_t beta_image = 0;
  std::uint64_t t_star = 0;
  std::optional<Counterexample> counterexample;
};

inline PumpResult pump(const Tdfa& m, int t, const AdversaryBounds& bounds) {
  const int h = m.height();
  require_valid(m);
  const int n = sequence_length(h);
  if (t < 1 || t > n) throw std::out_of_range("pump index must be in [1, " + std::to_string(n) + "]");
  const auto seq = build_sequence(h);
  const auto& c_prev = seq[t - 1];
  const auto& c_next = seq[t];

  PumpResult r;
  r.t = t;
  auto cert = certify_generic(m, c_prev, bounds.search);
  const OwlString theta = cert.y;
  r.theta_certificate = std::move(cert);

  const OwlString x = single(suffix_of_choice_witness(c_prev, c_next));
  const OwlString block = x + theta;

  const auto a = alpha(m, theta, block);
  const auto b = beta(m, theta + x, theta);
  r.alpha_domain = a.domain().size();
  r.alpha_image = a.image().size();
  r.beta_domain = b.domain().size();
  r.beta_image = b.image().size();
  if (!is_permutation(a, a.domain())) {
    r.reason = "alpha is not a permutation of Q_LR(theta): the LR exit size drops from " +
               std::to_string(r.alpha_domain) + " to " + std::to_string(exit_size(m, theta + block, Side::lr));
    return r;
  }
  if (!is_permutation(b, b.domain())) {
    r.reason = "beta is not a permutation of Q_RL(theta): the RL exit size drops from " +
               std::to_string(r.beta_domain) + " to " + std::to_string(exit_size(m, theta + block, Side::rl));
    return r;
  }

  const auto t_lr = permutation_order(a, a.domain());
  const auto t_rl = permutation_order(b, b.domain());
  const auto t_star = checked_lcm(t_lr * t_rl, t_lr * t_rl);
  r.t_star = t_star;

  const std::uint64_t fixed = theta.size() + 2;
  if (t_star > (bounds.max_pumped_length - std::min(fixed, bounds.max_pumped_length)) / block.size()) {
    r.status = PumpStatus::size_guard;
    r.reason = "pumped input would exceed " + std::to_string(bounds.max_pumped_length) + " symbols (t* = " +
               std::to_string(t_star) + ")";
    return r;
  }

  const auto sep = separation_context(c_prev, c_next);
  Counterexample cx(CounterexampleKind::pumped_pair, h);
  cx.t = t;
  cx.theta = theta;
  cx.x = x;
  cx.u = sep.u;
  cx.v = sep.v;
  cx.t_lr = t_lr;
  cx.t_rl = t_rl;
  cx.t_star = t_star;
  cx.input = single(sep.u) + theta + single(sep.v);
  const PumpedTape pumped(sep.u, theta, x, t_star, sep.v);
  cx.pumped_length = pumped.tape.size();
  cx.input_decision = decide(m, cx.input);
  cx.pumped_decision = decide_tape(m, pumped.tape);
  cx.input_live = is_live(cx.input);
  cx.pumped_live = tape_live(h, pumped.tape);

  if (cx.input_live == cx.pumped_live) {
    throw std::logic_error("separation context failed to separate the short and pumped inputs");
  }
  if (cx.input_decision != cx.pumped_decision) {
    r.reason = std::string("decisions differ (short: ") + to_string(cx.input_decision) +
               ", pumped: " + to_string(cx.pumped_decision) +
               "): the surgery premise fails, so theta is not generic beyond the searched bounds";
    return r;
  }
  cx.erring = accepts_matches(cx.input_decision, cx.input_live) ? "pumped" : "short";
  if (!verify_counterexample(m, cx)) throw std::logic_error("counterexample failed independent re-verification");
  r.status = PumpStatus::counterexample;
  r.reason = "machine decides both inputs identically (" + std::string(to_string(cx.input_decision)) +
             ") but only the " + (cx.input_live ? std::string("short") : std::string("pumped")) + " input is live";
  r.counterexample = std::move(cx);
  return r;
}

// --- Traversal diagnostics -------------------------------------------------------

enum class CrucialKind : std::uint8_t { start, odd, even, halt };

inline const char* to_string(CrucialKind k) {
  switch (k) {
    case CrucialKind::start: return "start";
    case CrucialKind::odd: return "odd";
    case CrucialKind::even: return "even";
    case CrucialKind::halt: return "halt";
  }
  return "?";
}

struct CrucialPoint {
  StateId state;
  std::int64_t position;  // on the endmarked tape, |- at 0
  CrucialKind kind;
};

struct TraversalDecomposition {
  std::int64_t theta_begin;  // |u| + 1
  std::int64_t theta_end;    // |u theta|
  /// Start configuration, one point per full traversal of theta, and the
  /// final configuration when the machine halts.
  std::vector<CrucialPoint> points;
  std::size_t traversals = 0;
  Decision decision = Decision::loop;
  std::uint64_t steps = 0;
  /// True when the loop budget ran out; traversals counts only those seen.
  bool truncated = false;
};

/// Simulates M on |- u theta tail v -| and locates every full traversal of
/// the theta block: entering from one side, staying strictly inside, and
/// leaving on the other side.
inline TraversalDecomposition traversal_decomposition(const Tdfa& m, const OwlString& u, const OwlString& theta,
                                                      const OwlString& tail, const OwlString& v) {
  require_valid(m);
  if (theta.empty()) throw std::invalid_argument("theta must be non-empty");
  const OwlString z = u + theta + tail + v;
  const StringTape inner(z);
  const EndmarkedTape<StringTape> tape(inner);

  TraversalDecomposition d;
  d.theta_begin = static_cast<std::int64_t>(u.size()) + 1;
  d.theta_end = static_cast<std::int64_t>(u.size() + theta.size());
  d.points.push_back({m.start(), 0, CrucialKind::start});

  const auto inside = [&](std::int64_t p) { return p >= d.theta_begin && p <= d.theta_end; };
  enum class Entry { none, from_left, from_right } entry = Entry::none;

  const std::int64_t hi = tape.hi();
  const std::uint64_t budget = static_cast<std::uint64_t>(m.state_count()) * static_cast<std::uint64_t>(hi + 1);
  StateId q = m.start();
  std::int64_t pos = 0;
  while (true) {
    if (d.steps == budget) {
      d.truncated = true;
      d.decision = Decision::loop;
      break;
    }
    const Move mv = m.step(q, tape.cell(pos));
    const std::int64_t next = pos + (mv.dir == Direction::right ? 1 : -1);
    ++d.steps;
    if (!inside(pos) && inside(next)) {
      entry = next == d.theta_begin && pos < d.theta_begin ? Entry::from_left : Entry::from_right;
    } else if (inside(pos) && !inside(next)) {
      const bool leaves_right = next > d.theta_end;
      if ((leaves_right && entry == Entry::from_left) || (!leaves_right && entry == Entry::from_right)) {
        ++d.traversals;
        d.points.push_back({mv.next, next, leaves_right ? CrucialKind::odd : CrucialKind::even});
      }
      entry = Entry::none;
    }
    q = mv.next;
    pos = next;
    if (pos < 0) {
      d.decision = Decision::loop;
      break;
    }
    if (pos > hi) {
      d.points.push_back({q, pos, CrucialKind::halt});
      d.decision = q == m.accept() ? Decision::accept : q == m.reject() ? Decision::reject : Decision::loop;
      break;
    }
  }
  return d;
}

// --- Differential fuzzing ------------------------------------------------------------

struct FuzzOptions {
  std::size_t max_length = 4;
  /// Enumerate every string over Sigma_h (h <= 4) by length; otherwise sample.
  bool exhaustive = false;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

struct FuzzResult {
  std::optional<Counterexample> counterexample;
  std::uint64_t tested = 0;
};

namespace detail {
inline Counterexample direct_counterexample(const OwlString& z, Decision d, bool live) {
  Counterexample cx(CounterexampleKind::direct, z.height());
  cx.input = z;
  cx.input_decision = d;
  cx.input_live = live;
  cx.erring = "input";
  return cx;
}

/// Index of the first string in the batch that M gets wrong, if any.
inline std::optional<std::size_t> first_mismatch(const Tdfa& m, const std::vector<OwlString>& batch, unsigned jobs) {
  std::vector<char> bad(batch.size(), 0);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t k = begin; k < batch.size(); k += step) {
      bad[k] = !accepts_matches(decide(m, batch[k]), nfa_live(batch[k]));
    }
  };
  if (jobs <= 1 || batch.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w, jobs);
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (bad[k]) return k;
  }
  return std::nullopt;
}
}  // namespace detail

/// First string (in enumeration or sampling order) on which M's decision
/// disagrees with liveness.
inline FuzzResult differential_fuzz(const Tdfa& m, int h, const FuzzOptions& opt) {
  detail::require_machine_height(m, h);
  FuzzResult result;
  constexpr std::size_t kBatch = 4096;
  std::vector<OwlString> batch;

  auto flush = [&]() -> bool {
    if (batch.empty()) return false;
    if (auto k = detail::first_mismatch(m, batch, opt.jobs)) {
      result.tested += *k + 1;
      const auto& z = batch[*k];
      result.counterexample = detail::direct_counterexample(z, decide(m, z), nfa_live(z));
      return true;
    }
    result.tested += batch.size();
    batch.clear();
    return false;
  };

  if (opt.exhaustive) {
    const auto alphabet = all_symbols(h);
    bool done = false;
    for_each_word(h, alphabet, opt.max_length, [&](const OwlString& z) {
      batch.push_back(z);
      if (batch.size() == kBatch && flush()) {
        done = true;
        return false;
      }
      return true;
    });
    if (!done) flush();
  } else {
    Rng rng(opt.seed);
    for (std::uint64_t k = 0; k < opt.samples; ++k) {
      batch.push_back(random_mixed_string(h, opt.max_length, rng));
      if (batch.size() == kBatch && flush()) return result;
    }
    flush();
  }
  if (result.counterexample && !verify_counterexample(m, *result.counterexample)) {
    throw std::logic_error("fuzz counterexample failed independent re-verification");
  }
  return result;
}

}  // namespace owl
