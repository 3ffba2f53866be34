#pragma once

// Exit-state analysis: the sets Q_LR(y) / Q_RL(y) of states in which left
// (right) computations on y leave it on the far side, the partial maps that
// carry those states across an extension, and bounded search for strings
// whose exit sizes no extension inside a property can shrink.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "owl/owl.hpp"
#include "owl/sampling.hpp"
#include "owl/tdfa.hpp"

namespace owl {

enum class Side : std::uint8_t { lr, rl };

inline const char* to_string(Side s) { return s == Side::lr ? "lr" : "rl"; }

using StateSet = std::vector<StateId>;  // sorted, unique

struct ExitOutcome {
  Outcome outcome;
  StateId state;
};

struct TraversalMap {
  Side side;
  /// Indexed by start state p: the outcome of lcomp_p(y) (lr) or rcomp_p(y) (rl).
  std::vector<ExitOutcome> per_state;
  /// States hit right into (lr) or hit left into (rl).
  StateSet exits;

  std::size_t exit_size() const noexcept { return exits.size(); }
};

inline TraversalMap traversal_map(const Tdfa& m, const OwlString& y, Side side) {
  TraversalMap map{side, {}, {}};
  map.per_state.reserve(m.state_count());
  const Outcome wanted = side == Side::lr ? Outcome::hit_right : Outcome::hit_left;
  std::vector<bool> hit(m.state_count(), false);
  for (StateId p = 0; p < m.state_count(); ++p) {
    const auto c = side == Side::lr ? lcomp(m, p, y, no_trace) : rcomp(m, p, y, no_trace);
    map.per_state.push_back({c.outcome, c.state});
    if (c.outcome == wanted) hit[c.state] = true;
  }
  for (StateId q = 0; q < m.state_count(); ++q) {
    if (hit[q]) map.exits.push_back(q);
  }
  return map;
}

inline StateSet exit_set(const Tdfa& m, const OwlString& y, Side side) { return traversal_map(m, y, side).exits; }

inline std::size_t exit_size(const Tdfa& m, const OwlString& y, Side side) {
  return traversal_map(m, y, side).exit_size();
}

/// A partial function on a finite set of states.
class PartialMap {
 public:
  PartialMap() = default;
  explicit PartialMap(StateSet domain) : domain_(std::move(domain)) {}

  void define(StateId from, StateId to) { values_[from] = to; }

  const StateSet& domain() const noexcept { return domain_; }
  std::optional<StateId> at(StateId q) const {
    auto it = values_.find(q);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  bool is_defined(StateId q) const { return values_.count(q) != 0; }
  const std::map<StateId, StateId>& values() const noexcept { return values_; }

  StateSet image() const {
    std::set<StateId> s;
    for (const auto& [from, to] : values_) s.insert(to);
    return {s.begin(), s.end()};
  }

  friend bool operator==(const PartialMap&, const PartialMap&) = default;

 private:
  StateSet domain_;
  std::map<StateId, StateId> values_;
};

/// alpha_{y,z}: each q in Q_LR(y) goes to the state hit right by the
/// computation on y z that starts in q on the first symbol of z.
inline PartialMap alpha(const Tdfa& m, const OwlString& y, const OwlString& z) {
  const auto yz = y + z;
  PartialMap f(exit_set(m, y, Side::lr));
  const auto start = static_cast<std::int64_t>(y.size()) + 1;
  for (StateId q : f.domain()) {
    const auto c = comp(m, q, start, yz, no_trace);
    if (c.outcome == Outcome::hit_right) f.define(q, c.state);
  }
  return f;
}

/// beta_{z,y}: each q in Q_RL(y) goes to the state hit left by the
/// computation on z y that starts in q on the last symbol of z.
inline PartialMap beta(const Tdfa& m, const OwlString& z, const OwlString& y) {
  const auto zy = z + y;
  PartialMap f(exit_set(m, y, Side::rl));
  const auto start = static_cast<std::int64_t>(z.size());
  for (StateId q : f.domain()) {
    const auto c = comp(m, q, start, zy, no_trace);
    if (c.outcome == Outcome::hit_left) f.define(q, c.state);
  }
  return f;
}

/// g after f, on f's domain.
inline PartialMap compose(const PartialMap& g, const PartialMap& f) {
  PartialMap out(f.domain());
  for (const auto& [from, mid] : f.values()) {
    if (auto to = g.at(mid)) out.define(from, *to);
  }
  return out;
}

inline PartialMap identity_map(const StateSet& a) {
  PartialMap out(a);
  for (auto q : a) out.define(q, q);
  return out;
}

/// f composed with itself t times (t = 0 gives the identity on the domain).
inline PartialMap power(const PartialMap& f, std::uint64_t t) {
  PartialMap out = identity_map(f.domain());
  for (std::uint64_t k = 0; k < t; ++k) out = compose(f, out);
  return out;
}

/// True iff f is total on A, injective there, and maps A onto A.
inline bool is_permutation(const PartialMap& f, const StateSet& a) {
  std::set<StateId> targets;
  for (auto q : a) {
    auto to = f.at(q);
    if (!to) return false;
    if (!std::binary_search(a.begin(), a.end(), *to)) return false;
    if (!targets.insert(*to).second) return false;
  }
  return targets.size() == a.size();
}

/// Cycle lengths of a permutation of A, in order of first appearance.
inline std::vector<std::uint64_t> cycle_lengths(const PartialMap& f, const StateSet& a) {
  if (!is_permutation(f, a)) throw std::invalid_argument("map is not a permutation of the given set");
  std::set<StateId> seen;
  std::vector<std::uint64_t> out;
  for (auto q : a) {
    if (seen.count(q)) continue;
    std::uint64_t len = 0;
    StateId cur = q;
    do {
      seen.insert(cur);
      cur = *f.at(cur);
      ++len;
    } while (cur != q);
    out.push_back(len);
  }
  return out;
}

inline std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  const auto g = std::gcd(a, b);
  const auto q = a / g;
  if (b != 0 && q > std::numeric_limits<std::uint64_t>::max() / b) {
    throw std::overflow_error("permutation order overflows 64 bits");
  }
  return q * b;
}

/// Least t >= 1 with f^t = id on A: the lcm of the cycle lengths.
inline std::uint64_t permutation_order(const PartialMap& f, const StateSet& a) {
  std::uint64_t order = 1;
  for (auto len : cycle_lengths(f, a)) order = checked_lcm(order, len);
  return order;
}

// --- Generic strings ---------------------------------------------------------

enum class GenericSide : std::uint8_t { lr, rl, both };

inline const char* to_string(GenericSide s) {
  switch (s) {
    case GenericSide::lr: return "lr";
    case GenericSide::rl: return "rl";
    case GenericSide::both: return "both";
  }
  return "?";
}

struct SearchBounds {
  /// Extension alphabet; sorted into canonical order before use.
  std::vector<OwlSymbol> generators;
  std::size_t max_ext_len = 1;
  std::size_t max_rounds = 64;
};

/// A member y of P(C) for which no searched extension shrank the exit size.
/// "Generic" only up to the recorded bounds.
struct GenericCertificate {
  OwlString y;
  BoolMatrix target;
  GenericSide side;
  std::size_t lr_size;
  std::size_t rl_size;
  /// Exit sizes along the descent, starting with the seed's.
  std::vector<std::size_t> lr_descent;
  std::vector<std::size_t> rl_descent;
  std::size_t generator_count;
  std::size_t max_ext_len;
  std::size_t max_rounds;
  std::size_t rounds_used;
  /// False when a descent stopped because max_rounds ran out rather than
  /// because the search found no smaller extension.
  bool converged;
};

namespace detail {

inline std::vector<OwlSymbol> canonical_generators(std::vector<OwlSymbol> g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

struct DescentResult {
  OwlString y;
  std::vector<std::size_t> sizes;
  std::size_t rounds;
  bool converged;
};

/// One-sided descent. LR extends on the right (y z), RL on the left (z y).
inline DescentResult descend(const Tdfa& m, const BoolMatrix& c, const std::vector<OwlSymbol>& gens,
                             std::size_t max_ext_len, std::size_t max_rounds, Side side, OwlString y) {
  DescentResult r{std::move(y), {}, 0, true};
  std::size_t size = exit_size(m, r.y, side);
  r.sizes.push_back(size);
  while (true) {
    if (size == 0) break;
    if (r.rounds == max_rounds) {
      r.converged = false;
      break;
    }
    std::optional<OwlString> found;
    for_each_word(
        c.height(), gens, max_ext_len,
        [&](const OwlString& z) {
          const auto cz = connectivity(z);
          const auto joined = side == Side::lr ? multiply(c, cz) : multiply(cz, c);
          if (joined != c) return true;
          auto candidate = side == Side::lr ? r.y + z : z + r.y;
          if (exit_size(m, candidate, side) < size) {
            found = std::move(candidate);
            return false;
          }
          return true;
        },
        1);
    ++r.rounds;
    if (!found) break;
    r.y = std::move(*found);
    size = exit_size(m, r.y, side);
    r.sizes.push_back(size);
  }
  return r;
}

/// Appends the sizes that differ from the last one recorded.
inline void append_sizes(std::vector<std::size_t>& out, const std::vector<std::size_t>& sizes) {
  for (auto v : sizes) {
    if (out.empty() || out.back() != v) out.push_back(v);
  }
}

}  // namespace detail

/// Starting from `seed` (default: the representative of C), repeatedly
/// extends by the first word (by length, then canonical order) that stays in
/// P(C) and strictly lowers the exit size on `side`.
inline GenericCertificate descend_generic(const Tdfa& m, const BoolMatrix& c, const SearchBounds& bounds, Side side,
                                          std::optional<OwlString> seed = std::nullopt) {
  if (bounds.generators.empty()) throw std::invalid_argument("descend_generic needs at least one generator");
  OwlString start = seed ? *seed : representative(c);
  if (connectivity(start) != c) throw std::invalid_argument("seed string is not in P(C)");
  const auto gens = detail::canonical_generators(bounds.generators);
  auto r = detail::descend(m, c, gens, bounds.max_ext_len, bounds.max_rounds, side, std::move(start));
  GenericCertificate cert{r.y,
                          c,
                          side == Side::lr ? GenericSide::lr : GenericSide::rl,
                          exit_size(m, r.y, Side::lr),
                          exit_size(m, r.y, Side::rl),
                          {},
                          {},
                          gens.size(),
                          bounds.max_ext_len,
                          bounds.max_rounds,
                          r.rounds,
                          r.converged};
  (side == Side::lr ? cert.lr_descent : cert.rl_descent) = std::move(r.sizes);
  return cert;
}

/// Both-sides certificate: an LR-descended x and an RL-descended z joined
/// through a smoothness infix, then alternately descended on each side until
/// neither side improves. Requires a constructive infix for C.
inline GenericCertificate certify_generic(const Tdfa& m, const BoolMatrix& c, const SearchBounds& bounds,
                                          std::optional<OwlString> seed = std::nullopt) {
  const auto infix = smooth_infix_witness(c);
  if (!infix) throw std::invalid_argument("no constructive smoothness infix for this connectivity");
  auto left = descend_generic(m, c, bounds, Side::lr, seed);
  auto right = descend_generic(m, c, bounds, Side::rl, seed);

  GenericCertificate cert = left;
  cert.side = GenericSide::both;
  cert.rl_descent = right.rl_descent;
  cert.rounds_used = left.rounds_used + right.rounds_used;
  cert.converged = left.converged && right.converged;
  OwlString w = left.y + *infix + right.y;
  if (connectivity(w) != c) throw std::logic_error("joined generic string left the property");

  const auto gens = detail::canonical_generators(bounds.generators);
  // Each productive pass lowers a size bounded by |Q|; the pass cap is a
  // guard, not a bound that a monotone machine ever reaches.
  for (std::size_t pass = 0;; ++pass) {
    if (pass == bounds.max_rounds) {
      cert.converged = false;
      break;
    }
    auto lr = detail::descend(m, c, gens, bounds.max_ext_len, bounds.max_rounds, Side::lr, w);
    auto rl = detail::descend(m, c, gens, bounds.max_ext_len, bounds.max_rounds, Side::rl, lr.y);
    cert.rounds_used += lr.rounds + rl.rounds;
    cert.converged = cert.converged && lr.converged && rl.converged;
    const bool improved = lr.sizes.size() > 1 || rl.sizes.size() > 1;
    detail::append_sizes(cert.lr_descent, lr.sizes);
    detail::append_sizes(cert.rl_descent, rl.sizes);
    w = std::move(rl.y);
    if (!improved) break;
  }
  cert.y = w;
  cert.lr_size = exit_size(m, w, Side::lr);
  cert.rl_size = exit_size(m, w, Side::rl);
  return cert;
}

}  // namespace owl
