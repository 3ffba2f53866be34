#pragma once

// The alphabet Sigma_h of two-column graphs, strings over it, their
// connectivities, and the constructive witnesses for relations between
// connectivity properties P(C) = { z : C(z) = C }.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "owl/matrix.hpp"

namespace owl {

/// One letter of Sigma_h: a set of edges (i, j), left node i to right node j.
class OwlSymbol {
 public:
  explicit OwlSymbol(int h) : edges_(h) {}
  explicit OwlSymbol(BoolMatrix edges) : edges_(std::move(edges)) {}
  OwlSymbol(int h, const std::vector<std::pair<int, int>>& edges) : edges_(h) {
    for (auto [i, j] : edges) edges_.set(i, j);
  }

  int height() const noexcept { return edges_.height(); }
  bool has_edge(int i, int j) const { return edges_.get(i, j); }
  /// The edge relation, which is also the connectivity of the one-symbol string.
  const BoolMatrix& matrix() const noexcept { return edges_; }

  /// Edges in canonical (lexicographic) order.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= height(); ++i) {
      for (int j = 1; j <= height(); ++j) {
        if (edges_.get(i, j)) out.emplace_back(i, j);
      }
    }
    return out;
  }

  friend bool operator==(const OwlSymbol&, const OwlSymbol&) = default;
  friend bool operator<(const OwlSymbol& a, const OwlSymbol& b) { return a.edges_ < b.edges_; }

 private:
  BoolMatrix edges_;
};

struct OwlSymbolHash {
  std::size_t operator()(const OwlSymbol& a) const noexcept { return BoolMatrixHash{}(a.matrix()); }
};

inline OwlSymbol identity_symbol(int h) { return OwlSymbol(identity(h)); }
inline OwlSymbol empty_symbol(int h) { return OwlSymbol(zero(h)); }
inline OwlSymbol complete_symbol(int h) { return OwlSymbol(all_ones(h)); }

inline const BoolMatrix& symbol_matrix(const OwlSymbol& a) { return a.matrix(); }

class OwlString {
 public:
  explicit OwlString(int h) : h_(h) { check_height(h); }
  OwlString(int h, std::vector<OwlSymbol> symbols) : h_(h), symbols_(std::move(symbols)) {
    check_height(h);
    for (const auto& a : symbols_) check_symbol(a);
  }

  int height() const noexcept { return h_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }

  /// 1-based access, matching tape positions.
  const OwlSymbol& symbol(std::size_t k) const {
    if (k < 1 || k > symbols_.size()) throw std::out_of_range("string position out of range");
    return symbols_[k - 1];
  }
  const std::vector<OwlSymbol>& symbols() const noexcept { return symbols_; }

  OwlString& push_back(OwlSymbol a) {
    check_symbol(a);
    symbols_.push_back(std::move(a));
    return *this;
  }

  OwlString& append(const OwlString& other) {
    if (other.h_ != h_) throw std::invalid_argument("cannot concatenate strings of different heights");
    symbols_.insert(symbols_.end(), other.symbols_.begin(), other.symbols_.end());
    return *this;
  }

  friend OwlString operator+(OwlString a, const OwlString& b) { return a.append(b); }
  friend bool operator==(const OwlString&, const OwlString&) = default;

 private:
  void check_symbol(const OwlSymbol& a) const {
    if (a.height() != h_) {
      throw std::invalid_argument("symbol height " + std::to_string(a.height()) + " does not match string height " +
                                  std::to_string(h_));
    }
  }

  int h_;
  std::vector<OwlSymbol> symbols_;
};

inline OwlString single(const OwlSymbol& a) { return OwlString(a.height(), {a}); }

/// z repeated `times` times.
inline OwlString power(const OwlString& z, std::size_t times) {
  OwlString out(z.height());
  for (std::size_t k = 0; k < times; ++k) out.append(z);
  return out;
}

inline BoolMatrix connectivity(const OwlString& z) {
  BoolMatrix c = identity(z.height());
  for (const auto& a : z.symbols()) c = multiply(c, a.matrix());
  return c;
}

inline bool is_live(const OwlString& z) { return !connectivity(z).is_zero(); }

/// Subset simulation of the h-state one-way NFA that guesses a live path.
inline bool nfa_live(const OwlString& z) {
  std::uint64_t current = detail::low_bits(z.height());
  for (const auto& a : z.symbols()) {
    std::uint64_t next = 0;
    for (int i = 1; i <= z.height(); ++i) {
      if ((current >> (i - 1)) & 1u) next |= a.matrix().row(i);
    }
    current = next;
    if (current == 0) return false;
  }
  return current != 0;
}

struct Property {
  int h;
  BoolMatrix target;

  explicit Property(BoolMatrix c) : h(c.height()), target(std::move(c)) {}
  bool contains(const OwlString& z) const { return z.height() == h && connectivity(z) == target; }
};

/// The one-symbol member of P(C) whose edges are the 1-cells of C.
inline OwlString representative(const BoolMatrix& c) { return single(OwlSymbol(c)); }

// --- Hex masks ------------------------------------------------------------
//
// A symbol is an h*h-bit integer with edge (i,j) at bit (i-1)*h + (j-1),
// written as ceil(h*h/4) hex digits, most significant digit first.

inline std::string to_hex(const OwlSymbol& a) {
  const int h = a.height();
  const int bits = h * h;
  const int digits = (bits + 3) / 4;
  std::string out(static_cast<std::size_t>(digits), '0');
  static constexpr char kHex[] = "0123456789abcdef";
  for (int nibble = 0; nibble < digits; ++nibble) {
    int value = 0;
    for (int b = 0; b < 4; ++b) {
      const int k = nibble * 4 + b;
      if (k >= bits) break;
      if (a.has_edge(k / h + 1, k % h + 1)) value |= 1 << b;
    }
    out[static_cast<std::size_t>(digits - 1 - nibble)] = kHex[value];
  }
  return out;
}

inline OwlSymbol symbol_from_hex(int h, std::string_view text) {
  check_height(h);
  if (text.starts_with("0x") || text.starts_with("0X")) text.remove_prefix(2);
  if (text.empty()) throw std::invalid_argument("empty hex symbol");
  const int bits = h * h;
  BoolMatrix m(h);
  const int n = static_cast<int>(text.size());
  for (int pos = 0; pos < n; ++pos) {
    const char c = text[static_cast<std::size_t>(n - 1 - pos)];
    int value;
    if (c >= '0' && c <= '9') {
      value = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      value = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      value = c - 'A' + 10;
    } else {
      throw std::invalid_argument("invalid hex digit '" + std::string(1, c) + "' in symbol '" + std::string(text) + "'");
    }
    for (int b = 0; b < 4; ++b) {
      if (!((value >> b) & 1)) continue;
      const int k = pos * 4 + b;
      if (k >= bits) throw std::invalid_argument("hex symbol '" + std::string(text) + "' has bits beyond h*h");
      m.set(k / h + 1, k % h + 1);
    }
  }
  return OwlSymbol(std::move(m));
}

// --- Relation witnesses ----------------------------------------------------

struct SeparationContext {
  OwlSymbol u;
  OwlSymbol v;
  /// false: the P(C')-side string is the live one; true: the P(C)-side string is.
  bool swapped;
  int row;
  int column;
};

/// Context (u, v) such that exactly one of u x v, u z v is live for every
/// x in P(C), z in P(C'). Picks the row-major first differing cell.
inline SeparationContext separation_context(const BoolMatrix& c, const BoolMatrix& c_prime) {
  c.require_same(c_prime);
  const int h = c.height();
  for (int i = 1; i <= h; ++i) {
    for (int j = 1; j <= h; ++j) {
      if (c.get(i, j) == c_prime.get(i, j)) continue;
      return SeparationContext{OwlSymbol(h, {{1, i}}), OwlSymbol(h, {{j, 1}}), c.get(i, j), i, j};
    }
  }
  throw std::invalid_argument("matrices are equal: no separating cell");
}

/// An infix y keeping x y z in P(C) for all x, z in P(C), when one is known
/// constructively: the empty string for idempotent C, and the one-symbol
/// infix {(j,i)} when C has a single 1 at (i,j).
inline std::optional<OwlString> smooth_infix_witness(const BoolMatrix& c) {
  if (is_idempotent(c)) return OwlString(c.height());
  if (c.popcount() == 1) {
    for (int i = 1; i <= c.height(); ++i) {
      for (int j = 1; j <= c.height(); ++j) {
        if (c.get(i, j)) return single(OwlSymbol(c.height(), {{j, i}}));
      }
    }
  }
  return std::nullopt;
}

/// A symbol u with C(x u v) = C_next for all v in P(C_prev) and
/// x in P(C_prev) or P(C_next). Valid on consecutive pairs of an idempotent
/// chain: C_next C_prev = C_prev C_next = C_next and C_next idempotent.
inline OwlSymbol suffix_of_choice_witness(const BoolMatrix& c_prev, const BoolMatrix& c_next) {
  c_prev.require_same(c_next);
  if (multiply(c_next, c_prev) != c_next) throw std::invalid_argument("suffix witness requires C_next C_prev = C_next");
  if (multiply(c_prev, c_next) != c_next) throw std::invalid_argument("suffix witness requires C_prev C_next = C_next");
  if (!is_idempotent(c_next)) throw std::invalid_argument("suffix witness requires idempotent C_next");
  return OwlSymbol(c_next);
}

}  // namespace owl
