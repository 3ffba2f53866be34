#pragma once

// Enumeration and seeded random generation of symbols, strings, and members
// of connectivity properties. The generator is std::mt19937_64; draws are
// mapped to values by explicit arithmetic so that a seed reproduces the
// same strings on every standard library.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "owl/owl.hpp"

namespace owl {

using Rng = std::mt19937_64;

/// Uniform integer in [0, n).
inline std::uint64_t draw_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("draw_below(0)");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline bool draw_bernoulli(Rng& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

/// Every symbol of Sigma_h in canonical order; h <= 4.
inline std::vector<OwlSymbol> all_symbols(int h) {
  check_height(h);
  if (h > 4) throw std::invalid_argument("enumerating Sigma_h is limited to h <= 4");
  const int bits = h * h;
  std::vector<OwlSymbol> out;
  out.reserve(std::size_t{1} << bits);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
    BoolMatrix m(h);
    for (int k = 0; k < bits; ++k) {
      if ((code >> k) & 1u) m.set(k / h + 1, k % h + 1);
    }
    out.emplace_back(std::move(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Each edge present independently with probability `density`.
inline OwlSymbol random_symbol(int h, Rng& rng, double density = 0.5) {
  BoolMatrix m(h);
  for (int i = 1; i <= h; ++i) {
    for (int j = 1; j <= h; ++j) {
      if (draw_bernoulli(rng, density)) m.set(i, j);
    }
  }
  return OwlSymbol(std::move(m));
}

inline OwlString random_string(int h, std::size_t length, Rng& rng, double density = 0.5) {
  OwlString z(h);
  for (std::size_t k = 0; k < length; ++k) z.push_back(random_symbol(h, rng, density));
  return z;
}

/// Random string with length uniform in [0, max_length] and an edge density
/// drawn from a small fixed menu, so both live and dead strings are common.
inline OwlString random_mixed_string(int h, std::size_t max_length, Rng& rng) {
  static constexpr double kDensities[] = {0.15, 0.3, 0.5, 0.7};
  const auto length = static_cast<std::size_t>(draw_below(rng, max_length + 1));
  const double density = kDensities[draw_below(rng, 4)];
  return random_string(h, length, rng, density);
}

/// Random member of P(C): copies of the representative of C interleaved with
/// identity padding, plus (for idempotent C) random symbols s with C S C = C
/// sandwiched between representatives.
inline OwlString sample_member(const BoolMatrix& c, Rng& rng, std::size_t max_pad = 3) {
  const int h = c.height();
  const OwlSymbol rep(c);
  const OwlSymbol id = identity_symbol(h);
  auto pad = [&](OwlString& z) {
    const auto n = draw_below(rng, max_pad + 1);
    for (std::uint64_t k = 0; k < n; ++k) z.push_back(id);
  };

  OwlString z(h);
  pad(z);
  z.push_back(rep);
  pad(z);
  if (is_idempotent(c)) {
    const auto extra = draw_below(rng, 3);
    for (std::uint64_t k = 0; k < extra; ++k) {
      // C s C = C keeps rep . s . rep inside P(C); give up after a few tries.
      for (int attempt = 0; attempt < 8; ++attempt) {
        OwlSymbol s = random_symbol(h, rng, 0.5);
        if (multiply(multiply(c, s.matrix()), c) == c) {
          z.push_back(s);
          break;
        }
      }
      z.push_back(rep);
      pad(z);
    }
  }
  return z;
}

/// Calls fn(z) on every word over `alphabet` of length 0..max_length, by
/// length and then lexicographically in alphabet order. Stops early when fn
/// returns false. Returns the number of words visited.
template <class Fn>
std::uint64_t for_each_word(int h, const std::vector<OwlSymbol>& alphabet, std::size_t max_length, Fn&& fn,
                            std::size_t min_length = 0) {
  std::uint64_t visited = 0;
  for (std::size_t len = min_length; len <= max_length; ++len) {
    if (len > 0 && alphabet.empty()) break;
    std::vector<std::size_t> digits(len, 0);
    while (true) {
      OwlString z(h);
      for (auto d : digits) z.push_back(alphabet[d]);
      ++visited;
      if (!fn(static_cast<const OwlString&>(z))) return visited;
      std::size_t pos = len;
      while (pos > 0) {
        --pos;
        if (++digits[pos] < alphabet.size()) break;
        digits[pos] = 0;
        if (pos == 0) {
          pos = len + 1;  // sentinel: odometer wrapped
          break;
        }
      }
      if (len == 0 || pos == len + 1) break;
    }
  }
  return visited;
}

}  // namespace owl
