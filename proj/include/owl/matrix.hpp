#pragma once

// Boolean semiring matrices of dimension h x h (1 <= h <= 64).
//
// Rows are packed one machine word each: bit (j-1) of row word (i-1) holds
// cell (i, j). Every public index is 1-based.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace owl {

inline constexpr int max_height = 64;

inline void check_height(int h) {
  if (h < 1 || h > max_height) {
    throw std::invalid_argument("height must be in [1, 64], got " + std::to_string(h));
  }
}

namespace detail {
inline constexpr std::uint64_t low_bits(int n) {
  return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
}
}  // namespace detail

class BoolMatrix {
 public:
  explicit BoolMatrix(int h) : h_(h) {
    check_height(h);
    rows_.assign(static_cast<std::size_t>(h), 0);
  }

  BoolMatrix(int h, std::vector<std::uint64_t> rows) : h_(h), rows_(std::move(rows)) {
    check_height(h);
    if (rows_.size() != static_cast<std::size_t>(h)) {
      throw std::invalid_argument("row count does not match height");
    }
    for (auto r : rows_) {
      if (r & ~detail::low_bits(h)) throw std::invalid_argument("row mask has bits beyond column h");
    }
  }

  int height() const noexcept { return h_; }

  bool get(int i, int j) const {
    check_cell(i, j);
    return (rows_[i - 1] >> (j - 1)) & 1u;
  }

  void set(int i, int j, bool value = true) {
    check_cell(i, j);
    const auto bit = std::uint64_t{1} << (j - 1);
    if (value) {
      rows_[i - 1] |= bit;
    } else {
      rows_[i - 1] &= ~bit;
    }
  }

  /// Row i as a mask over columns (bit j-1 = column j).
  std::uint64_t row(int i) const {
    if (i < 1 || i > h_) throw std::out_of_range("row index out of range");
    return rows_[i - 1];
  }
  const std::vector<std::uint64_t>& rows() const noexcept { return rows_; }

  bool is_zero() const noexcept {
    return std::all_of(rows_.begin(), rows_.end(), [](auto r) { return r == 0; });
  }
  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (auto r : rows_) n += static_cast<std::size_t>(std::popcount(r));
    return n;
  }

  /// Cell-wise A <= B.
  bool leq(const BoolMatrix& other) const {
    require_same(other);
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      if (rows_[k] & ~other.rows_[k]) return false;
    }
    return true;
  }

  friend bool operator==(const BoolMatrix&, const BoolMatrix&) = default;

  /// Strict weak order by height, then row words; used for canonical symbol order.
  friend bool operator<(const BoolMatrix& a, const BoolMatrix& b) {
    if (a.h_ != b.h_) return a.h_ < b.h_;
    return a.rows_ < b.rows_;
  }

  void require_same(const BoolMatrix& other) const {
    if (h_ != other.h_) {
      throw std::invalid_argument("dimension mismatch: " + std::to_string(h_) + " vs " +
                                  std::to_string(other.h_));
    }
  }

 private:
  void check_cell(int i, int j) const {
    if (i < 1 || i > h_ || j < 1 || j > h_) {
      throw std::out_of_range("cell (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside " + std::to_string(h_) + "x" + std::to_string(h_));
    }
  }

  int h_;
  std::vector<std::uint64_t> rows_;
};

inline BoolMatrix identity(int h) {
  BoolMatrix m(h);
  for (int i = 1; i <= h; ++i) m.set(i, i);
  return m;
}

inline BoolMatrix zero(int h) { return BoolMatrix(h); }

inline BoolMatrix all_ones(int h) {
  check_height(h);
  return BoolMatrix(h, std::vector<std::uint64_t>(static_cast<std::size_t>(h), detail::low_bits(h)));
}

/// Boolean product: cell (i,j) = OR_k A(i,k) AND B(k,j).
inline BoolMatrix multiply(const BoolMatrix& a, const BoolMatrix& b) {
  a.require_same(b);
  const auto& ar = a.rows();
  const auto& br = b.rows();
  std::vector<std::uint64_t> out(ar.size(), 0);
  for (std::size_t i = 0; i < ar.size(); ++i) {
    std::uint64_t bits = ar[i];
    std::uint64_t acc = 0;
    while (bits) {
      acc |= br[static_cast<std::size_t>(std::countr_zero(bits))];
      bits &= bits - 1;
    }
    out[i] = acc;
  }
  return BoolMatrix(a.height(), std::move(out));
}

inline BoolMatrix add(const BoolMatrix& a, const BoolMatrix& b) {
  a.require_same(b);
  std::vector<std::uint64_t> out(a.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] |= b.rows()[i];
  return BoolMatrix(a.height(), std::move(out));
}

inline BoolMatrix operator*(const BoolMatrix& a, const BoolMatrix& b) { return multiply(a, b); }
inline BoolMatrix operator+(const BoolMatrix& a, const BoolMatrix& b) { return add(a, b); }

inline bool is_idempotent(const BoolMatrix& a) { return multiply(a, a) == a; }

/// Row vector S * A, where S is a set of rows given as a mask (bit i-1 = row i).
inline std::uint64_t image(std::uint64_t rows_mask, const BoolMatrix& a) {
  std::uint64_t acc = 0;
  while (rows_mask) {
    acc |= a.rows()[static_cast<std::size_t>(std::countr_zero(rows_mask))];
    rows_mask &= rows_mask - 1;
  }
  return acc;
}

enum class Orientation { column, row };

class BoolVector {
 public:
  BoolVector(int h, Orientation orientation, std::uint64_t mask = 0)
      : h_(h), orientation_(orientation), mask_(mask) {
    check_height(h);
    if (mask & ~detail::low_bits(h)) throw std::invalid_argument("vector mask has bits beyond h");
  }

  int height() const noexcept { return h_; }
  Orientation orientation() const noexcept { return orientation_; }
  std::uint64_t mask() const noexcept { return mask_; }
  bool get(int k) const {
    if (k < 1 || k > h_) throw std::out_of_range("vector index out of range");
    return (mask_ >> (k - 1)) & 1u;
  }

  friend bool operator==(const BoolVector&, const BoolVector&) = default;

 private:
  int h_;
  Orientation orientation_;
  std::uint64_t mask_;
};

/// Column vector with a single 1 at cell i.
inline BoolVector unit_column(int h, int i) {
  if (i < 1 || i > h) throw std::out_of_range("unit index out of range");
  return BoolVector(h, Orientation::column, std::uint64_t{1} << (i - 1));
}

/// Row vector with 1s in cells j, j+1, ..., h.
inline BoolVector tail_row(int h, int j) {
  if (j < 1 || j > h) throw std::out_of_range("tail index out of range");
  return BoolVector(h, Orientation::row, detail::low_bits(h) & ~detail::low_bits(j - 1));
}

inline BoolVector ones_column(int h) {
  check_height(h);
  return BoolVector(h, Orientation::column, detail::low_bits(h));
}

inline BoolVector zero_column(int h) { return BoolVector(h, Orientation::column, 0); }

namespace detail {
inline void require_vectors(const BoolVector& a, Orientation oa, const BoolVector& b, Orientation ob) {
  if (a.height() != b.height()) throw std::invalid_argument("vector dimension mismatch");
  if (a.orientation() != oa || b.orientation() != ob) throw std::invalid_argument("vector orientation mismatch");
}
}  // namespace detail

/// Rank-one product u v (column times row).
inline BoolMatrix outer(const BoolVector& u, const BoolVector& v) {
  detail::require_vectors(u, Orientation::column, v, Orientation::row);
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(u.height()));
  for (int i = 1; i <= u.height(); ++i) rows[i - 1] = u.get(i) ? v.mask() : 0;
  return BoolMatrix(u.height(), std::move(rows));
}

/// Scalar product v u (row times column).
inline bool inner(const BoolVector& v, const BoolVector& u) {
  detail::require_vectors(v, Orientation::row, u, Orientation::column);
  return (v.mask() & u.mask()) != 0;
}

/// A u for a column vector u.
inline BoolVector multiply(const BoolMatrix& a, const BoolVector& u) {
  if (u.orientation() != Orientation::column || u.height() != a.height()) {
    throw std::invalid_argument("expected column vector of matching height");
  }
  std::uint64_t out = 0;
  for (int i = 1; i <= a.height(); ++i) {
    if (a.row(i) & u.mask()) out |= std::uint64_t{1} << (i - 1);
  }
  return BoolVector(a.height(), Orientation::column, out);
}

/// v A for a row vector v.
inline BoolVector multiply(const BoolVector& v, const BoolMatrix& a) {
  if (v.orientation() != Orientation::row || v.height() != a.height()) {
    throw std::invalid_argument("expected row vector of matching height");
  }
  return BoolVector(a.height(), Orientation::row, image(v.mask(), a));
}

// Text format: h lines of h characters from {0,1}, each newline-terminated.

inline std::string to_text(const BoolMatrix& m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.height() * (m.height() + 1)));
  for (int i = 1; i <= m.height(); ++i) {
    for (int j = 1; j <= m.height(); ++j) out.push_back(m.get(i, j) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

inline BoolMatrix from_text(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw std::invalid_argument("matrix text must be newline-terminated");
    lines.push_back(text.substr(0, nl));
    text.remove_prefix(nl + 1);
  }
  const int h = static_cast<int>(lines.size());
  check_height(h);
  BoolMatrix m(h);
  for (int i = 1; i <= h; ++i) {
    const auto line = lines[i - 1];
    if (static_cast<int>(line.size()) != h) {
      throw std::invalid_argument("matrix line " + std::to_string(i) + " has " + std::to_string(line.size()) +
                                  " characters, expected " + std::to_string(h));
    }
    for (int j = 1; j <= h; ++j) {
      const char c = line[j - 1];
      if (c != '0' && c != '1') throw std::invalid_argument("matrix text may only contain 0 and 1");
      if (c == '1') m.set(i, j);
    }
  }
  return m;
}

struct BoolMatrixHash {
  std::size_t operator()(const BoolMatrix& m) const noexcept {
    std::uint64_t x = static_cast<std::uint64_t>(m.height()) * 0x9E3779B97F4A7C15ull;
    for (auto r : m.rows()) {
      x ^= r + 0x9E3779B97F4A7C15ull + (x << 6) + (x >> 2);
    }
    return static_cast<std::size_t>(x);
  }
};

}  // namespace owl
