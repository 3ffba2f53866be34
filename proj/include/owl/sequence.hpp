#pragma once

// The chain of idempotent connectivities C_0, ..., C_N (N = h(h+1)/2):
// identity, then the strict upper triangle filled one cell at a time
// (column h down to 2, bottom to top), then the strict lower triangle filled
// one column at a time (column h-1 down to 1), then the zero matrix.
//
// verify_sequence() machine-checks the algebraic identities the chain is
// built on, for every index, and spot-checks the separation and
// suffix-of-choice witnesses on sampled property members.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "owl/matrix.hpp"
#include "owl/owl.hpp"
#include "owl/sampling.hpp"

namespace owl {

/// U: number of strict upper-triangle cells.
inline int upper_cells(int h) { return h * (h - 1) / 2; }
/// N: index of the last (zero) matrix.
inline int sequence_length(int h) { return h * (h + 1) / 2; }

struct Cell {
  int row;
  int column;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// The t-th cell filled in the first stage, 1 <= t <= U.
inline Cell cell_index(int t, int h) {
  check_height(h);
  if (t < 1 || t > upper_cells(h)) {
    throw std::out_of_range("stage-1 index " + std::to_string(t) + " outside [1, " + std::to_string(upper_cells(h)) +
                            "]");
  }
  int remaining = t;
  for (int j = h; j >= 2; --j) {
    if (remaining <= j - 1) return {j - remaining, j};
    remaining -= j - 1;
  }
  throw std::logic_error("cell enumeration exhausted");
}

/// Single 1 at the t-th cell.
inline BoolMatrix e_matrix(int t, int h) {
  const auto [i, j] = cell_index(t, h);
  BoolMatrix m(h);
  m.set(i, j);
  return m;
}

/// 1s at (i_t, j_t), (i_t, j_t + 1), ..., (i_t, h).
inline BoolMatrix e_prime(int t, int h) {
  const auto [i, j] = cell_index(t, h);
  BoolMatrix m(h);
  for (int k = j; k <= h; ++k) m.set(i, k);
  return m;
}

/// Column whose strictly-lower cells are filled at stage-2 index t,
/// U+1 <= t <= N-1.
inline int stage2_column(int t, int h) {
  check_height(h);
  const int u = upper_cells(h);
  if (t < u + 1 || t > sequence_length(h) - 1) {
    throw std::out_of_range("stage-2 index " + std::to_string(t) + " outside [" + std::to_string(u + 1) + ", " +
                            std::to_string(sequence_length(h) - 1) + "]");
  }
  return h - (t - u);
}

/// 1s in column j_t strictly below the diagonal.
inline BoolMatrix d_matrix(int t, int h) {
  const int j = stage2_column(t, h);
  BoolMatrix m(h);
  for (int i = j + 1; i <= h; ++i) m.set(i, j);
  return m;
}

/// 1s in every cell of columns j_t, ..., h.
inline BoolMatrix d_prime(int t, int h) {
  const int j = stage2_column(t, h);
  BoolMatrix m(h);
  for (int i = 1; i <= h; ++i) {
    for (int k = j; k <= h; ++k) m.set(i, k);
  }
  return m;
}

struct ConnectivitySequence {
  int h;
  int upper;   // U
  int length;  // N
  std::vector<BoolMatrix> matrices;  // C_0 .. C_N

  const BoolMatrix& operator[](int t) const { return matrices.at(static_cast<std::size_t>(t)); }
};

enum class Recurrence { plain, primed };

inline ConnectivitySequence build_sequence(int h, Recurrence rec) {
  check_height(h);
  const int u = upper_cells(h);
  const int n = sequence_length(h);
  ConnectivitySequence seq{h, u, n, {}};
  seq.matrices.reserve(static_cast<std::size_t>(n + 1));
  seq.matrices.push_back(identity(h));
  for (int t = 1; t <= u; ++t) {
    seq.matrices.push_back(add(seq.matrices.back(), rec == Recurrence::plain ? e_matrix(t, h) : e_prime(t, h)));
  }
  for (int t = u + 1; t <= n - 1; ++t) {
    seq.matrices.push_back(add(seq.matrices.back(), rec == Recurrence::plain ? d_matrix(t, h) : d_prime(t, h)));
  }
  seq.matrices.push_back(zero(h));
  return seq;
}

/// Builds with both recurrences and insists they agree.
inline ConnectivitySequence build_sequence(int h) {
  auto plain = build_sequence(h, Recurrence::plain);
  const auto primed = build_sequence(h, Recurrence::primed);
  for (int t = 0; t <= plain.length; ++t) {
    if (plain[t] != primed[t]) {
      throw std::logic_error("plain and primed recurrences disagree at t=" + std::to_string(t));
    }
  }
  return plain;
}

// --- Verification -------------------------------------------------------------

struct CheckTally {
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
};

struct CheckFailure {
  std::string check;
  int t;
  friend bool operator==(const CheckFailure&, const CheckFailure&) = default;
};

struct SequenceReport {
  int h = 0;
  int upper = 0;
  int length = 0;
  std::map<std::string, CheckTally> tallies;
  std::vector<CheckFailure> failures;  // ordered by t, then check order

  bool ok() const noexcept { return failures.empty(); }
  std::uint64_t total_checks() const {
    std::uint64_t n = 0;
    for (const auto& [name, tally] : tallies) n += tally.checked;
    return n;
  }
};

struct VerifyOptions {
  /// Sampled property members per witness check and index; 0 disables them.
  std::size_t samples = 8;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

namespace detail {

struct IndexChecks {
  std::vector<std::pair<std::string, bool>> results;
  void expect(std::string name, bool ok) { results.emplace_back(std::move(name), ok); }
};

inline void check_witnesses(const BoolMatrix& prev, const BoolMatrix& next, std::size_t samples, Rng& rng,
                            IndexChecks& out) {
  if (prev == next) return;  // reported by "distinct"; no context exists
  const auto sep = separation_context(prev, next);
  bool sep_ok = true;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto x = sample_member(prev, rng);
    const auto z = sample_member(next, rng);
    const bool live_x = is_live(single(sep.u) + x + single(sep.v));
    const bool live_z = is_live(single(sep.u) + z + single(sep.v));
    const bool expected_live_z = !sep.swapped;
    if (live_x == live_z || live_z != expected_live_z) sep_ok = false;
  }
  out.expect("separation_contract", sep_ok);

  bool suffix_ok = true;
  bool suffix_defined = true;
  try {
    const auto u = suffix_of_choice_witness(prev, next);
    for (std::size_t k = 0; k < samples; ++k) {
      const auto x = (k % 2 == 0) ? sample_member(prev, rng) : sample_member(next, rng);
      const auto v = sample_member(prev, rng);
      if (connectivity(x + single(u) + v) != next) suffix_ok = false;
    }
  } catch (const std::invalid_argument&) {
    suffix_defined = false;
  }
  out.expect("suffix_of_choice_contract", suffix_defined && suffix_ok);

  bool smooth_ok = true;
  const auto infix = smooth_infix_witness(next);
  if (!infix) {
    smooth_ok = false;
  } else {
    for (std::size_t k = 0; k < samples; ++k) {
      const auto x = sample_member(next, rng);
      const auto z = sample_member(next, rng);
      if (connectivity(x + *infix + z) != next) smooth_ok = false;
    }
  }
  out.expect("smooth_contract", smooth_ok);
}

inline IndexChecks check_index(const ConnectivitySequence& seq, int t, const VerifyOptions& opt) {
  IndexChecks out;
  const int h = seq.h;
  const int u = seq.upper;
  const int n = seq.length;
  const auto& c = seq[t];

  out.expect("idempotent", is_idempotent(c));
  if (t == 0) {
    out.expect("c0_identity", c == identity(h));
    return out;
  }
  const auto& prev = seq[t - 1];
  out.expect("product_prev_next", multiply(prev, c) == c);
  out.expect("product_next_prev", multiply(c, prev) == c);
  out.expect("distinct", prev != c);

  if (t <= u) {
    const auto [i, j] = cell_index(t, h);
    const auto ep = e_prime(t, h);
    const auto ei = unit_column(h, i);
    const auto rj = tail_row(h, j);
    out.expect("e_prime_square_zero", multiply(ep, ep) == zero(h));
    out.expect("prev_times_e_prime", multiply(prev, ep) == ep);
    out.expect("e_prime_times_prev", multiply(ep, prev) == ep);
    out.expect("e_prime_outer", outer(ei, rj) == ep);
    out.expect("tail_row_unit_inner_zero", !inner(rj, ei));
    out.expect("prev_fixes_unit_column", multiply(prev, ei) == ei);
    out.expect("tail_row_fixed_by_prev", multiply(rj, prev) == rj);
    out.expect("plain_recurrence", c == add(prev, e_matrix(t, h)));
    out.expect("primed_recurrence", c == add(prev, ep));
  } else if (t <= n - 1) {
    const int j = stage2_column(t, h);
    const auto dp = d_prime(t, h);
    const auto ones = ones_column(h);
    const auto rj = tail_row(h, j);
    out.expect("d_prime_idempotent", multiply(dp, dp) == dp);
    out.expect("prev_times_d_prime", multiply(prev, dp) == dp);
    out.expect("d_prime_times_prev", multiply(dp, prev) == dp);
    out.expect("d_prime_outer", outer(ones, rj) == dp);
    out.expect("tail_row_ones_inner_one", inner(rj, ones));
    out.expect("prev_fixes_ones_column", multiply(prev, ones) == ones);
    out.expect("tail_row_fixed_by_prev", multiply(rj, prev) == rj);
    out.expect("plain_recurrence", c == add(prev, d_matrix(t, h)));
    out.expect("primed_recurrence", c == add(prev, dp));
  } else {
    out.expect("cn_zero", c == zero(h));
    out.expect("c_last_before_zero_all_ones", prev == all_ones(h));
  }
  if (t <= n - 1) {
    out.expect("monotone", prev.leq(c));
    bool diagonal = true;
    for (int i = 1; i <= h; ++i) diagonal = diagonal && c.get(i, i);
    out.expect("diagonal_kept", diagonal);
  }
  if (opt.samples > 0) {
    Rng rng(opt.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(t));
    check_witnesses(prev, c, opt.samples, rng, out);
  }
  return out;
}

}  // namespace detail

inline SequenceReport verify_sequence(const ConnectivitySequence& seq, const VerifyOptions& opt = {}) {
  const auto count = static_cast<std::size_t>(seq.length + 1);
  if (seq.matrices.size() != count) throw std::invalid_argument("sequence has the wrong number of matrices");
  std::vector<detail::IndexChecks> per_index(count);
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(count)));
  if (jobs == 1) {
    for (std::size_t t = 0; t < count; ++t) per_index[t] = detail::check_index(seq, static_cast<int>(t), opt);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < count; t += jobs) per_index[t] = detail::check_index(seq, static_cast<int>(t), opt);
      });
    }
    for (auto& th : workers) th.join();
  }

  SequenceReport report;
  report.h = seq.h;
  report.upper = seq.upper;
  report.length = seq.length;
  for (std::size_t t = 0; t < count; ++t) {
    for (const auto& [name, ok] : per_index[t].results) {
      auto& tally = report.tallies[name];
      ++tally.checked;
      if (!ok) {
        ++tally.failed;
        report.failures.push_back({name, static_cast<int>(t)});
      }
    }
  }
  return report;
}

inline SequenceReport verify_sequence(int h, const VerifyOptions& opt = {}) {
  return verify_sequence(build_sequence(h, Recurrence::plain), opt);
}

}  // namespace owl
