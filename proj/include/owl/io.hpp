#pragma once

// JSON encodings for strings, machines, matrices and every report type.
// Reports use ordered_json so that key order, and hence the output bytes,
// depend only on the data.
//
// OWL string:   {"h": 2, "symbols": [[[1,2],[2,1]], [], "9"]}
//               (a symbol is a sorted edge list or a hex mask)
// compact form: "2:6,0,9"  (height, colon, comma-separated hex masks)
// machine:      {"h":2, "states":[...], "start":..., "accept":..., "reject":...,
//                "delta": {"q": {"LEND": ["q","R"], "9": ["p","L"], "default": [...]}}}

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "owl/adversary.hpp"
#include "owl/exits.hpp"
#include "owl/matrix.hpp"
#include "owl/owl.hpp"
#include "owl/sequence.hpp"
#include "owl/tdfa.hpp"

namespace owl {

using json = nlohmann::ordered_json;

/// Malformed input; the message names the offending field.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline const json& require_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) throw FormatError(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(where.empty() ? key : where + "." + key, "missing field");
  return *it;
}

inline int parse_height(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw FormatError(field, "expected an integer height");
  const auto h = j.get<std::int64_t>();
  if (h < 1 || h > max_height) throw FormatError(field, "height must be in [1, 64]");
  return static_cast<int>(h);
}

inline OwlSymbol parse_symbol(const json& j, int h, const std::string& field) {
  if (j.is_string()) {
    try {
      return symbol_from_hex(h, j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw FormatError(field, e.what());
    }
  }
  if (!j.is_array()) throw FormatError(field, "expected an edge list or a hex mask");
  BoolMatrix m(h);
  for (std::size_t k = 0; k < j.size(); ++k) {
    const auto& e = j[k];
    const std::string ef = field + "[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw FormatError(ef, "expected an [i, j] pair");
    }
    const auto i = e[0].get<std::int64_t>();
    const auto jj = e[1].get<std::int64_t>();
    if (i < 1 || i > h || jj < 1 || jj > h) throw FormatError(ef, "edge endpoint outside [1, h]");
    m.set(static_cast<int>(i), static_cast<int>(jj));
  }
  return OwlSymbol(std::move(m));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(what, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

// --- Matrices ---------------------------------------------------------------

/// Row i as a hex mask with column j at bit j-1.
inline std::string row_hex(const BoolMatrix& m, int i) {
  const int digits = (m.height() + 3) / 4;
  std::string out(static_cast<std::size_t>(digits), '0');
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t r = m.row(i);
  for (int d = digits - 1; d >= 0; --d, r >>= 4) out[static_cast<std::size_t>(d)] = kHex[r & 0xF];
  return out;
}

inline json matrix_to_json(const BoolMatrix& m) {
  json rows = json::array();
  for (int i = 1; i <= m.height(); ++i) rows.push_back(row_hex(m, i));
  return rows;
}

inline BoolMatrix matrix_from_json(const json& j, const std::string& field = "matrix") {
  if (!j.is_array() || j.empty()) throw FormatError(field, "expected a non-empty array of hex row masks");
  const int h = static_cast<int>(j.size());
  if (h > max_height) throw FormatError(field, "more than 64 rows");
  std::vector<std::uint64_t> rows;
  for (int i = 0; i < h; ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_string()) throw FormatError(f, "expected a hex string");
    const auto s = j[i].get<std::string>();
    std::uint64_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(s, &used, 16);
      if (used != s.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw FormatError(f, "invalid hex row mask '" + s + "'");
    }
    if (v & ~detail::low_bits(h)) throw FormatError(f, "row mask has bits beyond column h");
    rows.push_back(v);
  }
  return BoolMatrix(h, std::move(rows));
}

/// A matrix file: either the text format (h lines of 0/1) or a JSON array
/// of hex row masks.
inline BoolMatrix load_matrix(const std::string& path) {
  const auto text = detail::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    return matrix_from_json(detail::parse_json_text(text, path), path);
  }
  try {
    return from_text(text);
  } catch (const std::invalid_argument& e) {
    throw FormatError(path, e.what());
  }
}

inline json sequence_to_json(const ConnectivitySequence& seq) {
  json out = json::array();
  for (const auto& c : seq.matrices) out.push_back(matrix_to_json(c));
  return out;
}

// --- Strings ----------------------------------------------------------------

inline json string_to_json(const OwlString& z) {
  json syms = json::array();
  for (const auto& a : z.symbols()) {
    json edges = json::array();
    for (const auto& [i, j] : a.edges()) edges.push_back({i, j});
    syms.push_back(std::move(edges));
  }
  return json{{"h", z.height()}, {"symbols", std::move(syms)}};
}

/// "h:hex,hex,..." with the symbols as hex masks.
inline std::string to_compact(const OwlString& z) {
  std::string out = std::to_string(z.height()) + ":";
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (k) out += ",";
    out += to_hex(z.symbols()[k]);
  }
  return out;
}

inline OwlString string_from_json(const json& j, const std::string& where = "") {
  const int h = detail::parse_height(detail::require_field(j, "h", where), where.empty() ? "h" : where + ".h");
  const auto& syms = detail::require_field(j, "symbols", where);
  const std::string sf = where.empty() ? "symbols" : where + ".symbols";
  if (!syms.is_array()) throw FormatError(sf, "expected an array");
  OwlString z(h);
  for (std::size_t k = 0; k < syms.size(); ++k) {
    z.push_back(detail::parse_symbol(syms[k], h, sf + "[" + std::to_string(k) + "]"));
  }
  return z;
}

inline OwlString string_from_compact(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw FormatError("input", "compact string needs the form h:hex,hex,...");
  int h = 0;
  try {
    std::size_t used = 0;
    h = std::stoi(std::string(text.substr(0, colon)), &used);
    if (used != colon) throw std::invalid_argument("junk");
  } catch (const std::exception&) {
    throw FormatError("input", "invalid height in compact string");
  }
  if (h < 1 || h > max_height) throw FormatError("input", "height must be in [1, 64]");
  OwlString z(h);
  auto rest = text.substr(colon + 1);
  std::size_t index = 0;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto piece = rest.substr(0, comma);
    try {
      z.push_back(symbol_from_hex(h, piece));
    } catch (const std::invalid_argument& e) {
      throw FormatError("input[" + std::to_string(index) + "]", e.what());
    }
    ++index;
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return z;
}

/// A path to a JSON string file, or the compact form itself.
inline OwlString load_string(const std::string& arg) {
  std::ifstream probe(arg);
  if (probe) return string_from_json(detail::parse_json_text(detail::read_file(arg), arg));
  return string_from_compact(arg);
}

// --- Machines ---------------------------------------------------------------

namespace detail {
inline Move parse_move(const json& j, const Tdfa& m, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw FormatError(field, "expected [\"<state>\", \"L|R\"]");
  }
  const auto target = m.find_state(j[0].get<std::string>());
  if (!target) throw FormatError(field, "unknown target state '" + j[0].get<std::string>() + "'");
  const auto d = j[1].get<std::string>();
  if (d != "L" && d != "R") throw FormatError(field, "direction must be \"L\" or \"R\"");
  return {*target, d == "L" ? Direction::left : Direction::right};
}

inline StateId parse_state_ref(const json& root, const std::string& key, const std::vector<std::string>& names) {
  const auto& j = require_field(root, key, "");
  if (!j.is_string()) throw FormatError(key, "expected a state name");
  const auto s = j.get<std::string>();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == s) return static_cast<StateId>(k);
  }
  throw FormatError(key, "state '" + s + "' is not listed in states");
}
}  // namespace detail

/// Parses and validates a machine; validation failures are reported as
/// FormatError naming delta.<state>.<symbol>.
inline Tdfa machine_from_json(const json& j) {
  const int h = detail::parse_height(detail::require_field(j, "h", ""), "h");
  const auto& states = detail::require_field(j, "states", "");
  if (!states.is_array() || states.empty()) throw FormatError("states", "expected a non-empty array of names");
  std::vector<std::string> names;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (!states[k].is_string()) throw FormatError("states[" + std::to_string(k) + "]", "expected a string");
    names.push_back(states[k].get<std::string>());
  }
  const auto start = detail::parse_state_ref(j, "start", names);
  const auto accept = detail::parse_state_ref(j, "accept", names);
  const auto reject = detail::parse_state_ref(j, "reject", names);
  Tdfa m(h, names, start, accept, reject);

  const auto& delta = detail::require_field(j, "delta", "");
  if (!delta.is_object()) throw FormatError("delta", "expected an object keyed by state");
  for (const auto& [state, rules] : delta.items()) {
    const std::string sf = "delta." + state;
    const auto q = m.find_state(state);
    if (!q) throw FormatError(sf, "unknown state");
    if (!rules.is_object()) throw FormatError(sf, "expected an object keyed by symbol");
    for (const auto& [key, mv_json] : rules.items()) {
      const std::string f = sf + "." + key;
      const Move mv = detail::parse_move(mv_json, m, f);
      if (key == "LEND") {
        m.set_left_end(*q, mv);
      } else if (key == "REND") {
        m.set_right_end(*q, mv);
      } else if (key == "default") {
        m.set_default(*q, mv);
      } else {
        try {
          m.set_symbol(*q, symbol_from_hex(h, key), mv);
        } catch (const std::invalid_argument& e) {
          throw FormatError(f, e.what());
        }
      }
    }
  }
  const auto problems = validate(m);
  if (!problems.empty()) {
    const auto& v = problems.front();
    std::string field = v.state.empty() ? "" : "delta." + v.state;
    if (!v.symbol.empty()) field += (field.empty() ? "" : ".") + v.symbol;
    throw FormatError(field, v.message);
  }
  return m;
}

/// Explicit tables only; machines built from a symbol rule cannot be saved.
inline json machine_to_json(const Tdfa& m) {
  if (m.has_symbol_rule()) throw std::invalid_argument("machines with programmatic symbol rules have no JSON form");
  auto move_json = [&](const Move& mv) { return json::array({m.name(mv.next), mv.dir == Direction::left ? "L" : "R"}); };
  json delta = json::object();
  for (StateId q = 0; q < m.state_count(); ++q) {
    const auto& r = m.rules(q);
    json rules = json::object();
    if (r.left_end) rules["LEND"] = move_json(*r.left_end);
    if (r.right_end) rules["REND"] = move_json(*r.right_end);
    std::vector<std::pair<OwlSymbol, Move>> table(r.table.begin(), r.table.end());
    std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [a, mv] : table) rules[to_hex(a)] = move_json(mv);
    if (r.fallback) rules["default"] = move_json(*r.fallback);
    delta[m.name(q)] = std::move(rules);
  }
  return json{{"h", m.height()},       {"states", m.names()},         {"start", m.name(m.start())},
              {"accept", m.name(m.accept())}, {"reject", m.name(m.reject())}, {"delta", std::move(delta)}};
}

inline Tdfa load_machine_file(const std::string& path) {
  return machine_from_json(detail::parse_json_text(detail::read_file(path), path));
}

// --- Reports ----------------------------------------------------------------

inline json states_to_json(const Tdfa& m, const StateSet& s) {
  json out = json::array();
  for (auto q : s) out.push_back(m.name(q));
  return out;
}

inline json computation_to_json(const Tdfa& m, const Computation& c, bool with_trace) {
  json out{{"outcome", to_string(c.outcome)},
           {"state", m.name(c.state)},
           {"final_position", c.final_position},
           {"steps", c.steps}};
  if (with_trace) {
    json trace = json::array();
    for (const auto& cfg : c.trace) trace.push_back(json::array({m.name(cfg.state), cfg.position}));
    out["trace"] = std::move(trace);
    out["trace_truncated"] = c.trace_truncated;
  }
  return out;
}

inline json traversal_map_to_json(const Tdfa& m, const TraversalMap& t) {
  json per = json::object();
  for (StateId p = 0; p < t.per_state.size(); ++p) {
    per[m.name(p)] = json{{"outcome", to_string(t.per_state[p].outcome)}, {"state", m.name(t.per_state[p].state)}};
  }
  return json{{"side", to_string(t.side)},
              {"exit_size", t.exit_size()},
              {"exits", states_to_json(m, t.exits)},
              {"per_state", std::move(per)}};
}

inline json partial_map_to_json(const Tdfa& m, const PartialMap& f) {
  json out = json::object();
  for (auto q : f.domain()) {
    const auto v = f.at(q);
    out[m.name(q)] = v ? json(m.name(*v)) : json(nullptr);
  }
  return out;
}

inline json certificate_to_json(const GenericCertificate& c) {
  return json{{"string", string_to_json(c.y)},
              {"compact", to_compact(c.y)},
              {"target", matrix_to_json(c.target)},
              {"side", to_string(c.side)},
              {"lr_size", c.lr_size},
              {"rl_size", c.rl_size},
              {"lr_descent", c.lr_descent},
              {"rl_descent", c.rl_descent},
              {"bounds",
               {{"generators", c.generator_count}, {"max_ext_len", c.max_ext_len}, {"max_rounds", c.max_rounds}}},
              {"rounds_used", c.rounds_used},
              {"converged", c.converged}};
}

inline json chain_to_json(const ExitChainReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"t", e.t},
                           {"a", e.certificate.lr_size},
                           {"b", e.certificate.rl_size},
                           {"seed", e.seed},
                           {"certificate", certificate_to_json(e.certificate)}});
  }
  return json{{"h", r.h},
              {"states", r.states},
              {"a", r.a_sizes()},
              {"b", r.b_sizes()},
              {"a_decrements", r.a_decrements},
              {"b_decrements", r.b_decrements},
              {"flat_steps", r.flat_steps},
              {"nonincreasing", r.nonincreasing},
              {"implied_bound", r.implied_bound},
              {"caveat", r.caveat},
              {"entries", std::move(entries)}};
}

inline json counterexample_to_json(const Counterexample& c) {
  if (c.kind == CounterexampleKind::direct) {
    return json{{"kind", "direct"},
                {"input", string_to_json(c.input)},
                {"compact", to_compact(c.input)},
                {"decision", to_string(c.input_decision)},
                {"live", c.input_live},
                {"erring", c.erring}};
  }
  return json{{"kind", "pumped_pair"},
              {"t", c.t},
              {"theta", to_compact(c.theta)},
              {"x", to_compact(c.x)},
              {"u", c.u ? to_hex(*c.u) : ""},
              {"v", c.v ? to_hex(*c.v) : ""},
              {"t_lr", c.t_lr},
              {"t_rl", c.t_rl},
              {"t_star", c.t_star},
              {"lambda", c.t_star * (c.x.size() + c.theta.size())},
              {"short_input", to_compact(c.input)},
              {"pumped_input", "u . theta . (x . theta)^" + std::to_string(c.t_star) + " . v"},
              {"pumped_length", c.pumped_length},
              {"short_decision", to_string(c.input_decision)},
              {"pumped_decision", to_string(c.pumped_decision)},
              {"short_live", c.input_live},
              {"pumped_live", c.pumped_live},
              {"erring", c.erring}};
}

inline json pump_to_json(const PumpResult& r) {
  json out{{"status", to_string(r.status)}, {"t", r.t}, {"reason", r.reason}};
  if (r.theta_certificate) out["theta"] = certificate_to_json(*r.theta_certificate);
  out["alpha"] = {{"domain", r.alpha_domain}, {"image", r.alpha_image}};
  out["beta"] = {{"domain", r.beta_domain}, {"image", r.beta_image}};
  out["t_star"] = r.t_star;
  out["counterexample"] = r.counterexample ? counterexample_to_json(*r.counterexample) : json(nullptr);
  return out;
}

inline json fuzz_to_json(const FuzzResult& r) {
  return json{{"status", r.counterexample ? "counterexample" : "not_found"},
              {"tested", r.tested},
              {"counterexample", r.counterexample ? counterexample_to_json(*r.counterexample) : json(nullptr)}};
}

inline json sequence_report_to_json(const SequenceReport& r) {
  json tallies = json::object();
  for (const auto& [name, t] : r.tallies) tallies[name] = {{"checked", t.checked}, {"failed", t.failed}};
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"check", f.check}, {"t", f.t}});
  return json{{"h", r.h},
              {"U", r.upper},
              {"N", r.length},
              {"ok", r.ok()},
              {"total_checks", r.total_checks()},
              {"tallies", std::move(tallies)},
              {"failures", std::move(failures)}};
}

inline json traversal_decomposition_to_json(const Tdfa& m, const TraversalDecomposition& d) {
  json points = json::array();
  for (const auto& p : d.points) {
    points.push_back({{"state", m.name(p.state)}, {"position", p.position}, {"kind", to_string(p.kind)}});
  }
  return json{{"theta_begin", d.theta_begin}, {"theta_end", d.theta_end}, {"traversals", d.traversals},
              {"decision", to_string(d.decision)}, {"steps", d.steps}, {"truncated", d.truncated},
              {"points", std::move(points)}};
}

}  // namespace owl
