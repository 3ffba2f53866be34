// owl: command-line front end for the OWL_h analysis library.
//
// Exit codes: 0 consistent / nothing found, 1 counterexample or failed
// check, 2 usage or input error.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "owl/adversary.hpp"
#include "owl/io.hpp"
#include "owl/sequence.hpp"

#ifndef OWL_VERSION
#define OWL_VERSION "dev"
#endif

namespace {

using owl::json;

struct Common {
  std::string format = "json";
  bool pretty = false;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool no_timing = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid " + what + " '" + s + "'");
}

/// Built-in names (accept_all[:h], subset:h, broken:h:cap) or a JSON file.
owl::Tdfa resolve_machine(const std::string& spec, std::optional<int> height) {
  const auto parts = split(spec, ':');
  if (!parts.empty() && parts[0] == "accept_all") {
    int h;
    if (parts.size() == 2) {
      h = parse_int(parts[1], "height");
    } else if (parts.size() == 1 && height) {
      h = *height;
    } else {
      throw UsageError("accept_all needs a height: use accept_all:h or --height");
    }
    return owl::build_accept_all(h);
  }
  if (!parts.empty() && parts[0] == "subset") {
    if (parts.size() != 2) throw UsageError("expected subset:h");
    return owl::build_subset_solver(parse_int(parts[1], "height"));
  }
  if (!parts.empty() && parts[0] == "broken") {
    if (parts.size() != 3) throw UsageError("expected broken:h:cap");
    return owl::build_broken_solver(parse_int(parts[1], "height"), parse_int(parts[2], "cap"));
  }
  return owl::load_machine_file(spec);
}

void require_height(const owl::Tdfa& m, std::optional<int> h) {
  if (h && *h != m.height()) {
    throw UsageError("machine height " + std::to_string(m.height()) + " differs from --height " + std::to_string(*h));
  }
}

void render_pretty(const json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  auto is_flat = [](const json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (e.is_structured()) return false;
    }
    return true;
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !is_flat(v) && !v.empty()) {
        out << pad << k << ":\n";
        render_pretty(v, out, indent + 2);
      } else if (v.is_array()) {
        out << pad << k << ": [";
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar(v[i]);
        out << "]\n";
      } else {
        out << pad << k << ": " << (v.is_object() ? "{}" : scalar(v)) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto& v = j[i];
      if (v.is_structured() && !is_flat(v)) {
        out << pad << "- [" << i << "]\n";
        render_pretty(v, out, indent + 2);
      } else if (v.is_array()) {
        out << pad << "- [";
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? ", " : "") << scalar(v[k]);
        out << "]\n";
      } else {
        out << pad << "- " << scalar(v) << "\n";
      }
    }
  } else {
    out << pad << scalar(j) << "\n";
  }
}

owl::SearchBounds make_bounds(int h, std::optional<std::size_t> ext, std::optional<std::size_t> rounds,
                              const std::string& generators) {
  auto b = owl::default_search_bounds(h);
  if (generators == "all") {
    b.generators = owl::all_symbols(h);
  } else if (generators == "chain") {
    b.generators.clear();
    for (const auto& c : owl::build_sequence(h, owl::Recurrence::plain).matrices) b.generators.emplace_back(c);
    b.generators.push_back(owl::identity_symbol(h));
    b.generators.push_back(owl::complete_symbol(h));
  } else if (generators != "default") {
    throw UsageError("--generators must be default, all or chain");
  }
  if (ext) b.max_ext_len = *ext;
  if (rounds) b.max_rounds = *rounds;
  return b;
}

json bounds_echo(const owl::SearchBounds& b, const std::string& generators) {
  return json{{"generators", generators},
              {"generator_count", owl::detail::canonical_generators(b.generators).size()},
              {"max_ext_len", b.max_ext_len},
              {"max_rounds", b.max_rounds}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis tools for the one-way liveness problem OWL_h and two-way automata"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OWL_VERSION);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "pretty"}));
    sub->add_flag("--pretty", common.pretty, "Same as --format pretty");
    sub->add_option("--seed", common.seed, "Random seed (std::mt19937_64)");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    sub->add_flag("--no-timing", common.no_timing, "Omit wall-clock timing from the report");
  };

  std::optional<int> height;
  std::optional<int> index;
  std::string machine_spec;
  std::string input_spec;
  std::string side = "lr";
  std::string kind = "C";
  bool text = false;
  bool trace = false;
  std::size_t trace_limit = 100000;
  std::size_t samples = 8;
  std::optional<std::size_t> max_ext_len;
  std::optional<std::size_t> max_rounds;
  std::string generators = "default";
  std::string matrix_path;
  std::uint64_t max_pumped = 1'000'000;
  std::size_t max_len = 4;
  bool exhaustive = false;
  std::uint64_t fuzz_samples = 10000;
  std::string u_spec, theta_spec, tail_spec, v_spec;

  auto* seq = app.add_subcommand("seq", "Build the connectivity sequence C_0..C_N");
  seq->add_option("--height", height, "h")->check(CLI::Range(1, 64));
  seq->add_option("--index", index, "Single index t");
  seq->add_option("--kind", kind, "Matrix family: C, E, E', D, D'")->check(CLI::IsMember({"C", "E", "E'", "D", "D'"}));
  seq->add_flag("--text", text, "Print the bare text matrix format");
  add_common(seq);

  auto* verify = app.add_subcommand("verify-seq", "Machine-check the sequence identities and witness contracts");
  verify->add_option("--height", height, "h")->required()->check(CLI::Range(1, 64));
  verify->add_option("--samples", samples, "Sampled members per witness check");
  add_common(verify);

  auto* run = app.add_subcommand("run", "Run a machine on an input");
  run->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  run->add_option("--input", input_spec, "String file or compact form h:hex,...")->required();
  run->add_flag("--trace", trace, "Include the configuration trace");
  run->add_option("--trace-limit", trace_limit, "Largest trace kept");
  add_common(run);

  auto* exits = app.add_subcommand("exits", "Exit set of a machine on an infix");
  exits->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  exits->add_option("--input", input_spec, "String file or compact form")->required();
  exits->add_option("--side", side, "lr or rl")->check(CLI::IsMember({"lr", "rl"}));
  add_common(exits);

  auto* generic = app.add_subcommand("generic", "Bounded generic-string certificate for P(C)");
  generic->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  generic->add_option("--height", height, "h")->check(CLI::Range(1, 64));
  auto* conn_opt = generic->add_option("--conn", index, "Use C_t from the sequence");
  auto* matrix_opt = generic->add_option("--matrix", matrix_path, "Matrix file (text or JSON hex rows)");
  conn_opt->excludes(matrix_opt);
  generic->add_option("--side", side, "lr, rl or both")->check(CLI::IsMember({"lr", "rl", "both"}));
  add_common(generic);

  auto* chain = app.add_subcommand("chain", "Exit-size chain along P(C_0)..P(C_N)");
  chain->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  chain->add_option("--height", height, "h")->check(CLI::Range(1, 64));
  add_common(chain);

  auto* pump = app.add_subcommand("pump", "Pumping construction at one index");
  pump->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  pump->add_option("--height", height, "h")->check(CLI::Range(1, 64));
  pump->add_option("--index", index, "t in [1, N]")->required();
  pump->add_option("--max-pumped-length", max_pumped, "Size guard for the pumped input");
  add_common(pump);

  auto* fuzz = app.add_subcommand("fuzz", "Compare machine decisions with liveness");
  fuzz->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  fuzz->add_option("--height", height, "h")->check(CLI::Range(1, 64));
  fuzz->add_option("--max-len", max_len, "Longest string")->required();
  auto* ex_flag = fuzz->add_flag("--exhaustive", exhaustive, "Every string over Sigma_h (h <= 4)");
  auto* samples_opt = fuzz->add_option("--samples", fuzz_samples, "Random strings to try");
  ex_flag->excludes(samples_opt);
  add_common(fuzz);

  auto* decompose = app.add_subcommand("decompose", "Traversals of theta on u.theta.tail.v");
  decompose->add_option("--machine", machine_spec, "Machine file or built-in name")->required();
  decompose->add_option("--u", u_spec, "Compact string")->required();
  decompose->add_option("--theta", theta_spec, "Compact string")->required();
  decompose->add_option("--tail", tail_spec, "Compact string")->required();
  decompose->add_option("--v", v_spec, "Compact string")->required();
  add_common(decompose);

  for (auto* sub : {generic, chain, pump}) {
    sub->add_option("--max-ext-len", max_ext_len, "Longest searched extension");
    sub->add_option("--max-rounds", max_rounds, "Descent rounds per pass");
    sub->add_option("--generators", generators, "default, all or chain");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (common.pretty) common.format = "pretty";

  const auto started = std::chrono::steady_clock::now();
  json config{{"seed", common.seed}, {"jobs", common.jobs}};
  json result;
  int status = 0;
  std::string command;

  try {
    if (seq->parsed()) {
      command = "seq";
      const int h = height.value_or(5);
      config["height"] = h;
      const auto s = owl::build_sequence(h);
      if (index) {
        config["index"] = *index;
        config["kind"] = kind;
        owl::BoolMatrix m(h);
        if (kind == "C") {
          if (*index < 0 || *index > s.length) throw UsageError("--index outside [0, N]");
          m = s[*index];
        } else if (kind == "E") {
          m = owl::e_matrix(*index, h);
        } else if (kind == "E'") {
          m = owl::e_prime(*index, h);
        } else if (kind == "D") {
          m = owl::d_matrix(*index, h);
        } else {
          m = owl::d_prime(*index, h);
        }
        if (text) {
          std::cout << owl::to_text(m);
          return 0;
        }
        result = {{"matrix", owl::matrix_to_json(m)}, {"text", owl::to_text(m)}};
      } else {
        if (text) {
          for (int t = 0; t <= s.length; ++t) std::cout << "C_" << t << "\n" << owl::to_text(s[t]);
          return 0;
        }
        result = {{"U", s.upper}, {"N", s.length}, {"sequence", owl::sequence_to_json(s)}};
      }
    } else if (verify->parsed()) {
      command = "verify-seq";
      config["height"] = *height;
      config["samples"] = samples;
      const auto r = owl::verify_sequence(*height, {samples, common.seed, common.jobs});
      result = owl::sequence_report_to_json(r);
      status = r.ok() ? 0 : 1;
    } else if (run->parsed()) {
      command = "run";
      const auto z = owl::load_string(input_spec);
      const auto m = resolve_machine(machine_spec, z.height());
      if (m.height() != z.height()) throw UsageError("input height differs from machine height");
      config["machine"] = machine_spec;
      config["input"] = owl::to_compact(z);
      config["trace"] = trace;
      const owl::StringTape tape(z);
      const auto c = owl::run_machine(m, tape, owl::SimOptions{trace ? trace_limit : 0});
      result = {{"decision", owl::to_string(owl::decision_of(m, c))},
                {"live", owl::is_live(z)},
                {"computation", owl::computation_to_json(m, c, trace)}};
    } else if (exits->parsed()) {
      command = "exits";
      const auto z = owl::load_string(input_spec);
      const auto m = resolve_machine(machine_spec, z.height());
      if (m.height() != z.height()) throw UsageError("input height differs from machine height");
      config["machine"] = machine_spec;
      config["input"] = owl::to_compact(z);
      config["side"] = side;
      result = owl::traversal_map_to_json(m, owl::traversal_map(m, z, side == "lr" ? owl::Side::lr : owl::Side::rl));
    } else if (generic->parsed()) {
      command = "generic";
      const auto m = resolve_machine(machine_spec, height);
      require_height(m, height);
      const int h = m.height();
      owl::BoolMatrix c(h);
      if (!matrix_path.empty()) {
        c = owl::load_matrix(matrix_path);
        if (c.height() != h) throw UsageError("matrix height differs from machine height");
        config["matrix"] = owl::matrix_to_json(c);
      } else if (index) {
        const auto s = owl::build_sequence(h);
        if (*index < 0 || *index > s.length) throw UsageError("--conn outside [0, N]");
        c = s[*index];
        config["conn"] = *index;
      } else {
        throw UsageError("generic needs --conn t or --matrix file");
      }
      const auto bounds = make_bounds(h, max_ext_len, max_rounds, generators);
      config["machine"] = machine_spec;
      config["side"] = side;
      config["bounds"] = bounds_echo(bounds, generators);
      const auto cert = side == "both" ? owl::certify_generic(m, c, bounds)
                                       : owl::descend_generic(m, c, bounds, side == "lr" ? owl::Side::lr : owl::Side::rl);
      result = owl::certificate_to_json(cert);
    } else if (chain->parsed()) {
      command = "chain";
      const auto m = resolve_machine(machine_spec, height);
      require_height(m, height);
      const auto bounds = make_bounds(m.height(), max_ext_len, max_rounds, generators);
      config["machine"] = machine_spec;
      config["height"] = m.height();
      config["bounds"] = bounds_echo(bounds, generators);
      result = owl::chain_to_json(owl::exit_chain(m, m.height(), bounds));
    } else if (pump->parsed()) {
      command = "pump";
      const auto m = resolve_machine(machine_spec, height);
      require_height(m, height);
      owl::AdversaryBounds bounds{make_bounds(m.height(), max_ext_len, max_rounds, generators), max_pumped};
      config["machine"] = machine_spec;
      config["height"] = m.height();
      config["index"] = *index;
      config["bounds"] = bounds_echo(bounds.search, generators);
      config["max_pumped_length"] = max_pumped;
      const auto r = owl::pump(m, *index, bounds);
      result = owl::pump_to_json(r);
      status = r.status == owl::PumpStatus::counterexample ? 1 : 0;
    } else if (fuzz->parsed()) {
      command = "fuzz";
      const auto m = resolve_machine(machine_spec, height);
      require_height(m, height);
      owl::FuzzOptions opt{max_len, exhaustive, fuzz_samples, common.seed, common.jobs};
      config["machine"] = machine_spec;
      config["height"] = m.height();
      config["max_len"] = max_len;
      config["mode"] = exhaustive ? "exhaustive" : "sampled";
      if (!exhaustive) config["samples"] = fuzz_samples;
      const auto r = owl::differential_fuzz(m, m.height(), opt);
      result = owl::fuzz_to_json(r);
      status = r.counterexample ? 1 : 0;
    } else if (decompose->parsed()) {
      command = "decompose";
      const auto u = owl::string_from_compact(u_spec);
      const auto theta = owl::string_from_compact(theta_spec);
      const auto tail = owl::string_from_compact(tail_spec);
      const auto v = owl::string_from_compact(v_spec);
      const auto m = resolve_machine(machine_spec, theta.height());
      config["machine"] = machine_spec;
      config["u"] = u_spec;
      config["theta"] = theta_spec;
      config["tail"] = tail_spec;
      config["v"] = v_spec;
      result = owl::traversal_decomposition_to_json(m, owl::traversal_decomposition(m, u, theta, tail, v));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const owl::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  json report{{"tool", "owl"}, {"version", OWL_VERSION}, {"command", command}, {"config", config}};
  report["result"] = std::move(result);
  report["exit_code"] = status;
  if (!common.no_timing) {
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
    report["timing_ms"] = elapsed.count();
  }
  if (common.format == "pretty") {
    render_pretty(report, std::cout, 0);
  } else {
    std::cout << report.dump(2) << "\n";
  }
  return status;
}
