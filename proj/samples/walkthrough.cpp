// Small tour: build the h=3 chain, run the subset solver, then attack a
// machine that keeps track of only one node.

#include <iostream>

#include "owl/adversary.hpp"
#include "owl/io.hpp"

int main() {
  const int h = 3;
  const auto seq = owl::build_sequence(h);
  std::cout << "h=" << h << "  U=" << seq.upper << "  N=" << seq.length << "\n";
  for (int t = 0; t <= seq.length; ++t) std::cout << "C_" << t << "\n" << owl::to_text(seq[t]);

  const auto solver = owl::build_subset_solver(h);
  owl::Rng rng(7);
  for (int k = 0; k < 3; ++k) {
    const auto z = owl::random_mixed_string(h, 6, rng);
    std::cout << owl::to_compact(z) << "  live=" << owl::is_live(z)
              << "  decision=" << owl::to_string(owl::decide(solver, z)) << "\n";
  }

  const auto chain = owl::exit_chain(solver, h, owl::default_search_bounds(h));
  std::cout << "chain a: " << owl::json(chain.a_sizes()).dump() << "  b: " << owl::json(chain.b_sizes()).dump()
            << "  implied bound " << chain.implied_bound << "\n";

  const auto broken = owl::build_broken_solver(h, 1);
  for (int t = 1; t <= seq.length; ++t) {
    const auto r = owl::pump(broken, t, owl::default_adversary_bounds(h));
    std::cout << "pump t=" << t << ": " << owl::to_string(r.status) << "  " << r.reason << "\n";
    if (r.counterexample) {
      std::cout << owl::counterexample_to_json(*r.counterexample).dump(2) << "\n";
      break;
    }
  }
}
