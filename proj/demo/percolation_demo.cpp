// Percolate K_n and compare spectral gaps and Laplacians against the bound.
#include <cstdio>
#include <cstdlib>

#include "graphconc/random_graphs.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  const double p = argc > 2 ? std::atof(argv[2]) : 0.5;
  const auto g = graphconc::complete_graph(n);
  const auto res = graphconc::percolation_gap_experiment(g, p, 0.1, 10, 2024);
  std::printf("n=%zu p=%.3f bound=%.4f\n", n, p, res.trials.front().bound);
  for (const auto& t : res.trials)
    std::printf("gap(G)=%.4f gap(G_p)=%.4f |diff|=%.4f ||L-L_p||=%.4f\n", t.gap_base, t.gap_sample, t.abs_diff,
                t.norm_diff);
  std::printf("within bound: %.0f%%\n", 100.0 * res.within_fraction);
}
