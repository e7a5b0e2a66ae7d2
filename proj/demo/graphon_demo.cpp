// Top eigenvalue of A/(pn) for G(n, p, 4xy) against the operator eigenvalue 4/3.
#include <cstdio>
#include <cstdlib>

#include "graphconc/graphon.hpp"

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 500;
  const double p = 0.2;
  const auto kernel = graphconc::Kernel::rank_one_product(4.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = graphconc::sample_inhomogeneous(kernel, n, p, seed);
    const double top = graphconc::lambda_max(graphconc::scaled_adjacency(s.graph, p));
    std::printf("seed %llu: lambda_max(A/pn) = %.4f (operator: %.4f)\n", static_cast<unsigned long long>(seed), top,
                4.0 / 3.0);
  }
}
