// Perturbative shift of a random N-level model against exact diagonalisation.
#include <cmath>
#include <cstdio>

#include "adiabatic/lab/random_model.hpp"
#include "adiabatic/nstate.hpp"

namespace ns = adiabatic::nstate;

int main() {
  adiabatic::lab::RandomModelSpec spec;
  spec.seed = 7;
  spec.levels = 6;
  spec.x = 0.05;
  const auto model = adiabatic::lab::random_model(spec);

  const double oracle = ns::oracle_shift(model);
  std::printf("oracle shift  % .15e\n", oracle);
  for (std::size_t order : {2, 4, 6, 8}) {
    const auto g = ns::g_split(model, order);
    std::printf("order %zu       % .15e  residual %.2e  g_b %.3e\n", order, g.delta_e, std::abs(g.delta_e - oracle),
                g.g_b);
  }
}
