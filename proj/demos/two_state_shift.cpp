// Level shift of a two-level system: closed form vs partial sums of the x series.
#include <cstdio>

#include "adiabatic/twostate.hpp"

namespace ts = adiabatic::twostate;

int main() {
  const double delta = 1.0;
  for (double x : {0.1, 0.3, 0.5, 0.8}) {
    const double exact = ts::delta_e_closed(delta, x);
    const auto series = ts::delta_e_series(delta, x, 30);
    std::printf("x=%.2f  exact=% .15f  series=% .15f  diff=%.2e\n", x, exact, series.value, series.value - exact);
  }

  // Adiabatic phase split at finite eps.
  const ts::TwoStateModel m(0.0, delta, 0.5, 0.25);
  const auto split = ts::phase_split(m);
  std::printf("F_a=%.10f  dE=%.10f  F_b=%.10f  F_c=%.3e%+.3ei\n", split.f_a, split.delta_e_a, split.f_b,
              split.f_c.real(), split.f_c.imag());
}
