#include "stickslip/pointer.hpp"

#include <cmath>

#include "stickslip/errors.hpp"

namespace stickslip {

double string_length(double spring_force, double gain) {
  if (!(spring_force >= 0.0)) throw InvalidParameter("spring force must be >= 0");
  if (!(gain >= 0.0)) throw InvalidParameter("string gain must be >= 0");
  return gain * std::sqrt(spring_force);
}

DisplayState compose_display(const SimState& state, const FrictionParams& params, bool with_string) {
  const double offset = state.q - state.p;
  const double force = params.k * std::abs(offset);
  const double len = string_length(force, params.string_gain);
  const double toward = (offset > 0.0) - (offset < 0.0);

  DisplayState display;
  display.pointer_px = state.p;
  display.string_len = len;
  display.string_from = state.p;
  display.string_to = state.p + toward * len;
  display.string_visible = with_string && state.contact;
  return display;
}

}  // namespace stickslip
