#pragma once

#include "stickslip/friction.hpp"

namespace stickslip {

// What the screen shows for one simulator state. The string is a straight
// segment from the pointer toward the input point.
struct DisplayState {
  double pointer_px = 0.0;
  double string_len = 0.0;
  double string_from = 0.0;
  double string_to = 0.0;
  bool string_visible = false;

  friend bool operator==(const DisplayState&, const DisplayState&) = default;
};

// l = C_l * sqrt(F_s). Throws InvalidParameter on negative force or gain.
double string_length(double spring_force, double gain);

DisplayState compose_display(const SimState& state, const FrictionParams& params, bool with_string);

}  // namespace stickslip
