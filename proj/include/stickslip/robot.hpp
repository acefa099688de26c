#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stickslip/friction.hpp"
#include "stickslip/psychophysics.hpp"

namespace stickslip {

// Answers "comparison" with probability logistic(comparison_mu_s; A, B).
struct IdealLogisticResponder {
  double A = 4.0;
  double B = 0.5;
};

// Always the same answer: a fixed forced choice, or a fixed ratio.
struct ConstantResponder {
  Choice choice = Choice::Standard;
  Ratio ratio{};
};

// Adjusts toward k * mu^beta * exp(noise * N(0, 1)).
struct PowerLawResponder {
  double k = 1.0;
  double beta = 0.0;
  double noise = 0.0;
};

using BehaviorModel = std::variant<IdealLogisticResponder, ConstantResponder, PowerLawResponder>;

// "ideal-logistic:A=4,B=0.5", "constant:comparison", "constant:standard",
// "constant:1.2", "constant:comparison:1.2", "power-law:k=1.12,beta=0.204,noise=0.05".
// Throws InvalidParameter for unknown models or keys.
BehaviorModel parse_behavior(std::string_view spec);
std::string describe(const BehaviorModel& model);

// Button sequence that moves the ratio from 1.0 to `target`, largest steps first.
std::vector<Press> presses_toward(Ratio target);

struct RobotOptions {
  double drag_speed = 100.0;      // px/s along the stroke direction
  double max_stimulus_s = 60.0;   // abandons a stimulus that never completes
};

// Runs the session end to end: every stimulus is a constant-speed drag
// through the simulator until the pointer has travelled the target distance.
// `on_record` sees each trial as it completes.
std::vector<TrialRecord> run_robot_session(const SessionConfig& config, const FrictionParams& params,
                                           const BehaviorModel& behavior, const RobotOptions& options = {},
                                           const std::function<void(const TrialRecord&)>& on_record = {});

}  // namespace stickslip
