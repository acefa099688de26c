#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace stickslip {

// Model constants. Distances are pixels, forces are model units; the numeric
// values of k, g and C_l are kept as-is from the experimental setup.
struct FrictionParams {
  double mu_s = 0.7;           // static friction coefficient
  double mu_k = 0.1;           // kinetic friction coefficient
  double k = 0.1;              // spring stiffness, force per px
  double c = 0.2;              // damping, force*s per px
  double g = 9.8;
  double string_gain = 2000.0;  // C_l, px per sqrt(force)
  double sim_rate = 100.0;      // Hz
  double travel_target = 70.0;  // px

  // Throws InvalidParameter unless every constant is finite and in range.
  void validate() const;

  // Critical-damping mass: c == 2*sqrt(m*k).
  double mass() const;
  double breakaway_force() const { return mu_s * mass() * g; }
  double kinetic_force() const { return mu_k * mass() * g; }
  // Spring elongation at which a stuck pen breaks away.
  double breakaway_elongation() const { return breakaway_force() / k; }
  double dt() const { return 1.0 / sim_rate; }
};

double derived_mass(const FrictionParams& params);

enum class Phase : std::uint8_t { Stick, Slip };

std::string_view to_string(Phase phase);
Phase parse_phase(std::string_view text);

// Pen position p and input position q share the world frame; the spring
// displacement is p - q with natural length 0.
struct SimState {
  Phase phase = Phase::Stick;
  double p = 0.0;
  double v = 0.0;
  double q = 0.0;
  double t = 0.0;
  bool contact = true;

  double displacement() const { return p - q; }

  static SimState at_rest(double position, double time = 0.0) {
    return SimState{Phase::Stick, position, 0.0, position, time, true};
  }
};

struct InputSample {
  double t = 0.0;  // s
  double q = 0.0;  // px
  bool contact = true;

  friend bool operator==(const InputSample&, const InputSample&) = default;
};

// Advances one tick of 1/sim_rate. `input` is the input position at the end
// of the tick; the input velocity is taken as constant across the tick.
SimState step(const SimState& state, const FrictionParams& params, const InputSample& input);

// Throws ValidationError if `samples` is empty or timestamps are not strictly
// increasing; InputError on non-finite values.
void validate_samples(std::span<const InputSample> samples);

// Linear interpolation of a validated input trace. Contact is taken from the
// latest sample at or before the query time.
class InputResampler {
 public:
  explicit InputResampler(std::span<const InputSample> samples);

  InputSample at(double t) const;
  double start() const { return samples_.front().t; }
  double end() const { return samples_.back().t; }
  // Number of whole ticks in [start, end] after the first one.
  std::size_t tick_count(double sim_rate) const;

 private:
  std::span<const InputSample> samples_;
  mutable std::size_t cursor_ = 0;
};

struct TrajectoryRow {
  double t = 0.0;
  double q = 0.0;
  double p = 0.0;
  double v = 0.0;  // NaN when loaded from a file for slip rows
  Phase phase = Phase::Stick;
  double spring_force = 0.0;
  double string_len = 0.0;
};

struct TrajectoryTrace {
  std::vector<TrajectoryRow> rows;
  FrictionParams params;
};

TrajectoryRow make_row(const SimState& state, const FrictionParams& params);

// Runs the simulator over the 1/sim_rate grid anchored at the first sample.
// Row 0 is `initial` (re-timed to the first sample); every later row is one tick.
TrajectoryTrace simulate_trace(std::span<const InputSample> inputs, const FrictionParams& params,
                               SimState initial);

// Convenience: pen and input at rest on the first sample.
TrajectoryTrace simulate_trace(std::span<const InputSample> inputs, const FrictionParams& params);

// Stick rows that follow a Stick row while the input moved in between: the
// pen is being held against a moving input.
std::size_t sustained_stick_rows(const TrajectoryTrace& trace);

// |p - q| on the first Slip row that follows a Stick row.
std::optional<double> first_breakaway_elongation(const TrajectoryTrace& trace);

// Maximal runs of equal phase, in order.
std::vector<Phase> phase_runs(const TrajectoryTrace& trace);

}  // namespace stickslip
