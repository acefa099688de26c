#include "stickslip/friction.hpp"

#include <cmath>
#include <string>

#include "stickslip/errors.hpp"
#include "stickslip/pointer.hpp"

namespace stickslip {

namespace {

bool finite_positive(double value) { return std::isfinite(value) && value > 0.0; }
bool finite_non_negative(double value) { return std::isfinite(value) && value >= 0.0; }

double sign(double value) { return (value > 0.0) - (value < 0.0); }

struct PenState {
  double p;
  double v;
};

}  // namespace

void FrictionParams::validate() const {
  if (!finite_positive(k)) throw InvalidParameter("stiffness k must be > 0");
  if (!finite_positive(c)) throw InvalidParameter("damping c must be > 0");
  if (!finite_positive(g)) throw InvalidParameter("gravity g must be > 0");
  if (!finite_positive(sim_rate)) throw InvalidParameter("sim_rate must be > 0");
  if (!finite_non_negative(mu_s)) throw InvalidParameter("mu_s must be >= 0");
  if (!finite_non_negative(mu_k)) throw InvalidParameter("mu_k must be >= 0");
  if (!finite_non_negative(string_gain)) throw InvalidParameter("string gain C_l must be >= 0");
  if (!finite_positive(travel_target)) throw InvalidParameter("travel_target must be > 0");
}

double FrictionParams::mass() const { return derived_mass(*this); }

double derived_mass(const FrictionParams& params) {
  if (!finite_positive(params.k)) throw InvalidParameter("stiffness k must be > 0");
  if (!finite_positive(params.c)) throw InvalidParameter("damping c must be > 0");
  return params.c * params.c / (4.0 * params.k);
}

std::string_view to_string(Phase phase) { return phase == Phase::Stick ? "stick" : "slip"; }

Phase parse_phase(std::string_view text) {
  if (text == "stick") return Phase::Stick;
  if (text == "slip") return Phase::Slip;
  throw InvalidParameter("unknown phase '" + std::string(text) + "'");
}

SimState step(const SimState& state, const FrictionParams& params, const InputSample& input) {
  params.validate();
  if (!std::isfinite(input.q)) throw InputError("input position is not finite");

  const double dt = params.dt();
  const double m = params.mass();
  const double k = params.k;
  const double c = params.c;
  const double f_smax = params.breakaway_force();
  const double f_k = params.kinetic_force();

  const double q0 = state.q;
  const double q1 = input.q;
  const double qdot = (q1 - q0) / dt;

  SimState next = state;
  next.t = state.t + dt;
  next.q = q1;
  next.contact = input.contact;

  if (state.phase == Phase::Stick) {
    next.v = 0.0;
    if (k * std::abs(state.p - q1) > f_smax) next.phase = Phase::Slip;
    return next;
  }

  // Slip. Coulomb friction opposes the pen's velocity over the surface; from
  // rest it opposes the impending motion, and holds the pen if it can.
  double direction = sign(state.v);
  if (direction == 0.0) {
    const double drive = -k * (state.p - q0) + c * qdot;
    if (std::abs(drive) <= f_k) {
      next.v = 0.0;
      return next;
    }
    direction = sign(drive);
  }
  const double friction = -direction * f_k;

  auto accel = [&](double p, double v, double tau) {
    const double q = q0 + qdot * tau;
    return (-k * (p - q) - c * (v - qdot) + friction) / m;
  };
  auto deriv = [&](PenState s, double tau) { return PenState{s.v, accel(s.p, s.v, tau)}; };
  auto offset = [](PenState s, PenState d, double h) { return PenState{s.p + h * d.p, s.v + h * d.v}; };

  const PenState s0{state.p, state.v};
  const PenState k1 = deriv(s0, 0.0);
  const PenState k2 = deriv(offset(s0, k1, dt / 2), dt / 2);
  const PenState k3 = deriv(offset(s0, k2, dt / 2), dt / 2);
  const PenState k4 = deriv(offset(s0, k3, dt), dt);
  const double p1 = s0.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  const double v1 = s0.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);

  if (v1 * direction > 0.0) {
    next.p = p1;
    next.v = v1;
    return next;
  }

  // Velocity reached zero inside the tick: clamp at the interpolated crossing.
  const double theta = state.v == 0.0 ? 0.0 : state.v / (state.v - v1);
  next.p = state.p + theta * (p1 - state.p);
  next.v = 0.0;
  next.phase = k * std::abs(next.p - q1) > f_smax ? Phase::Slip : Phase::Stick;
  return next;
}

void validate_samples(std::span<const InputSample> samples) {
  if (samples.empty()) throw ValidationError("input trace is empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t) || !std::isfinite(samples[i].q)) {
      throw InputError("sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(samples[i].t > samples[i - 1].t)) {
      throw ValidationError("sample " + std::to_string(i) + ": timestamp not strictly increasing");
    }
  }
}

InputResampler::InputResampler(std::span<const InputSample> samples) : samples_(samples) {
  validate_samples(samples_);
}

InputSample InputResampler::at(double t) const {
  if (t <= samples_.front().t) return InputSample{t, samples_.front().q, samples_.front().contact};
  if (t >= samples_.back().t) return InputSample{t, samples_.back().q, samples_.back().contact};
  // Queries are monotone in normal use; rewind if not.
  if (samples_[cursor_].t > t) cursor_ = 0;
  while (samples_[cursor_ + 1].t <= t) ++cursor_;
  const InputSample& a = samples_[cursor_];
  const InputSample& b = samples_[cursor_ + 1];
  const double w = (t - a.t) / (b.t - a.t);
  return InputSample{t, a.q + w * (b.q - a.q), a.contact};
}

std::size_t InputResampler::tick_count(double sim_rate) const {
  return static_cast<std::size_t>(std::floor((end() - start()) * sim_rate + 1e-9));
}

TrajectoryRow make_row(const SimState& state, const FrictionParams& params) {
  const double force = params.k * std::abs(state.p - state.q);
  return TrajectoryRow{state.t, state.q, state.p, state.v, state.phase, force,
                       string_length(force, params.string_gain)};
}

TrajectoryTrace simulate_trace(std::span<const InputSample> inputs, const FrictionParams& params,
                               SimState initial) {
  params.validate();
  InputResampler resampler(inputs);

  TrajectoryTrace trace;
  trace.params = params;
  const std::size_t ticks = resampler.tick_count(params.sim_rate);
  trace.rows.reserve(ticks + 1);

  const double t0 = resampler.start();
  SimState state = initial;
  state.t = t0;
  state.contact = inputs.front().contact;
  trace.rows.push_back(make_row(state, params));

  for (std::size_t n = 1; n <= ticks; ++n) {
    const double t = t0 + static_cast<double>(n) / params.sim_rate;
    state = step(state, params, resampler.at(t));
    state.t = t;
    trace.rows.push_back(make_row(state, params));
  }
  return trace;
}

TrajectoryTrace simulate_trace(std::span<const InputSample> inputs, const FrictionParams& params) {
  validate_samples(inputs);
  return simulate_trace(inputs, params, SimState::at_rest(inputs.front().q, inputs.front().t));
}

std::size_t sustained_stick_rows(const TrajectoryTrace& trace) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const auto& a = trace.rows[i - 1];
    const auto& b = trace.rows[i];
    if (a.phase == Phase::Stick && b.phase == Phase::Stick && b.q != a.q) ++n;
  }
  return n;
}

std::optional<double> first_breakaway_elongation(const TrajectoryTrace& trace) {
  for (std::size_t i = 1; i < trace.rows.size(); ++i) {
    const auto& a = trace.rows[i - 1];
    const auto& b = trace.rows[i];
    if (a.phase == Phase::Stick && b.phase == Phase::Slip) return std::abs(b.p - b.q);
  }
  return std::nullopt;
}

std::vector<Phase> phase_runs(const TrajectoryTrace& trace) {
  std::vector<Phase> runs;
  for (const auto& row : trace.rows) {
    if (runs.empty() || runs.back() != row.phase) runs.push_back(row.phase);
  }
  return runs;
}

}  // namespace stickslip
