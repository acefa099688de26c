#include "stickslip/robot.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <sstream>

#include "stickslip/analysis.hpp"
#include "stickslip/errors.hpp"
#include "stickslip/random.hpp"

namespace stickslip {

namespace {

std::map<std::string, double> parse_arguments(std::string_view text, std::string_view model) {
  std::map<std::string, double> args;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter(fmt::format("{}: expected key=value, got '{}'", model, item));
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double number = 0.0;
    try {
      number = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw InvalidParameter(fmt::format("{}: bad number '{}'", model, value));
    }
    args[key] = number;
  }
  return args;
}

double take(std::map<std::string, double>& args, const std::string& key, double fallback) {
  const auto it = args.find(key);
  if (it == args.end()) return fallback;
  const double value = it->second;
  args.erase(it);
  return value;
}

void reject_leftovers(const std::map<std::string, double>& args, std::string_view model) {
  if (!args.empty()) throw InvalidParameter(fmt::format("{}: unknown key '{}'", model, args.begin()->first));
}

// Drags the input at constant speed until the stimulus stage ends.
void present_stimulus(ExperimentSession& session, const RobotOptions& options) {
  const FrictionParams params = session.stimulus_params();
  const double velocity = session.stroke_sign() * options.drag_speed;
  const double dt = params.dt();
  const auto max_ticks = static_cast<std::size_t>(std::ceil(options.max_stimulus_s * params.sim_rate));

  SimState state = SimState::at_rest(0.0);
  for (std::size_t n = 1; n <= max_ticks; ++n) {
    const double t = static_cast<double>(n) * dt;
    state = step(state, params, InputSample{t, velocity * t, true});
    if (session.on_tick(state.p)) return;
  }
  throw ValidationError(fmt::format("stimulus did not reach {} px within {} s", params.travel_target,
                                    options.max_stimulus_s));
}

}  // namespace

BehaviorModel parse_behavior(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  if (name == "ideal-logistic") {
    auto args = parse_arguments(rest, name);
    IdealLogisticResponder m;
    m.A = take(args, "A", m.A);
    m.B = take(args, "B", m.B);
    reject_leftovers(args, name);
    return m;
  }
  if (name == "power-law") {
    auto args = parse_arguments(rest, name);
    PowerLawResponder m;
    m.k = take(args, "k", m.k);
    m.beta = take(args, "beta", m.beta);
    m.noise = take(args, "noise", m.noise);
    reject_leftovers(args, name);
    if (!(m.k > 0.0) || !(m.noise >= 0.0)) throw InvalidParameter("power-law: need k > 0 and noise >= 0");
    return m;
  }
  if (name == "constant") {
    // Optional choice and ratio, in either order: "constant:comparison:1.2".
    ConstantResponder m;
    std::string_view tail = rest;
    while (!tail.empty()) {
      const auto sep = tail.find(':');
      const std::string_view token = tail.substr(0, sep);
      tail = sep == std::string_view::npos ? std::string_view{} : tail.substr(sep + 1);
      if (token == "standard" || token == "comparison") {
        m.choice = parse_choice(token);
        continue;
      }
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(std::string(token), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != token.size() || !(value > 0.0)) {
        throw InvalidParameter(
            fmt::format("constant: expected standard, comparison or a positive ratio, got '{}'", token));
      }
      m.ratio = Ratio::from_value(value);
    }
    return m;
  }
  throw InvalidParameter(fmt::format("unknown behavior model '{}'", name));
}

std::string describe(const BehaviorModel& model) {
  if (const auto* m = std::get_if<IdealLogisticResponder>(&model)) {
    return fmt::format("ideal-logistic:A={},B={}", m->A, m->B);
  }
  if (const auto* m = std::get_if<PowerLawResponder>(&model)) {
    return fmt::format("power-law:k={},beta={},noise={}", m->k, m->beta, m->noise);
  }
  const auto& m = std::get<ConstantResponder>(model);
  return fmt::format("constant:{}:{}", to_string(m.choice), m.ratio.value());
}

std::vector<Press> presses_toward(Ratio target) {
  std::vector<Press> presses;
  std::int64_t gap = target.hundredths - Ratio{}.hundredths;
  for (int size : {10, 5, 1}) {
    while (gap >= size) {
      presses.push_back(press_from_hundredths(size));
      gap -= size;
    }
    while (gap <= -size) {
      presses.push_back(press_from_hundredths(-size));
      gap += size;
    }
  }
  return presses;
}

std::vector<TrialRecord> run_robot_session(const SessionConfig& config, const FrictionParams& params,
                                           const BehaviorModel& behavior, const RobotOptions& options,
                                           const std::function<void(const TrialRecord&)>& on_record) {
  ExperimentSession session(config, params);
  // Independent stream from the schedule shuffle.
  Rng rng(splitmix64(derive_seed(config.seed, config.participant_index) ^ 0x5EEDF00DULL));

  while (!session.finished()) {
    present_stimulus(session, options);
    present_stimulus(session, options);
    const TrialRecord& trial = session.current_trial();

    if (config.study == Study::Jnd) {
      Choice choice = Choice::Standard;
      if (const auto* m = std::get_if<IdealLogisticResponder>(&behavior)) {
        choice = rng.bernoulli(logistic(trial.comparison_mu_s, m->A, m->B)) ? Choice::Comparison
                                                                                         : Choice::Standard;
      } else if (const auto* m = std::get_if<ConstantResponder>(&behavior)) {
        choice = m->choice;
      } else {
        throw InvalidParameter("power-law responder cannot answer a forced-choice trial");
      }
      session.on_choice(choice);
    } else {
      Ratio target{};
      if (const auto* m = std::get_if<PowerLawResponder>(&behavior)) {
        const double ideal = m->k * std::pow(trial.comparison_mu_s, m->beta) * std::exp(m->noise * rng.normal());
        target = Ratio::from_value(ideal);
        if (target.hundredths < 1) target.hundredths = 1;
      } else if (const auto* m = std::get_if<ConstantResponder>(&behavior)) {
        target = m->ratio;
      } else {
        throw InvalidParameter("ideal-logistic responder cannot answer an adjustment trial");
      }
      for (Press p : presses_toward(target)) session.on_press(p);
      session.on_confirm();
    }
    if (on_record) on_record(session.completed().back());
  }
  return session.completed();
}

}  // namespace stickslip
