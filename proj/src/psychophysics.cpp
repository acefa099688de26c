#include "stickslip/psychophysics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "stickslip/errors.hpp"
#include "stickslip/random.hpp"

namespace stickslip {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt_levels(const std::vector<double>& levels) {
  std::string out;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("{}", levels[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(Study study) { return study == Study::Jnd ? "jnd" : "magnitude"; }

std::string_view to_string(Direction direction) {
  return direction == Direction::LeftToRight ? "left_to_right" : "right_to_left";
}

std::string_view to_string(DirectionPolicy policy) {
  switch (policy) {
    case DirectionPolicy::LeftToRight: return "left_to_right";
    case DirectionPolicy::RightToLeft: return "right_to_left";
    case DirectionPolicy::AlternateTrial: return "alternate_trial";
    case DirectionPolicy::AlternateParticipant: return "alternate_participant";
  }
  return "left_to_right";
}

std::string_view to_string(StimulusOrder order) {
  return order == StimulusOrder::StandardFirst ? "standard_first" : "comparison_first";
}

std::string_view to_string(Choice choice) { return choice == Choice::Standard ? "standard" : "comparison"; }

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::PresentStandard: return "present_standard";
    case Stage::PresentComparison: return "present_comparison";
    case Stage::AwaitResponse: return "await_response";
    case Stage::Done: return "done";
  }
  return "done";
}

std::string_view label(Press press) {
  switch (press) {
    case Press::Decrease: return "decrease (-0.10)";
    case Press::SlightDecrease: return "slight decrease (-0.05)";
    case Press::SlightestDecrease: return "slightest decrease (-0.01)";
    case Press::SlightestIncrease: return "slightest increase (+0.01)";
    case Press::SlightIncrease: return "slight increase (+0.05)";
    case Press::Increase: return "increase (+0.10)";
  }
  return "";
}

Study parse_study(std::string_view text) {
  if (text == "jnd" || text == "1") return Study::Jnd;
  if (text == "magnitude" || text == "2") return Study::Magnitude;
  throw InvalidParameter("unknown study '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  if (text == "left_to_right") return Direction::LeftToRight;
  if (text == "right_to_left") return Direction::RightToLeft;
  throw InvalidParameter("unknown direction '" + std::string(text) + "'");
}

DirectionPolicy parse_direction_policy(std::string_view text) {
  if (text == "left_to_right") return DirectionPolicy::LeftToRight;
  if (text == "right_to_left") return DirectionPolicy::RightToLeft;
  if (text == "alternate_trial") return DirectionPolicy::AlternateTrial;
  if (text == "alternate_participant") return DirectionPolicy::AlternateParticipant;
  throw InvalidParameter("unknown direction policy '" + std::string(text) + "'");
}

StimulusOrder parse_stimulus_order(std::string_view text) {
  if (text == "standard_first") return StimulusOrder::StandardFirst;
  if (text == "comparison_first") return StimulusOrder::ComparisonFirst;
  throw InvalidParameter("unknown stimulus order '" + std::string(text) + "'");
}

Choice parse_choice(std::string_view text) {
  if (text == "standard") return Choice::Standard;
  if (text == "comparison") return Choice::Comparison;
  throw InvalidParameter("unknown choice '" + std::string(text) + "'");
}

Press press_from_hundredths(int value) {
  for (Press p : kAllPresses) {
    if (hundredths(p) == value) return p;
  }
  throw InvalidParameter(fmt::format("no adjustment button for {} hundredths", value));
}

Ratio Ratio::from_value(double value) {
  if (!std::isfinite(value)) throw InvalidParameter("ratio must be finite");
  return Ratio{std::llround(value * 100.0)};
}

Ratio apply_adjustment(Ratio ratio, Press press) { return Ratio{ratio.hundredths + hundredths(press)}; }

double apply_adjustment(double ratio, Press press) {
  return apply_adjustment(Ratio::from_value(ratio), press).value();
}

Ratio TrialRecord::ratio_from_presses() const {
  Ratio r;
  for (Press p : press_log) r = apply_adjustment(r, p);
  return r;
}

void SessionConfig::validate() const {
  if (reps < 1) throw InvalidParameter("reps must be >= 1");
  if (comparison_levels.empty()) throw InvalidParameter("comparison_levels must not be empty");
  std::set<double> distinct;
  for (double level : comparison_levels) {
    if (!std::isfinite(level) || level < 0.0) throw InvalidParameter("comparison levels must be finite and >= 0");
    if (!distinct.insert(level).second) throw InvalidParameter("comparison levels must be distinct");
  }
  if (!std::isfinite(standard_mu_s) || standard_mu_s < 0.0) throw InvalidParameter("standard_mu_s must be >= 0");
  if (participant_index < 0) throw InvalidParameter("participant_index must be >= 0");
}

SessionConfig SessionConfig::jnd_study(bool with_string) {
  SessionConfig c;
  c.study = Study::Jnd;
  c.standard_mu_s = 0.0;
  c.comparison_levels = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  c.reps = 10;
  c.with_string = with_string;
  c.direction = DirectionPolicy::LeftToRight;
  return c;
}

SessionConfig SessionConfig::magnitude_study() {
  SessionConfig c;
  c.study = Study::Magnitude;
  c.standard_mu_s = 0.7;
  c.comparison_levels = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  c.reps = 5;
  c.with_string = true;
  c.direction = DirectionPolicy::AlternateTrial;
  return c;
}

SessionConfig session_config_from(const KeyValueFile& file) {
  file.require_known({"study", "standard_mu_s", "comparison_levels", "reps", "with_string", "seed",
                      "participant_index", "direction"});
  const Study study = parse_study(file.get_string("study", "jnd"));
  SessionConfig c = study == Study::Jnd ? SessionConfig::jnd_study() : SessionConfig::magnitude_study();
  c.standard_mu_s = file.get_double("standard_mu_s", c.standard_mu_s);
  c.comparison_levels = file.get_doubles("comparison_levels", c.comparison_levels);
  c.reps = static_cast<int>(file.get_int("reps", c.reps));
  c.with_string = file.get_bool("with_string", c.with_string);
  c.seed = file.get_uint("seed", c.seed);
  c.participant_index = static_cast<int>(file.get_int("participant_index", c.participant_index));
  c.direction = parse_direction_policy(file.get_string("direction", std::string(to_string(c.direction))));
  c.validate();
  return c;
}

SessionConfig load_session_config(const std::filesystem::path& path) {
  return session_config_from(KeyValueFile::load(path));
}

void write_session_config(std::ostream& out, const SessionConfig& c) {
  out << fmt::format("study = {}\nstandard_mu_s = {}\ncomparison_levels = {}\nreps = {}\n", to_string(c.study),
                     c.standard_mu_s, fmt_levels(c.comparison_levels), c.reps)
      << fmt::format("with_string = {}\nseed = {}\nparticipant_index = {}\ndirection = {}\n", c.with_string,
                     c.seed, c.participant_index, to_string(c.direction));
}

std::uint64_t derive_seed(std::uint64_t seed, int participant_index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(participant_index));
}

std::vector<TrialRecord> build_schedule(const SessionConfig& config) {
  config.validate();
  std::vector<TrialRecord> trials;
  trials.reserve(config.comparison_levels.size() * static_cast<std::size_t>(config.reps));
  for (double level : config.comparison_levels) {
    for (int r = 0; r < config.reps; ++r) {
      TrialRecord t;
      t.participant_index = config.participant_index;
      t.study = config.study;
      t.standard_mu_s = config.standard_mu_s;
      t.comparison_mu_s = level;
      t.with_string = config.with_string;
      trials.push_back(std::move(t));
    }
  }

  Rng rng(derive_seed(config.seed, config.participant_index));
  for (std::size_t i = trials.size(); i > 1; --i) {
    std::swap(trials[i - 1], trials[rng.index(i)]);
  }

  for (std::size_t i = 0; i < trials.size(); ++i) {
    TrialRecord& t = trials[i];
    t.trial_index = static_cast<int>(i);
    switch (config.direction) {
      case DirectionPolicy::LeftToRight: t.direction = Direction::LeftToRight; break;
      case DirectionPolicy::RightToLeft: t.direction = Direction::RightToLeft; break;
      case DirectionPolicy::AlternateTrial:
        t.direction = i % 2 == 0 ? Direction::LeftToRight : Direction::RightToLeft;
        break;
      case DirectionPolicy::AlternateParticipant:
        t.direction = config.participant_index % 2 == 0 ? Direction::LeftToRight : Direction::RightToLeft;
        break;
    }
  }
  return trials;
}

Advance advance_trial(const TrialPhase& phase, const TrialEvent& event, const TrialRules& rules) {
  const Advance rejected{phase, false};
  return std::visit(
      Overloaded{
          [&](const PointerTick& tick) -> Advance {
            if (phase.stage != Stage::PresentStandard && phase.stage != Stage::PresentComparison) {
              return Advance{phase, true};
            }
            TrialPhase next = phase;
            next.travel_px = std::abs(tick.pointer_px - phase.start_px);
            if (next.travel_px >= rules.travel_target) {
              next.stage = phase.stage == Stage::PresentStandard ? Stage::PresentComparison : Stage::AwaitResponse;
              next.travel_px = 0.0;
            }
            return Advance{next, true};
          },
          [&](const ChoiceEvent&) -> Advance {
            if (phase.stage != Stage::AwaitResponse || rules.study != Study::Jnd) return rejected;
            TrialPhase next = phase;
            next.stage = Stage::Done;
            return Advance{next, true};
          },
          [&](const PressEvent&) -> Advance {
            if (phase.stage != Stage::AwaitResponse || rules.study != Study::Magnitude) return rejected;
            return Advance{phase, true};
          },
          [&](const ConfirmEvent&) -> Advance {
            if (phase.stage != Stage::AwaitResponse || rules.study != Study::Magnitude) return rejected;
            TrialPhase next = phase;
            next.stage = Stage::Done;
            return Advance{next, true};
          },
      },
      event);
}

JndTally tally_jnd_proportions(std::span<const TrialRecord> records, std::span<const double> expected_levels) {
  std::map<double, LevelTally> by_level;
  for (double level : expected_levels) by_level[level].level = level;
  for (const auto& r : records) {
    if (r.study != Study::Jnd || !r.done || !r.choice) {
      throw ValidationError(fmt::format("trial {} is not a completed forced-choice trial", r.trial_index));
    }
    LevelTally& t = by_level[r.comparison_mu_s];
    t.level = r.comparison_mu_s;
    ++t.trials;
    if (*r.choice == Choice::Comparison) ++t.comparison;
  }
  JndTally tally;
  for (auto& [level, t] : by_level) {
    if (t.trials == 0) {
      tally.warnings.push_back(fmt::format("level {} has no trials; excluded", level));
      continue;
    }
    t.proportion = static_cast<double>(t.comparison) / static_cast<double>(t.trials);
    tally.levels.push_back(t);
  }
  return tally;
}

MagnitudeMeans mean_ratios(std::span<const TrialRecord> records) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& r : records) {
    if (r.study != Study::Magnitude || !r.done || !r.ratio) {
      throw ValidationError(fmt::format("trial {} is not a completed adjustment trial", r.trial_index));
    }
    auto& [sum, n] = acc[r.comparison_mu_s];
    sum += r.ratio->value();
    ++n;
  }
  MagnitudeMeans means;
  for (const auto& [level, entry] : acc) {
    means.levels.push_back(level);
    means.mean_ratio.push_back(entry.first / entry.second);
  }
  return means;
}

std::string format_record(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["trial_index"] = r.trial_index;
  j["participant_index"] = r.participant_index;
  j["study"] = to_string(r.study);
  j["standard_mu_s"] = r.standard_mu_s;
  j["comparison_mu_s"] = r.comparison_mu_s;
  j["stimulus_order"] = to_string(r.stimulus_order);
  j["direction"] = to_string(r.direction);
  j["with_string"] = r.with_string;
  j["choice"] = r.choice ? nlohmann::ordered_json(to_string(*r.choice)) : nlohmann::ordered_json(nullptr);
  auto presses = nlohmann::ordered_json::array();
  for (Press p : r.press_log) presses.push_back(hundredths(p));
  j["press_log_hundredths"] = presses;
  j["ratio_hundredths"] = r.ratio ? nlohmann::ordered_json(r.ratio->hundredths) : nlohmann::ordered_json(nullptr);
  j["ratio"] = r.ratio ? nlohmann::ordered_json(r.ratio->value()) : nlohmann::ordered_json(nullptr);
  j["standard_s"] = r.durations.standard_s;
  j["comparison_s"] = r.durations.comparison_s;
  j["response_s"] = r.durations.response_s;
  j["done"] = r.done;
  return j.dump();
}

TrialRecord parse_record(std::string_view line, const std::string& source, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, line_no, e.what());
  }
  try {
    TrialRecord r;
    r.trial_index = j.at("trial_index").get<int>();
    r.participant_index = j.at("participant_index").get<int>();
    r.study = parse_study(j.at("study").get<std::string>());
    r.standard_mu_s = j.at("standard_mu_s").get<double>();
    r.comparison_mu_s = j.at("comparison_mu_s").get<double>();
    r.stimulus_order = parse_stimulus_order(j.at("stimulus_order").get<std::string>());
    r.direction = parse_direction(j.at("direction").get<std::string>());
    r.with_string = j.at("with_string").get<bool>();
    if (!j.at("choice").is_null()) r.choice = parse_choice(j.at("choice").get<std::string>());
    for (const auto& p : j.at("press_log_hundredths")) r.press_log.push_back(press_from_hundredths(p.get<int>()));
    if (!j.at("ratio_hundredths").is_null()) r.ratio = Ratio{j.at("ratio_hundredths").get<std::int64_t>()};
    r.durations.standard_s = j.at("standard_s").get<double>();
    r.durations.comparison_s = j.at("comparison_s").get<double>();
    r.durations.response_s = j.at("response_s").get<double>();
    r.done = j.at("done").get<bool>();
    if (r.ratio && *r.ratio != r.ratio_from_presses()) {
      throw ValidationError("ratio does not equal 1.0 plus the logged presses");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, line_no, e.what());
  } catch (const InvalidParameter& e) {
    throw ParseError(source, line_no, e.what());
  } catch (const ValidationError& e) {
    throw ParseError(source, line_no, e.what());
  }
}

void write_records(std::ostream& out, std::span<const TrialRecord> records) {
  for (const auto& r : records) out << format_record(r) << '\n';
}

std::vector<TrialRecord> read_records(std::istream& in, const std::string& source) {
  std::vector<TrialRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, source, line_no));
  }
  if (records.empty()) throw ValidationError(source + ": results file has no records");
  return records;
}

std::vector<TrialRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_records(in, path.string());
}

ResultsAppender::ResultsAppender(std::filesystem::path path) : path_(std::move(path)) {}

void ResultsAppender::append(const TrialRecord& record) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ValidationError("cannot append to " + path_.string());
  out << format_record(record) << '\n';
}

ExperimentSession::ExperimentSession(SessionConfig config, FrictionParams base)
    : config_(std::move(config)), base_(base), schedule_(build_schedule(config_)) {
  base_.validate();
}

const TrialRecord& ExperimentSession::current_trial() const {
  if (finished()) throw ValidationError("session is finished");
  return schedule_[current_];
}

FrictionParams ExperimentSession::stimulus_params() const {
  FrictionParams p = base_;
  if (finished()) return p;
  const TrialRecord& t = schedule_[current_];
  const bool standard_on_screen = (phase_.stage == Stage::PresentStandard) ==
                                  (t.stimulus_order == StimulusOrder::StandardFirst);
  p.mu_s = standard_on_screen ? t.standard_mu_s : t.comparison_mu_s;
  return p;
}

double ExperimentSession::stroke_sign() const {
  if (finished()) return 1.0;
  return schedule_[current_].direction == Direction::LeftToRight ? 1.0 : -1.0;
}

bool ExperimentSession::apply(const TrialEvent& event) {
  if (finished()) return false;
  const Advance a = advance_trial(phase_, event, TrialRules{config_.study, base_.travel_target});
  if (!a.accepted) return false;
  phase_ = a.phase;
  return true;
}

bool ExperimentSession::on_tick(double pointer_px) {
  if (finished()) return false;
  const Stage before = phase_.stage;
  TrialDurations& d = schedule_[current_].durations;
  const double dt = base_.dt();
  if (before == Stage::PresentStandard) d.standard_s += dt;
  if (before == Stage::PresentComparison) d.comparison_s += dt;
  if (before == Stage::AwaitResponse) d.response_s += dt;
  apply(PointerTick{pointer_px});
  return phase_.stage != before;
}

bool ExperimentSession::on_choice(Choice choice) {
  if (!apply(ChoiceEvent{choice})) return false;
  schedule_[current_].choice = choice;
  finish_trial();
  return true;
}

bool ExperimentSession::on_press(Press press) {
  if (!apply(PressEvent{press})) return false;
  schedule_[current_].press_log.push_back(press);
  ratio_ = apply_adjustment(ratio_, press);
  return true;
}

bool ExperimentSession::on_confirm() {
  if (!apply(ConfirmEvent{})) return false;
  schedule_[current_].ratio = ratio_;
  finish_trial();
  return true;
}

void ExperimentSession::resume(std::span<const TrialRecord> done) {
  if (current_ != 0 || phase_.stage != Stage::PresentStandard || phase_.travel_px != 0.0) {
    throw ValidationError("resume is only possible before the first tick");
  }
  for (const TrialRecord& r : done) {
    if (finished()) throw ValidationError("more logged trials than scheduled");
    const TrialRecord& expect = schedule_[current_];
    if (!r.done || r.trial_index != expect.trial_index ||
        r.participant_index != expect.participant_index || r.study != expect.study ||
        r.comparison_mu_s != expect.comparison_mu_s || r.stimulus_order != expect.stimulus_order) {
      throw ValidationError(fmt::format("logged trial {} does not match the schedule", r.trial_index));
    }
    schedule_[current_] = r;
    completed_.push_back(r);
    ++current_;
  }
}

void ExperimentSession::finish_trial() {
  TrialRecord& t = schedule_[current_];
  t.done = true;
  completed_.push_back(t);
  ++current_;
  phase_ = TrialPhase{};
  ratio_ = Ratio{};
}

}  // namespace stickslip
