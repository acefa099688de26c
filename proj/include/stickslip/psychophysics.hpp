#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stickslip/config.hpp"
#include "stickslip/friction.hpp"

namespace stickslip {

enum class Study : std::uint8_t { Jnd, Magnitude };
enum class Direction : std::uint8_t { LeftToRight, RightToLeft };
enum class DirectionPolicy : std::uint8_t { LeftToRight, RightToLeft, AlternateTrial, AlternateParticipant };
enum class StimulusOrder : std::uint8_t { StandardFirst, ComparisonFirst };
enum class Choice : std::uint8_t { Standard, Comparison };

// Adjustment buttons; the underlying value is the increment in hundredths.
enum class Press : std::int8_t {
  Decrease = -10,
  SlightDecrease = -5,
  SlightestDecrease = -1,
  SlightestIncrease = 1,
  SlightIncrease = 5,
  Increase = 10,
};

inline constexpr Press kAllPresses[] = {Press::Decrease,          Press::SlightDecrease,
                                        Press::SlightestDecrease, Press::SlightestIncrease,
                                        Press::SlightIncrease,    Press::Increase};

std::string_view to_string(Study study);
std::string_view to_string(Direction direction);
std::string_view to_string(DirectionPolicy policy);
std::string_view to_string(StimulusOrder order);
std::string_view to_string(Choice choice);
std::string_view label(Press press);  // "slight increase (+0.05)"
Study parse_study(std::string_view text);
Direction parse_direction(std::string_view text);
DirectionPolicy parse_direction_policy(std::string_view text);
StimulusOrder parse_stimulus_order(std::string_view text);
Choice parse_choice(std::string_view text);
Press press_from_hundredths(int hundredths);

constexpr int hundredths(Press press) { return static_cast<int>(press); }

// Intensity ratio held as an exact count of hundredths.
struct Ratio {
  std::int64_t hundredths = 100;

  double value() const { return static_cast<double>(hundredths) / 100.0; }
  static Ratio from_value(double value);

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

Ratio apply_adjustment(Ratio ratio, Press press);
double apply_adjustment(double ratio, Press press);

struct SessionConfig {
  Study study = Study::Jnd;
  double standard_mu_s = 0.0;
  std::vector<double> comparison_levels;
  int reps = 1;
  bool with_string = true;
  std::uint64_t seed = 1;
  int participant_index = 0;
  DirectionPolicy direction = DirectionPolicy::LeftToRight;

  // Throws InvalidParameter.
  void validate() const;

  // Forced choice against mu_s = 0 at six comparison levels, 10 reps each.
  static SessionConfig jnd_study(bool with_string = true);
  // Ratio adjustment against mu_s = 0.7 at seven levels, 5 reps each.
  static SessionConfig magnitude_study();
};

SessionConfig session_config_from(const KeyValueFile& file);
SessionConfig load_session_config(const std::filesystem::path& path);
void write_session_config(std::ostream& out, const SessionConfig& config);

struct TrialDurations {
  double standard_s = 0.0;
  double comparison_s = 0.0;
  double response_s = 0.0;
};

struct TrialRecord {
  int trial_index = 0;
  int participant_index = 0;
  Study study = Study::Jnd;
  double standard_mu_s = 0.0;
  double comparison_mu_s = 0.0;
  StimulusOrder stimulus_order = StimulusOrder::StandardFirst;
  Direction direction = Direction::LeftToRight;
  bool with_string = true;
  std::optional<Choice> choice;  // forced-choice answer
  std::vector<Press> press_log;  // adjustment history
  std::optional<Ratio> ratio;    // final adjusted ratio
  TrialDurations durations;
  bool done = false;

  // 1.0 plus the exact sum of logged presses.
  Ratio ratio_from_presses() const;
};

// Per-participant shuffle seed.
std::uint64_t derive_seed(std::uint64_t seed, int participant_index);

// |levels| * reps stubs in a seeded uniform shuffle; reproducible per
// (seed, participant_index).
std::vector<TrialRecord> build_schedule(const SessionConfig& config);

enum class Stage : std::uint8_t { PresentStandard, PresentComparison, AwaitResponse, Done };
std::string_view to_string(Stage stage);

struct TrialPhase {
  Stage stage = Stage::PresentStandard;
  double travel_px = 0.0;  // displayed-pointer distance from the stimulus start
  double start_px = 0.0;
};

struct PointerTick {
  double pointer_px = 0.0;
};
struct ChoiceEvent {
  Choice choice;
};
struct PressEvent {
  Press press;
};
struct ConfirmEvent {};

using TrialEvent = std::variant<PointerTick, ChoiceEvent, PressEvent, ConfirmEvent>;

struct TrialRules {
  Study study = Study::Jnd;
  double travel_target = 70.0;
};

struct Advance {
  TrialPhase phase;
  bool accepted = true;
};

// Presentation stages complete once travel reaches the target. Choices are
// legal only in AwaitResponse of a forced-choice trial; presses and confirm
// only in AwaitResponse of an adjustment trial. Rejected events leave the
// phase unchanged.
Advance advance_trial(const TrialPhase& phase, const TrialEvent& event, const TrialRules& rules);

struct LevelTally {
  double level = 0.0;
  int trials = 0;
  int comparison = 0;
  double proportion = 0.0;
};

struct JndTally {
  std::vector<LevelTally> levels;  // ascending by level
  std::vector<std::string> warnings;
};

// Proportion of completed forced-choice trials answered "comparison" per
// level. Levels in `expected_levels` with no trials are dropped with a warning.
JndTally tally_jnd_proportions(std::span<const TrialRecord> records,
                               std::span<const double> expected_levels = {});

struct MagnitudeMeans {
  std::vector<double> levels;
  std::vector<double> mean_ratio;
};

MagnitudeMeans mean_ratios(std::span<const TrialRecord> records);

// Results files hold one JSON object per line, one line per trial.
std::string format_record(const TrialRecord& record);
TrialRecord parse_record(std::string_view line, const std::string& source = "<record>",
                         std::size_t line_no = 1);
void write_records(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_records(std::istream& in, const std::string& source = "<stream>");
std::vector<TrialRecord> load_records(const std::filesystem::path& path);

class ResultsAppender {
 public:
  explicit ResultsAppender(std::filesystem::path path);
  void append(const TrialRecord& record);

 private:
  std::filesystem::path path_;
};

// One participant's session: schedule, current trial phase and the simulator
// parameters for whichever stimulus is on screen.
class ExperimentSession {
 public:
  ExperimentSession(SessionConfig config, FrictionParams base);

  const SessionConfig& config() const { return config_; }
  bool finished() const { return current_ >= schedule_.size(); }
  std::size_t trial_count() const { return schedule_.size(); }
  std::size_t current_index() const { return current_; }
  const TrialRecord& current_trial() const;
  const TrialPhase& phase() const { return phase_; }
  Ratio current_ratio() const { return ratio_; }

  // Parameters for the stimulus currently presented (or last presented).
  FrictionParams stimulus_params() const;
  // Signed direction of the requested stroke, +1 left-to-right.
  double stroke_sign() const;

  // Each call is one simulator tick. Returns true when the stage changed, in
  // which case the caller resets pointer and simulator to the centre.
  bool on_tick(double pointer_px);
  bool on_choice(Choice choice);
  bool on_press(Press press);
  bool on_confirm();

  const std::vector<TrialRecord>& completed() const { return completed_; }

  // Replays trials already logged for this participant (for example after a
  // page reload) so the session continues at the first trial not in `done`.
  // Throws ValidationError if the records do not match the schedule prefix.
  void resume(std::span<const TrialRecord> done);

 private:
  bool apply(const TrialEvent& event);
  void finish_trial();

  SessionConfig config_;
  FrictionParams base_;
  std::vector<TrialRecord> schedule_;
  std::vector<TrialRecord> completed_;
  std::size_t current_ = 0;
  TrialPhase phase_;
  Ratio ratio_;
};

}  // namespace stickslip
