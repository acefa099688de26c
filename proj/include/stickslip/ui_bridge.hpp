#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickslip/friction.hpp"
#include "stickslip/pointer.hpp"
#include "stickslip/psychophysics.hpp"

namespace stickslip {

inline constexpr int kUiProtocolVersion = 1;

enum class UiMessageKind : std::uint8_t { Configure, InputBatch, DisplayFrame, TrialPrompt, Response, SessionDone };

std::string_view to_string(UiMessageKind kind);

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wire form: {"version": 1, "kind": "display_frame", "payload": {...}}.
struct UiMessage {
  UiMessageKind kind = UiMessageKind::Configure;
  nlohmann::json payload = nlohmann::json::object();
  int version = kUiProtocolVersion;
};

// Throws ProtocolError on malformed JSON, wrong version or unknown kind.
UiMessage parse_ui_message(std::string_view text);
std::string serialize_ui_message(const UiMessage& message);

nlohmann::json to_json(const FrictionParams& params);
FrictionParams friction_params_from_json(const nlohmann::json& j, FrictionParams base = {});
nlohmann::json to_json(const SessionConfig& config);
SessionConfig session_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DisplayState& display);

// In-process core behind the browser front end. Inbound: Configure,
// InputBatch, Response. Outbound: DisplayFrame (one per simulator tick, in
// tick order), TrialPrompt, SessionDone.
//
// Ticks sit on the 1/sim_rate grid anchored at the first input sample and are
// emitted once an input sample at or past the tick time has arrived, so the
// frame stream for a recording equals simulate_trace over the same samples.
class UiBridge {
 public:
  std::vector<UiMessage> handle(const UiMessage& message);
  // JSON array of outbound messages.
  std::string handle_json(std::string_view text);

  std::uint64_t ticks() const { return tick_; }
  bool experiment_running() const { return session_.has_value() && !session_->finished(); }

 private:
  std::vector<UiMessage> configure(const nlohmann::json& payload);
  std::vector<UiMessage> input_batch(const nlohmann::json& payload);
  std::vector<UiMessage> response(const nlohmann::json& payload);
  UiMessage frame(const SimState& state) const;
  UiMessage prompt(bool accepted) const;
  UiMessage session_done() const;
  FrictionParams active_params() const;
  void recentre(double input_q);

  bool configured_ = false;
  FrictionParams params_;
  bool with_string_ = true;
  std::optional<ExperimentSession> session_;
  std::vector<InputSample> samples_;
  SimState state_;
  std::uint64_t tick_ = 0;
  double input_anchor_ = 0.0;
  double t0_ = 0.0;
};

}  // namespace stickslip
