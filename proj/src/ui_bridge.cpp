#include "stickslip/ui_bridge.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <sstream>

#include "stickslip/errors.hpp"
#include "stickslip/ui_bridge_c.h"

namespace stickslip {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kKindNames = {"configure",    "input_batch", "display_frame",
                                                        "trial_prompt", "response",    "session_done"};

UiMessageKind parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<UiMessageKind>(i);
  }
  throw ProtocolError(fmt::format("unknown message kind '{}'", name));
}

UiMessage make(UiMessageKind kind, json payload) { return UiMessage{kind, std::move(payload), kUiProtocolVersion}; }

template <class T>
T field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ProtocolError(fmt::format("missing or mistyped field '{}'", key));
  }
}

template <class T>
void read_optional(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = field<T>(j, key);
}

json response_button(std::string_view label, json response) {
  return json{{"label", label}, {"response", std::move(response)}};
}

}  // namespace

std::string_view to_string(UiMessageKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

UiMessage parse_ui_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  const int version = field<int>(j, "version");
  if (version != kUiProtocolVersion) {
    throw ProtocolError(fmt::format("unsupported protocol version {} (expected {})", version, kUiProtocolVersion));
  }
  UiMessage m;
  m.version = version;
  m.kind = parse_kind(field<std::string>(j, "kind"));
  m.payload = j.contains("payload") ? j.at("payload") : json::object();
  if (!m.payload.is_object()) throw ProtocolError("payload must be an object");
  return m;
}

std::string serialize_ui_message(const UiMessage& message) {
  return json{{"version", message.version}, {"kind", to_string(message.kind)}, {"payload", message.payload}}.dump();
}

json to_json(const FrictionParams& p) {
  return json{{"mu_s", p.mu_s},
              {"mu_k", p.mu_k},
              {"k", p.k},
              {"c", p.c},
              {"g", p.g},
              {"string_gain", p.string_gain},
              {"sim_rate", p.sim_rate},
              {"travel_target", p.travel_target}};
}

FrictionParams friction_params_from_json(const json& j, FrictionParams p) {
  if (!j.is_object()) throw ProtocolError("params must be an object");
  for (const auto& [key, value] : j.items()) {
    double* slot = key == "mu_s"            ? &p.mu_s
                   : key == "mu_k"          ? &p.mu_k
                   : key == "k"             ? &p.k
                   : key == "c"             ? &p.c
                   : key == "g"             ? &p.g
                   : key == "string_gain"   ? &p.string_gain
                   : key == "sim_rate"      ? &p.sim_rate
                   : key == "travel_target" ? &p.travel_target
                                            : nullptr;
    if (slot == nullptr) throw ProtocolError(fmt::format("unknown parameter '{}'", key));
    if (!value.is_number()) throw ProtocolError(fmt::format("parameter '{}' must be a number", key));
    *slot = value.get<double>();
  }
  p.validate();
  return p;
}

json to_json(const SessionConfig& c) {
  return json{{"study", to_string(c.study)},
              {"standard_mu_s", c.standard_mu_s},
              {"comparison_levels", c.comparison_levels},
              {"reps", c.reps},
              {"with_string", c.with_string},
              {"seed", c.seed},
              {"participant_index", c.participant_index},
              {"direction", to_string(c.direction)}};
}

SessionConfig session_config_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("session must be an object");
  const Study study = parse_study(j.contains("study") ? field<std::string>(j, "study") : std::string("jnd"));
  SessionConfig c = study == Study::Jnd ? SessionConfig::jnd_study() : SessionConfig::magnitude_study();
  for (const auto& [key, value] : j.items()) {
    if (key == "study") continue;
    if (key == "standard_mu_s") c.standard_mu_s = field<double>(j, "standard_mu_s");
    else if (key == "comparison_levels") c.comparison_levels = field<std::vector<double>>(j, "comparison_levels");
    else if (key == "reps") c.reps = field<int>(j, "reps");
    else if (key == "with_string") c.with_string = field<bool>(j, "with_string");
    else if (key == "seed") c.seed = field<std::uint64_t>(j, "seed");
    else if (key == "participant_index") c.participant_index = field<int>(j, "participant_index");
    else if (key == "direction") c.direction = parse_direction_policy(field<std::string>(j, "direction"));
    else throw ProtocolError(fmt::format("unknown session field '{}'", key));
  }
  c.validate();
  return c;
}

json to_json(const DisplayState& d) {
  return json{{"pointer_px", d.pointer_px},
              {"string_len", d.string_len},
              {"string_from", d.string_from},
              {"string_to", d.string_to},
              {"string_visible", d.string_visible}};
}

std::string UiBridge::handle_json(std::string_view text) {
  json out = json::array();
  for (const UiMessage& m : handle(parse_ui_message(text))) {
    out.push_back(json{{"version", m.version}, {"kind", to_string(m.kind)}, {"payload", m.payload}});
  }
  return out.dump();
}

std::vector<UiMessage> UiBridge::handle(const UiMessage& message) {
  if (message.version != kUiProtocolVersion) throw ProtocolError("unsupported protocol version");
  switch (message.kind) {
    case UiMessageKind::Configure:
      return configure(message.payload);
    case UiMessageKind::InputBatch:
      return input_batch(message.payload);
    case UiMessageKind::Response:
      return response(message.payload);
    default:
      throw ProtocolError(fmt::format("'{}' is not an inbound message", to_string(message.kind)));
  }
}

std::vector<UiMessage> UiBridge::configure(const json& payload) {
  FrictionParams params;
  if (payload.contains("params")) params = friction_params_from_json(payload.at("params"));
  params.validate();
  bool with_string = true;
  read_optional(payload, "with_string", with_string);

  std::optional<ExperimentSession> session;
  if (payload.contains("session")) {
    SessionConfig config = session_config_from_json(payload.at("session"));
    with_string = config.with_string;
    session.emplace(config, params);
    if (payload.contains("resume")) {
      std::istringstream in(field<std::string>(payload, "resume"));
      const std::vector<TrialRecord> done = read_records(in, "<resume>");
      session->resume(done);
    }
  }

  params_ = params;
  with_string_ = with_string;
  session_ = std::move(session);
  samples_.clear();
  tick_ = 0;
  input_anchor_ = 0.0;
  state_ = SimState::at_rest(0.0);
  configured_ = true;

  std::vector<UiMessage> out;
  if (session_) out.push_back(session_->finished() ? session_done() : prompt(true));
  return out;
}

FrictionParams UiBridge::active_params() const {
  return session_ ? session_->stimulus_params() : params_;
}

void UiBridge::recentre(double input_q) {
  input_anchor_ = input_q;
  state_ = SimState::at_rest(0.0, state_.t);
}

std::vector<UiMessage> UiBridge::input_batch(const json& payload) {
  if (!configured_) throw ProtocolError("input before configure");
  const json& list = payload.contains("samples") ? payload.at("samples") : json::array();
  if (!list.is_array()) throw ProtocolError("samples must be an array");

  std::vector<InputSample> incoming;
  incoming.reserve(list.size());
  for (const json& s : list) {
    InputSample sample;
    // Same field names as the recorded-trace format.
    sample.t = field<double>(s, "t_ms") / 1000.0;
    sample.q = field<double>(s, "x_px");
    if (s.contains("contact")) {
      const json& c = s.at("contact");
      sample.contact = c.is_boolean() ? c.get<bool>() : field<int>(s, "contact") != 0;
    }
    const double prev = !incoming.empty() ? incoming.back().t : !samples_.empty() ? samples_.back().t : -INFINITY;
    if (!(sample.t > prev)) {
      throw ValidationError(fmt::format("input timestamps must increase (t_ms {})", field<double>(s, "t_ms")));
    }
    if (!std::isfinite(sample.q)) throw InputError("non-finite input position");
    incoming.push_back(sample);
  }

  std::vector<UiMessage> out;
  if (incoming.empty()) return out;

  const bool first = samples_.empty() && tick_ == 0;
  samples_.insert(samples_.end(), incoming.begin(), incoming.end());
  const double rate = params_.sim_rate;

  if (first) {
    t0_ = samples_.front().t;
    if (session_) {
      input_anchor_ = samples_.front().q;
      state_ = SimState::at_rest(0.0, t0_);
    } else {
      state_ = SimState::at_rest(samples_.front().q, t0_);
    }
    state_.contact = samples_.front().contact;
    out.push_back(frame(state_));
  }

  const auto available = static_cast<std::uint64_t>(std::floor((samples_.back().t - t0_) * rate + 1e-9));
  InputResampler resampler(samples_);
  while (tick_ < available) {
    const std::uint64_t n = tick_ + 1;
    const double t = t0_ + static_cast<double>(n) / rate;
    InputSample in = resampler.at(t);
    in.q -= input_anchor_;
    const FrictionParams params = active_params();
    state_ = step(state_, params, in);
    state_.t = t;
    tick_ = n;
    out.push_back(frame(state_));

    if (session_ && !session_->finished()) {
      if (session_->on_tick(state_.p)) {
        recentre(in.q + input_anchor_);
        out.push_back(prompt(true));
      }
    }
  }

  // Keep the sample bracketing the current tick and everything after it.
  const double t_now = t0_ + static_cast<double>(tick_) / rate;
  std::size_t keep = 0;
  while (keep + 1 < samples_.size() && samples_[keep + 1].t <= t_now) ++keep;
  samples_.erase(samples_.begin(), samples_.begin() + static_cast<std::ptrdiff_t>(keep));
  return out;
}

std::vector<UiMessage> UiBridge::response(const json& payload) {
  if (!session_) throw ProtocolError("response outside an experiment session");
  if (session_->finished()) throw ProtocolError("session already finished");

  const std::size_t before = session_->current_index();
  bool accepted = false;
  if (payload.contains("choice")) {
    accepted = session_->on_choice(parse_choice(field<std::string>(payload, "choice")));
  } else if (payload.contains("press")) {
    accepted = session_->on_press(press_from_hundredths(field<int>(payload, "press")));
  } else if (payload.contains("confirm")) {
    accepted = session_->on_confirm();
  } else {
    throw ProtocolError("response needs 'choice', 'press' or 'confirm'");
  }

  std::vector<UiMessage> out;
  if (session_->current_index() != before) {
    const double input_q = samples_.empty() ? input_anchor_ : samples_.back().q;
    recentre(input_q);
  }
  out.push_back(session_->finished() ? session_done() : prompt(accepted));
  return out;
}

UiMessage UiBridge::frame(const SimState& state) const {
  const FrictionParams params = active_params();
  const TrajectoryRow row = make_row(state, params);
  json payload{{"tick", tick_},
               {"t", state.t},
               {"phase", to_string(state.phase)},
               {"p", state.p},
               {"q", state.q},
               {"v", state.v},
               {"spring_force", row.spring_force},
               {"display", to_json(compose_display(state, params, with_string_))},
               {"trial", nullptr}};
  if (session_ && !session_->finished()) {
    const TrialPhase& ph = session_->phase();
    payload["trial"] = json{{"trial_index", session_->current_trial().trial_index},
                            {"stage", to_string(ph.stage)},
                            {"travel_px", ph.travel_px}};
  }
  return make(UiMessageKind::DisplayFrame, std::move(payload));
}

UiMessage UiBridge::prompt(bool accepted) const {
  const TrialRecord& trial = session_->current_trial();
  const Stage stage = session_->phase().stage;
  json buttons = json::array();
  if (stage == Stage::AwaitResponse) {
    if (trial.study == Study::Jnd) {
      for (Choice c : {Choice::Standard, Choice::Comparison}) {
        buttons.push_back(response_button(to_string(c), json{{"choice", to_string(c)}}));
      }
    } else {
      for (Press p : kAllPresses) buttons.push_back(response_button(label(p), json{{"press", hundredths(p)}}));
      buttons.push_back(response_button("confirm", json{{"confirm", true}}));
    }
  }
  json payload{{"accepted", accepted},
               {"position", session_->current_index()},
               {"trial_count", session_->trial_count()},
               {"trial_index", trial.trial_index},
               {"study", to_string(trial.study)},
               {"stage", to_string(stage)},
               {"direction", to_string(trial.direction)},
               {"stroke_sign", session_->stroke_sign()},
               {"travel_target", params_.travel_target},
               {"ratio", session_->current_ratio().value()},
               {"buttons", std::move(buttons)}};
  return make(UiMessageKind::TrialPrompt, std::move(payload));
}

UiMessage UiBridge::session_done() const {
  std::ostringstream results;
  write_records(results, session_->completed());
  return make(UiMessageKind::SessionDone,
              json{{"trials", session_->completed().size()}, {"results", results.str()}});
}

}  // namespace stickslip

struct stickslip_bridge {
  stickslip::UiBridge bridge;
  std::string last;
};

extern "C" {

stickslip_bridge* stickslip_bridge_create(void) {
  try {
    return new stickslip_bridge{};
  } catch (...) {
    return nullptr;
  }
}

const char* stickslip_bridge_handle(stickslip_bridge* b, const char* message_json) {
  if (b == nullptr) return nullptr;
  try {
    b->last = b->bridge.handle_json(message_json == nullptr ? "" : message_json);
  } catch (const std::exception& e) {
    b->last = nlohmann::json{{"error", e.what()}}.dump();
  }
  return b->last.c_str();
}

void stickslip_bridge_destroy(stickslip_bridge* b) { delete b; }

}
