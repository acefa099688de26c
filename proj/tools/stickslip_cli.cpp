#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "stickslip/analysis.hpp"
#include "stickslip/config.hpp"
#include "stickslip/errors.hpp"
#include "stickslip/friction.hpp"
#include "stickslip/psychophysics.hpp"
#include "stickslip/report.hpp"
#include "stickslip/robot.hpp"
#include "stickslip/trace_io.hpp"
#include "stickslip/ui_bridge.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace stickslip;

namespace {

constexpr int kUsageError = 2;

struct Common {
  std::string params_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> study;
  std::optional<std::string> with_string;
};

void add_common(CLI::App* cmd, Common& c, bool session_flags) {
  cmd->add_option("--params", c.params_path, "friction parameter file (key = value)");
  cmd->add_option("--out", c.out, "output path")->required();
  if (session_flags) {
    cmd->add_option("--seed", c.seed, "schedule seed");
    cmd->add_option("--study", c.study, "1 = forced choice JND, 2 = magnitude")->check(CLI::Range(1, 2));
    cmd->add_option("--with-string", c.with_string, "show the virtual string (true/false)");
  }
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ValidationError(fmt::format("{} not found: {}", what, path));
}

FrictionParams load_params(const Common& c) {
  if (c.params_path.empty()) return FrictionParams{};
  require_file(c.params_path, "params file");
  return load_friction_params(c.params_path);
}

SessionConfig load_session(const Common& c, const std::string& config_path) {
  SessionConfig s;
  if (!config_path.empty()) {
    require_file(config_path, "session config");
    s = load_session_config(config_path);
    if (c.study && (*c.study == 1) != (s.study == Study::Jnd)) {
      throw ValidationError("--study disagrees with the session config");
    }
  } else {
    s = c.study.value_or(1) == 2 ? SessionConfig::magnitude_study() : SessionConfig::jnd_study();
  }
  if (c.seed) s.seed = *c.seed;
  if (c.with_string) s.with_string = parse_bool(*c.with_string);
  return s;
}

void write_manifest(const std::string& out, const std::string& subcommand, ordered_json details,
                    const std::vector<std::string>& argv) {
  ordered_json m;
  m["subcommand"] = subcommand;
  m["argv"] = argv;
  for (auto& [key, value] : details.items()) m[key] = value;
  std::ofstream f(out + ".manifest.json");
  if (!f) throw ValidationError("cannot write manifest for " + out);
  f << m.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  return f;
}

bool is_csv(const std::string& path) { return fs::path(path).extension() == ".csv"; }

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Stick-slip friction simulator and psychophysics pipeline"};
  app.require_subcommand(1);

  // simulate
  Common sim;
  std::string sim_trace;
  std::optional<double> sim_mu_s;
  auto* simulate = app.add_subcommand("simulate", "run the friction model over an input trace");
  add_common(simulate, sim, false);
  simulate->add_option("--trace", sim_trace, "input trace (JSON lines)")->required();
  simulate->add_option("--mu-s", sim_mu_s, "override the static friction coefficient");

  // synth
  Common syn;
  double syn_velocity = 100.0;
  double syn_duration = 1.0;
  std::optional<double> syn_rate;
  auto* synth = app.add_subcommand("synth", "write a constant-velocity input trace");
  add_common(synth, syn, false);
  synth->add_option("--velocity", syn_velocity, "px/s")->capture_default_str();
  synth->add_option("--duration", syn_duration, "s")->capture_default_str();
  synth->add_option("--rate", syn_rate, "samples per second (default: sim_rate)");

  // schedule
  Common sch;
  std::string sch_config;
  int sch_participant = 0;
  auto* schedule = app.add_subcommand("schedule", "write the trial schedule for one participant");
  add_common(schedule, sch, true);
  schedule->add_option("--config", sch_config, "session config file");
  schedule->add_option("--participant", sch_participant, "participant index")->capture_default_str();

  // robot-session
  Common rob;
  std::string rob_config;
  std::string rob_behavior;
  int rob_participants = 1;
  std::optional<int> rob_reps;
  double rob_speed = RobotOptions{}.drag_speed;
  auto* robot = app.add_subcommand("robot-session", "run full sessions with a synthetic participant");
  add_common(robot, rob, true);
  robot->add_option("--config", rob_config, "session config file");
  robot->add_option("--behavior", rob_behavior, "ideal-logistic:A=..,B=.. | constant[:choice|ratio] | power-law:k=..,beta=..,noise=..")
      ->required();
  robot->add_option("--participants", rob_participants, "number of participants")->capture_default_str();
  robot->add_option("--reps", rob_reps, "override repetitions per level");
  robot->add_option("--drag-speed", rob_speed, "px/s")->capture_default_str();

  // fit
  Common fitc;
  std::string fit_kind;
  std::string fit_in;
  std::string fit_curve;
  auto* fit = app.add_subcommand("fit", "fit one model to a results file or CSV");
  add_common(fit, fitc, false);
  fit->add_option("--kind", fit_kind, "psychometric | power | anova | tukey")
      ->required()
      ->check(CLI::IsMember({"psychometric", "power", "anova", "tukey"}));
  fit->add_option("--in", fit_in, "results file (JSON lines) or CSV")->required();
  fit->add_option("--curve", fit_curve, "write the fitted curve at 100 points (psychometric, power)");

  // report
  Common rep;
  std::string rep_in;
  auto* report = app.add_subcommand("report", "summarise a results file");
  add_common(report, rep, false);
  report->add_option("--in", rep_in, "results file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) {
      require_file(sim_trace, "trace file");
      FrictionParams params = load_params(sim);
      if (sim_mu_s) params.mu_s = *sim_mu_s;
      params.validate();
      const auto samples = load_input_trace(sim_trace);
      const TrajectoryTrace trace = simulate_trace(samples, params);
      save_trajectory(trace, sim.out);
      const auto brk = first_breakaway_elongation(trace);
      ordered_json summary;
      summary["rows"] = trace.rows.size();
      summary["breakaway_elongation_expected"] = params.breakaway_elongation();
      summary["first_breakaway_elongation"] = brk ? ordered_json(*brk) : ordered_json(nullptr);
      summary["sustained_stick_rows"] = sustained_stick_rows(trace);
      summary["phase_runs"] = phase_runs(trace).size();
      std::cout << summary.dump() << '\n';
      write_manifest(sim.out, "simulate",
                     {{"inputs", {sim_trace}}, {"outputs", {sim.out}}, {"params", to_json(params)}, {"summary", summary}},
                     args);
    } else if (*synth) {
      const FrictionParams params = load_params(syn);
      const double rate = syn_rate.value_or(params.sim_rate);
      const auto samples = synth_constant_velocity(syn_velocity, syn_duration, rate);
      save_input_trace(samples, syn.out);
      std::cout << fmt::format("{} samples, final x = {} px\n", samples.size(), samples.back().q);
      write_manifest(syn.out, "synth",
                     {{"outputs", {syn.out}},
                      {"velocity", syn_velocity},
                      {"duration", syn_duration},
                      {"rate", rate},
                      {"samples", samples.size()}},
                     args);
    } else if (*schedule) {
      SessionConfig config = load_session(sch, sch_config);
      config.participant_index = sch_participant;
      config.validate();
      const auto stubs = build_schedule(config);
      auto out = open_out(sch.out);
      write_records(out, stubs);
      std::cout << fmt::format("{} trials\n", stubs.size());
      write_manifest(sch.out, "schedule",
                     {{"inputs", sch_config.empty() ? ordered_json::array() : ordered_json{sch_config}},
                      {"outputs", {sch.out}},
                      {"session", to_json(config)}},
                     args);
    } else if (*robot) {
      if (rob_participants < 1) throw InvalidParameter("--participants must be >= 1");
      const BehaviorModel behavior = parse_behavior(rob_behavior);
      const FrictionParams params = load_params(rob);
      SessionConfig config = load_session(rob, rob_config);
      if (rob_reps) config.reps = *rob_reps;
      config.validate();
      RobotOptions options;
      options.drag_speed = rob_speed;

      auto out = open_out(rob.out);
      std::size_t trials = 0;
      for (int p = 0; p < rob_participants; ++p) {
        SessionConfig c = config;
        c.participant_index = config.participant_index + p;
        const auto records = run_robot_session(c, params, behavior, options);
        write_records(out, records);
        trials += records.size();
      }
      std::cout << fmt::format("{} trials from {} participant(s)\n", trials, rob_participants);
      write_manifest(rob.out, "robot-session",
                     {{"inputs", rob_config.empty() ? ordered_json::array() : ordered_json{rob_config}},
                      {"outputs", {rob.out}},
                      {"behavior", describe(behavior)},
                      {"participants", rob_participants},
                      {"drag_speed", rob_speed},
                      {"params", to_json(params)},
                      {"session", to_json(config)}},
                     args);
    } else if (*fit) {
      require_file(fit_in, "input file");
      ordered_json result;
      std::vector<std::string> outputs{fitc.out};
      if (fit_kind == "psychometric" || fit_kind == "power") {
        std::vector<LevelPoint> points;
        if (is_csv(fit_in)) {
          points = load_points_csv(fit_in);
        } else {
          const auto records = load_records(fit_in);
          points = fit_kind == "psychometric" ? jnd_points(records) : magnitude_points(records);
        }
        result = fit_kind == "psychometric" ? psychometric_report(points) : power_report(points);
        if (!fit_curve.empty()) {
          double lo = points.front().level, hi = points.front().level;
          for (const auto& pt : points) {
            lo = std::min(lo, pt.level);
            hi = std::max(hi, pt.level);
          }
          auto curve = open_out(fit_curve);
          if (fit_kind == "psychometric") {
            write_psychometric_curve(curve, fit_psychometric(points), lo, hi);
          } else {
            write_power_curve(curve, fit_power_law(points), lo, hi);
          }
          outputs.push_back(fit_curve);
        }
      } else {
        const RepeatedMeasures data = is_csv(fit_in) ? load_matrix_csv(fit_in) : magnitude_matrix(load_records(fit_in));
        result = anova_report(data, fit_kind == "tukey");
      }
      auto out = open_out(fitc.out);
      out << result.dump(2) << '\n';
      std::cout << result.dump() << '\n';
      write_manifest(fitc.out, "fit", {{"kind", fit_kind}, {"inputs", {fit_in}}, {"outputs", outputs}}, args);
    } else if (*report) {
      require_file(rep_in, "results file");
      const ordered_json result = results_report(load_records(rep_in));
      auto out = open_out(rep.out);
      out << result.dump(2) << '\n';
      std::cout << result.dump() << '\n';
      write_manifest(rep.out, "report", {{"inputs", {rep_in}}, {"outputs", {rep.out}}}, args);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
