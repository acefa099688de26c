#include "stickslip/trace_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stickslip/errors.hpp"

namespace stickslip {

namespace {

constexpr const char* kTrajectoryHeader = "t,q,p,phase,spring_force,string_len";

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &used);
  } catch (const std::exception&) {
    throw ParseError(source, line, "bad number '" + field + "'");
  }
  if (used != field.size()) throw ParseError(source, line, "bad number '" + field + "'");
  return value;
}

}  // namespace

std::vector<InputSample> synth_constant_velocity(double velocity, double duration, double sim_rate) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidParameter("duration must be > 0");
  if (!(sim_rate > 0.0) || !std::isfinite(sim_rate)) throw InvalidParameter("sim_rate must be > 0");
  if (!std::isfinite(velocity)) throw InvalidParameter("velocity must be finite");

  const auto ticks = static_cast<std::size_t>(std::llround(duration * sim_rate));
  std::vector<InputSample> samples;
  samples.reserve(ticks + 1);
  for (std::size_t n = 0; n <= ticks; ++n) {
    const double t = static_cast<double>(n) / sim_rate;
    samples.push_back(InputSample{t, velocity * t, true});
  }
  return samples;
}

std::vector<InputSample> read_input_trace(std::istream& in, const std::string& source) {
  std::vector<InputSample> samples;
  std::string line;
  std::size_t line_no = 0;
  double last_t = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!record.is_object() || !record.contains("t_ms") || !record.contains("x_px") ||
        !record.contains("contact")) {
      throw ParseError(source, line_no, "expected {t_ms, x_px, contact}");
    }
    const auto& t_ms = record["t_ms"];
    const auto& x_px = record["x_px"];
    const auto& contact = record["contact"];
    if (!t_ms.is_number_integer()) throw ParseError(source, line_no, "t_ms must be an integer");
    if (!x_px.is_number()) throw ParseError(source, line_no, "x_px must be a number");
    if (!contact.is_number_integer() || (contact.get<int>() != 0 && contact.get<int>() != 1)) {
      throw ParseError(source, line_no, "contact must be 0 or 1");
    }
    InputSample sample{static_cast<double>(t_ms.get<std::int64_t>()) / 1000.0, x_px.get<double>(),
                       contact.get<int>() == 1};
    if (!std::isfinite(sample.q)) throw ParseError(source, line_no, "x_px is not finite");
    if (!(sample.t > last_t)) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": timestamp not strictly increasing");
    }
    last_t = sample.t;
    samples.push_back(sample);
  }
  if (samples.empty()) throw ValidationError(source + ": input trace is empty");
  return samples;
}

std::vector<InputSample> load_input_trace(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_input_trace(in, path.string());
}

void write_input_trace(std::ostream& out, const std::vector<InputSample>& samples) {
  for (const auto& s : samples) {
    nlohmann::json record;
    record["t_ms"] = static_cast<std::int64_t>(std::llround(s.t * 1000.0));
    record["x_px"] = s.q;
    record["contact"] = s.contact ? 1 : 0;
    out << record.dump() << '\n';
  }
}

void save_input_trace(const std::vector<InputSample>& samples, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_input_trace(out, samples);
}

void write_trajectory(std::ostream& out, const TrajectoryTrace& trace) {
  out << kTrajectoryHeader << '\n';
  for (const auto& row : trace.rows) {
    out << fmt::format("{:.6f},{:.6f},{:.6f},{},{:.6f},{:.6f}\n", row.t, row.q, row.p,
                       to_string(row.phase), row.spring_force, row.string_len);
  }
}

void save_trajectory(const TrajectoryTrace& trace, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_trajectory(out, trace);
}

TrajectoryTrace read_trajectory(std::istream& in, const std::string& source) {
  TrajectoryTrace trace;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ValidationError(source + ": trajectory is empty");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTrajectoryHeader) throw ParseError(source, line_no, "unexpected header");

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    if (line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw ParseError(source, line_no, "expected 6 fields");

    TrajectoryRow row;
    row.t = parse_number(fields[0], source, line_no);
    row.q = parse_number(fields[1], source, line_no);
    row.p = parse_number(fields[2], source, line_no);
    try {
      row.phase = parse_phase(fields[3]);
    } catch (const InvalidParameter& e) {
      throw ParseError(source, line_no, e.what());
    }
    row.spring_force = parse_number(fields[4], source, line_no);
    row.string_len = parse_number(fields[5], source, line_no);
    row.v = row.phase == Phase::Stick ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    if (!trace.rows.empty() && !(row.t > trace.rows.back().t)) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": timestamp not strictly increasing");
    }
    trace.rows.push_back(row);
  }
  if (trace.rows.empty()) throw ValidationError(source + ": trajectory has no rows");
  return trace;
}

TrajectoryTrace load_trajectory(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_trajectory(in, path.string());
}

}  // namespace stickslip
