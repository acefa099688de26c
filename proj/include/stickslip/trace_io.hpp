#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stickslip/friction.hpp"

namespace stickslip {

// Samples q(t) = velocity * t on the 1/sim_rate grid, contact throughout.
std::vector<InputSample> synth_constant_velocity(double velocity, double duration, double sim_rate);

// Input traces are JSON lines: {"t_ms": <int>, "x_px": <number>, "contact": 0|1}.
// Timestamps are stored in whole milliseconds.
std::vector<InputSample> read_input_trace(std::istream& in, const std::string& source = "<stream>");
std::vector<InputSample> load_input_trace(const std::filesystem::path& path);
void write_input_trace(std::ostream& out, const std::vector<InputSample>& samples);
void save_input_trace(const std::vector<InputSample>& samples, const std::filesystem::path& path);

// Trajectories are CSV with header t,q,p,phase,spring_force,string_len at
// six decimal places. Loaded rows carry v = 0 for stick and NaN for slip.
void write_trajectory(std::ostream& out, const TrajectoryTrace& trace);
void save_trajectory(const TrajectoryTrace& trace, const std::filesystem::path& path);
TrajectoryTrace read_trajectory(std::istream& in, const std::string& source = "<stream>");
TrajectoryTrace load_trajectory(const std::filesystem::path& path);

}  // namespace stickslip
