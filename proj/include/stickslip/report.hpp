#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stickslip/analysis.hpp"
#include "stickslip/psychophysics.hpp"

namespace stickslip {

// Two-column CSV "level,value"; a non-numeric first line is taken as a header.
std::vector<LevelPoint> read_points_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<LevelPoint> load_points_csv(const std::filesystem::path& path);

// Subjects as rows, conditions as columns; optional header row. Empty cells
// are kept as NaN so rm_anova can reject them.
RepeatedMeasures read_matrix_csv(std::istream& in, const std::string& source = "<stream>");
RepeatedMeasures load_matrix_csv(const std::filesystem::path& path);

// Participant x level table of mean adjusted ratios from magnitude trials.
// Missing combinations become NaN cells.
RepeatedMeasures magnitude_matrix(std::span<const TrialRecord> records, std::vector<double>* levels = nullptr);

// Points for the two curve fits, taken from a results file.
std::vector<LevelPoint> jnd_points(std::span<const TrialRecord> records);
std::vector<LevelPoint> magnitude_points(std::span<const TrialRecord> records);

nlohmann::ordered_json psychometric_report(std::span<const LevelPoint> points);
nlohmann::ordered_json power_report(std::span<const LevelPoint> points);
nlohmann::ordered_json anova_report(const RepeatedMeasures& data, bool with_tukey);

// Full summary of a results file, dispatched on the study it contains.
nlohmann::ordered_json results_report(std::span<const TrialRecord> records);

// 100 evenly spaced samples over [lo, hi] as "x,y" CSV.
void write_psychometric_curve(std::ostream& out, const PsychometricFit& fit, double lo, double hi);
void write_power_curve(std::ostream& out, const PowerLawFit& fit, double lo, double hi);

}  // namespace stickslip
