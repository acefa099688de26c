#include "stickslip/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "stickslip/errors.hpp"

namespace stickslip {

namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  cells.push_back(cell);
  for (auto& c : cells) {
    const auto a = c.find_first_not_of(" \t");
    const auto b = c.find_last_not_of(" \t");
    c = a == std::string::npos ? std::string() : c.substr(a, b - a + 1);
  }
  return cells;
}

bool to_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}


ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

void write_curve(std::ostream& out, double lo, double hi, auto&& f) {
  out << "x,y\n";
  for (int i = 0; i < 100; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / 99.0;
    out << fmt::format("{:.6f},{:.6f}\n", x, f(x));
  }
}

}  // namespace

std::vector<LevelPoint> read_points_csv(std::istream& in, const std::string& source) {
  std::vector<LevelPoint> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    LevelPoint p;
    const bool ok = cells.size() == 2 && to_double(cells[0], p.level) && to_double(cells[1], p.value);
    if (!ok) {
      if (line_no == 1 && points.empty()) continue;
      throw ParseError(source, line_no, "expected 'level,value'");
    }
    points.push_back(p);
  }
  if (points.empty()) throw ValidationError(source + ": no data points");
  return points;
}

std::vector<LevelPoint> load_points_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_points_csv(in, path.string());
}

RepeatedMeasures read_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv(line);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      double v = kNaN;
      if (!c.empty() && !to_double(c, v)) numeric = false;
      row.push_back(v);
    }
    if (!numeric) {
      if (line_no == 1) continue;
      throw ParseError(source, line_no, "non-numeric cell");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source, line_no, fmt::format("expected {} columns, found {}", rows.front().size(), row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError(source + ": empty matrix");
  std::vector<double> values;
  for (const auto& r : rows) values.insert(values.end(), r.begin(), r.end());
  return RepeatedMeasures(rows.size(), rows.front().size(), std::move(values));
}

RepeatedMeasures load_matrix_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return read_matrix_csv(in, path.string());
}

RepeatedMeasures magnitude_matrix(std::span<const TrialRecord> records, std::vector<double>* levels_out) {
  std::set<int> participants;
  std::set<double> levels;
  std::map<std::pair<int, double>, std::pair<double, int>> sums;
  for (const TrialRecord& r : records) {
    if (r.study != Study::Magnitude || !r.done || !r.ratio) continue;
    participants.insert(r.participant_index);
    levels.insert(r.comparison_mu_s);
    auto& s = sums[{r.participant_index, r.comparison_mu_s}];
    s.first += r.ratio->value();
    s.second += 1;
  }
  if (participants.empty()) throw ValidationError("no completed magnitude trials");
  RepeatedMeasures m(participants.size(), levels.size());
  std::size_t i = 0;
  for (int p : participants) {
    std::size_t j = 0;
    for (double l : levels) {
      const auto it = sums.find({p, l});
      m.at(i, j) = it == sums.end() ? kNaN : it->second.first / it->second.second;
      ++j;
    }
    ++i;
  }
  if (levels_out) levels_out->assign(levels.begin(), levels.end());
  return m;
}

std::vector<LevelPoint> jnd_points(std::span<const TrialRecord> records) {
  const JndTally tally = tally_jnd_proportions(records);
  std::vector<LevelPoint> points;
  for (const auto& l : tally.levels) points.push_back({l.level, l.proportion});
  return points;
}

std::vector<LevelPoint> magnitude_points(std::span<const TrialRecord> records) {
  const MagnitudeMeans means = mean_ratios(records);
  std::vector<LevelPoint> points;
  for (std::size_t i = 0; i < means.levels.size(); ++i) points.push_back({means.levels[i], means.mean_ratio[i]});
  return points;
}

ordered_json psychometric_report(std::span<const LevelPoint> points) {
  const PsychometricFit fit = fit_psychometric(points);
  ordered_json j;
  j["kind"] = "psychometric";
  j["points"] = ordered_json::array();
  for (const auto& p : points) j["points"].push_back({p.level, p.value});
  j["identifiable"] = fit.identifiable;
  j["A"] = number(fit.A);
  j["B"] = number(fit.B);
  j["pse"] = number(fit.pse());
  j["sse"] = fit.sse;
  j["jnd"] = nullptr;
  if (fit.identifiable && fit.A > 0.0) j["jnd"] = jnd(fit);
  return j;
}

ordered_json power_report(std::span<const LevelPoint> points) {
  const PowerLawFit fit = fit_power_law(points);
  ordered_json j;
  j["kind"] = "power";
  j["points"] = ordered_json::array();
  for (const auto& p : points) j["points"].push_back({p.level, p.value});
  j["k"] = fit.k;
  j["beta"] = fit.beta;
  j["r2"] = fit.r2;
  return j;
}

ordered_json anova_report(const RepeatedMeasures& data, bool with_tukey) {
  AnovaResult a = rm_anova(data);
  ordered_json j;
  j["kind"] = with_tukey ? "tukey" : "anova";
  j["subjects"] = data.subjects();
  j["conditions"] = data.conditions();
  j["F"] = number(a.F);
  j["df1"] = a.df1;
  j["df2"] = a.df2;
  j["p"] = a.p;
  j["ss_conditions"] = a.ss_conditions;
  j["ss_subjects"] = a.ss_subjects;
  j["ss_error"] = a.ss_error;
  j["ms_error"] = a.ms_error;
  j["condition_means"] = a.condition_means;
  if (with_tukey) {
    j["pairs"] = ordered_json::array();
    for (const TukeyPair& t : tukey_hsd(data, a)) {
      ordered_json pj;
      pj["first"] = t.first;
      pj["second"] = t.second;
      pj["difference"] = t.difference;
      pj["q"] = t.q;
      pj["p"] = t.p;
      pj["significant_05"] = t.significant_05;
      pj["significant_01"] = t.significant_01;
      j["pairs"].push_back(pj);
    }
  }
  return j;
}

ordered_json results_report(std::span<const TrialRecord> records) {
  if (records.empty()) throw ValidationError("results file has no trials");
  const Study study = records.front().study;
  for (const auto& r : records) {
    if (r.study != study) throw ValidationError("results file mixes studies");
  }
  std::set<int> participants;
  for (const auto& r : records) participants.insert(r.participant_index);

  ordered_json j;
  j["study"] = to_string(study);
  j["trials"] = records.size();
  j["participants"] = participants.size();
  if (study == Study::Jnd) {
    const JndTally tally = tally_jnd_proportions(records);
    j["warnings"] = tally.warnings;
    j["psychometric"] = psychometric_report(jnd_points(records));
    return j;
  }
  j["power"] = power_report(magnitude_points(records));
  if (participants.size() >= 2) {
    std::vector<double> levels;
    const RepeatedMeasures m = magnitude_matrix(records, &levels);
    j["levels"] = levels;
    j["anova"] = anova_report(m, true);
  }
  return j;
}

void write_psychometric_curve(std::ostream& out, const PsychometricFit& fit, double lo, double hi) {
  write_curve(out, lo, hi, [&](double x) { return fit.identifiable ? fit(x) : kNaN; });
}

void write_power_curve(std::ostream& out, const PowerLawFit& fit, double lo, double hi) {
  write_curve(out, lo, hi, [&](double x) { return fit(x); });
}

}  // namespace stickslip
