#ifndef TRIGAME_SCENARIO_IO_HPP
#define TRIGAME_SCENARIO_IO_HPP

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trigame/errors.hpp"
#include "trigame/experiments.hpp"

namespace trigame {

class ParseError : public ValidationError {
 public:
  ParseError(int line, const std::string& message)
      : ValidationError("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view text, int line,
                           std::string_view key) {
  text = trim(text);
  double value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(line, "malformed number '" + std::string(text) +
                               "' for key '" + std::string(key) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// Line-oriented `key = value` scenario text. `#` starts a comment; unknown
// and duplicate keys are rejected; every diagnostic carries its line number.
inline Scenario parse_scenario(std::string_view text) {
  static constexpr std::array<std::string_view, 24> kKnownKeys{
      "i_j",  "c_lc", "t_rj",    "c_hj",       "c_dj",    "c_mj",
      "c_sj", "c_sc", "c_mc",    "c_ii",       "c_mi",    "e_di",
      "h_ri", "tau",  "init",    "dt",         "t_end",   "tol",
      "experiment",   "tau_list", "sweep_a",   "sweep_b", "observable",
      "label"};

  struct Entry {
    std::string value;
    int line = 0;
  };
  std::map<std::string, Entry, std::less<>> entries;

  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t eol = text.find('\n', start);
    std::string_view line = text.substr(
        start, eol == std::string_view::npos ? text.size() - start : eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(lineno, "expected 'key = value'");
    }
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "missing key before '='");
    bool known = false;
    for (const auto& k : kKnownKeys) known = known || (k == key);
    if (!known) throw ParseError(lineno, "unknown key '" + key + "'");
    if (auto it = entries.find(key); it != entries.end()) {
      throw ParseError(lineno, "duplicate key '" + key + "' (first on line " +
                                   std::to_string(it->second.line) + ")");
    }
    if (value.empty()) throw ParseError(lineno, "empty value for '" + key + "'");
    entries.emplace(key, Entry{std::string(value), lineno});
  }

  Scenario scenario;

  // values of present keys are validated (with their line) before the
  // missing-key summary, so `tau = -1` alone reports the bad delay
  for (const auto& field : kParamFields) {
    const auto it = entries.find(field.name);
    if (it == entries.end()) continue;  // c_mi, e_di, h_ri default to 0
    const double value =
        detail::parse_number(it->second.value, it->second.line, field.name);
    if (!std::isfinite(value) || value < 0.0) {
      throw ParseError(it->second.line,
                       std::string(field.name) + " must be non-negative");
    }
    scenario.params.*(field.member) = value;
  }

  auto positive_or = [&](std::string_view key, double fallback) {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    const double value =
        detail::parse_number(it->second.value, it->second.line, key);
    if (!std::isfinite(value) || value <= 0.0) {
      throw ParseError(it->second.line, std::string(key) + " must be positive");
    }
    return value;
  };

  scenario.integrator.dt = positive_or("dt", 1e-3);
  scenario.integrator.t_end = positive_or("t_end", 50.0);
  scenario.integrator.convergence_tol = positive_or("tol", 1e-3);
  scenario.integrator.tau = scenario.params.tau;

  if (const auto it = entries.find("init"); it != entries.end()) {
    const auto parts = detail::split(it->second.value, ',');
    if (parts.size() != 3) {
      throw ParseError(it->second.line,
                       "init needs three comma-separated values");
    }
    double components[3];
    for (std::size_t i = 0; i < 3; ++i) {
      components[i] = detail::parse_number(parts[i], it->second.line, "init");
      if (!(components[i] >= 0.0 && components[i] <= 1.0)) {
        throw ParseError(it->second.line, "init components must lie in [0, 1]");
      }
    }
    scenario.init = {components[0], components[1], components[2]};
  }

  static constexpr std::array<std::string_view, 13> kRequired{
      "i_j",  "c_lc", "t_rj", "c_hj", "c_dj", "c_mj",       "c_sj",
      "c_sc", "c_mc", "c_ii", "tau",  "label", "experiment"};
  std::string missing;
  for (const auto& key : kRequired) {
    if (!entries.contains(key)) {
      if (!missing.empty()) missing += ", ";
      missing += key;
    }
  }
  if (!missing.empty()) {
    throw ValidationError("missing required key(s): " + missing);
  }

  const Entry& experiment = entries.find("experiment")->second;
  if (experiment.value == "run") {
    scenario.experiment = ExperimentKind::single_run;
  } else if (experiment.value == "compare") {
    scenario.experiment = ExperimentKind::delay_comparison;
  } else if (experiment.value == "sweep") {
    scenario.experiment = ExperimentKind::surface_sweep;
  } else {
    throw ParseError(experiment.line, "experiment must be run, compare or sweep");
  }

  auto reject_for_kind = [&](std::string_view key, std::string_view needed) {
    if (const auto it = entries.find(key); it != entries.end()) {
      throw ParseError(it->second.line,
                       "key '" + std::string(key) +
                           "' is only valid when experiment = " +
                           std::string(needed));
    }
  };
  auto require_for_kind = [&](std::string_view key, std::string_view kind) {
    if (!entries.contains(key)) {
      throw ValidationError("experiment '" + std::string(kind) +
                            "' requires key '" + std::string(key) + "'");
    }
  };

  if (scenario.experiment != ExperimentKind::delay_comparison) {
    reject_for_kind("tau_list", "compare");
  }
  if (scenario.experiment != ExperimentKind::surface_sweep) {
    reject_for_kind("sweep_a", "sweep");
    reject_for_kind("sweep_b", "sweep");
    reject_for_kind("observable", "sweep");
  }

  if (scenario.experiment == ExperimentKind::delay_comparison) {
    require_for_kind("tau_list", "compare");
    const Entry& entry = entries.find("tau_list")->second;
    for (const auto part : detail::split(entry.value, ',')) {
      const double tau = detail::parse_number(part, entry.line, "tau_list");
      if (!std::isfinite(tau) || tau < 0.0) {
        throw ParseError(entry.line, "tau_list entries must be >= 0");
      }
      scenario.tau_list.push_back(tau);
    }
  }

  if (scenario.experiment == ExperimentKind::surface_sweep) {
    require_for_kind("sweep_a", "sweep");
    require_for_kind("sweep_b", "sweep");
    require_for_kind("observable", "sweep");
    auto parse_axis = [&](std::string_view key) {
      const Entry& entry = entries.find(key)->second;
      const auto parts = detail::split(entry.value, ':');
      if (parts.size() != 4) {
        throw ParseError(entry.line,
                         std::string(key) + " must look like name:lo:hi:n");
      }
      SweepAxisSpec axis;
      axis.param = std::string(detail::trim(parts[0]));
      if (find_param_field(axis.param) == nullptr) {
        throw ParseError(entry.line,
                         "unknown sweep parameter '" + axis.param + "'");
      }
      axis.lo = detail::parse_number(parts[1], entry.line, key);
      axis.hi = detail::parse_number(parts[2], entry.line, key);
      const double count = detail::parse_number(parts[3], entry.line, key);
      axis.count = static_cast<int>(count);
      if (static_cast<double>(axis.count) != count || axis.count < 2) {
        throw ParseError(entry.line,
                         std::string(key) + " grid count must be an integer >= 2");
      }
      return axis;
    };
    SweepSpec spec;
    spec.axis_a = parse_axis("sweep_a");
    spec.axis_b = parse_axis("sweep_b");
    const Entry& obs = entries.find("observable")->second;
    if (obs.value == "final_x") {
      spec.observable = Observable::final_x;
    } else if (obs.value == "final_y") {
      spec.observable = Observable::final_y;
    } else if (obs.value == "final_z") {
      spec.observable = Observable::final_z;
    } else if (obs.value == "verdict_corner") {
      spec.observable = Observable::verdict_corner;
    } else {
      throw ParseError(obs.line,
                       "observable must be final_x, final_y, final_z or "
                       "verdict_corner");
    }
    scenario.sweep = std::move(spec);
  }

  scenario.label = entries.find("label")->second.value;
  scenario.validate();
  return scenario;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open scenario file " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

// Shortest text with 9 significant digits; locale-independent.
inline std::string format_double(double v) {
  std::array<char, 48> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                       std::chars_format::general, 9);
  return std::string(buf.data(), ptr);
}

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,x,y,z\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const StrategyState& s = traj.states[i];
    os << format_double(traj.times[i]) << ',' << format_double(s.x) << ','
       << format_double(s.y) << ',' << format_double(s.z) << '\n';
  }
}

inline void write_trajectory_csv(const Trajectory& traj,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_trajectory_csv(traj, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline void write_surface_csv(const SurfaceResult& surface, std::ostream& os) {
  os << "a,b,x,y,z,converged\n";
  for (const SweepCell& cell : surface.cells) {
    os << format_double(cell.a) << ',' << format_double(cell.b) << ','
       << format_double(cell.final_state.x) << ','
       << format_double(cell.final_state.y) << ','
       << format_double(cell.final_state.z) << ','
       << (cell.converged ? '1' : '0') << '\n';
  }
}

inline nlohmann::json axis_json(const SweepAxisSpec& axis) {
  return {{"param", axis.param},
          {"lo", axis.lo},
          {"hi", axis.hi},
          {"count", axis.count}};
}

inline nlohmann::json surface_sidecar_json(const SurfaceResult& surface) {
  return {{"label", surface.label},
          {"observable", std::string(observable_name(surface.spec.observable))},
          {"axis_a", axis_json(surface.spec.axis_a)},
          {"axis_b", axis_json(surface.spec.axis_b)},
          {"row_order", "axis_a-major"}};
}

inline std::filesystem::path surface_sidecar_path(std::filesystem::path csv) {
  csv.replace_extension(".json");
  return csv;
}

// CSV grid plus a JSON sidecar describing the axes.
inline void write_surface_grid(const SurfaceResult& surface,
                               const std::filesystem::path& csv_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + csv_path.string());
    write_surface_csv(surface, out);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + csv_path.string());
  }
  const std::filesystem::path sidecar = surface_sidecar_path(csv_path);
  std::ofstream out(sidecar, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + sidecar.string());
  out << surface_sidecar_json(surface).dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + sidecar.string());
}

inline nlohmann::json params_json(const GameParams& params) {
  nlohmann::json j;
  for (const auto& field : kParamFields) {
    j[std::string(field.name)] = params.*(field.member);
  }
  return j;
}

inline GameParams params_from_json(const nlohmann::json& j) {
  GameParams params;
  for (const auto& field : kParamFields) {
    params.*(field.member) = j.at(std::string(field.name)).get<double>();
  }
  return params;
}

inline nlohmann::json clause_json(const ComparisonClause& clause) {
  return {{"lhs", clause.lhs},
          {"rhs", clause.rhs},
          {"relation", std::string(1, clause.relation)},
          {"holds", clause.holds}};
}

inline nlohmann::json condition_row_json(const ConditionRow& row) {
  nlohmann::json clauses = nlohmann::json::array();
  for (const auto& clause : row.clauses) clauses.push_back(clause_json(clause));
  return {{"holds", row.holds}, {"clauses", clauses}};
}

inline nlohmann::json classification_json(const std::string& label,
                                          const GameParams& params,
                                          const EquilibriumAnalysis& analysis) {
  nlohmann::json corners = nlohmann::json::array();
  for (const Equilibrium& eq : analysis.corners) {
    nlohmann::json roots = nlohmann::json::array();
    for (const Root& root : eq.roots) {
      roots.push_back({{"re", root.re}, {"im", root.im}});
    }
    corners.push_back(
        {{"corner", eq.index},
         {"point", {eq.point.x, eq.point.y, eq.point.z}},
         {"coefficients", {eq.coefficients[0], eq.coefficients[1], eq.coefficients[2]}},
         {"roots", roots},
         {"verdict", std::string(verdict_name(eq.verdict))},
         {"sign_pattern", std::string{eq.sign_pattern[0], eq.sign_pattern[1],
                                      eq.sign_pattern[2]}}});
  }
  nlohmann::json interior{{"note", analysis.interior.note}};
  interior["status"] = analysis.interior.status == InteriorPoint::Status::nonexistent
                           ? "nonexistent"
                           : "degenerate";
  if (analysis.interior.x) interior["x"] = *analysis.interior.x;
  if (analysis.interior.y) interior["y"] = *analysis.interior.y;
  return {{"label", label},
          {"params", params_json(params)},
          {"tau", analysis.tau},
          {"conditions",
           {{"condition1", condition_row_json(analysis.conditions.condition1)},
            {"condition2", condition_row_json(analysis.conditions.condition2)},
            {"condition3", condition_row_json(analysis.conditions.condition3)}}},
          {"corners", corners},
          {"interior", interior},
          {"ess", analysis.ess_indices()}};
}

inline nlohmann::json run_report_json(const Scenario& scenario,
                                      const RunSummary& summary) {
  nlohmann::json j =
      classification_json(scenario.label, scenario.params, summary.classification);
  const StrategyState& fin = summary.trajectory.final_state();
  nlohmann::json run{{"limit_state", {fin.x, fin.y, fin.z}},
                     {"matches_prediction", summary.matches_prediction}};
  run["reached_corner"] = summary.reached_corner
                              ? nlohmann::json(*summary.reached_corner)
                              : nlohmann::json(nullptr);
  run["converged_at"] = summary.convergence_time
                            ? nlohmann::json(*summary.convergence_time)
                            : nlohmann::json(nullptr);
  j["run"] = std::move(run);
  return j;
}

}  // namespace trigame

#endif
