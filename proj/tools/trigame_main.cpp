// Command-line front end: simulate / classify / compare / sweep / equilibria
// over `key = value` scenario files. Exit codes: 0 success, 1 validation
// problem, 2 numerical failure.

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trigame/errors.hpp"
#include "trigame/experiments.hpp"
#include "trigame/scenario_io.hpp"
#include "trigame/stability.hpp"
#include "trigame/version.hpp"

namespace {

using namespace trigame;

std::string point_text(const StrategyState& s) {
  return "(" + format_double(s.x) + ", " + format_double(s.y) + ", " +
         format_double(s.z) + ")";
}

std::string root_text(const Root& root) {
  if (root.im == 0.0) return format_double(root.re);
  return format_double(root.re) + " +/- " + format_double(root.im) + "i";
}

void print_condition_row(std::ostream& os, const char* name,
                         const ConditionRow& row) {
  os << name << ": " << (row.holds ? "holds" : "fails");
  for (const auto& clause : row.clauses) {
    os << "  [" << format_double(clause.lhs) << ' ' << clause.relation << ' '
       << format_double(clause.rhs) << (clause.holds ? ": yes" : ": no") << ']';
  }
  os << '\n';
}

void print_corner_table(std::ostream& os, const EquilibriumAnalysis& analysis) {
  for (const Equilibrium& eq : analysis.corners) {
    os << "corner " << eq.index << ' ' << point_text(eq.point) << ": a = ("
       << format_double(eq.coefficients[0]) << ", "
       << format_double(eq.coefficients[1]) << ", "
       << format_double(eq.coefficients[2]) << "), roots = ("
       << root_text(eq.roots[0]) << "; " << root_text(eq.roots[1]) << "; "
       << root_text(eq.roots[2]) << "), signs = (" << eq.sign_pattern[0] << ','
       << eq.sign_pattern[1] << ',' << eq.sign_pattern[2]
       << "), verdict = " << verdict_name(eq.verdict) << '\n';
  }
  os << "interior: " << analysis.interior.note;
  if (analysis.interior.x) os << "; x* = " << format_double(*analysis.interior.x);
  if (analysis.interior.y) os << "; y* = " << format_double(*analysis.interior.y);
  os << '\n';
  os << "ESS corners:";
  const auto ess = analysis.ess_indices();
  if (ess.empty()) {
    os << " none";
  } else {
    for (int index : ess) os << ' ' << index;
  }
  os << '\n';
}

int cmd_simulate(const Scenario& scenario, const std::string& out_path) {
  const RunSummary summary = run_condition(scenario);
  if (out_path.empty()) {
    write_trajectory_csv(summary.trajectory, std::cout);
  } else {
    write_trajectory_csv(summary.trajectory, std::filesystem::path(out_path));
  }
  std::cerr << scenario.label << ": limit "
            << point_text(summary.trajectory.final_state());
  if (summary.reached_corner) {
    std::cerr << ", corner " << *summary.reached_corner;
  }
  if (summary.convergence_time) {
    std::cerr << ", converged_at " << format_double(*summary.convergence_time);
  } else {
    std::cerr << ", not converged by t_end";
  }
  std::cerr << (summary.matches_prediction ? ", matches predicted ESS"
                                           : ", does not match predicted ESS")
            << '\n';
  return 0;
}

int cmd_classify(const Scenario& scenario, bool as_json) {
  const EquilibriumAnalysis analysis =
      classify(scenario.params, scenario.params.tau);
  if (as_json) {
    std::cout << classification_json(scenario.label, scenario.params, analysis)
                     .dump(2)
              << '\n';
    return 0;
  }
  std::cout << "scenario: " << scenario.label
            << " (tau = " << format_double(analysis.tau) << ")\n";
  print_condition_row(std::cout, "condition1", analysis.conditions.condition1);
  print_condition_row(std::cout, "condition2", analysis.conditions.condition2);
  print_condition_row(std::cout, "condition3", analysis.conditions.condition3);
  print_corner_table(std::cout, analysis);
  return 0;
}

int cmd_equilibria(const Scenario& scenario) {
  const EquilibriumAnalysis analysis = enumerate_equilibria(scenario.params);
  std::cout << "scenario: " << scenario.label
            << " (tau = " << format_double(analysis.tau) << ")\n";
  print_corner_table(std::cout, analysis);
  return 0;
}

int cmd_compare(const Scenario& scenario) {
  const DelayComparison comparison = delay_comparison(scenario);
  std::cout << "scenario: " << scenario.label << '\n';
  std::cout << "tau        corner   converged_at   final\n";
  for (const DelayRun& run : comparison.runs) {
    std::cout << format_double(run.tau) << "\t   ";
    if (run.limit_corner) {
      std::cout << *run.limit_corner;
    } else {
      std::cout << '-';
    }
    std::cout << "\t    ";
    if (run.convergence_time) {
      std::cout << format_double(*run.convergence_time);
    } else {
      std::cout << "not converged";
    }
    std::cout << "\t   " << point_text(run.trajectory.final_state()) << '\n';
  }
  if (comparison.common_corner) {
    std::cout << "common limit corner: " << *comparison.common_corner << '\n';
  } else {
    std::cout << "runs did not reach a common corner\n";
  }
  return 0;
}

int cmd_sweep(const Scenario& scenario, const std::string& out_path) {
  const SurfaceResult surface = surface_sweep(scenario);
  const std::filesystem::path csv_path(out_path);
  write_surface_grid(surface, csv_path);
  std::size_t unconverged = 0;
  std::size_t failed = 0;
  for (const SweepCell& cell : surface.cells) {
    if (!cell.error.empty()) {
      ++failed;
    } else if (!cell.converged) {
      ++unconverged;
    }
  }
  std::cerr << scenario.label << ": wrote " << csv_path.string() << " and "
            << surface_sidecar_path(csv_path).string() << " ("
            << surface.cells.size() << " cells, " << unconverged
            << " unconverged, " << failed << " failed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tripartite discharge game: delayed replicator dynamics"};
  app.set_version_flag("--version",
                       std::string("trigame ") + trigame::kVersion);
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  bool as_json = false;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate one scenario and emit the trajectory CSV");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--out", out_path, "output CSV path (default stdout)");

  CLI::App* classify_cmd = app.add_subcommand(
      "classify", "corner stability analysis for the scenario parameters");
  classify_cmd->add_option("--scenario", scenario_path, "scenario file")
      ->required();
  classify_cmd->add_flag("--json", as_json, "emit JSON instead of text");

  CLI::App* compare = app.add_subcommand(
      "compare", "integrate the scenario once per tau_list entry");
  compare->add_option("--scenario", scenario_path, "scenario file")->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "two-parameter grid of terminal states");
  sweep->add_option("--scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--out", out_path, "output CSV path")->required();

  CLI::App* equilibria = app.add_subcommand(
      "equilibria", "enumerate the eight corners and the interior point");
  equilibria->add_option("--scenario", scenario_path, "scenario file")
      ->required();

  if (argc <= 1) {
    std::cerr << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const trigame::Scenario scenario =
        trigame::parse_scenario_file(scenario_path);
    if (simulate->parsed()) return cmd_simulate(scenario, out_path);
    if (classify_cmd->parsed()) return cmd_classify(scenario, as_json);
    if (compare->parsed()) return cmd_compare(scenario);
    if (sweep->parsed()) return cmd_sweep(scenario, out_path);
    if (equilibria->parsed()) return cmd_equilibria(scenario);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const trigame::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const trigame::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
