#ifndef TRIGAME_EXPERIMENTS_HPP
#define TRIGAME_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "trigame/dde_engine.hpp"
#include "trigame/errors.hpp"
#include "trigame/game_model.hpp"
#include "trigame/stability.hpp"

namespace trigame {

enum class ExperimentKind { single_run, delay_comparison, surface_sweep };
enum class Observable { final_x, final_y, final_z, verdict_corner };

inline std::string_view observable_name(Observable o) {
  switch (o) {
    case Observable::final_x: return "final_x";
    case Observable::final_y: return "final_y";
    case Observable::final_z: return "final_z";
    case Observable::verdict_corner: return "verdict_corner";
  }
  return "?";
}

struct SweepAxisSpec {
  std::string param;
  double lo = 0;
  double hi = 0;
  int count = 0;
};

struct SweepSpec {
  SweepAxisSpec axis_a;
  SweepAxisSpec axis_b;
  Observable observable = Observable::final_x;
};

struct Scenario {
  GameParams params;
  StrategyState init{0.8, 0.5, 0.5};
  IntegratorConfig integrator{};
  ExperimentKind experiment = ExperimentKind::single_run;
  std::vector<double> tau_list;     // delay_comparison only
  std::optional<SweepSpec> sweep;   // surface_sweep only
  std::string label;

  void validate() const;
};

namespace detail {

inline void validate_axis(const SweepAxisSpec& axis) {
  if (find_param_field(axis.param) == nullptr) {
    throw ValidationError("unknown sweep parameter '" + axis.param + "'");
  }
  if (!std::isfinite(axis.lo) || !std::isfinite(axis.hi) || axis.lo < 0.0) {
    throw ValidationError("sweep range for '" + axis.param +
                          "' must be finite and non-negative");
  }
  if (!(axis.lo < axis.hi)) {
    throw ValidationError("sweep range for '" + axis.param +
                          "' must have lo < hi");
  }
  if (axis.count < 2) {
    throw ValidationError("sweep grid for '" + axis.param +
                          "' needs at least 2 points");
  }
}

}  // namespace detail

inline void Scenario::validate() const {
  params.validate();
  integrator.validate();
  if (integrator.tau != params.tau) {
    throw ValidationError("integrator tau must equal params.tau");
  }
  for (double c : {init.x, init.y, init.z}) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ValidationError("init must lie in [0,1]^3");
    }
  }
  if (label.empty()) throw ValidationError("label must be nonempty");
  switch (experiment) {
    case ExperimentKind::single_run:
      if (!tau_list.empty() || sweep.has_value()) {
        throw ValidationError("run scenarios take neither tau_list nor sweep axes");
      }
      break;
    case ExperimentKind::delay_comparison:
      if (tau_list.empty()) {
        throw ValidationError("delay comparison requires a nonempty tau_list");
      }
      for (double t : tau_list) {
        if (!std::isfinite(t) || t < 0.0) {
          throw ValidationError("tau_list entries must be >= 0");
        }
      }
      if (sweep.has_value()) {
        throw ValidationError("delay comparison takes no sweep axes");
      }
      break;
    case ExperimentKind::surface_sweep:
      if (!sweep.has_value()) {
        throw ValidationError("sweep scenario requires sweep axes");
      }
      detail::validate_axis(sweep->axis_a);
      detail::validate_axis(sweep->axis_b);
      if (sweep->axis_a.param == sweep->axis_b.param) {
        throw ValidationError("sweep axes must use distinct parameters");
      }
      if (!tau_list.empty()) {
        throw ValidationError("sweep scenario takes no tau_list");
      }
      break;
  }
}

struct RunSummary {
  Trajectory trajectory;
  EquilibriumAnalysis classification;
  std::optional<int> reached_corner;
  bool matches_prediction = false;
  std::optional<double> convergence_time;
};

inline RunSummary run_condition(const Scenario& scenario) {
  scenario.validate();
  if (scenario.experiment != ExperimentKind::single_run) {
    throw ValidationError("run_condition requires a run scenario");
  }
  RunSummary out;
  out.trajectory = integrate(scenario.params, scenario.init, scenario.integrator);
  out.classification = classify(scenario.params, scenario.params.tau);
  out.convergence_time = out.trajectory.converged_at;
  out.reached_corner =
      corner_at(out.trajectory.final_state(), scenario.integrator.convergence_tol);
  const auto ess = out.classification.ess_indices();
  out.matches_prediction = out.reached_corner.has_value() && ess.size() == 1 &&
                           ess.front() == *out.reached_corner;
  return out;
}

struct DelayRun {
  double tau = 0;
  Trajectory trajectory;
  std::optional<int> limit_corner;
  std::optional<double> convergence_time;
};

struct DelayComparison {
  std::vector<DelayRun> runs;
  std::optional<int> common_corner;  // set when every run reached the same corner
};

inline DelayComparison delay_comparison(const Scenario& scenario) {
  scenario.validate();
  if (scenario.experiment != ExperimentKind::delay_comparison) {
    throw ValidationError("delay_comparison requires a compare scenario");
  }
  DelayComparison out;
  out.runs.reserve(scenario.tau_list.size());
  for (double tau : scenario.tau_list) {
    GameParams params = scenario.params;
    params.tau = tau;
    IntegratorConfig config = scenario.integrator;
    config.tau = tau;
    DelayRun run;
    run.tau = tau;
    run.trajectory = integrate(params, scenario.init, config);
    run.convergence_time = run.trajectory.converged_at;
    run.limit_corner = corner_at(run.trajectory.final_state(),
                                 scenario.integrator.convergence_tol);
    out.runs.push_back(std::move(run));
  }
  bool same = !out.runs.empty() && out.runs.front().limit_corner.has_value();
  for (const auto& run : out.runs) {
    same = same && run.limit_corner.has_value() &&
           *run.limit_corner == *out.runs.front().limit_corner;
  }
  if (same) out.common_corner = *out.runs.front().limit_corner;
  return out;
}

struct SweepCell {
  double a = 0;
  double b = 0;
  StrategyState final_state{};
  bool converged = false;
  std::optional<double> convergence_time;
  std::string error;  // nonempty when integration failed for this cell
};

struct SurfaceResult {
  SweepSpec spec;
  std::string label;
  std::vector<double> a_values;
  std::vector<double> b_values;
  std::vector<SweepCell> cells;  // row-major, axis_a index major

  const SweepCell& at(std::size_t ia, std::size_t ib) const {
    return cells[ia * b_values.size() + ib];
  }
};

inline std::vector<double> axis_grid(const SweepAxisSpec& axis) {
  std::vector<double> values(static_cast<std::size_t>(axis.count));
  const double step = (axis.hi - axis.lo) / static_cast<double>(axis.count - 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = axis.lo + static_cast<double>(i) * step;
  }
  values.back() = axis.hi;
  return values;
}

// Evaluates every grid cell independently (cells are embarrassingly
// parallel); each cell is written exactly once at its grid index, so the
// result is identical for any thread count. Per-cell failures are recorded
// in the cell and never abort the grid.
inline SurfaceResult surface_sweep(const Scenario& scenario,
                                   unsigned n_threads = 0) {
  scenario.validate();
  if (scenario.experiment != ExperimentKind::surface_sweep) {
    throw ValidationError("surface_sweep requires a sweep scenario");
  }
  const SweepSpec& spec = *scenario.sweep;
  const ParamField* field_a = find_param_field(spec.axis_a.param);
  const ParamField* field_b = find_param_field(spec.axis_b.param);

  SurfaceResult out;
  out.spec = spec;
  out.label = scenario.label;
  out.a_values = axis_grid(spec.axis_a);
  out.b_values = axis_grid(spec.axis_b);
  const std::size_t nb = out.b_values.size();
  const std::size_t total = out.a_values.size() * nb;
  out.cells.resize(total);

  if (n_threads == 0) {
    n_threads = std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    if (n_threads > 32) n_threads = 32;
  }
  if (n_threads > total) n_threads = static_cast<unsigned>(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      const std::size_t ia = k / nb;
      const std::size_t ib = k % nb;
      SweepCell cell;
      cell.a = out.a_values[ia];
      cell.b = out.b_values[ib];
      GameParams params = scenario.params;
      params.*(field_a->member) = cell.a;
      params.*(field_b->member) = cell.b;
      IntegratorConfig config = scenario.integrator;
      config.tau = params.tau;
      try {
        const Trajectory traj = integrate(params, scenario.init, config);
        cell.final_state = traj.final_state();
        cell.convergence_time = traj.converged_at;
        cell.converged = traj.converged_at.has_value();
      } catch (const std::exception& e) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        cell.final_state = {nan, nan, nan};
        cell.error = e.what();
      }
      out.cells[k] = std::move(cell);
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (unsigned i = 0; i + 1 < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  return out;
}

enum class SweepAxis { a, b };

// Row (fixed axis_a value) or column (fixed axis_b value) of the surface,
// ordered by the free axis. The fixed value must be a grid point.
inline std::vector<SweepCell> slice_extract(const SurfaceResult& surface,
                                            SweepAxis fixed_axis,
                                            double fixed_value) {
  const std::vector<double>& fixed_values =
      fixed_axis == SweepAxis::a ? surface.a_values : surface.b_values;
  std::size_t index = fixed_values.size();
  for (std::size_t i = 0; i < fixed_values.size(); ++i) {
    if (std::abs(fixed_values[i] - fixed_value) <=
        1e-9 * std::max(1.0, std::abs(fixed_value))) {
      index = i;
      break;
    }
  }
  if (index == fixed_values.size()) {
    throw std::domain_error("slice_extract: fixed value is not on the grid");
  }
  std::vector<SweepCell> out;
  const std::size_t nb = surface.b_values.size();
  if (fixed_axis == SweepAxis::a) {
    out.reserve(nb);
    for (std::size_t ib = 0; ib < nb; ++ib) out.push_back(surface.at(index, ib));
  } else {
    out.reserve(surface.a_values.size());
    for (std::size_t ia = 0; ia < surface.a_values.size(); ++ia) {
      out.push_back(surface.at(ia, index));
    }
  }
  return out;
}

// Default lattice of interior starting points for overall-evolution runs:
// every combination of {0.2, 0.8} per component.
inline std::array<StrategyState, 8> default_init_lattice() {
  std::array<StrategyState, 8> out{};
  std::size_t k = 0;
  for (double x : {0.2, 0.8}) {
    for (double y : {0.2, 0.8}) {
      for (double z : {0.2, 0.8}) out[k++] = {x, y, z};
    }
  }
  return out;
}

inline std::vector<Trajectory> run_multi(const Scenario& scenario,
                                         std::span<const StrategyState> inits) {
  scenario.validate();
  std::vector<Trajectory> out;
  out.reserve(inits.size());
  for (const StrategyState& init : inits) {
    out.push_back(integrate(scenario.params, init, scenario.integrator));
  }
  return out;
}

}  // namespace trigame

#endif
