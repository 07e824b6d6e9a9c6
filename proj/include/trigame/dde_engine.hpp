#ifndef TRIGAME_DDE_ENGINE_HPP
#define TRIGAME_DDE_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trigame/errors.hpp"
#include "trigame/game_model.hpp"

namespace trigame {

enum class Interpolation { hermite_cubic, linear };

struct IntegratorConfig {
  double dt = 1e-3;
  double t_end = 50.0;
  double tau = 0.0;  // must equal GameParams::tau of the run
  Interpolation interpolation = Interpolation::hermite_cubic;
  double convergence_tol = 1e-3;

  void validate() const {
    if (!std::isfinite(dt) || dt <= 0.0) {
      throw ValidationError("dt must be positive");
    }
    if (!std::isfinite(t_end) || t_end <= 0.0) {
      throw ValidationError("t_end must be positive");
    }
    if (!std::isfinite(tau) || tau < 0.0) {
      throw ValidationError("tau must be non-negative");
    }
    if (!std::isfinite(convergence_tol) || convergence_tol <= 0.0) {
      throw ValidationError("convergence_tol must be positive");
    }
  }
};

inline IntegratorConfig make_config(const GameParams& params) {
  IntegratorConfig config;
  config.tau = params.tau;
  return config;
}

// Solution on the uniform grid t_i = i*dt, with the RHS value stored per node
// so that cubic-Hermite dense output is available between nodes. The
// pre-history on [-tau, 0] is the constant initial state.
struct Trajectory {
  std::vector<double> times;
  std::vector<StrategyState> states;
  std::vector<StateDerivative> derivs;
  std::optional<double> converged_at;

  StrategyState init{};
  double dt = 0;
  double tau = 0;
  Interpolation interpolation = Interpolation::hermite_cubic;

  const StrategyState& final_state() const { return states.back(); }
  double front_time() const { return times.back(); }
};

// Transient excursions slightly outside [0,1] are genuine behaviour of the
// delayed field: each player acts on the state one delay ago, so corners get
// overshot once |a| tau > 1/e. States outside this window only occur on
// diverging runs and abort the integration.
inline constexpr double kStateGuardLo = -1.0;
inline constexpr double kStateGuardHi = 2.0;

namespace detail {

inline StrategyState hermite_point(const StrategyState& s0,
                                   const StateDerivative& d0,
                                   const StrategyState& s1,
                                   const StateDerivative& d1, double h,
                                   double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + theta;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return {h00 * s0.x + h * h10 * d0.dx + h01 * s1.x + h * h11 * d1.dx,
          h00 * s0.y + h * h10 * d0.dy + h01 * s1.y + h * h11 * d1.dy,
          h00 * s0.z + h * h10 * d0.dz + h01 * s1.z + h * h11 * d1.dz};
}

inline StrategyState lerp_point(const StrategyState& s0,
                                const StrategyState& s1, double theta) {
  return {s0.x + theta * (s1.x - s0.x), s0.y + theta * (s1.y - s0.y),
          s0.z + theta * (s1.z - s0.z)};
}

inline StrategyState advance(const StrategyState& s, double h,
                             const StateDerivative& d) {
  return {s.x + h * d.dx, s.y + h * d.dy, s.z + h * d.dz};
}

inline void check_state(const StrategyState& s, double t) {
  const bool finite =
      std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z);
  const double lo = std::min({s.x, s.y, s.z});
  const double hi = std::max({s.x, s.y, s.z});
  if (!finite || lo < kStateGuardLo || hi > kStateGuardHi) {
    throw IntegrationError("integration diverged at t = " + std::to_string(t),
                           t);
  }
}

inline double inf_distance(const StrategyState& a, const StrategyState& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y),
                   std::abs(a.z - b.z)});
}

}  // namespace detail

// Interpolated value on [t_i, t_{i+1}] at t_i + theta*dt.
inline StrategyState interpolate_interval(const Trajectory& traj,
                                          std::size_t i, double theta) {
  if (traj.interpolation == Interpolation::linear) {
    return detail::lerp_point(traj.states[i], traj.states[i + 1], theta);
  }
  return detail::hermite_point(traj.states[i], traj.derivs[i],
                               traj.states[i + 1], traj.derivs[i + 1], traj.dt,
                               theta);
}

// Dense output over [-tau, front]. Grid nodes return the stored state
// bit-exactly; t <= 0 returns the constant pre-history.
inline StrategyState history_lookup(const Trajectory& traj, double t_query) {
  if (traj.states.empty()) {
    throw std::logic_error("history_lookup: empty trajectory");
  }
  if (t_query < -traj.tau - 1e-9) {
    throw std::logic_error("history_lookup: query before pre-history");
  }
  if (t_query <= 0.0) return traj.init;
  const double r = t_query / traj.dt;
  const std::size_t last = traj.states.size() - 1;
  if (r > static_cast<double>(last) + 1e-6) {
    throw std::logic_error("history_lookup: query beyond stored front");
  }
  std::size_t i = static_cast<std::size_t>(r + 1e-9);
  if (i > last) i = last;
  double theta = r - static_cast<double>(i);
  if (theta < 1e-6) return traj.states[i];
  if (i == last) return traj.states[last];
  if (theta > 1.0 - 1e-6) return traj.states[i + 1];
  return interpolate_interval(traj, i, theta);
}

// Earliest grid time T with ||state(t) - target||_inf < tol for every grid
// t >= T; absent when the last node is still outside the band.
inline std::optional<double> detect_convergence(const Trajectory& traj,
                                                const StrategyState& target,
                                                double tol) {
  if (!(tol > 0.0)) {
    throw std::domain_error("detect_convergence: tol must be positive");
  }
  const std::size_t n = traj.states.size();
  std::size_t last_outside = n;
  for (std::size_t i = n; i-- > 0;) {
    if (detail::inf_distance(traj.states[i], target) >= tol) {
      last_outside = i;
      break;
    }
  }
  if (last_outside == n) return traj.times.front();
  if (last_outside == n - 1) return std::nullopt;
  return traj.times[last_outside + 1];
}

// Method of steps with classic fixed-step RK4. For tau > 0 the field reads
// only the delayed state, so the four stages collapse to Simpson quadrature
// of the already-known history; dt is snapped to tau/m so every stage lands
// on a stored node or mid-interval and derivative kinks at multiples of tau
// stay on the mesh. tau = 0 degrades to a plain RK4 ODE solve.
inline Trajectory integrate(const GameParams& params,
                            const StrategyState& init,
                            const IntegratorConfig& config) {
  params.validate();
  config.validate();
  if (config.tau != params.tau) {
    throw ValidationError("integrator tau must equal params.tau");
  }
  for (double c : {init.x, init.y, init.z}) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ValidationError("initial state must lie in [0,1]^3");
    }
  }

  double dt = config.dt;
  std::size_t delay_steps = 0;
  if (config.tau > 0.0) {
    auto m = static_cast<long long>(std::ceil(config.tau / dt - 1e-9));
    if (m < 1) m = 1;
    delay_steps = static_cast<std::size_t>(m);
    dt = config.tau / static_cast<double>(m);
  }
  auto n_steps = static_cast<std::size_t>(std::ceil(config.t_end / dt - 1e-9));
  if (n_steps < 1) n_steps = 1;

  Trajectory traj;
  traj.init = init;
  traj.dt = dt;
  traj.tau = config.tau;
  traj.interpolation = config.interpolation;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.derivs.reserve(n_steps + 1);

  traj.times.push_back(0.0);
  traj.states.push_back(init);
  traj.derivs.push_back(replicator_rhs(params, init));

  if (config.tau == 0.0) {
    for (std::size_t k = 0; k < n_steps; ++k) {
      const StrategyState& s = traj.states[k];
      const StateDerivative f1 = traj.derivs[k];
      const StateDerivative f2 =
          replicator_rhs(params, detail::advance(s, dt / 2.0, f1));
      const StateDerivative f3 =
          replicator_rhs(params, detail::advance(s, dt / 2.0, f2));
      const StateDerivative f4 =
          replicator_rhs(params, detail::advance(s, dt, f3));
      const StrategyState next{
          s.x + dt / 6.0 * (f1.dx + 2.0 * f2.dx + 2.0 * f3.dx + f4.dx),
          s.y + dt / 6.0 * (f1.dy + 2.0 * f2.dy + 2.0 * f3.dy + f4.dy),
          s.z + dt / 6.0 * (f1.dz + 2.0 * f2.dz + 2.0 * f3.dz + f4.dz)};
      const double t_next = static_cast<double>(k + 1) * dt;
      detail::check_state(next, t_next);
      traj.times.push_back(t_next);
      traj.states.push_back(next);
      traj.derivs.push_back(replicator_rhs(params, next));
    }
  } else {
    for (std::size_t k = 0; k < n_steps; ++k) {
      const auto j = static_cast<long long>(k) -
                     static_cast<long long>(delay_steps);
      // derivs[k] already holds the field at state(t_k - tau)
      const StateDerivative f1 = traj.derivs[k];
      const StateDerivative f_mid =
          (j < 0) ? traj.derivs[0]
                  : delayed_rhs(params, interpolate_interval(
                                            traj, static_cast<std::size_t>(j),
                                            0.5));
      const StateDerivative f4 =
          (j + 1 <= 0)
              ? traj.derivs[0]
              : delayed_rhs(params,
                            traj.states[static_cast<std::size_t>(j + 1)]);
      const StrategyState& s = traj.states[k];
      const StrategyState next{s.x + dt / 6.0 * (f1.dx + 4.0 * f_mid.dx + f4.dx),
                               s.y + dt / 6.0 * (f1.dy + 4.0 * f_mid.dy + f4.dy),
                               s.z + dt / 6.0 * (f1.dz + 4.0 * f_mid.dz + f4.dz)};
      const double t_next = static_cast<double>(k + 1) * dt;
      detail::check_state(next, t_next);
      traj.times.push_back(t_next);
      traj.states.push_back(next);
      traj.derivs.push_back(f4);  // the field at state(t_{k+1} - tau)
    }
  }

  const StrategyState& fin = traj.final_state();
  const StrategyState corner{fin.x < 0.5 ? 0.0 : 1.0, fin.y < 0.5 ? 0.0 : 1.0,
                             fin.z < 0.5 ? 0.0 : 1.0};
  if (detail::inf_distance(fin, corner) < config.convergence_tol) {
    traj.converged_at = detect_convergence(traj, corner, config.convergence_tol);
  }
  return traj;
}

}  // namespace trigame

#endif
