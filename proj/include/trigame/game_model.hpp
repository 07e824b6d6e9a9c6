#ifndef TRIGAME_GAME_MODEL_HPP
#define TRIGAME_GAME_MODEL_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "trigame/errors.hpp"

namespace trigame {

// Cost/benefit magnitudes of the three-party discharge game plus the decision
// delay tau. Every entry is a non-negative magnitude; payoffs subtract them,
// so utilities may still be negative.
struct GameParams {
  double i_j = 0;   // Japan: international reputation at stake
  double c_lc = 0;  // other countries: litigation compensation received
  double t_rj = 0;  // Japan: export-tax revenue lost under discharge
  double c_hj = 0;  // Japan: aid received when not discharging
  double c_dj = 0;  // Japan: discharge cost
  double c_mj = 0;  // Japan: ocean-monitoring cost
  double c_sj = 0;  // Japan: storage cost
  double c_sc = 0;  // other countries: cost of substituting Japanese goods
  double c_mc = 0;  // other countries: ocean-monitoring cost
  double c_ii = 0;  // IAEA: international reputation
  double c_mi = 0;  // IAEA: ocean-monitoring cost
  double e_di = 0;  // IAEA: ecological-harm metric
  double h_ri = 0;  // IAEA: health-risk metric
  double tau = 0;   // decision delay, time units

  void validate() const;

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

struct ParamField {
  std::string_view name;
  double GameParams::*member;
};

inline constexpr std::array<ParamField, 14> kParamFields{{
    {"i_j", &GameParams::i_j},
    {"c_lc", &GameParams::c_lc},
    {"t_rj", &GameParams::t_rj},
    {"c_hj", &GameParams::c_hj},
    {"c_dj", &GameParams::c_dj},
    {"c_mj", &GameParams::c_mj},
    {"c_sj", &GameParams::c_sj},
    {"c_sc", &GameParams::c_sc},
    {"c_mc", &GameParams::c_mc},
    {"c_ii", &GameParams::c_ii},
    {"c_mi", &GameParams::c_mi},
    {"e_di", &GameParams::e_di},
    {"h_ri", &GameParams::h_ri},
    {"tau", &GameParams::tau},
}};

inline const ParamField* find_param_field(std::string_view name) {
  for (const auto& field : kParamFields) {
    if (field.name == name) return &field;
  }
  return nullptr;
}

inline void GameParams::validate() const {
  for (const auto& field : kParamFields) {
    const double value = this->*(field.member);
    if (!std::isfinite(value) || value < 0.0) {
      throw ValidationError(std::string(field.name) +
                            " must be finite and non-negative");
    }
  }
}

// Mixed strategies: x = P(Japan discharges), y = P(others sanction),
// z = P(IAEA opposes).
struct StrategyState {
  double x = 0;
  double y = 0;
  double z = 0;

  friend bool operator==(const StrategyState&, const StrategyState&) = default;
};

struct StateDerivative {
  double dx = 0;
  double dy = 0;
  double dz = 0;

  friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

// One pure strategy per player.
struct StrategyProfile {
  bool discharge = false;
  bool sanction = false;
  bool oppose = false;
};

struct PayoffTriple {
  double japan = 0;
  double others = 0;
  double iaea = 0;
};

// Payoff cell for a pure profile. Japan's and the other countries' payoffs
// depend on (discharge, sanction) only; the IAEA's on (discharge, oppose).
inline PayoffTriple payoff_lookup(const GameParams& p, StrategyProfile s) {
  PayoffTriple out;
  if (s.discharge) {
    out.japan = s.sanction ? -p.i_j - p.c_lc - p.t_rj - p.c_dj - p.c_mj
                           : -p.c_dj - p.c_mj;
    out.others = s.sanction ? -p.c_sc + p.c_lc - p.c_mc : -p.c_mc;
    out.iaea = -p.c_mi - p.e_di - p.h_ri + (s.oppose ? p.c_ii : 0.0);
  } else {
    out.japan = (s.sanction ? p.c_hj : 0.0) - p.c_sj;
    out.others = s.sanction ? -p.c_hj : 0.0;
    out.iaea = s.oppose ? p.c_ii : 0.0;
  }
  return out;
}

namespace detail {
inline double checked_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(name) + " must lie in [0, 1]");
  }
  return v;
}
}  // namespace detail

// Expected utilities for Japan: first = discharge, second = store. The
// oppose probability z cancels out of the closed form; it is still accepted
// (and range-checked) so the signature matches the payoff-weighting oracle.
inline std::pair<double, double> expected_utilities_japan(const GameParams& p,
                                                          double y, double z) {
  detail::checked_probability(y, "y");
  detail::checked_probability(z, "z");
  const double u_discharge = -y * (p.i_j + p.c_lc + p.t_rj) - (p.c_dj + p.c_mj);
  const double u_store = y * p.c_hj - p.c_sj;
  return {u_discharge, u_store};
}

// Expected utilities for the other countries: first = sanction,
// second = no sanction. Independent of z.
inline std::pair<double, double> expected_utilities_others(const GameParams& p,
                                                           double x, double z) {
  detail::checked_probability(x, "x");
  detail::checked_probability(z, "z");
  const double u_sanction = x * (-p.c_sc + p.c_lc - p.c_mc + p.c_hj) - p.c_hj;
  const double u_accept = -x * p.c_mc;
  return {u_sanction, u_accept};
}

// Expected utilities for the IAEA: first = oppose, second = support.
// oppose - support == c_ii identically.
inline std::pair<double, double> expected_utilities_iaea(const GameParams& p,
                                                         double x, double y) {
  detail::checked_probability(x, "x");
  detail::checked_probability(y, "y");
  const double monitored_harm = x * (p.c_mi + p.e_di + p.h_ri);
  return {-monitored_harm + p.c_ii, -monitored_harm};
}

// Replicator field:
//   dx/dt = x(1-x) [ -y (i_j + c_lc + t_rj + c_hj) - (c_dj + c_mj - c_sj) ]
//   dy/dt = y(1-y) [  x (c_lc + c_hj - c_sc) - c_hj ]
//   dz/dt = z(1-z) c_ii
// No state validation here: this is the integrator's hot path, and the
// finite-difference oracle probes points slightly outside [0,1].
inline StateDerivative replicator_rhs(const GameParams& p,
                                      const StrategyState& s) {
  const double bracket_x =
      -s.y * (p.i_j + p.c_lc + p.t_rj + p.c_hj) - (p.c_dj + p.c_mj - p.c_sj);
  const double bracket_y = s.x * (p.c_lc + p.c_hj - p.c_sc) - p.c_hj;
  return {s.x * (1.0 - s.x) * bracket_x,
          s.y * (1.0 - s.y) * bracket_y,
          s.z * (1.0 - s.z) * p.c_ii};
}

// Same field applied to the state read one delay ago; the caller supplies
// that state, so the two functions agree pointwise by contract.
inline StateDerivative delayed_rhs(const GameParams& p,
                                   const StrategyState& delayed_state) {
  return replicator_rhs(p, delayed_state);
}

}  // namespace trigame

#endif
