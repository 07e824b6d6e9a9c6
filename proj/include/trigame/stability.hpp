#ifndef TRIGAME_STABILITY_HPP
#define TRIGAME_STABILITY_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trigame/errors.hpp"
#include "trigame/game_model.hpp"
#include "trigame/lambert_w.hpp"

namespace trigame {

inline constexpr double kSignTie = 1e-12;

enum class Verdict { ess, non_ess, delay_destabilized, marginal };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ess: return "ESS";
    case Verdict::non_ess: return "non-ESS";
    case Verdict::delay_destabilized: return "delay-destabilized";
    case Verdict::marginal: return "marginal";
  }
  return "?";
}

// Pure-strategy corners in canonical order: origin, then single deviations
// x, y, z, then the pairs xy, xz, yz, then all three.
inline constexpr std::array<StrategyState, 8> kCorners{{{0, 0, 0},
                                                        {1, 0, 0},
                                                        {0, 1, 0},
                                                        {0, 0, 1},
                                                        {1, 1, 0},
                                                        {1, 0, 1},
                                                        {0, 1, 1},
                                                        {1, 1, 1}}};

inline StrategyState corner_point(int index) {
  if (index < 1 || index > 8) {
    throw std::domain_error("corner index must be in 1..8");
  }
  return kCorners[static_cast<std::size_t>(index - 1)];
}

// Diagonal of the Jacobian of the replicator field at a corner, in (x, y, z)
// order. Off-diagonal entries vanish there because every component carries
// the factor u(1-u).
inline std::array<double, 3> linearized_coefficients(const GameParams& p,
                                                     int corner_index) {
  const StrategyState c = corner_point(corner_index);
  const double bracket_x =
      -c.y * (p.i_j + p.c_lc + p.t_rj + p.c_hj) - (p.c_dj + p.c_mj - p.c_sj);
  const double bracket_y = c.x * (p.c_lc + p.c_hj - p.c_sc) - p.c_hj;
  return {(1.0 - 2.0 * c.x) * bracket_x, (1.0 - 2.0 * c.y) * bracket_y,
          (1.0 - 2.0 * c.z) * p.c_ii};
}

struct Root {
  double re = 0;
  double im = 0;
};

// Rightmost root of the scalar characteristic equation
//   lambda = a exp(-lambda tau).
// tau = 0 gives lambda = a. For a*tau >= -1/e the root is real,
// W0(a tau)/tau. Below -1/e the rightmost pair is complex; it is found by
// damped Newton (complex, i.e. 2-D) on u e^u = a*tau with u = lambda*tau.
// The root with non-negative imaginary part is returned.
inline Root rightmost_root(double a, double tau) {
  if (!std::isfinite(a)) {
    throw std::domain_error("rightmost_root: coefficient must be finite");
  }
  if (!std::isfinite(tau) || tau < 0.0) {
    throw std::domain_error("rightmost_root: tau must be >= 0");
  }
  if (tau == 0.0) return {a, 0.0};

  const double q = a * tau;
  Root root;
  if (q >= kNegInvE) {
    root = {lambert_w0(q) / tau, 0.0};
  } else {
    std::complex<double> u;
    if (q > -1.5) {
      // branch-point expansion with imaginary p = i sqrt(-2 (e q + 1))
      const std::complex<double> p(0.0, std::sqrt(-2.0 * (std::exp(1.0) * q + 1.0)));
      u = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
    } else {
      u = std::log(std::complex<double>(q, 0.0));  // ln|q| + i pi
    }
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const std::complex<double> eu = std::exp(u);
      const std::complex<double> f = u * eu - q;
      if (std::abs(f) <= 1e-14 * (1.0 + std::abs(q))) {
        converged = true;
        break;
      }
      std::complex<double> step = f / (eu * (u + 1.0));
      const double f_now = std::abs(f);
      std::complex<double> candidate = u - step;
      for (int halving = 0; halving < 60; ++halving) {
        if (std::abs(candidate * std::exp(candidate) - q) < f_now) break;
        step *= 0.5;
        candidate = u - step;
      }
      u = candidate;
    }
    if (!converged) {
      throw NumericError("rightmost_root: Newton did not converge for a = " +
                         std::to_string(a) + ", tau = " + std::to_string(tau));
    }
    const std::complex<double> lambda = u / tau;
    root = {lambda.real(), std::abs(lambda.imag())};
  }

  const std::complex<double> lambda(root.re, root.im);
  const std::complex<double> residual = lambda - a * std::exp(-lambda * tau);
  if (std::abs(residual) > 1e-10) {
    throw NumericError("rightmost_root: residual check failed for a = " +
                       std::to_string(a) + ", tau = " + std::to_string(tau));
  }
  return root;
}

// Expected coefficient signs per corner in (x, y, z) order, for strictly
// positive parameters: '+' / '-' always hold, '*' depends on the parameter
// regime. For corners 4, 6 and 8 the starred-looking first entries are
// listed as '-' because that is the sign under the corner's own stability
// condition (condition 1, 2, 3 respectively).
inline constexpr std::array<std::array<char, 3>, 8> kSignClaims{{
    {'*', '-', '+'},
    {'*', '*', '+'},
    {'*', '+', '+'},
    {'-', '-', '-'},
    {'*', '*', '+'},
    {'-', '-', '-'},
    {'*', '+', '-'},
    {'-', '-', '-'},
}};

struct Equilibrium {
  int index = 0;  // 1..8
  StrategyState point{};
  std::array<double, 3> coefficients{};
  std::array<Root, 3> roots{};
  Verdict verdict = Verdict::non_ess;
  std::array<char, 3> sign_pattern{};
};

struct ComparisonClause {
  double lhs = 0;
  double rhs = 0;
  char relation = '<';
  bool holds = false;
};

struct ConditionRow {
  std::vector<ComparisonClause> clauses;
  bool holds = false;
};

// The three parameter regimes that make corner 4, 6 or 8 the unique ESS:
//   condition 1: c_sj < c_mj + c_dj
//   condition 2: c_sj > c_mj + c_dj  and  c_lc < c_sc
//   condition 3: c_lc > c_sc  and  c_sj > c_mj + c_dj + t_rj + c_hj + c_lc + i_j
struct ConditionReport {
  ConditionRow condition1;
  ConditionRow condition2;
  ConditionRow condition3;
};

inline ConditionReport make_condition_report(const GameParams& p) {
  auto less = [](double lhs, double rhs) {
    return ComparisonClause{lhs, rhs, '<', lhs < rhs};
  };
  auto greater = [](double lhs, double rhs) {
    return ComparisonClause{lhs, rhs, '>', lhs > rhs};
  };
  auto fold = [](ConditionRow& row) {
    row.holds = true;
    for (const auto& clause : row.clauses) row.holds = row.holds && clause.holds;
  };
  ConditionReport report;
  report.condition1.clauses = {less(p.c_sj, p.c_mj + p.c_dj)};
  report.condition2.clauses = {greater(p.c_sj, p.c_mj + p.c_dj),
                               less(p.c_lc, p.c_sc)};
  report.condition3.clauses = {
      greater(p.c_lc, p.c_sc),
      greater(p.c_sj, p.c_mj + p.c_dj + p.t_rj + p.c_hj + p.c_lc + p.i_j)};
  fold(report.condition1);
  fold(report.condition2);
  fold(report.condition3);
  return report;
}

struct InteriorPoint {
  enum class Status { nonexistent, degenerate };
  Status status = Status::nonexistent;
  std::optional<double> x;  // set when c_ii = 0 and the x denominator is nonzero
  std::optional<double> y;  // set when c_ii = 0 and the y denominator is nonzero
  std::string note;
};

inline InteriorPoint interior_point(const GameParams& p) {
  InteriorPoint out;
  if (std::abs(p.c_ii) > kSignTie) {
    char value[32];
    std::snprintf(value, sizeof value, "%g", p.c_ii);
    out.status = InteriorPoint::Status::nonexistent;
    out.note = "no interior equilibrium: the z component requires c_ii = 0, "
               "but c_ii = " + std::string(value);
    return out;
  }
  out.status = InteriorPoint::Status::degenerate;
  out.note = "degenerate family: z is unconstrained when c_ii = 0";
  const double denom_x = p.c_lc + p.c_hj - p.c_sc;
  if (std::abs(denom_x) > kSignTie) {
    out.x = p.c_hj / denom_x;
  } else {
    out.note += "; x denominator c_lc + c_hj - c_sc vanishes";
  }
  const double denom_y = p.i_j + p.c_lc + p.t_rj + p.c_hj;
  if (std::abs(denom_y) > kSignTie) {
    out.y = (p.c_sj - p.c_dj - p.c_mj) / denom_y;
  } else {
    out.note += "; y denominator i_j + c_lc + t_rj + c_hj vanishes";
  }
  return out;
}

struct EquilibriumAnalysis {
  std::array<Equilibrium, 8> corners{};
  InteriorPoint interior{};
  ConditionReport conditions{};
  double tau = 0;

  std::vector<int> ess_indices() const {
    std::vector<int> out;
    for (const auto& eq : corners) {
      if (eq.verdict == Verdict::ess) out.push_back(eq.index);
    }
    return out;
  }
};

// Verdict for one corner: ESS needs all coefficients negative and every
// mode inside the delay-stability wedge a*tau > -pi/2 (stable iff a < 0 and
// |a| tau < pi/2 for dX/dt = a X(t - tau)). Negative signs with a violated
// wedge are delay-destabilized; a coefficient within the tie tolerance of
// zero makes the corner marginal, never ESS.
inline Verdict classify_coefficients(const std::array<double, 3>& a,
                                     double tau) {
  bool any_tie = false;
  bool all_negative = true;
  for (double ai : a) {
    if (std::abs(ai) <= kSignTie) any_tie = true;
    if (!(ai < 0.0)) all_negative = false;
  }
  if (any_tie) return Verdict::marginal;
  if (!all_negative) return Verdict::non_ess;
  constexpr double half_pi = std::numbers::pi / 2.0;
  for (double ai : a) {
    if (!(ai * tau > -half_pi)) return Verdict::delay_destabilized;
  }
  return Verdict::ess;
}

inline EquilibriumAnalysis classify(const GameParams& params, double tau) {
  params.validate();
  if (!std::isfinite(tau) || tau < 0.0) {
    throw std::domain_error("classify: tau must be >= 0");
  }
  EquilibriumAnalysis out;
  out.tau = tau;
  out.conditions = make_condition_report(params);
  out.interior = interior_point(params);
  for (int index = 1; index <= 8; ++index) {
    Equilibrium eq;
    eq.index = index;
    eq.point = corner_point(index);
    eq.coefficients = linearized_coefficients(params, index);
    for (std::size_t c = 0; c < 3; ++c) {
      eq.roots[c] = rightmost_root(eq.coefficients[c], tau);
    }
    eq.verdict = classify_coefficients(eq.coefficients, tau);
    eq.sign_pattern = kSignClaims[static_cast<std::size_t>(index - 1)];
    out.corners[static_cast<std::size_t>(index - 1)] = eq;
  }
  return out;
}

inline EquilibriumAnalysis enumerate_equilibria(const GameParams& params) {
  return classify(params, params.tau);
}

// Nearest corner when the state is within tol of one (in the infinity norm).
inline std::optional<int> corner_at(const StrategyState& s, double tol) {
  const StrategyState corner{s.x < 0.5 ? 0.0 : 1.0, s.y < 0.5 ? 0.0 : 1.0,
                             s.z < 0.5 ? 0.0 : 1.0};
  const double dist = std::max({std::abs(s.x - corner.x),
                                std::abs(s.y - corner.y),
                                std::abs(s.z - corner.z)});
  if (dist >= tol) return std::nullopt;
  for (int index = 1; index <= 8; ++index) {
    if (corner == corner_point(index)) return index;
  }
  return std::nullopt;
}

}  // namespace trigame

#endif
