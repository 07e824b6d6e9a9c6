#ifndef TRIGAME_LAMBERT_W_HPP
#define TRIGAME_LAMBERT_W_HPP

#include <cmath>
#include <stdexcept>
#include <string>

#include "trigame/errors.hpp"

namespace trigame {

inline constexpr double kNegInvE = -0.36787944117144233;  // -1/e

// Principal real branch of w e^w = v, defined for v >= -1/e. Halley
// iteration from a series/log seed; arguments up to ~1e-12 below the branch
// point are treated as the branch point itself.
inline double lambert_w0(double v) {
  if (!std::isfinite(v) || v < kNegInvE - 1e-12) {
    throw std::domain_error("lambert_w0: argument must be >= -1/e");
  }
  if (v == 0.0) return 0.0;

  double w;
  if (v < -0.25) {
    // expansion about the branch point in p = sqrt(2 (e v + 1))
    double p2 = 2.0 * (std::exp(1.0) * v + 1.0);
    if (p2 < 0.0) p2 = 0.0;
    const double p = std::sqrt(p2);
    w = -1.0 +
        p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
    // derivative dv/dw vanishes at the branch point; the series alone is
    // already past full double accuracy there
    if (p < 1e-4) return w;
  } else if (v < 2.0) {
    w = v * (1.0 - v);
    if (w < -0.9) w = -0.9;
  } else {
    const double l = std::log(v);
    w = l - std::log(l);
  }

  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - v;
    const double w1 = w + 1.0;
    const double denom = ew * w1 - (w + 2.0) * f / (2.0 * w1);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }

  const double residual = std::abs(w * std::exp(w) - v);
  if (residual > 1e-12 * std::max(1.0, std::abs(v))) {
    throw NumericError("lambert_w0: iteration failed for v = " +
                       std::to_string(v));
  }
  return w;
}

}  // namespace trigame

#endif
