#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "odekit/integrate.hpp"

namespace odekit {

// A problem with a known closed-form solution, for empirical order checks.
struct ConvergenceCase {
  std::function<Vec(const Vec&, double)> rhs;
  Vec ic;
  double horizon = 1.0;
  std::function<Vec(double)> exact;
};

// Least-squares slope of log(error) vs log(h) over h in {h0, h0/2, h0/4, h0/8}.
// Returns nullopt when every error vanishes (scheme is exact on this case).
inline std::optional<double> measured_order(StepScheme scheme, const ConvergenceCase& tc,
                                            double h0) {
  std::vector<double> log_h, log_e;
  double h = h0;
  for (int level = 0; level < 4; ++level, h /= 2.0) {
    const int n = static_cast<int>(std::llround(tc.horizon / h));
    const auto states = integrate_path(scheme, tc.rhs, tc.ic, h, 1, n);
    const Vec ref = tc.exact(static_cast<double>(n) * h);
    const double err = (states.back() - ref).norm();
    if (err > 1e-14) {
      log_h.push_back(std::log(h));
      log_e.push_back(std::log(err));
    }
  }
  if (log_h.size() < 2) return std::nullopt;  // errors at round-off: exact

  const std::size_t m = log_h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sx += log_h[i];
    sy += log_e[i];
    sxx += log_h[i] * log_h[i];
    sxy += log_h[i] * log_e[i];
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

}  // namespace odekit
