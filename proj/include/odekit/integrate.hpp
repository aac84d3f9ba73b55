#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "odekit/systems.hpp"
#include "odekit/vec.hpp"

namespace odekit {

enum class StepScheme : std::uint8_t { Euler = 0, RK4 = 1 };

inline const char* scheme_name(StepScheme s) { return s == StepScheme::Euler ? "euler" : "rk4"; }

enum class GridTag : std::uint8_t { Fine = 0, Coarse = 1 };

// Raised when a step produces a non-finite state; carries the step index so
// corpus generation can record which sample blew up.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(std::size_t step_index, const std::string& what)
      : std::runtime_error(what), step_index(step_index) {}
  std::size_t step_index;
};

struct IntegrationConfig {
  double dt = 0.01;
  int n_fine_steps = 1000;
  int stride = 10;
  StepScheme scheme = StepScheme::RK4;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("IntegrationConfig: dt must be positive");
    if (n_fine_steps <= 0) throw std::invalid_argument("IntegrationConfig: n_fine_steps must be positive");
    if (stride <= 0) throw std::invalid_argument("IntegrationConfig: stride must be positive");
    if (n_fine_steps % stride != 0)
      throw std::invalid_argument("IntegrationConfig: n_fine_steps must be divisible by stride");
  }

  int n_coarse_steps() const { return n_fine_steps / stride; }
};

// One explicit step u -> u + S(f, u, h). Rhs is any callable (state, t) -> Vec.
template <class Rhs>
Vec step(StepScheme scheme, Rhs&& f, const Vec& u, double t, double h) {
  if (scheme == StepScheme::Euler) {
    return u + h * f(u, t);
  }
  const Vec k1 = f(u, t);
  const Vec k2 = f(u + (h / 2.0) * k1, t + h / 2.0);
  const Vec k3 = f(u + (h / 2.0) * k2, t + h / 2.0);
  const Vec k4 = f(u + h * k3, t + h);
  return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Vec step(StepScheme scheme, SystemId system, const ParamVector& params, const Vec& u,
                double t, double h) {
  Vec out = step(
      scheme, [&](const Vec& s, double tt) { return rhs(system, params, s, tt); }, u, t, h);
  if (!out.finite()) throw IntegrationFailure(0, "non-finite state after single step");
  return out;
}

// The scheme increment S(f, u, h) such that u_next = u + S.
template <class Rhs>
Vec scheme_increment(StepScheme scheme, Rhs&& f, const Vec& u, double t, double h) {
  return step(scheme, f, u, t, h) - u;
}

struct Trajectory {
  SystemId system;
  ParamVector params;
  Vec ic;
  double dt_base = 0.0;  // fine step size underlying the grid
  int stride = 1;        // effective step = stride * dt_base
  StepScheme scheme = StepScheme::RK4;
  GridTag grid = GridTag::Fine;
  std::vector<Vec> states;  // length n_steps + 1, states[0] == ic

  double dt_effective() const { return static_cast<double>(stride) * dt_base; }
  // Index arithmetic keeps fine and coarse node times bitwise equal.
  double time_at(std::size_t j) const {
    return static_cast<double>(j * static_cast<std::size_t>(stride)) * dt_base;
  }
  std::size_t n_steps() const { return states.empty() ? 0 : states.size() - 1; }
};

// Integrates an arbitrary callable RHS on a uniform grid of n steps of size
// stride*dt_base; times are always formed as (index*stride)*dt_base.
template <class Rhs>
std::vector<Vec> integrate_path(StepScheme scheme, Rhs&& f, const Vec& ic, double dt_base,
                                int stride, int n_steps) {
  std::vector<Vec> states;
  states.reserve(static_cast<std::size_t>(n_steps) + 1);
  states.push_back(ic);
  const double h = static_cast<double>(stride) * dt_base;
  Vec u = ic;
  for (int j = 0; j < n_steps; ++j) {
    const double t = static_cast<double>(static_cast<std::size_t>(j) *
                                         static_cast<std::size_t>(stride)) *
                     dt_base;
    u = step(scheme, f, u, t, h);
    if (!u.finite()) throw IntegrationFailure(static_cast<std::size_t>(j), "non-finite state");
    states.push_back(u);
  }
  return states;
}

inline Trajectory simulate(SystemId system, const ParamVector& params, const Vec& ic,
                           const IntegrationConfig& config, GridTag grid) {
  config.validate();
  if (!ic.finite()) throw std::invalid_argument("simulate: non-finite initial condition");
  if (static_cast<int>(ic.size()) != system_dim(system))
    throw std::invalid_argument("simulate: IC dimension mismatch");

  Trajectory traj;
  traj.system = system;
  traj.params = params;
  traj.ic = ic;
  traj.dt_base = config.dt;
  traj.scheme = config.scheme;
  traj.grid = grid;
  traj.stride = (grid == GridTag::Fine) ? 1 : config.stride;
  const int n = (grid == GridTag::Fine) ? config.n_fine_steps : config.n_coarse_steps();

  auto f = [&](const Vec& s, double t) { return rhs(system, params, s, t); };
  try {
    traj.states = integrate_path(config.scheme, f, ic, config.dt, traj.stride, n);
  } catch (const IntegrationFailure& e) {
    throw IntegrationFailure(e.step_index,
                             std::string("integration failure in ") + system_info(system).name +
                                 " (" + (grid == GridTag::Fine ? "fine" : "coarse") +
                                 " grid) at step " + std::to_string(e.step_index));
  }
  return traj;
}

}  // namespace odekit
