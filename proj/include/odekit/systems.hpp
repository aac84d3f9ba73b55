#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "odekit/rng.hpp"
#include "odekit/vec.hpp"

namespace odekit {

enum class SystemId : std::uint8_t {
  LotkaVolterra = 0,
  VanDerPol = 1,
  DampedOscillator = 2,
  Lorenz = 3,
  FitzhughNagumo = 4,
  FallingObject = 5,
  PendulumGravity = 6,
  DrivenDampedPendulum = 7,
  Rossler = 8,
};

inline constexpr int kNumSystems = 9;
inline constexpr int kMaxDim = 3;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

enum class RangeTag { Pretraining, Testing };

// Closed intervals per parameter name.
using ParamRanges = std::map<std::string, Interval>;

struct BehaviorRegime {
  std::string name;
  ParamRanges box;
};

// Parameter values stored in name-sorted order, matching the system's
// declared parameter list. Positional access keeps the right-hand sides
// free of string lookups.
struct ParamVector {
  SystemId system;
  std::array<double, 4> values{};  // up to 4 named coefficients
  std::size_t count = 0;

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  bool finite() const {
    for (std::size_t i = 0; i < count; ++i)
      if (!std::isfinite(values[i])) return false;
    return true;
  }

  friend bool operator==(const ParamVector& a, const ParamVector& b) {
    if (a.system != b.system || a.count != b.count) return false;
    for (std::size_t i = 0; i < a.count; ++i)
      if (a.values[i] != b.values[i]) return false;
    return true;
  }
};

struct SystemInfo {
  SystemId id;
  std::string name;  // snake_case identifier used by the CLI and registry file
  int dim;
  // Name-sorted coefficient list; ParamVector values follow this order.
  std::vector<std::string> param_names;
  // Coefficients held at a fixed documented value instead of being sampled.
  std::map<std::string, double> fixed_constants;
  std::vector<Interval> ic_box;  // one interval per state dimension
  double dt;                     // fine step size
  int stride;                    // coarse step = stride * dt
  ParamRanges pretraining;       // empty when no pretraining range is defined
  ParamRanges testing;
  std::vector<BehaviorRegime> regimes;
};

namespace detail {

inline std::vector<SystemInfo> make_registry() {
  const double pi4 = std::atan(1.0);  // pi/4
  std::vector<SystemInfo> reg(kNumSystems);

  {
    SystemInfo& s = reg[0];
    s.id = SystemId::LotkaVolterra;
    s.name = "lotka_volterra";
    s.dim = 2;
    s.param_names = {"alpha", "beta", "delta", "gamma"};
    s.ic_box = {{10.0, 100.0}, {5.0, 10.0}};
    s.dt = 0.001;
    s.stride = 100;
    s.pretraining = {{"alpha", {0.1, 1.0}},
                     {"beta", {0.01, 0.1}},
                     {"gamma", {0.1, 1.0}},
                     {"delta", {0.01, 0.1}}};
    s.testing = {{"alpha", {0.05, 1.2}},
                 {"beta", {0.005, 0.15}},
                 {"gamma", {0.05, 1.2}},
                 {"delta", {0.005, 0.15}}};
  }
  {
    SystemInfo& s = reg[1];
    s.id = SystemId::VanDerPol;
    s.name = "van_der_pol";
    s.dim = 2;
    s.param_names = {"mu"};
    s.ic_box = {{-1.0, 1.0}, {-0.5, 0.5}};
    s.dt = 0.01;
    s.stride = 10;
    s.pretraining = {{"mu", {0.1, 5.0}}};
    s.testing = {{"mu", {0.05, 10.0}}};
  }
  {
    SystemInfo& s = reg[2];
    s.id = SystemId::DampedOscillator;
    s.name = "damped_oscillator";
    s.dim = 2;
    s.param_names = {"omega", "zeta"};
    s.ic_box = {{-2.0, 2.0}, {-0.1, 0.1}};
    s.dt = 0.0001;
    s.stride = 100;
    s.pretraining = {{"zeta", {0.1, 2.0}}, {"omega", {0.5, 5.0}}};
    s.testing = {{"zeta", {0.1, 7.0}}, {"omega", {0.5, 8.0}}};
  }
  {
    SystemInfo& s = reg[3];
    s.id = SystemId::Lorenz;
    s.name = "lorenz";
    s.dim = 3;
    s.param_names = {"beta", "rho", "sigma"};
    s.ic_box = {{-5.0, 5.0}, {-5.0, 5.0}, {0.0, 25.0}};
    s.dt = 0.0001;
    s.stride = 100;
    s.pretraining = {{"sigma", {8.0, 12.0}}, {"rho", {20.0, 30.0}}, {"beta", {2.0, 3.0}}};
    s.testing = {{"sigma", {5.0, 15.0}}, {"rho", {15.0, 35.0}}, {"beta", {1.5, 3.5}}};
    s.regimes = {
        {"oscillatory",
         {{"sigma", {5.0, 15.0}}, {"rho", {13.0, 24.74}}, {"beta", {1.5, 3.5}}}},
        {"chaotic",
         {{"sigma", {5.0, 15.0}}, {"rho", {24.74, 100.0}}, {"beta", {1.5, 3.5}}}},
        {"chaotic_complex",
         {{"sigma", {5.0, 15.0}}, {"rho", {24.74, 150.0}}, {"beta", {1.5, 3.5}}}},
    };
  }
  {
    SystemInfo& s = reg[4];
    s.id = SystemId::FitzhughNagumo;
    s.name = "fitzhugh_nagumo";
    s.dim = 2;
    s.param_names = {"I", "a", "b", "epsilon"};
    s.ic_box = {{-1.0, 1.0}, {-0.5, 0.5}};
    s.dt = 0.005;
    s.stride = 100;
    s.testing = {{"epsilon", {0.005, 0.15}},
                 {"a", {0.4, 1.2}},
                 {"b", {0.4, 1.2}},
                 {"I", {0.3, 2.0}}};
    s.regimes = {
        {"resting",
         {{"I", {0.0, 0.1}}, {"epsilon", {0.08, 0.1}}, {"a", {0.5, 0.7}}, {"b", {0.1, 0.2}}}},
        {"spikes",
         {{"I", {0.1, 0.5}}, {"epsilon", {0.01, 0.5}}, {"a", {0.7, 1.0}}, {"b", {0.2, 0.25}}}},
        {"bursting",
         {{"I", {0.5, 1.5}}, {"epsilon", {0.01, 0.02}}, {"a", {0.9, 1.1}}, {"b", {0.15, 0.2}}}},
        {"oscillatory",
         {{"I", {0.0, 2.0}}, {"epsilon", {0.01, 0.1}}, {"a", {0.5, 1.2}}, {"b", {0.1, 0.3}}}},
    };
  }
  {
    SystemInfo& s = reg[5];
    s.id = SystemId::FallingObject;
    s.name = "falling_object";
    s.dim = 2;
    s.param_names = {"c", "g"};
    s.fixed_constants = {{"g", 9.8}};
    s.ic_box = {{0.0, 100.0}, {0.0, 2.0}};
    s.dt = 0.01;
    s.stride = 20;
    s.testing = {{"c", {0.01, 2.0}}};
  }
  {
    SystemInfo& s = reg[6];
    s.id = SystemId::PendulumGravity;
    s.name = "pendulum_gravity";
    s.dim = 2;
    s.param_names = {"b", "g", "l"};
    s.fixed_constants = {{"g", 9.8}};
    s.ic_box = {{0.0, pi4}, {-pi4, pi4}};
    s.dt = 0.01;
    s.stride = 20;
    s.testing = {{"l", {0.5, 2.0}}, {"b", {0.05, 1.0}}};
  }
  {
    SystemInfo& s = reg[7];
    s.id = SystemId::DrivenDampedPendulum;
    s.name = "driven_damped_pendulum";
    s.dim = 2;
    s.param_names = {"A", "b", "c", "omega"};
    s.ic_box = {{-pi4, pi4}, {-0.5, 0.5}};
    s.dt = 0.01;
    s.stride = 20;
    s.testing = {{"A", {0.1, 2.0}}, {"b", {0.1, 2.0}}, {"c", {1.0, 5.0}}, {"omega", {0.5, 3.0}}};
    s.regimes = {
        {"underdamped",
         {{"b", {0.01, 0.1}}, {"c", {1.0, 2.0}}, {"A", {0.1, 0.5}}, {"omega", {0.5, 3.0}}}},
        {"overdamped",
         {{"b", {0.5, 2.0}}, {"c", {1.0, 2.0}}, {"A", {0.1, 0.5}}, {"omega", {0.5, 3.0}}}},
        {"chaotic",
         {{"b", {0.1, 0.2}}, {"c", {1.0, 2.0}}, {"A", {1.0, 3.0}}, {"omega", {0.5, 3.0}}}},
    };
  }
  {
    SystemInfo& s = reg[8];
    s.id = SystemId::Rossler;
    s.name = "rossler";
    s.dim = 3;
    s.param_names = {"a", "b", "c"};
    s.ic_box = {{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};
    s.dt = 0.001;
    s.stride = 100;
    s.testing = {{"a", {0.05, 0.35}}, {"b", {0.05, 0.35}}, {"c", {3.0, 10.0}}};
    s.regimes = {
        {"periodic", {{"a", {0.1, 0.2}}, {"b", {0.1, 0.2}}, {"c", {4.0, 5.0}}}},
        {"chaotic", {{"a", {0.2, 0.3}}, {"b", {0.2, 0.25}}, {"c", {5.0, 9.0}}}},
        {"hyperchaos", {{"a", {0.25, 0.4}}, {"b", {0.25, 0.3}}, {"c", {9.0, 13.0}}}},
    };
  }
  return reg;
}

}  // namespace detail

inline const std::vector<SystemInfo>& registry() {
  static const std::vector<SystemInfo> reg = detail::make_registry();
  return reg;
}

inline const SystemInfo& system_info(SystemId id) {
  return registry()[static_cast<std::size_t>(id)];
}

inline int system_dim(SystemId id) { return system_info(id).dim; }

inline const SystemInfo* find_system(const std::string& name) {
  for (const SystemInfo& s : registry())
    if (s.name == name) return &s;
  return nullptr;
}

inline std::size_t param_index(SystemId id, const std::string& name) {
  const auto& names = system_info(id).param_names;
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end())
    throw std::invalid_argument("unknown parameter '" + name + "' for system " +
                                system_info(id).name);
  return static_cast<std::size_t>(it - names.begin());
}

inline ParamVector make_params(SystemId id, const std::map<std::string, double>& named) {
  const SystemInfo& info = system_info(id);
  if (named.size() != info.param_names.size())
    throw std::invalid_argument("parameter count mismatch for system " + info.name);
  ParamVector p;
  p.system = id;
  p.count = info.param_names.size();
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value))
      throw std::invalid_argument("non-finite value for parameter '" + name + "'");
    p.values[param_index(id, name)] = value;
  }
  return p;
}

inline double param_value(const ParamVector& p, const std::string& name) {
  return p.values[param_index(p.system, name)];
}

// du/dt evaluated at (state, t). Only the driven damped pendulum depends on t.
inline Vec rhs(SystemId id, const ParamVector& params, const Vec& state, double t) {
  if (params.system != id) throw std::invalid_argument("rhs: parameter/system mismatch");
  const SystemInfo& info = system_info(id);
  if (static_cast<int>(state.size()) != info.dim)
    throw std::invalid_argument("rhs: state dimension mismatch for system " + info.name);

  Vec d(state.size());
  switch (id) {
    case SystemId::LotkaVolterra: {
      const double alpha = params[0], beta = params[1], delta = params[2], gamma = params[3];
      const double x = state[0], y = state[1];
      d[0] = alpha * x - beta * x * y;
      d[1] = delta * x * y - gamma * y;
      break;
    }
    case SystemId::VanDerPol: {
      const double mu = params[0];
      const double x = state[0], v = state[1];
      d[0] = v;
      d[1] = mu * (1.0 - x * x) * v - x;
      break;
    }
    case SystemId::DampedOscillator: {
      const double omega = params[0], zeta = params[1];
      const double x = state[0], v = state[1];
      d[0] = v;
      d[1] = -2.0 * zeta * omega * v - omega * omega * x;
      break;
    }
    case SystemId::Lorenz: {
      const double beta = params[0], rho = params[1], sigma = params[2];
      const double x = state[0], y = state[1], z = state[2];
      d[0] = sigma * (y - x);
      d[1] = x * (rho - z) - y;
      d[2] = x * y - beta * z;
      break;
    }
    case SystemId::FitzhughNagumo: {
      const double I = params[0], a = params[1], b = params[2], eps = params[3];
      const double v = state[0], w = state[1];
      d[0] = v - v * v * v / 3.0 - w + I;
      d[1] = eps * (v + a - b * w);
      break;
    }
    case SystemId::FallingObject: {
      const double c = params[0], g = params[1];
      const double v = state[1];
      d[0] = v;
      d[1] = g - c * v;
      break;
    }
    case SystemId::PendulumGravity: {
      const double b = params[0], g = params[1], l = params[2];
      const double theta = state[0], v = state[1];
      d[0] = v;
      d[1] = -(g / l) * std::sin(theta) - b * v;
      break;
    }
    case SystemId::DrivenDampedPendulum: {
      const double A = params[0], b = params[1], c = params[2], omega = params[3];
      const double theta = state[0], v = state[1];
      d[0] = v;
      d[1] = -b * v - c * std::sin(theta) + A * std::cos(omega * t);
      break;
    }
    case SystemId::Rossler: {
      const double a = params[0], b = params[1], c = params[2];
      const double x = state[0], y = state[1], z = state[2];
      d[0] = -y - z;
      d[1] = x + a * y;
      d[2] = b + z * (x - c);
      break;
    }
  }
  return d;
}

// Draws each sampled coefficient independently and uniformly from its range,
// in name-sorted order; fixed constants come from the registry's default table.
inline ParamVector sample_params(SystemId id, const ParamRanges& ranges, std::uint64_t seed) {
  const SystemInfo& info = system_info(id);
  ParamVector p;
  p.system = id;
  p.count = info.param_names.size();
  Rng rng(seed);
  for (std::size_t i = 0; i < info.param_names.size(); ++i) {
    const std::string& name = info.param_names[i];
    auto r = ranges.find(name);
    if (r != ranges.end()) {
      if (r->second.lo > r->second.hi)
        throw std::invalid_argument("invalid range for parameter '" + name + "'");
      p.values[i] = rng.uniform(r->second.lo, r->second.hi);
    } else {
      auto f = info.fixed_constants.find(name);
      if (f == info.fixed_constants.end())
        throw std::invalid_argument("missing range for parameter '" + name + "' of system " +
                                    info.name);
      p.values[i] = f->second;
    }
  }
  return p;
}

inline const ParamRanges& ranges_for(SystemId id, RangeTag tag) {
  const SystemInfo& info = system_info(id);
  if (tag == RangeTag::Pretraining && !info.pretraining.empty()) return info.pretraining;
  return info.testing;
}

inline Vec sample_initial_condition(SystemId id, std::uint64_t seed) {
  const SystemInfo& info = system_info(id);
  Vec s(static_cast<std::size_t>(info.dim));
  Rng rng(seed);
  for (int i = 0; i < info.dim; ++i) s[i] = rng.uniform(info.ic_box[i].lo, info.ic_box[i].hi);
  return s;
}

inline const BehaviorRegime* find_regime(SystemId id, const std::string& name) {
  for (const BehaviorRegime& r : system_info(id).regimes)
    if (r.name == name) return &r;
  return nullptr;
}

inline ParamVector regime_params(SystemId id, const BehaviorRegime& regime, std::uint64_t seed) {
  const BehaviorRegime* own = find_regime(id, regime.name);
  if (own == nullptr)
    throw std::invalid_argument("regime '" + regime.name + "' does not belong to system " +
                                system_info(id).name);
  return sample_params(id, regime.box, seed);
}

}  // namespace odekit
