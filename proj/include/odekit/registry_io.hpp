#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "odekit/systems.hpp"

namespace odekit {

// JSON registry file: one record per system with dimension, parameter names,
// IC boxes, sampling ranges, fixed constants and behavior regimes. The file
// shipped under data/ mirrors the built-in tables; loading validates that a
// user-supplied registry stays structurally sound.

inline nlohmann::json registry_to_json() {
  nlohmann::json root = nlohmann::json::array();
  for (const SystemInfo& s : registry()) {
    nlohmann::json j;
    j["name"] = s.name;
    j["dim"] = s.dim;
    j["params"] = s.param_names;
    j["dt"] = s.dt;
    j["stride"] = s.stride;
    j["integration"] = "rk4";
    nlohmann::json ic = nlohmann::json::array();
    for (const Interval& iv : s.ic_box) ic.push_back({iv.lo, iv.hi});
    j["ic"] = ic;
    auto ranges_json = [](const ParamRanges& r) {
      nlohmann::json o = nlohmann::json::object();
      for (const auto& [k, iv] : r) o[k] = {iv.lo, iv.hi};
      return o;
    };
    if (!s.pretraining.empty()) j["pretraining"] = ranges_json(s.pretraining);
    j["testing"] = ranges_json(s.testing);
    if (!s.fixed_constants.empty()) {
      nlohmann::json f = nlohmann::json::object();
      for (const auto& [k, v] : s.fixed_constants) f[k] = v;
      j["fixed"] = f;
    }
    if (!s.regimes.empty()) {
      nlohmann::json regs = nlohmann::json::object();
      for (const BehaviorRegime& r : s.regimes) regs[r.name] = ranges_json(r.box);
      j["regimes"] = regs;
    }
    root.push_back(j);
  }
  return root;
}

inline void save_registry(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write registry file: " + path);
  out << registry_to_json().dump(2) << "\n";
}

inline std::vector<SystemInfo> load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open registry file: " + path);
  nlohmann::json root;
  in >> root;

  auto parse_ranges = [](const nlohmann::json& o) {
    ParamRanges r;
    for (auto it = o.begin(); it != o.end(); ++it) {
      const auto& iv = it.value();
      Interval bounds{iv.at(0).get<double>(), iv.at(1).get<double>()};
      if (bounds.lo > bounds.hi)
        throw std::runtime_error("registry: interval lower bound exceeds upper bound for '" +
                                 it.key() + "'");
      r[it.key()] = bounds;
    }
    return r;
  };

  std::vector<SystemInfo> out;
  for (const auto& j : root) {
    const SystemInfo* builtin = find_system(j.at("name").get<std::string>());
    if (builtin == nullptr)
      throw std::runtime_error("registry: unknown system '" + j.at("name").get<std::string>() + "'");
    SystemInfo s = *builtin;
    s.dim = j.at("dim").get<int>();
    if (s.dim != builtin->dim) throw std::runtime_error("registry: dimension mismatch for " + s.name);
    s.param_names = j.at("params").get<std::vector<std::string>>();
    s.dt = j.at("dt").get<double>();
    s.stride = j.at("stride").get<int>();
    s.ic_box.clear();
    for (const auto& iv : j.at("ic"))
      s.ic_box.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    if (static_cast<int>(s.ic_box.size()) != s.dim)
      throw std::runtime_error("registry: IC box size mismatch for " + s.name);
    s.pretraining = j.contains("pretraining") ? parse_ranges(j["pretraining"]) : ParamRanges{};
    s.testing = parse_ranges(j.at("testing"));
    s.fixed_constants.clear();
    if (j.contains("fixed"))
      for (auto it = j["fixed"].begin(); it != j["fixed"].end(); ++it)
        s.fixed_constants[it.key()] = it.value().get<double>();
    s.regimes.clear();
    if (j.contains("regimes"))
      for (auto it = j["regimes"].begin(); it != j["regimes"].end(); ++it)
        s.regimes.push_back({it.key(), parse_ranges(it.value())});
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace odekit
