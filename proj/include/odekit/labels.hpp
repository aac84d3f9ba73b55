#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "odekit/integrate.hpp"

namespace odekit {

// Per-transition correction vectors. err[j] corrects the coarse transition
// from node j to node j+1, so the sequence is one shorter than the node list.
struct ErrorSequence {
  std::vector<Vec> err;

  std::size_t size() const { return err.size(); }
  const Vec& operator[](std::size_t j) const { return err[j]; }
  Vec& operator[](std::size_t j) { return err[j]; }

  bool finite() const {
    for (const Vec& e : err)
      if (!e.finite()) return false;
    return true;
  }
};

struct DemoPair {
  Trajectory coarse;
  ErrorSequence errors;
};

// d demo pairs plus one query; all share (system, params, dt, stride) and
// differ only in initial condition.
struct PromptInstance {
  std::vector<DemoPair> demos;
  Trajectory query_coarse;
  std::optional<ErrorSequence> query_errors;  // training target; absent at inference
};

inline bool same_provenance(const Trajectory& a, const Trajectory& b) {
  return a.system == b.system && a.params == b.params && a.dt_base == b.dt_base &&
         a.stride == b.stride && a.scheme == b.scheme;
}

// err_j = u_fine[(j+1)*k] - u_coarse[j] - S(f, u_coarse[j], k*dt), the residual
// a single coarse step leaves against the fine reference at the next node.
inline ErrorSequence make_error_labels(const Trajectory& fine, const Trajectory& coarse) {
  if (fine.grid != GridTag::Fine || coarse.grid != GridTag::Coarse)
    throw std::invalid_argument("make_error_labels: expected one fine and one coarse trajectory");
  if (fine.system != coarse.system || !(fine.params == coarse.params) || !(fine.ic == coarse.ic))
    throw std::invalid_argument("make_error_labels: provenance mismatch");
  if (fine.dt_base != coarse.dt_base)
    throw std::invalid_argument("make_error_labels: fine/coarse base step mismatch");
  const std::size_t k = static_cast<std::size_t>(coarse.stride);
  if (fine.n_steps() != coarse.n_steps() * k)
    throw std::invalid_argument("make_error_labels: grids do not align");

  const double h = coarse.dt_effective();
  auto f = [&](const Vec& s, double t) { return rhs(coarse.system, coarse.params, s, t); };

  ErrorSequence labels;
  labels.err.reserve(coarse.n_steps());
  for (std::size_t j = 0; j < coarse.n_steps(); ++j) {
    const Vec& u_hat = coarse.states[j];
    const Vec s_inc = scheme_increment(coarse.scheme, f, u_hat, coarse.time_at(j), h);
    const Vec& u_next = fine.states[(j + 1) * k];
    labels.err.push_back(u_next - u_hat - s_inc);
  }
  return labels;
}

inline PromptInstance build_prompt(const std::vector<DemoPair>& pairs, const DemoPair& query,
                                   std::size_t d) {
  if (pairs.size() != d)
    throw std::invalid_argument("build_prompt: expected " + std::to_string(d) + " demo pairs, got " +
                                std::to_string(pairs.size()));
  for (const DemoPair& p : pairs) {
    if (!same_provenance(p.coarse, query.coarse))
      throw std::invalid_argument("build_prompt: demo/query provenance mismatch");
    if (p.errors.size() != p.coarse.n_steps())
      throw std::invalid_argument("build_prompt: demo label length mismatch");
  }
  PromptInstance inst;
  inst.demos = pairs;
  inst.query_coarse = query.coarse;
  if (!query.errors.err.empty()) inst.query_errors = query.errors;
  return inst;
}

enum class CorrectionMode { TeacherForced, Rollout };

// TeacherForced applies each correction to the stored coarse state; Rollout
// feeds the corrected state back into the stepping recursion.
inline Trajectory correct_trajectory(const Trajectory& coarse, const ErrorSequence& errors,
                                     CorrectionMode mode) {
  if (coarse.grid != GridTag::Coarse)
    throw std::invalid_argument("correct_trajectory: expected a coarse trajectory");
  if (errors.size() != coarse.n_steps())
    throw std::invalid_argument("correct_trajectory: label/trajectory length mismatch");

  const double h = coarse.dt_effective();
  auto f = [&](const Vec& s, double t) { return rhs(coarse.system, coarse.params, s, t); };

  Trajectory out = coarse;
  for (std::size_t j = 0; j < coarse.n_steps(); ++j) {
    const Vec& base =
        (mode == CorrectionMode::TeacherForced) ? coarse.states[j] : out.states[j];
    out.states[j + 1] = step(coarse.scheme, f, base, coarse.time_at(j), h) + errors[j];
    if (!out.states[j + 1].finite())
      throw IntegrationFailure(j, "non-finite corrected state");
  }
  return out;
}

// Rollout driven by a per-step label provider, for correctors that are
// re-queried with the current state (live models, baselines).
inline Trajectory rollout_correct(const Trajectory& coarse,
                                  const std::function<Vec(std::size_t, const Vec&)>& provider) {
  const double h = coarse.dt_effective();
  auto f = [&](const Vec& s, double t) { return rhs(coarse.system, coarse.params, s, t); };
  Trajectory out = coarse;
  for (std::size_t j = 0; j < coarse.n_steps(); ++j) {
    const Vec& u = out.states[j];
    out.states[j + 1] = step(coarse.scheme, f, u, coarse.time_at(j), h) + provider(j, u);
    if (!out.states[j + 1].finite())
      throw IntegrationFailure(j, "non-finite corrected state");
  }
  return out;
}

}  // namespace odekit
