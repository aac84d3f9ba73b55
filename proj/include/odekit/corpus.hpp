#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "odekit/labels.hpp"
#include "odekit/rng.hpp"
#include "odekit/systems.hpp"

namespace odekit {

enum class SplitTag : std::uint8_t { Train = 0, Test = 1 };

// One (params, IC) sample: the coarse trajectory plus its correction labels.
// Fine trajectories are not persisted; they are cheap to regenerate from the
// stored provenance when a reference is needed.
struct CorpusRecord {
  SystemId system;
  ParamVector params;
  Vec ic;
  double dt = 0.0;
  int stride = 1;
  StepScheme scheme = StepScheme::RK4;
  int n_coarse = 0;
  std::vector<Vec> coarse;  // n_coarse + 1 states
  std::vector<Vec> err;     // n_coarse transitions
  int variation = 0;
  int traj_index = 0;
  std::uint64_t ic_seed = 0;
  SplitTag split = SplitTag::Train;

  Trajectory coarse_trajectory() const {
    Trajectory t;
    t.system = system;
    t.params = params;
    t.ic = ic;
    t.dt_base = dt;
    t.stride = stride;
    t.scheme = scheme;
    t.grid = GridTag::Coarse;
    t.states = coarse;
    return t;
  }

  DemoPair demo_pair() const { return DemoPair{coarse_trajectory(), ErrorSequence{err}}; }

  IntegrationConfig integration_config() const {
    return IntegrationConfig{dt, n_coarse * stride, stride, scheme};
  }
};

// Per-dimension affine statistics for states plus a scale for error labels,
// computed over a training corpus and reused verbatim at evaluation time.
struct NormStats {
  int dim = 0;
  std::array<double, kMaxDim> mean{};
  std::array<double, kMaxDim> scale{};      // state spread, floored away from zero
  std::array<double, kMaxDim> err_scale{};  // label spread, floored away from zero

  double norm_state(double v, int d) const { return (v - mean[d]) / scale[d]; }
  double denorm_state(double v, int d) const { return v * scale[d] + mean[d]; }
  double norm_err(double e, int d) const { return e / err_scale[d]; }
  double denorm_err(double e, int d) const { return e * err_scale[d]; }

  static NormStats identity(int dim) {
    NormStats s;
    s.dim = dim;
    s.mean.fill(0.0);
    s.scale.fill(1.0);
    s.err_scale.fill(1.0);
    return s;
  }
};

struct GenConfig {
  int n_coarse = 100;                   // coarse transitions per trajectory
  std::optional<double> dt;             // default: registry value
  std::optional<int> stride;            // default: registry value
  StepScheme scheme = StepScheme::RK4;  // used for both grids
  RangeTag range = RangeTag::Pretraining;
  std::optional<std::string> regime;    // overrides `range` when set

  IntegrationConfig integration_for(SystemId id) const {
    const SystemInfo& info = system_info(id);
    IntegrationConfig c;
    c.dt = dt.value_or(info.dt);
    c.stride = stride.value_or(info.stride);
    c.n_fine_steps = n_coarse * c.stride;
    c.scheme = scheme;
    return c;
  }
};

struct Corpus {
  SystemId system;
  GenConfig gen;
  std::uint64_t seed = 0;
  int n_variations = 0;
  int n_trajectories = 0;  // requested per variation
  int excluded = 0;        // samples dropped due to integration failure
  std::vector<CorpusRecord> records;
  NormStats stats;

  std::vector<int> variation_ids() const {
    std::vector<int> ids;
    for (const CorpusRecord& r : records)
      if (ids.empty() || ids.back() != r.variation) ids.push_back(r.variation);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  std::vector<std::size_t> records_of_variation(int v) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < records.size(); ++i)
      if (records[i].variation == v) idx.push_back(i);
    return idx;
  }
};

inline NormStats compute_stats(const std::vector<CorpusRecord>& records, int dim) {
  NormStats s;
  s.dim = dim;
  std::array<double, kMaxDim> sum{}, sumsq{}, esumsq{};
  std::size_t n_state = 0, n_err = 0;
  for (const CorpusRecord& r : records) {
    for (const Vec& u : r.coarse)
      for (int d = 0; d < dim; ++d) sum[d] += u[d], sumsq[d] += u[d] * u[d];
    n_state += r.coarse.size();
    for (const Vec& e : r.err)
      for (int d = 0; d < dim; ++d) esumsq[d] += e[d] * e[d];
    n_err += r.err.size();
  }
  for (int d = 0; d < dim; ++d) {
    const double m = n_state ? sum[d] / static_cast<double>(n_state) : 0.0;
    const double var = n_state ? std::max(0.0, sumsq[d] / static_cast<double>(n_state) - m * m) : 0.0;
    const double erms = n_err ? std::sqrt(esumsq[d] / static_cast<double>(n_err)) : 0.0;
    s.mean[d] = m;
    s.scale[d] = std::max(std::sqrt(var), 1e-12);
    s.err_scale[d] = std::max(erms, 1e-15);
  }
  return s;
}

namespace detail {

struct SampleResult {
  bool ok = false;
  CorpusRecord record;
};

inline SampleResult generate_sample(SystemId system, const ParamVector& params,
                                    const IntegrationConfig& cfg, int variation, int traj_index,
                                    std::uint64_t ic_seed) {
  SampleResult out;
  const Vec ic = sample_initial_condition(system, ic_seed);
  try {
    const Trajectory fine = simulate(system, params, ic, cfg, GridTag::Fine);
    const Trajectory coarse = simulate(system, params, ic, cfg, GridTag::Coarse);
    const ErrorSequence labels = make_error_labels(fine, coarse);
    CorpusRecord& r = out.record;
    r.system = system;
    r.params = params;
    r.ic = ic;
    r.dt = cfg.dt;
    r.stride = cfg.stride;
    r.scheme = cfg.scheme;
    r.n_coarse = cfg.n_coarse_steps();
    r.coarse = coarse.states;
    r.err = labels.err;
    r.variation = variation;
    r.traj_index = traj_index;
    r.ic_seed = ic_seed;
    out.ok = true;
  } catch (const IntegrationFailure&) {
    out.ok = false;
  }
  return out;
}

}  // namespace detail

// For each variation: one parameter draw, then n_trajectories IC draws,
// fine+coarse simulation and labels. Per-sample seeds are derived from
// (seed, variation, trajectory), so results are independent of the thread
// schedule. Failed integrations are dropped and counted.
inline Corpus generate_corpus(SystemId system, int n_variations, int n_trajectories,
                              const GenConfig& gen, std::uint64_t seed, int n_threads = 1) {
  if (n_variations <= 0 || n_trajectories <= 0)
    throw std::invalid_argument("generate_corpus: counts must be positive");
  const IntegrationConfig cfg = gen.integration_for(system);
  cfg.validate();

  const ParamRanges* ranges = nullptr;
  if (gen.regime) {
    const BehaviorRegime* regime = find_regime(system, *gen.regime);
    if (regime == nullptr)
      throw std::invalid_argument("unknown regime '" + *gen.regime + "' for system " +
                                  system_info(system).name);
    ranges = &regime->box;
  } else {
    ranges = &ranges_for(system, gen.range);
  }

  std::vector<ParamVector> variation_params(static_cast<std::size_t>(n_variations));
  for (int v = 0; v < n_variations; ++v)
    variation_params[static_cast<std::size_t>(v)] =
        sample_params(system, *ranges, derive_seed(seed, 0xA001, static_cast<std::uint64_t>(v)));

  const std::size_t total = static_cast<std::size_t>(n_variations) *
                            static_cast<std::size_t>(n_trajectories);
  std::vector<detail::SampleResult> results(total);

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int v = static_cast<int>(i / static_cast<std::size_t>(n_trajectories));
      const int t = static_cast<int>(i % static_cast<std::size_t>(n_trajectories));
      const std::uint64_t ic_seed = derive_seed(seed, 0xB002 + static_cast<std::uint64_t>(v),
                                                static_cast<std::uint64_t>(t));
      results[i] = detail::generate_sample(system, variation_params[static_cast<std::size_t>(v)],
                                           cfg, v, t, ic_seed);
    }
  };

  if (n_threads <= 1 || total < 2) {
    run_range(0, total);
  } else {
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(n_threads), total);
    std::vector<std::thread> workers;
    const std::size_t chunk = (total + nt - 1) / nt;
    for (std::size_t w = 0; w < nt; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(total, b + chunk);
      if (b < e) workers.emplace_back(run_range, b, e);
    }
    for (auto& th : workers) th.join();
  }

  Corpus corpus;
  corpus.system = system;
  corpus.gen = gen;
  corpus.seed = seed;
  corpus.n_variations = n_variations;
  corpus.n_trajectories = n_trajectories;
  for (detail::SampleResult& r : results) {
    if (r.ok)
      corpus.records.push_back(std::move(r.record));
    else
      ++corpus.excluded;
  }
  corpus.stats = compute_stats(corpus.records, system_dim(system));
  return corpus;
}

// Splits whole variations to one side or the other, so test parameters are
// never seen in training.
inline std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double test_fraction,
                                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("split_corpus: test_fraction must lie in (0, 1)");
  std::vector<int> ids = corpus.variation_ids();
  const std::size_t n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(ids.size())));
  if (ids.size() < 2 || n_test == 0 || n_test >= ids.size())
    throw std::invalid_argument("split_corpus: too few variations to split");

  Rng rng(derive_seed(seed, 0x5917));
  shuffle(ids, rng);
  std::vector<bool> is_test_id(
      static_cast<std::size_t>(*std::max_element(ids.begin(), ids.end())) + 1, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test_id[static_cast<std::size_t>(ids[i])] = true;

  Corpus train = corpus, test = corpus;
  train.records.clear();
  test.records.clear();
  for (const CorpusRecord& r : corpus.records) {
    CorpusRecord copy = r;
    if (is_test_id[static_cast<std::size_t>(r.variation)]) {
      copy.split = SplitTag::Test;
      test.records.push_back(std::move(copy));
    } else {
      copy.split = SplitTag::Train;
      train.records.push_back(std::move(copy));
    }
  }
  // Normalization always reflects the training side.
  train.stats = compute_stats(train.records, system_dim(corpus.system));
  test.stats = train.stats;
  return {std::move(train), std::move(test)};
}

}  // namespace odekit
