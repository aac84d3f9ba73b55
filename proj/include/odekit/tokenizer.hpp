#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "odekit/corpus.hpp"
#include "odekit/labels.hpp"

namespace odekit {

enum class TokenCategory : std::uint8_t { CoarseSolution = 0, ErrorTerm = 1, Query = 2 };

// Training layout interleaves a query block (zero-valued probes carrying the
// demo's labels as targets) into every demo, so the loss supervises each
// position the mask reveals. Inference layout is the bare grid: per demo a
// coarse and an error block, then the query's coarse block and its probes.
enum class TokenLayout : std::uint8_t { Inference = 0, Training = 1 };

struct Token {
  double key = 0.0;                         // min-max normalized time
  std::array<double, kMaxDim> value{};      // normalized, zero-padded above sys_dim
  TokenCategory category = TokenCategory::CoarseSolution;
  int demo_index = 0;                       // query demo carries the last index
  int node = 0;                             // position on the coarse grid
  bool supervised = false;
  std::array<double, kMaxDim> target{};     // normalized labels where defined
};

struct TokenSequence {
  std::vector<Token> tokens;
  int n_context_demos = 0;  // query demo index equals this
  int n_nodes = 0;          // coarse nodes per trajectory (transitions + 1)
  int sys_dim = 0;
  int max_dim = 0;

  int query_demo_index() const { return n_context_demos; }
  std::size_t size() const { return tokens.size(); }
};

struct AttentionMask {
  std::size_t n = 0;
  std::vector<std::uint8_t> bits;  // row-major n*n

  bool at(std::size_t q, std::size_t k) const { return bits[q * n + k] != 0; }
  void set(std::size_t q, std::size_t k, bool v) { bits[q * n + k] = v ? 1 : 0; }
};

namespace detail {

inline void append_coarse_block(TokenSequence& seq, const Trajectory& coarse, int demo,
                                const NormStats& st, double t_scale) {
  const int dim = static_cast<int>(coarse.states[0].size());
  for (std::size_t j = 0; j < coarse.states.size(); ++j) {
    Token tok;
    tok.key = coarse.time_at(j) / t_scale;
    tok.category = TokenCategory::CoarseSolution;
    tok.demo_index = demo;
    tok.node = static_cast<int>(j);
    for (int d = 0; d < dim; ++d) tok.value[d] = st.norm_state(coarse.states[j][d], d);
    seq.tokens.push_back(tok);
  }
}

inline void append_error_block(TokenSequence& seq, const Trajectory& coarse,
                               const ErrorSequence* errors, int demo, const NormStats& st,
                               double t_scale) {
  const int dim = static_cast<int>(coarse.states[0].size());
  for (std::size_t j = 0; j < coarse.states.size(); ++j) {
    Token tok;
    tok.key = coarse.time_at(j) / t_scale;
    tok.category = TokenCategory::ErrorTerm;
    tok.demo_index = demo;
    tok.node = static_cast<int>(j);
    // The endpoint has no outgoing transition; its slot stays zero.
    if (errors != nullptr && j < errors->size())
      for (int d = 0; d < dim; ++d) tok.value[d] = st.norm_err((*errors)[j][d], d);
    seq.tokens.push_back(tok);
  }
}

inline void append_query_block(TokenSequence& seq, const Trajectory& coarse,
                               const ErrorSequence* targets, int demo, const NormStats& st,
                               double t_scale) {
  const int dim = static_cast<int>(coarse.states[0].size());
  for (std::size_t j = 0; j < coarse.states.size(); ++j) {
    Token tok;
    tok.key = coarse.time_at(j) / t_scale;
    tok.category = TokenCategory::Query;
    tok.demo_index = demo;
    tok.node = static_cast<int>(j);
    if (targets != nullptr && j < targets->size()) {
      tok.supervised = true;
      for (int d = 0; d < dim; ++d) tok.target[d] = st.norm_err((*targets)[j][d], d);
    }
    seq.tokens.push_back(tok);
  }
}

}  // namespace detail

inline TokenSequence tokenize(const PromptInstance& inst, int max_dim,
                              TokenLayout layout = TokenLayout::Inference,
                              const NormStats* stats = nullptr) {
  const int sys_dim = system_dim(inst.query_coarse.system);
  if (sys_dim > max_dim)
    throw std::invalid_argument("tokenize: system dimension exceeds max_dim");
  const NormStats st = stats ? *stats : NormStats::identity(sys_dim);

  TokenSequence seq;
  seq.n_context_demos = static_cast<int>(inst.demos.size());
  seq.n_nodes = static_cast<int>(inst.query_coarse.states.size());
  seq.sys_dim = sys_dim;
  seq.max_dim = max_dim;

  const double t_max = inst.query_coarse.time_at(inst.query_coarse.n_steps());
  const double t_scale = (t_max > 0.0) ? t_max : 1.0;

  for (std::size_t i = 0; i < inst.demos.size(); ++i) {
    const DemoPair& demo = inst.demos[i];
    detail::append_coarse_block(seq, demo.coarse, static_cast<int>(i), st, t_scale);
    detail::append_error_block(seq, demo.coarse, &demo.errors, static_cast<int>(i), st, t_scale);
    if (layout == TokenLayout::Training)
      detail::append_query_block(seq, demo.coarse, &demo.errors, static_cast<int>(i), st, t_scale);
  }

  const int qd = seq.query_demo_index();
  const ErrorSequence* qerr = inst.query_errors ? &*inst.query_errors : nullptr;
  detail::append_coarse_block(seq, inst.query_coarse, qd, st, t_scale);
  if (layout == TokenLayout::Training)
    detail::append_error_block(seq, inst.query_coarse, qerr, qd, st, t_scale);
  detail::append_query_block(seq, inst.query_coarse, qerr, qd, st, t_scale);
  return seq;
}

// Visibility rule: prior demos are fully revealed; within a demo the blocks
// are staged so that nothing a query token can reach, directly or through
// intermediate tokens, carries that demo's error values.
inline bool token_visible(TokenCategory qc, int qd, TokenCategory kc, int kd, bool same_token) {
  if (kd < qd) return true;
  if (kd > qd) return false;
  if (same_token) return true;
  switch (qc) {
    case TokenCategory::CoarseSolution:
      return kc == TokenCategory::CoarseSolution;
    case TokenCategory::ErrorTerm:
      return kc != TokenCategory::Query;
    case TokenCategory::Query:
      return kc == TokenCategory::CoarseSolution;
  }
  return false;
}

inline AttentionMask build_mask(const TokenSequence& seq) {
  const std::size_t n = seq.size();
  AttentionMask mask;
  mask.n = n;
  mask.bits.assign(n * n, 0);
  for (std::size_t q = 0; q < n; ++q) {
    const Token& tq = seq.tokens[q];
    for (std::size_t k = 0; k < n; ++k) {
      const Token& tk = seq.tokens[k];
      mask.bits[q * n + k] =
          token_visible(tq.category, tq.demo_index, tk.category, tk.demo_index, q == k) ? 1 : 0;
    }
  }
  return mask;
}

// Maps model outputs at the final query block back to an ErrorSequence:
// de-normalize, de-pad, and drop the endpoint slot (no outgoing transition).
template <class PredRows>
ErrorSequence assemble_error_sequence(const PredRows& pred_at_query_nodes, int n_transitions,
                                      int sys_dim, const NormStats& stats) {
  ErrorSequence out;
  out.err.reserve(static_cast<std::size_t>(n_transitions));
  for (int j = 0; j < n_transitions; ++j) {
    Vec e(static_cast<std::size_t>(sys_dim));
    for (int d = 0; d < sys_dim; ++d) e[d] = stats.denorm_err(pred_at_query_nodes(j, d), d);
    out.err.push_back(e);
  }
  return out;
}

}  // namespace odekit
