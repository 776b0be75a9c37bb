// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <vector>

#include "smg/model.hpp"
#include "smg/selector.hpp"

namespace smg {

// Encoder output over a masked document: per-position states, their
// element-wise max, and the copy-source bookkeeping (tokens plus the
// positions whose mask complement is nonzero, i.e. visible context).
struct ContextEncoding {
  std::vector<Expr> states;
  Expr pooled;
  std::vector<int> tokens;
  std::vector<int> copyable;  // positions usable as copy sources
};

// Runs the context encoder over mask-complement-weighted embeddings;
// masked positions enter as zero vectors.
ContextEncoding encode_context(Graph& g, SmgModel& model,
                               std::span<const int> document,
                               std::span<const Expr> mask_complement);

// Mean embedding of the (non-empty) answer tokens.
Expr answer_condition_vector(Graph& g, SmgModel& model, std::span<const int> answer);

// Output of one decoder step.
struct DecoderStep {
  Expr scores;     // combined word scores s_t
  Expr word_dist;  // softmax of the combined scores
  Expr eoa_dist;   // two-way end-of-answer distribution
  LstmState state;
};

// Decoder state initialized from the pooled encoding.
LstmState decoder_init(Graph& g, SmgModel& model, Expr pooled);

// Per-source copy scores summed into the vocabulary axis: a bilinear match
// of the decoder state against visible context states and answer embeddings,
// added on top of the generation scores.
Expr copy_augmented_scores(Graph& g, SmgModel& model, Expr generation_scores,
                           Expr hidden, const ContextEncoding& encoding,
                           std::span<const int> answer);

// One step of the context decoder: LSTM over [prev token ; answer condition],
// sigmoid split into word/EOA halves, word scores with copy, EOA softmax.
DecoderStep decoder_step(Graph& g, SmgModel& model, int prev_token,
                         Expr answer_condition, const LstmState& state,
                         const ContextEncoding& encoding,
                         std::span<const int> answer);

// Teacher-forced document reconstruction, each step's NLL weighted by the
// mask value, summed. Optionally exposes the per-step decoder outputs.
Expr reconstruction_loss(Graph& g, SmgModel& model, std::span<const int> document,
                         std::span<const Expr> mask, const ContextEncoding& encoding,
                         Expr answer_condition, std::span<const int> answer,
                         std::vector<DecoderStep>* steps_out = nullptr);

enum class EoaRule { Corrected, Printed };

// Per-position end-of-answer targets for a binary mask.
// Corrected: max(m_t - m_{t+1}, 0) with m_{n+1} = 0, tagging the final token
// of each blank run. Printed: max(m_{t-1} - m_t, 0) with m_0 = 0, which can
// only fire where m_t = 0.
std::vector<int> eoa_targets(std::span<const int> mask, EoaRule rule);

// Cross-entropy between targets and per-step EOA distributions, weighted by
// the mask value at each step.
Expr eoa_loss(Graph& g, std::span<const int> targets,
              std::span<const Expr> eoa_dists, std::span<const Expr> mask);

// L_A + lambda_recon * L_recon + lambda_eoa * L_eoa.
Expr total_loss(Expr answer_loss, Expr recon_loss, Expr eoa_loss,
                double lambda_recon, double lambda_eoa);

// Teacher-forced NLL over every position, no mask gating and no EOA head
// (the full-generation decoding baseline).
Expr full_generation_loss(Graph& g, SmgModel& model, std::span<const int> document,
                          const ContextEncoding& encoding, Expr answer_condition,
                          std::span<const int> answer);

}  // namespace smg
