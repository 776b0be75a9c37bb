// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/context_codec.hpp"

#include <stdexcept>

namespace smg {

ContextEncoding encode_context(Graph& g, SmgModel& model,
                               std::span<const int> document,
                               std::span<const Expr> mask_complement) {
  if (document.size() != mask_complement.size()) {
    throw std::invalid_argument("encode_context: document and mask lengths differ");
  }
  if (document.empty()) throw std::invalid_argument("encode_context: empty document");

  ContextEncoding enc;
  enc.tokens.assign(document.begin(), document.end());
  std::vector<Expr> inputs;
  inputs.reserve(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) {
    Expr x = model.embed_token(g, document[i]);
    // masked positions enter the encoder as zero vectors
    inputs.push_back(scale_by(x, mask_complement[i]));
    if (mask_complement[i].scalar() != 0.0) enc.copyable.push_back(static_cast<int>(i));
  }
  LstmCell cell = lstm_cell(g, model.store(), "enc.lstm", model.config().decoder_hidden);
  enc.states = lstm_encode(inputs, cell);
  enc.pooled = max_pool_over_time(enc.states);
  return enc;
}

Expr answer_condition_vector(Graph& g, SmgModel& model, std::span<const int> answer) {
  if (answer.empty()) throw std::invalid_argument("answer_condition_vector: empty answer");
  return average(model.embed_tokens(g, answer));
}

LstmState decoder_init(Graph& g, SmgModel& model, Expr pooled) {
  ParamStore& s = model.store();
  Expr h = affine(parameter(g, s.get("dec.init_h.W")), pooled,
                  parameter(g, s.get("dec.init_h.b")));
  Expr c = affine(parameter(g, s.get("dec.init_c.W")), pooled,
                  parameter(g, s.get("dec.init_c.b")));
  return LstmState{h, c};
}

Expr copy_augmented_scores(Graph& g, SmgModel& model, Expr generation_scores,
                           Expr hidden, const ContextEncoding& encoding,
                           std::span<const int> answer) {
  ParamStore& s = model.store();
  std::vector<int> indices;
  std::vector<Expr> amounts;

  if (!encoding.copyable.empty()) {
    Expr key = matmul_transposed(parameter(g, s.get("dec.copy_doc.W")), hidden);
    for (int pos : encoding.copyable) {
      indices.push_back(encoding.tokens[static_cast<std::size_t>(pos)]);
      amounts.push_back(dot(key, encoding.states[static_cast<std::size_t>(pos)]));
    }
  }
  if (!answer.empty()) {
    Expr key = matmul_transposed(parameter(g, s.get("dec.copy_ans.W")), hidden);
    for (int tok : answer) {
      indices.push_back(tok);
      amounts.push_back(dot(key, model.embed_token(g, tok)));
    }
  }
  if (indices.empty()) return generation_scores;
  return scatter_add(generation_scores, indices, amounts);
}

DecoderStep decoder_step(Graph& g, SmgModel& model, int prev_token,
                         Expr answer_condition, const LstmState& state,
                         const ContextEncoding& encoding,
                         std::span<const int> answer) {
  ParamStore& s = model.store();
  const int hd = model.config().decoder_hidden;
  LstmCell cell = lstm_cell(g, s, "dec.lstm", hd);

  Expr x = concat(model.embed_token(g, prev_token), answer_condition);
  LstmState next = lstm_step(x, state, cell);

  Expr split = affine(parameter(g, s.get("dec.split.W")), next.h,
                      parameter(g, s.get("dec.split.b")));
  Expr h_word = sigmoid(slice_rows(split, 0, hd));
  Expr h_eoa = sigmoid(slice_rows(split, hd, hd));

  Expr gen_scores = affine(parameter(g, s.get("dec.out.W")), h_word,
                           parameter(g, s.get("dec.out.b")));
  Expr scores = copy_augmented_scores(g, model, gen_scores, next.h, encoding, answer);
  Expr eoa_scores = affine(parameter(g, s.get("dec.eoa.W")), h_eoa,
                           parameter(g, s.get("dec.eoa.b")));

  DecoderStep out;
  out.scores = scores;
  out.word_dist = softmax(scores);
  out.eoa_dist = softmax(eoa_scores);
  out.state = next;
  return out;
}

Expr reconstruction_loss(Graph& g, SmgModel& model, std::span<const int> document,
                         std::span<const Expr> mask, const ContextEncoding& encoding,
                         Expr answer_condition, std::span<const int> answer,
                         std::vector<DecoderStep>* steps_out) {
  if (document.size() != mask.size()) {
    throw std::invalid_argument("reconstruction_loss: document and mask lengths differ");
  }
  LstmState st = decoder_init(g, model, encoding.pooled);
  int prev = Vocabulary::kEos;
  std::vector<Expr> terms;
  terms.reserve(document.size());
  for (std::size_t t = 0; t < document.size(); ++t) {
    DecoderStep step = decoder_step(g, model, prev, answer_condition, st, encoding, answer);
    Expr nll = pick_neg_log_softmax(step.scores, document[t]);
    terms.push_back(cmult(mask[t], nll));
    if (steps_out) steps_out->push_back(step);
    st = step.state;
    prev = document[t];  // teacher forcing at every position
  }
  return sum(terms);
}

std::vector<int> eoa_targets(std::span<const int> mask, EoaRule rule) {
  const std::size_t n = mask.size();
  std::vector<int> g(n, 0);
  for (std::size_t t = 0; t < n; ++t) {
    if (rule == EoaRule::Corrected) {
      const int next = (t + 1 < n) ? mask[t + 1] : 0;
      g[t] = std::max(mask[t] - next, 0);
    } else {
      const int prev = (t > 0) ? mask[t - 1] : 0;
      g[t] = std::max(prev - mask[t], 0);
    }
  }
  return g;
}

Expr eoa_loss(Graph& g, std::span<const int> targets,
              std::span<const Expr> eoa_dists, std::span<const Expr> mask) {
  if (targets.size() != eoa_dists.size() || targets.size() != mask.size()) {
    throw std::invalid_argument("eoa_loss: misaligned lengths");
  }
  if (targets.empty()) return input(g, 0.0);
  std::vector<Expr> terms;
  terms.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    // targets are 0/1 data, so exactly one of the two cross-entropy branches
    // is live at each step
    Expr nll = scale(log(pick(eoa_dists[t], targets[t])), -1.0);
    terms.push_back(cmult(mask[t], nll));
  }
  return sum(terms);
}

Expr total_loss(Expr answer_loss, Expr recon_loss, Expr eoa_loss,
                double lambda_recon, double lambda_eoa) {
  return add(answer_loss, add(scale(recon_loss, lambda_recon), scale(eoa_loss, lambda_eoa)));
}

Expr full_generation_loss(Graph& g, SmgModel& model, std::span<const int> document,
                          const ContextEncoding& encoding, Expr answer_condition,
                          std::span<const int> answer) {
  if (document.empty()) {
    throw std::invalid_argument("full_generation_loss: empty document");
  }
  LstmState st = decoder_init(g, model, encoding.pooled);
  int prev = Vocabulary::kEos;
  std::vector<Expr> terms;
  terms.reserve(document.size());
  for (int gold : document) {
    DecoderStep step = decoder_step(g, model, prev, answer_condition, st, encoding, answer);
    terms.push_back(pick_neg_log_softmax(step.scores, gold));
    st = step.state;
    prev = gold;
  }
  return sum(terms);
}

}  // namespace smg
