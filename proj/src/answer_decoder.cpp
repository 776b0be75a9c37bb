// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/answer_decoder.hpp"

#include <stdexcept>

namespace smg {

namespace {

LstmState answer_decoder_init(Graph& g, SmgModel& model, Expr condition) {
  ParamStore& s = model.store();
  Expr h = affine(parameter(g, s.get("ansdec.init_h.W")), condition,
                  parameter(g, s.get("ansdec.init_h.b")));
  Expr c = affine(parameter(g, s.get("ansdec.init_c.W")), condition,
                  parameter(g, s.get("ansdec.init_c.b")));
  return LstmState{h, c};
}

}  // namespace

Expr pool_selected(std::span<const Expr> token_embeddings,
                   std::span<const Expr> mask) {
  return masked_mean(token_embeddings, mask);
}

Expr answer_loss(Graph& g, SmgModel& model, std::span<const int> answer,
                 Expr condition) {
  if (answer.empty()) throw std::invalid_argument("answer_loss: empty answer");
  ParamStore& s = model.store();
  LstmCell cell = lstm_cell(g, s, "ansdec.lstm", model.config().decoder_hidden);
  Expr w_out = parameter(g, s.get("ansdec.out.W"));
  Expr b_out = parameter(g, s.get("ansdec.out.b"));

  LstmState st = answer_decoder_init(g, model, condition);
  int prev = Vocabulary::kEos;  // sequence-start convention
  std::vector<Expr> terms;
  terms.reserve(answer.size());
  for (int gold : answer) {
    st = lstm_step(model.embed_token(g, prev), st, cell);
    Expr logits = affine(w_out, st.h, b_out);
    terms.push_back(pick_neg_log_softmax(logits, gold));
    prev = gold;
  }
  return sum(terms);
}

std::vector<int> generate_answer(Graph& g, SmgModel& model, Expr condition,
                                 int max_length) {
  ParamStore& s = model.store();
  LstmCell cell = lstm_cell(g, s, "ansdec.lstm", model.config().decoder_hidden);
  Expr w_out = parameter(g, s.get("ansdec.out.W"));
  Expr b_out = parameter(g, s.get("ansdec.out.b"));

  LstmState st = answer_decoder_init(g, model, condition);
  std::vector<int> out;
  int prev = Vocabulary::kEos;
  for (int step = 0; step < max_length; ++step) {
    st = lstm_step(model.embed_token(g, prev), st, cell);
    Expr logits = affine(w_out, st.h, b_out);
    Eigen::Index argmax = 0;
    logits.value().col(0).maxCoeff(&argmax);
    const int best = static_cast<int>(argmax);
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace smg
