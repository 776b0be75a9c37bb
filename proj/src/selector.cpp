// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/selector.hpp"

#include <stdexcept>

namespace smg {

namespace {

// Per-position two-way logits from the BiLSTM over [token ; question].
std::vector<Expr> selector_logits(Graph& g, SmgModel& model,
                                  std::span<const int> document, int question) {
  if (document.empty()) throw std::invalid_argument("select_mask: empty document");
  Expr q = model.embed_question(g, question);
  std::vector<Expr> inputs;
  inputs.reserve(document.size());
  for (int tok : document) inputs.push_back(concat(model.embed_token(g, tok), q));

  ParamStore& store = model.store();
  const int hs = model.config().selector_hidden;
  auto states = bilstm_encode(inputs, lstm_cell(g, store, "sel.fwd", hs),
                              lstm_cell(g, store, "sel.bwd", hs));

  Expr w = parameter(g, store.get("sel.head.W"));
  Expr b = parameter(g, store.get("sel.head.b"));
  std::vector<Expr> logits;
  logits.reserve(states.size());
  for (const Expr& h : states) logits.push_back(affine(w, h, b));
  return logits;
}

}  // namespace

MaskSample select_mask(Graph& g, SmgModel& model, std::span<const int> document,
                       int question, double temperature, Rng& rng, MaskMode mode) {
  auto logits = selector_logits(g, model, document, question);
  MaskSample out;
  out.values.reserve(logits.size());
  out.hard.reserve(logits.size());
  for (const Expr& l : logits) {
    Expr sample;
    switch (mode) {
      case MaskMode::StraightThrough:
        sample = gumbel_binary_sample(l, temperature, rng);
        break;
      case MaskMode::Relaxed:
        sample = gumbel_softmax_relaxed(l, temperature, rng);
        break;
      case MaskMode::Argmax: {
        Mat v = Mat::Zero(2, 1);
        v(l.value()(1, 0) > l.value()(0, 0) ? 1 : 0, 0) = 1.0;
        sample = input(g, std::move(v), "argmax_mask");
        break;
      }
    }
    // component 1 of the pair is "selected"
    Expr m = pick(sample, 1);
    out.values.push_back(m);
    out.hard.push_back(sample.value()(1, 0) >= 0.5 ? 1 : 0);
  }
  return out;
}

std::vector<int> select_mask_argmax(Graph& g, SmgModel& model,
                                    std::span<const int> document, int question) {
  auto logits = selector_logits(g, model, document, question);
  std::vector<int> mask;
  mask.reserve(logits.size());
  for (const Expr& l : logits) {
    mask.push_back(l.value()(1, 0) > l.value()(0, 0) ? 1 : 0);
  }
  return mask;
}

std::vector<int> complement(std::span<const int> mask) {
  std::vector<int> out;
  out.reserve(mask.size());
  for (int m : mask) out.push_back(1 - m);
  return out;
}

std::vector<std::string> make_template(std::span<const std::string> document,
                                       std::span<const int> mask) {
  if (document.size() != mask.size()) {
    throw std::invalid_argument("make_template: document and mask lengths differ");
  }
  std::vector<std::string> out;
  out.reserve(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) {
    out.push_back(mask[i] ? Vocabulary::kMaskToken : document[i]);
  }
  return out;
}

std::vector<int> make_template_ids(std::span<const int> document,
                                   std::span<const int> mask, int mask_token) {
  if (document.size() != mask.size()) {
    throw std::invalid_argument("make_template: document and mask lengths differ");
  }
  std::vector<int> out;
  out.reserve(document.size());
  for (std::size_t i = 0; i < document.size(); ++i) {
    out.push_back(mask[i] ? mask_token : document[i]);
  }
  return out;
}

std::vector<int> random_mask(int length, double probability, Rng& rng) {
  if (probability < 0.0 || probability > 1.0) {
    throw std::invalid_argument("random_mask: probability outside [0, 1]");
  }
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) out.push_back(rng.bernoulli(probability) ? 1 : 0);
  return out;
}

std::vector<int> mask_from_template(std::span<const int> template_ids, int mask_token) {
  std::vector<int> out;
  out.reserve(template_ids.size());
  for (int t : template_ids) out.push_back(t == mask_token ? 1 : 0);
  return out;
}

}  // namespace smg
