// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/model.hpp"

#include <stdexcept>

namespace smg {

namespace {

void uniform_init(Param& p, Rng& rng, double a) {
  for (long c = 0; c < p.value.cols(); ++c) {
    for (long r = 0; r < p.value.rows(); ++r) {
      p.value(r, c) = rng.uniform(-a, a);
    }
  }
}

}  // namespace

SmgModel::SmgModel(const RunConfig& cfg, Vocabulary vocab,
                   std::vector<std::string> questions, Rng& init_rng)
    : cfg_(cfg), vocab_(std::move(vocab)), questions_(std::move(questions)) {
  cfg_.validate();
  if (questions_.empty()) throw DataError("SmgModel: no questions");
  register_params(init_rng);
}

void SmgModel::register_params(Rng& rng) {
  const long V = vocab_.size();
  const long F = static_cast<long>(questions_.size());
  const int E = cfg_.embedding_size;
  const int Hs = cfg_.selector_hidden;
  const int Hd = cfg_.decoder_hidden;

  uniform_init(store_.create("embed.tokens", E, V), rng, 0.1);
  uniform_init(store_.create("embed.questions", E, F), rng, 0.1);

  // selector: BiLSTM over [token ; question], two-way head per position
  register_lstm_params(store_, "sel.fwd", 2 * E, Hs, rng);
  register_lstm_params(store_, "sel.bwd", 2 * E, Hs, rng);
  glorot_init(store_.create("sel.head.W", 2, 2L * Hs), rng);
  // the selector starts open (selection likely) so the answer decoder sees
  // informative conditions before selection sharpens; an empty mask yields
  // no pooling gradient to escape from
  Param& sel_bias = store_.create("sel.head.b", 2, 1);
  sel_bias.value(1, 0) = 2.0;

  // answer decoder: condition -> initial state, LSTM over previous token
  glorot_init(store_.create("ansdec.init_h.W", Hd, E), rng);
  store_.create("ansdec.init_h.b", Hd, 1);
  glorot_init(store_.create("ansdec.init_c.W", Hd, E), rng);
  store_.create("ansdec.init_c.b", Hd, 1);
  register_lstm_params(store_, "ansdec.lstm", E, Hd, rng);
  glorot_init(store_.create("ansdec.out.W", V, Hd), rng);
  store_.create("ansdec.out.b", V, 1);

  // context encoder over masked embeddings
  register_lstm_params(store_, "enc.lstm", E, Hd, rng);

  // context decoder: pooled encoding -> initial state, LSTM over
  // [previous token ; answer condition], split head, word/EOA/copy heads
  glorot_init(store_.create("dec.init_h.W", Hd, Hd), rng);
  store_.create("dec.init_h.b", Hd, 1);
  glorot_init(store_.create("dec.init_c.W", Hd, Hd), rng);
  store_.create("dec.init_c.b", Hd, 1);
  register_lstm_params(store_, "dec.lstm", 2 * E, Hd, rng);
  glorot_init(store_.create("dec.split.W", 2L * Hd, Hd), rng);
  store_.create("dec.split.b", 2L * Hd, 1);
  glorot_init(store_.create("dec.out.W", V, Hd), rng);
  store_.create("dec.out.b", V, 1);
  glorot_init(store_.create("dec.eoa.W", 2, Hd), rng);
  store_.create("dec.eoa.b", 2, 1);
  glorot_init(store_.create("dec.copy_doc.W", Hd, Hd), rng);
  glorot_init(store_.create("dec.copy_ans.W", Hd, E), rng);
}

std::optional<int> SmgModel::question_id(const std::string& name) const {
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    if (questions_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Expr SmgModel::embed_token(Graph& g, int token_id) {
  return lookup(g, store_.get("embed.tokens"), token_id);
}

std::vector<Expr> SmgModel::embed_tokens(Graph& g, std::span<const int> token_ids) {
  std::vector<Expr> out;
  out.reserve(token_ids.size());
  Param& table = store_.get("embed.tokens");
  for (int id : token_ids) out.push_back(lookup(g, table, id));
  return out;
}

Expr SmgModel::embed_question(Graph& g, int question_id) {
  if (question_id < 0 || question_id >= static_cast<int>(questions_.size())) {
    throw DataError("unknown question id " + std::to_string(question_id));
  }
  return lookup(g, store_.get("embed.questions"), question_id);
}

EncodedTriple SmgModel::encode(const Triple& t) const {
  const auto qid = question_id(t.question);
  if (!qid) throw DataError("question '" + t.question + "' not in the model inventory");
  EncodedTriple e;
  e.question = *qid;
  e.document = encode_tokens(t.document);
  e.answer = encode_tokens(t.answer);
  return e;
}

std::vector<int> SmgModel::encode_tokens(std::span<const std::string> tokens) const {
  return vocab_.encode(tokens);
}

void SmgModel::save(const std::string& path) const {
  save_checkpoint(path, store_, cfg_.to_map(), vocab_.tokens(), questions_);
}

SmgModel SmgModel::load(const std::string& checkpoint_path) {
  LoadedCheckpoint ck = load_checkpoint(checkpoint_path);
  RunConfig cfg = RunConfig::from_map(ck.hyper);
  Rng throwaway(0);  // values are overwritten below
  SmgModel model(cfg, Vocabulary::from_tokens(ck.vocab), ck.questions, throwaway);
  for (auto& [name, value] : ck.params) {
    if (!model.store_.has(name)) {
      throw DataError("checkpoint: unexpected parameter " + name);
    }
    Param& p = model.store_.get(name);
    if (p.value.rows() != value.rows() || p.value.cols() != value.cols()) {
      throw DataError("checkpoint: shape mismatch for " + name);
    }
    p.value = std::move(value);
  }
  if (ck.params.size() != model.store_.entries().size()) {
    throw DataError("checkpoint: parameter count mismatch");
  }
  return model;
}

}  // namespace smg
