// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smg/config.hpp"
#include "smg/corpus.hpp"
#include "smg/nn.hpp"
#include "smg/params.hpp"
#include "smg/vocab.hpp"

namespace smg {

// A triple with tokens resolved to vocabulary ids.
struct EncodedTriple {
  int question = 0;
  std::vector<int> document;
  std::vector<int> answer;
};

// The full SMG model: token/question embeddings, the selector BiLSTM with
// its two-way head, the answer decoder, the context encoder, and the context
// decoder with word, EOA, and copy heads. Parameters are registered in a
// fixed order so checkpoints are byte-reproducible.
class SmgModel {
 public:
  SmgModel(const RunConfig& cfg, Vocabulary vocab, std::vector<std::string> questions,
           Rng& init_rng);

  static SmgModel load(const std::string& checkpoint_path);
  void save(const std::string& path) const;

  const RunConfig& config() const { return cfg_; }
  RunConfig& config() { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<std::string>& questions() const { return questions_; }
  std::optional<int> question_id(const std::string& name) const;

  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

  Expr embed_token(Graph& g, int token_id);
  std::vector<Expr> embed_tokens(Graph& g, std::span<const int> token_ids);
  Expr embed_question(Graph& g, int question_id);

  EncodedTriple encode(const Triple& t) const;
  std::vector<int> encode_tokens(std::span<const std::string> tokens) const;

 private:
  void register_params(Rng& rng);

  RunConfig cfg_;
  Vocabulary vocab_;
  std::vector<std::string> questions_;
  ParamStore store_;
};

}  // namespace smg
