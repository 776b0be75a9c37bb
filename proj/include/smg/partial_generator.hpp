// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "smg/context_codec.hpp"
#include "smg/model.hpp"

namespace smg {

enum class DecodeMode { Read = 0, Write = 1 };

// Read/write decoding state. x_in is the token the decoder consumes next
// (the one just emitted); fill_len is zero whenever the mode is Read.
struct DecodeState {
  DecodeMode mode = DecodeMode::Read;
  int cursor = 0;
  int fill_len = 0;
  int x_in = -1;
};

struct DecodeOptions {
  int l_max = 10;
  bool allow_empty_fill = true;  // blank-boundary EOA skips the blank
  int mask_token = Vocabulary::kMask;
  int bos_token = Vocabulary::kEos;
  long max_total_steps = 0;  // 0: the structural bound |C| + l_max * runs + 1
};

struct TransitionResult {
  DecodeState state;
  std::optional<int> emitted;
  bool terminal = false;
  bool entered_blank = false;
  bool closed_blank = false;
  bool skipped_run = false;
};

// One step of the read/write machine over a context template.
// Reading emits the cursor token and advances; when the next position starts
// a blank run the cursor jumps past the run and, unless the EOA prediction
// fires (and empty fills are allowed), the mode flips to Write. Writing
// emits the predicted token and returns to Read on EOA or after l_max
// tokens. A cursor past the template end in Read mode is terminal.
TransitionResult transition(const DecodeState& state, std::span<const int> tmpl,
                            int predicted_token, int predicted_eoa,
                            const DecodeOptions& opts);

// Next-token source for the machine: pending() is the prediction for the
// next output position, advance(token) feeds the token just emitted.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::pair<int, int> pending() const = 0;  // (token, eoa flag)
  virtual void advance(int token) = 0;
};

// Deterministic test double replaying a fixed queue. Entry k is the
// prediction in force once k+1 tokens were consumed; the final entry
// repeats when the queue runs out.
class ScriptedPredictor : public Predictor {
 public:
  explicit ScriptedPredictor(std::vector<std::pair<int, int>> script);
  std::pair<int, int> pending() const override;
  void advance(int token) override;

 private:
  std::vector<std::pair<int, int>> script_;
  std::size_t consumed_ = 0;
};

// Greedy predictions from the trained context decoder conditioned on the
// (new) answer. Consumes the begin-of-sequence token on construction.
class ModelPredictor : public Predictor {
 public:
  ModelPredictor(Graph& g, SmgModel& model, const ContextEncoding& encoding,
                 Expr answer_condition, std::span<const int> answer);
  std::pair<int, int> pending() const override;
  void advance(int token) override;

 private:
  Graph& g_;
  SmgModel& model_;
  const ContextEncoding& encoding_;
  Expr answer_condition_;
  std::vector<int> answer_;
  LstmState state_;
  std::pair<int, int> pending_{Vocabulary::kEos, 1};
};

struct DecodeResult {
  std::vector<int> tokens;
  std::vector<int> fill_lengths;  // per writing episode, in order
  int skipped_runs = 0;
  bool truncated = false;
};

// Fills every blank of a template by running the read/write machine against
// a predictor. A template that opens with a blank is handled by prepending a
// virtual begin-of-sequence token which is stripped from the output.
DecodeResult partial_decode(std::span<const int> template_tokens, Predictor& predictor,
                            const DecodeOptions& opts);

// Convenience wrapper: template + new answer + trained model.
DecodeResult smg_partial_decode(SmgModel& model, std::span<const int> template_tokens,
                                std::span<const int> new_answer,
                                const DecodeOptions& opts);

// Full-generation inference (the decoding side of the seq2seq baseline):
// greedy decode until </s> or max_length.
std::vector<int> full_decode(Graph& g, SmgModel& model, const ContextEncoding& encoding,
                             Expr answer_condition, std::span<const int> answer,
                             int max_length);

std::vector<int> seq2seq_full_decode(SmgModel& model, std::span<const int> template_tokens,
                                     std::span<const int> new_answer, int max_length);

}  // namespace smg
