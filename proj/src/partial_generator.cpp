// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/partial_generator.hpp"

#include <stdexcept>

namespace smg {

namespace {

int count_mask_runs(std::span<const int> tmpl, int mask_token) {
  int runs = 0;
  bool in_run = false;
  for (int t : tmpl) {
    const bool is_mask = (t == mask_token);
    if (is_mask && !in_run) ++runs;
    in_run = is_mask;
  }
  return runs;
}

}  // namespace

TransitionResult transition(const DecodeState& state, std::span<const int> tmpl,
                            int predicted_token, int predicted_eoa,
                            const DecodeOptions& opts) {
  const int n = static_cast<int>(tmpl.size());
  TransitionResult r;
  r.state = state;

  if (state.mode == DecodeMode::Read) {
    if (state.cursor >= n) {
      r.terminal = true;
      return r;
    }
    const int tok = tmpl[static_cast<std::size_t>(state.cursor)];
    if (tok != opts.mask_token) {
      r.emitted = tok;
      r.state.x_in = tok;
      const bool next_is_mask =
          state.cursor + 1 < n &&
          tmpl[static_cast<std::size_t>(state.cursor + 1)] == opts.mask_token;
      if (next_is_mask) {
        int c = state.cursor + 1;
        while (c < n && tmpl[static_cast<std::size_t>(c)] == opts.mask_token) ++c;
        r.state.cursor = c;
        if (opts.allow_empty_fill && predicted_eoa == 1) {
          r.skipped_run = true;
        } else {
          r.state.mode = DecodeMode::Write;
          r.entered_blank = true;
        }
      } else {
        r.state.cursor = state.cursor + 1;
      }
    } else {
      // a blank under the read cursor (only reachable when the caller skips
      // the virtual begin-of-sequence handling): treat it as a boundary with
      // nothing to emit
      int c = state.cursor;
      while (c < n && tmpl[static_cast<std::size_t>(c)] == opts.mask_token) ++c;
      r.state.cursor = c;
      if (opts.allow_empty_fill && predicted_eoa == 1) {
        r.skipped_run = true;
      } else {
        r.state.mode = DecodeMode::Write;
        r.entered_blank = true;
      }
    }
  } else {
    r.emitted = predicted_token;
    r.state.x_in = predicted_token;
    r.state.fill_len = state.fill_len + 1;
    if (predicted_eoa == 1 || r.state.fill_len >= opts.l_max) {
      r.state.mode = DecodeMode::Read;
      r.state.fill_len = 0;
      r.closed_blank = true;
    }
  }
  return r;
}

ScriptedPredictor::ScriptedPredictor(std::vector<std::pair<int, int>> script)
    : script_(std::move(script)) {
  if (script_.empty()) {
    throw std::invalid_argument("ScriptedPredictor: empty script");
  }
}

std::pair<int, int> ScriptedPredictor::pending() const {
  const std::size_t i = consumed_ == 0 ? 0 : consumed_ - 1;
  return script_[std::min(i, script_.size() - 1)];
}

void ScriptedPredictor::advance(int) { ++consumed_; }

ModelPredictor::ModelPredictor(Graph& g, SmgModel& model,
                               const ContextEncoding& encoding, Expr answer_condition,
                               std::span<const int> answer)
    : g_(g),
      model_(model),
      encoding_(encoding),
      answer_condition_(answer_condition),
      answer_(answer.begin(), answer.end()),
      state_(decoder_init(g, model, encoding.pooled)) {}

std::pair<int, int> ModelPredictor::pending() const { return pending_; }

void ModelPredictor::advance(int token) {
  DecoderStep step =
      decoder_step(g_, model_, token, answer_condition_, state_, encoding_, answer_);
  state_ = step.state;
  Eigen::Index word = 0;
  step.scores.value().col(0).maxCoeff(&word);
  const int eoa = step.eoa_dist.value()(1, 0) > step.eoa_dist.value()(0, 0) ? 1 : 0;
  pending_ = {static_cast<int>(word), eoa};
}

DecodeResult partial_decode(std::span<const int> template_tokens, Predictor& predictor,
                            const DecodeOptions& opts) {
  if (template_tokens.empty()) {
    throw std::invalid_argument("partial_decode: empty template");
  }
  if (opts.l_max < 1) throw std::invalid_argument("partial_decode: l_max must be >= 1");

  // A leading blank is unreachable by the read/write rules, so a virtual
  // begin-of-sequence token fronts the template and is stripped afterwards.
  std::vector<int> tmpl;
  bool strip_first = false;
  if (template_tokens.front() == opts.mask_token) {
    tmpl.reserve(template_tokens.size() + 1);
    tmpl.push_back(opts.bos_token);
    tmpl.insert(tmpl.end(), template_tokens.begin(), template_tokens.end());
    strip_first = true;
  } else {
    tmpl.assign(template_tokens.begin(), template_tokens.end());
  }

  long max_steps = opts.max_total_steps;
  if (max_steps <= 0) {
    max_steps = static_cast<long>(tmpl.size()) +
                static_cast<long>(opts.l_max) * count_mask_runs(tmpl, opts.mask_token) + 1;
  }

  predictor.advance(opts.bos_token);

  DecodeResult result;
  DecodeState state;
  state.x_in = tmpl.front();
  bool first_emission = true;
  int episode_len = 0;
  for (long step = 0;; ++step) {
    if (step >= max_steps) {
      result.truncated = true;
      break;
    }
    const auto [tok, eoa] = predictor.pending();
    TransitionResult r = transition(state, tmpl, tok, eoa, opts);
    if (r.terminal) break;
    if (state.mode == DecodeMode::Write) ++episode_len;
    if (r.closed_blank) {
      result.fill_lengths.push_back(episode_len);
      episode_len = 0;
    }
    if (r.skipped_run) ++result.skipped_runs;
    state = r.state;
    if (r.emitted) {
      const bool virtual_token = strip_first && first_emission;
      first_emission = false;
      if (!virtual_token) {
        result.tokens.push_back(*r.emitted);
        predictor.advance(*r.emitted);
      }
    }
  }
  return result;
}

DecodeResult smg_partial_decode(SmgModel& model, std::span<const int> template_tokens,
                                std::span<const int> new_answer,
                                const DecodeOptions& opts) {
  Graph g;
  std::vector<int> mask = mask_from_template(template_tokens, opts.mask_token);
  std::vector<Expr> complement_exprs;
  complement_exprs.reserve(mask.size());
  for (int m : mask) complement_exprs.push_back(input(g, 1.0 - m));
  ContextEncoding enc = encode_context(g, model, template_tokens, complement_exprs);
  Expr v_answer = answer_condition_vector(g, model, new_answer);
  ModelPredictor predictor(g, model, enc, v_answer, new_answer);
  return partial_decode(template_tokens, predictor, opts);
}

std::vector<int> full_decode(Graph& g, SmgModel& model, const ContextEncoding& encoding,
                             Expr answer_condition, std::span<const int> answer,
                             int max_length) {
  LstmState st = decoder_init(g, model, encoding.pooled);
  std::vector<int> out;
  int prev = Vocabulary::kEos;
  for (int step = 0; step < max_length; ++step) {
    DecoderStep ds = decoder_step(g, model, prev, answer_condition, st, encoding, answer);
    st = ds.state;
    Eigen::Index word = 0;
    ds.scores.value().col(0).maxCoeff(&word);
    const int best = static_cast<int>(word);
    if (best == Vocabulary::kEos) break;
    out.push_back(best);
    prev = best;
  }
  return out;
}

std::vector<int> seq2seq_full_decode(SmgModel& model, std::span<const int> template_tokens,
                                     std::span<const int> new_answer, int max_length) {
  Graph g;
  std::vector<int> mask = mask_from_template(template_tokens);
  std::vector<Expr> complement_exprs;
  complement_exprs.reserve(mask.size());
  for (int m : mask) complement_exprs.push_back(input(g, 1.0 - m));
  ContextEncoding enc = encode_context(g, model, template_tokens, complement_exprs);
  Expr v_answer = answer_condition_vector(g, model, new_answer);
  return full_decode(g, model, enc, v_answer, new_answer, max_length);
}

}  // namespace smg
