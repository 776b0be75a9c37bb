// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "smg/answer_decoder.hpp"
#include "smg/context_codec.hpp"
#include "smg/model.hpp"
#include "smg/selector.hpp"

namespace smg {

struct TrainingLosses {
  Expr answer;
  Expr recon;  // reconstruction loss, or the full-generation loss in seq2seq mode
  Expr eoa;
  Expr total;
  MaskSample mask;
};

struct LossOptions {
  MaskMode mask_mode = MaskMode::StraightThrough;
  // Bypass the selector with a fixed mask (evaluation / gradient checks).
  const std::vector<int>* fixed_mask = nullptr;
  // Freeze end-of-answer targets across evaluations (gradient checks).
  const std::vector<int>* fixed_eoa_targets = nullptr;
  // Per-step decoder outputs of the reconstruction pass.
  std::vector<DecoderStep>* steps_out = nullptr;
};

// Builds the full training objective for one triple on the given graph.
TrainingLosses build_training_losses(Graph& g, SmgModel& model,
                                     const EncodedTriple& triple, Rng& rng,
                                     const LossOptions& opts = {});

struct StepLosses {
  double answer = 0.0;
  double recon = 0.0;
  double eoa = 0.0;
  double total = 0.0;
};

OptimConfig optim_from_config(const RunConfig& cfg);

// One optimizer step on one triple.
StepLosses train_step(SmgModel& model, const EncodedTriple& triple, Rng& rng,
                      const OptimConfig& opt);

struct TrainSummary {
  long steps = 0;
  StepLosses last;
};

// Full training run over the triples for config().steps steps with per-epoch
// shuffling, a per-step log line, and a checkpoint written at the end.
// On a numeric failure the last finite parameters are still written before
// the error propagates. The training sample stream is seeded with
// config().seed + 1 (the model init consumed config().seed).
TrainSummary train_model(SmgModel& model, std::span<const Triple> triples,
                         const std::string& checkpoint_path,
                         const std::string& log_path);

}  // namespace smg
