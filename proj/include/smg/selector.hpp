// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "smg/model.hpp"

namespace smg {

// How mask samples are drawn during a forward pass.
enum class MaskMode {
  StraightThrough,  // hard 0/1 forward, relaxed gradients (training default)
  Relaxed,          // soft samples end to end (used by gradient checks)
  Argmax,           // deterministic, no sampling (inference)
};

// One sampled answer mask. `values` are per-token scalar graph nodes (the
// straight-through or relaxed samples); `hard` are the forward 0/1 decisions.
struct MaskSample {
  std::vector<Expr> values;
  std::vector<int> hard;
};

// Samples the binary answer mask for a document given a question id.
MaskSample select_mask(Graph& g, SmgModel& model, std::span<const int> document,
                       int question, double temperature, Rng& rng,
                       MaskMode mode = MaskMode::StraightThrough);

// Deterministic argmax selection for inference.
std::vector<int> select_mask_argmax(Graph& g, SmgModel& model,
                                    std::span<const int> document, int question);

// Entry-wise 1 - m.
std::vector<int> complement(std::span<const int> mask);

// Masked positions replaced by the blank symbol.
std::vector<std::string> make_template(std::span<const std::string> document,
                                       std::span<const int> mask);
std::vector<int> make_template_ids(std::span<const int> document,
                                   std::span<const int> mask,
                                   int mask_token = Vocabulary::kMask);

// Independent Bernoulli(p) mask (the random selection baseline).
std::vector<int> random_mask(int length, double probability, Rng& rng);

// Mask implied by a template: 1 where the blank symbol sits.
std::vector<int> mask_from_template(std::span<const int> template_ids,
                                    int mask_token = Vocabulary::kMask);

}  // namespace smg
