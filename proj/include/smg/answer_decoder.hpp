// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <vector>

#include "smg/model.hpp"

namespace smg {

// Mean of the token embeddings at selected positions. An all-zero mask
// yields the zero vector (no division takes place).
Expr pool_selected(std::span<const Expr> token_embeddings,
                   std::span<const Expr> mask);

// Teacher-forced negative log-likelihood of `answer` under the answer
// decoder initialized from `condition`. Summed over the answer tokens as
// given; callers that want a trained stop symbol append </s> themselves.
Expr answer_loss(Graph& g, SmgModel& model, std::span<const int> answer,
                 Expr condition);

// Greedy decode from the condition until </s> or max_length tokens.
// The terminator is not included in the result.
std::vector<int> generate_answer(Graph& g, SmgModel& model, Expr condition,
                                 int max_length);

}  // namespace smg
