// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "smg/graph.hpp"
#include "smg/params.hpp"

namespace smg {

struct LstmState {
  Expr h;
  Expr c;
};

// One fused weight matrix over [x; h] producing the four gate pre-activations
// in the order input, forget, candidate, output.
struct LstmCell {
  Expr w;  // 4H x (input + H)
  Expr b;  // 4H
  int hidden = 0;
};

// Registers (or re-uses) the cell parameters "<prefix>.W" / "<prefix>.b".
void register_lstm_params(ParamStore& store, const std::string& prefix,
                          int input_size, int hidden_size, Rng& rng);

// Fetches the cell parameters onto a graph.
LstmCell lstm_cell(Graph& g, ParamStore& store, const std::string& prefix,
                   int hidden_size);

LstmState lstm_zero_state(Graph& g, int hidden_size);

// Standard LSTM recurrence; hidden entries stay in (-1, 1).
LstmState lstm_step(Expr x, const LstmState& prev, const LstmCell& cell);

// Hidden state at every position, left to right, from a zero initial state.
std::vector<Expr> lstm_encode(std::span<const Expr> xs, const LstmCell& cell);

// Per-position concatenation of forward and backward hidden states.
std::vector<Expr> bilstm_encode(std::span<const Expr> xs, const LstmCell& fwd,
                                const LstmCell& bwd);

// Glorot-uniform initialization for a weight matrix.
void glorot_init(Param& p, Rng& rng);

}  // namespace smg
