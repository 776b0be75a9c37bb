// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace smg {

void glorot_init(Param& p, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  for (long c = 0; c < p.value.cols(); ++c) {
    for (long r = 0; r < p.value.rows(); ++r) {
      p.value(r, c) = rng.uniform(-a, a);
    }
  }
}

void register_lstm_params(ParamStore& store, const std::string& prefix,
                          int input_size, int hidden_size, Rng& rng) {
  Param& w = store.create(prefix + ".W", 4L * hidden_size, input_size + hidden_size);
  glorot_init(w, rng);
  Param& b = store.create(prefix + ".b", 4L * hidden_size, 1);
  // forget gate bias starts at 1
  b.value.block(hidden_size, 0, hidden_size, 1).setConstant(1.0);
}

LstmCell lstm_cell(Graph& g, ParamStore& store, const std::string& prefix,
                   int hidden_size) {
  return LstmCell{parameter(g, store.get(prefix + ".W")),
                  parameter(g, store.get(prefix + ".b")), hidden_size};
}

LstmState lstm_zero_state(Graph& g, int hidden_size) {
  return LstmState{input(g, Mat::Zero(hidden_size, 1), "h0"),
                   input(g, Mat::Zero(hidden_size, 1), "c0")};
}

LstmState lstm_step(Expr x, const LstmState& prev, const LstmCell& cell) {
  const int h = cell.hidden;
  if (x.rows() + h != cell.w.cols()) {
    throw std::invalid_argument(
        "lstm_step: input size " + std::to_string(x.rows()) +
        " does not match cell expecting " + std::to_string(cell.w.cols() - h));
  }
  if (prev.h.rows() != h || prev.c.rows() != h) {
    throw std::invalid_argument("lstm_step: state size does not match hidden size " +
                                std::to_string(h));
  }
  Expr z = affine(cell.w, concat(x, prev.h), cell.b);
  Expr i = sigmoid(slice_rows(z, 0, h));
  Expr f = sigmoid(slice_rows(z, h, h));
  Expr cand = tanh(slice_rows(z, 2 * h, h));
  Expr o = sigmoid(slice_rows(z, 3 * h, h));
  Expr c = add(cmult(f, prev.c), cmult(i, cand));
  return LstmState{cmult(o, tanh(c)), c};
}

std::vector<Expr> lstm_encode(std::span<const Expr> xs, const LstmCell& cell) {
  if (xs.empty()) throw std::invalid_argument("lstm_encode: empty sequence");
  Graph& g = *xs.front().g;
  LstmState st = lstm_zero_state(g, cell.hidden);
  std::vector<Expr> out;
  out.reserve(xs.size());
  for (const Expr& x : xs) {
    st = lstm_step(x, st, cell);
    out.push_back(st.h);
  }
  return out;
}

std::vector<Expr> bilstm_encode(std::span<const Expr> xs, const LstmCell& fwd,
                                const LstmCell& bwd) {
  if (xs.empty()) throw std::invalid_argument("bilstm_encode: empty sequence");
  Graph& g = *xs.front().g;
  const std::size_t n = xs.size();

  std::vector<Expr> fh;
  fh.reserve(n);
  LstmState st = lstm_zero_state(g, fwd.hidden);
  for (std::size_t i = 0; i < n; ++i) {
    st = lstm_step(xs[i], st, fwd);
    fh.push_back(st.h);
  }

  std::vector<Expr> bh(n);
  st = lstm_zero_state(g, bwd.hidden);
  for (std::size_t i = n; i-- > 0;) {
    st = lstm_step(xs[i], st, bwd);
    bh[i] = st.h;
  }

  std::vector<Expr> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(concat(fh[i], bh[i]));
  return out;
}

}  // namespace smg
