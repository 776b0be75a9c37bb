// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "smg/graph.hpp"
#include "smg/params.hpp"
#include "smg/rng.hpp"

namespace smg::test {

inline Mat rand_mat(Rng& rng, long rows, long cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (long c = 0; c < cols; ++c) {
    for (long r = 0; r < rows; ++r) {
      m(r, c) = rng.uniform(-scale, scale);
    }
  }
  return m;
}

inline void randomize(Param& p, Rng& rng, double scale = 1.0) {
  p.value = rand_mat(rng, p.value.rows(), p.value.cols(), scale);
}

// Central finite-difference check of every coordinate of every parameter in
// `store` against the analytic gradients of the scalar built by `make_loss`.
// Returns the largest relative error. make_loss must rebuild the expression
// from the current parameter values on the graph it is given.
inline double fd_max_rel_error(ParamStore& store,
                               const std::function<Expr(Graph&)>& make_loss,
                               double eps = 1e-5) {
  store.zero_grads();
  std::vector<Mat> analytic;
  {
    Graph g;
    Expr loss = make_loss(g);
    g.backward(loss);
    for (const auto& p : store.entries()) analytic.push_back(p->grad);
  }
  store.zero_grads();

  auto eval = [&] {
    Graph g;
    return make_loss(g).scalar();
  };

  double max_rel = 0.0;
  for (std::size_t pi = 0; pi < store.entries().size(); ++pi) {
    Param& p = *store.entries()[pi];
    for (long c = 0; c < p.value.cols(); ++c) {
      for (long r = 0; r < p.value.rows(); ++r) {
        const double orig = p.value(r, c);
        p.value(r, c) = orig + eps;
        const double f_plus = eval();
        p.value(r, c) = orig - eps;
        const double f_minus = eval();
        p.value(r, c) = orig;
        const double numeric = (f_plus - f_minus) / (2.0 * eps);
        const double ana = analytic[pi](r, c);
        const double rel = std::abs(ana - numeric) /
                           std::max({std::abs(ana), std::abs(numeric), 1e-3});
        max_rel = std::max(max_rel, rel);
      }
    }
  }
  return max_rel;
}

}  // namespace smg::test
