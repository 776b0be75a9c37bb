// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smg/rng.hpp"

namespace smg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

class Graph;
struct Param;

// Handle to a node on a Graph tape. Cheap to copy; valid as long as the
// owning graph has not been cleared.
struct Expr {
  Graph* g = nullptr;
  int id = -1;

  bool valid() const { return g != nullptr && id >= 0; }
  const Mat& value() const;
  double scalar() const;
  long rows() const;
  long cols() const;
};

// Dynamic computation tape. Forward values are computed eagerly as nodes
// are appended; backward() runs one reverse sweep and accumulates parameter
// gradients into the backing ParamStore entries.
class Graph {
 public:
  struct Node {
    Mat value;
    Mat grad;
    std::string label;
    std::function<void(Graph&)> backward;  // empty for leaves
  };

  Expr emplace(Mat value, std::string label,
               std::function<void(Graph&)> backward = nullptr);

  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Mat& grad(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  // Reverse sweep from a scalar node. One sweep per tape.
  void backward(Expr loss);

  void clear();
  std::size_t size() const { return nodes_.size(); }

  // Label of the first node (in creation order) holding a non-finite entry.
  std::optional<std::string> first_nonfinite() const;

 private:
  std::vector<Node> nodes_;
  bool swept_ = false;
};

// ---- leaves ----
Expr input(Graph& g, Mat value, std::string label = "input");
Expr input(Graph& g, double value);
Expr parameter(Graph& g, Param& p);
// Column lookup into an embedding-style parameter; gradient lands on that
// column only.
Expr lookup(Graph& g, Param& table, int column);

// ---- elementwise ----
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr cmult(Expr a, Expr b);
Expr scale(Expr a, double k);
Expr scale_by(Expr a, Expr scalar);  // every entry of a times a 1x1 node
Expr one_minus(Expr a);
Expr sigmoid(Expr a);
Expr tanh(Expr a);
Expr log(Expr a);

// ---- linear algebra ----
Expr matmul(Expr w, Expr x);             // w * x
Expr matmul_transposed(Expr w, Expr x);  // w^T * x
Expr affine(Expr w, Expr x, Expr b);     // w * x + b
Expr dot(Expr a, Expr b);                // scalar

// ---- structure ----
Expr concat(std::span<const Expr> parts);  // stack column vectors
Expr concat(Expr a, Expr b);
Expr slice_rows(Expr a, int begin, int len);
Expr pick(Expr a, int index);  // scalar entry of a column vector
Expr sum(std::span<const Expr> xs);
Expr average(std::span<const Expr> xs);

// ---- sequence reductions ----
// Element-wise max over a non-empty sequence of equal-size vectors.
Expr max_pool_over_time(std::span<const Expr> xs);
// Weighted mean sum_i(w_i x_i) / sum_i(w_i) with scalar weights. A weight
// total of exactly zero yields the zero vector with zero gradients.
Expr masked_mean(std::span<const Expr> xs, std::span<const Expr> weights);

// ---- distributions ----
Expr softmax(Expr logits);
// Stable fused -log softmax(logits)[index].
Expr pick_neg_log_softmax(Expr logits, int index);
// base with amounts[k] added at row indices[k]; repeated indices accumulate.
Expr scatter_add(Expr base, const std::vector<int>& indices,
                 const std::vector<Expr>& amounts);

// ---- stochastic ----
// Straight-through Gumbel-softmax over a pair of logits: the forward value
// is exactly one-hot, the backward pass uses the tempered softmax relaxation.
Expr gumbel_binary_sample(Expr logit_pair, double temperature, Rng& rng);
// Relaxed variant (forward value is the soft sample); shares the backward
// rule with the straight-through op.
Expr gumbel_softmax_relaxed(Expr logit_pair, double temperature, Rng& rng);

}  // namespace smg
