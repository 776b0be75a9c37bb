// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "smg/graph.hpp"

namespace smg {

// A learnable array plus its gradient slot and optimizer moments.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  Mat m1;  // first moment (adaptive optimizer)
  Mat m2;  // second moment
};

struct OptimConfig {
  enum class Kind { Sgd, Adam };
  Kind kind = Kind::Sgd;
  double learning_rate = 0.1;
  double grad_clip = 5.0;  // global norm; 0 disables
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named parameter map with per-parameter moments and a step counter.
// Iteration (and checkpoint layout) follows insertion order, which is fixed
// by the model construction code, so serialization is reproducible.
class ParamStore {
 public:
  Param& create(const std::string& name, long rows, long cols);
  Param& get(const std::string& name);
  const Param& get(const std::string& name) const;
  bool has(const std::string& name) const;

  const std::vector<std::unique_ptr<Param>>& entries() const { return params_; }

  void zero_grads();
  void scale_grads(double factor);
  double grad_norm() const;

  // Applies one optimizer step from the accumulated gradients, increments
  // the step counter, and clears the gradients.
  void update(const OptimConfig& opt);

  long steps() const { return step_; }

 private:
  std::vector<std::unique_ptr<Param>> params_;
  std::unordered_map<std::string, std::size_t> index_;
  long step_ = 0;
};

// Runs the reverse sweep from `loss`, applies one optimizer step, and clears
// the tape. A non-finite loss aborts before any parameter is touched and
// reports the first offending node. Returns the loss value.
double backward_and_update(Graph& g, Expr loss, ParamStore& store,
                           const OptimConfig& opt);

// Raised when training or decoding produces non-finite numbers.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for unusable inputs (missing files, malformed data, bad ids).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Checkpoint container. Byte layout (all integers little-endian):
//   magic "SMGMODEL" | u32 version=1 | u32 vocab_size
//   u32 n_hyper   then per entry: u32 length, bytes "key=value"
//   u32 n_questions then per entry: u32 length, bytes
//   vocab_size entries: u32 length, bytes
//   u32 n_params then per parameter:
//     u32 name_length, name bytes, u32 rank=2, u64 rows, u64 cols,
//     rows*cols f64 little-endian values in column-major order.

struct LoadedCheckpoint {
  std::map<std::string, std::string> hyper;
  std::vector<std::string> questions;
  std::vector<std::string> vocab;
  std::vector<std::pair<std::string, Mat>> params;
};

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& hyper,
                     const std::vector<std::string>& vocab,
                     const std::vector<std::string>& questions);

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace smg
