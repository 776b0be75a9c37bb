// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace smg {

// All run knobs. Defaults follow the shipped paper-scale configuration
// (embedding 300, hidden 200, lambda_recon 1.0, lambda_eoa 10); the toy
// configuration in configs/toy.cfg scales the sizes down for fast runs.
struct RunConfig {
  int embedding_size = 300;
  int selector_hidden = 200;
  int decoder_hidden = 200;
  double lambda_recon = 1.0;
  double lambda_eoa = 10.0;
  double gumbel_temperature = 1.0;
  int l_max = 10;
  double learning_rate = 0.1;
  std::string optimizer = "sgd";  // sgd | adam
  double grad_clip = 5.0;
  long steps = 1000;
  long batch_size = 1;  // triples accumulated per optimizer step
  std::uint64_t seed = 1;
  std::string mode = "smg";            // smg | seq2seq
  std::string eoa_rule = "corrected";  // corrected | printed
  bool allow_empty_fill = true;
  double selection_penalty = 0.0;
  long vocab_min_count = 1;

  void set(const std::string& key, const std::string& value);
  void validate() const;

  // Structural keys serialized into checkpoints.
  std::map<std::string, std::string> to_map() const;
  static RunConfig from_map(const std::map<std::string, std::string>& m);
};

// Flat key=value file; '#' starts a comment. Unknown keys are rejected.
RunConfig load_config(const std::string& path);

// Applies "key=value" strings on top of a config (flag overrides).
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

}  // namespace smg
