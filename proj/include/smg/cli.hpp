// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smg {

// Exit codes shared by every subcommand:
//   0 success, 1 usage error, 2 data error, 3 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

struct BuildDataArgs {
  std::string records;
  std::string out_train;
  std::string out_dev;
  long min_field_count = 5000;
  std::string whitelist;  // optional path; empty = built-in 26 fields
  double dev_fraction = 0.1;
  std::uint64_t seed = 1;
};
int cmd_build_data(const BuildDataArgs& args);

struct SampleTestArgs {
  std::string triples;
  int size = 1000;
  std::uint64_t seed = 1;
  std::string out;
};
int cmd_sample_test(const SampleTestArgs& args);

struct TrainArgs {
  std::string triples;
  std::string config;  // optional; defaults apply when empty
  std::string out;
  std::string log;  // default: out + ".log"
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::string> eoa_rule;
  std::vector<std::string> overrides;  // key=value
};
int cmd_train(const TrainArgs& args);

struct EditArgs {
  std::string model;
  std::string document;
  std::string question;
  std::string new_answer;
  std::string template_source = "predicted";  // predicted | gold
  std::string template_path;                  // required for gold
  std::optional<int> l_max;
  std::optional<bool> allow_empty_fill;
  bool show_mask = false;
};
int cmd_edit(const EditArgs& args);

struct EvaluateArgs {
  std::string pred;
  std::string gold;
  std::string orig;
  double alpha = 0.9;
  std::string report;
  std::string lm;             // optional
  std::string pred_template;  // optional
  std::string pred_answers;   // optional, paired with gold_answers
  std::string gold_answers;
  std::string smoothing = "addone";  // addone | none
};
int cmd_evaluate(const EvaluateArgs& args);

struct LmTrainArgs {
  std::string corpus;
  int order = 3;
  std::string out;
};
int cmd_lm_train(const LmTrainArgs& args);

struct LmPplArgs {
  std::string model;
  std::string text;
};
int cmd_lm_ppl(const LmPplArgs& args);

int run_cli(int argc, const char* const* argv);

}  // namespace smg
