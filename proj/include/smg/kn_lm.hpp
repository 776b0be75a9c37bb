// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace smg {

// Interpolated Kneser-Ney n-gram model with a single absolute discount
// estimated from the bigram count-of-counts (D = n1 / (n1 + 2 n2)).
// The prediction vocabulary is every training token plus <unk> and the
// sentence terminator; unseen tokens score through <unk>, so every
// next-token distribution sums to one and is everywhere positive.
class KnLanguageModel {
 public:
  static constexpr const char* kSentenceStart = "<s>";
  static constexpr const char* kSentenceEnd = "</s>";
  static constexpr const char* kUnknown = "<unk>";

  static KnLanguageModel train(const std::vector<std::vector<std::string>>& sentences,
                               int order);

  // P(next | context); context is the raw preceding tokens (any length,
  // padded/truncated internally), next any token (unknowns map to <unk>).
  double prob(std::span<const std::string> context, const std::string& next) const;

  // log P of the token sequence including the terminator.
  double sentence_log_prob(std::span<const std::string> tokens) const;

  // exp of the mean negative log probability over all scored positions.
  double perplexity(const std::vector<std::vector<std::string>>& sentences) const;

  int order() const { return order_; }
  double discount() const { return discount_; }
  // Prediction vocabulary (sorted; includes <unk> and the terminator).
  const std::vector<std::string>& prediction_vocab() const { return pred_vocab_; }

  void save(const std::string& path) const;
  static KnLanguageModel load(const std::string& path);

 private:
  KnLanguageModel() = default;
  void build_derived_tables();
  double level_prob(int level, std::span<const std::string> context,
                    const std::string& next) const;
  std::string map_token(const std::string& t) const;

  struct ContextAgg {
    long total = 0;
    long types = 0;
  };

  int order_ = 3;
  double discount_ = 0.5;
  // raw_[k-2]: raw k-gram window counts for k = 2..order
  std::vector<std::unordered_map<std::string, long>> raw_;
  // cont_[k-1]: continuation counts (distinct left extensions) for k-grams,
  // k = 1..order-1
  std::vector<std::unordered_map<std::string, long>> cont_;
  // per-level context aggregates: level order uses raw counts, lower levels
  // continuation counts
  std::vector<std::unordered_map<std::string, ContextAgg>> agg_;
  std::vector<std::string> pred_vocab_;
  std::unordered_map<std::string, bool> known_;
  long unigram_total_ = 0;
  long unigram_types_ = 0;
};

}  // namespace smg
