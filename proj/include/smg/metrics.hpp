// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smg {

class KnLanguageModel;

using Tokens = std::vector<std::string>;

enum class BleuSmoothing {
  AddOne,  // (m+1)/(t+1) for orders >= 2 with zero matches (default)
  None,
};

// Clipped n-gram match statistics up to order 4, accumulable across
// sentence pairs for corpus-level scores.
struct NgramStats {
  std::array<long, 4> matched{};
  std::array<long, 4> total{};
  long candidate_length = 0;
  long reference_length = 0;

  void add(std::span<const std::string> candidate, std::span<const std::string> reference);
  NgramStats& operator+=(const NgramStats& other);
};

// BLEU-4 with brevity penalty on a 0..100 scale. Orders with no candidate
// n-grams are dropped from the geometric mean; an empty candidate scores 0;
// zero unigram matches score 0.
double bleu_from_stats(const NgramStats& stats, BleuSmoothing smoothing);
double sentence_bleu(std::span<const std::string> candidate,
                     std::span<const std::string> reference,
                     BleuSmoothing smoothing = BleuSmoothing::AddOne);

// BLEU(candidate, gold) - alpha * BLEU(candidate, original).
double ibleu(std::span<const std::string> candidate, std::span<const std::string> gold,
             std::span<const std::string> original, double alpha,
             BleuSmoothing smoothing = BleuSmoothing::AddOne);

// Longest common subsequence as (position in a, position in b) pairs.
// Deterministic: on ties the walk prefers skipping in a, which matches
// elements at the earliest possible positions of b.
std::vector<std::pair<int, int>> lcs_alignment(std::span<const std::string> a,
                                               std::span<const std::string> b);
Tokens lcs(std::span<const std::string> a, std::span<const std::string> b);

// Separator inserted between non-adjacent unmatched runs of the difference
// sequence so that no n-gram spans removed material.
inline constexpr const char* kDiffBoundaryToken = "<gap>";

// Tokens of the gold edit left unmatched by its LCS with the original,
// in order, with kDiffBoundaryToken between non-adjacent runs.
Tokens diff_sequence(std::span<const std::string> gold_modified,
                     std::span<const std::string> original);

// BLEU(candidate, gold - original) / BLEU(gold, gold - original);
// nullopt when the denominator is zero (reported as not applicable).
std::optional<double> diff_bleu_ratio(std::span<const std::string> candidate,
                                      std::span<const std::string> gold,
                                      std::span<const std::string> original,
                                      BleuSmoothing smoothing = BleuSmoothing::AddOne);

// Multiset bag-of-words F1. Empty vs empty is 1, empty vs non-empty is 0.
double bow_f1(std::span<const std::string> generated, std::span<const std::string> gold);

// BLEU between the predicted template with blank symbols removed and the
// gold template (the LCS of the original and the gold edit).
double template_bleu(std::span<const std::string> predicted_template,
                     std::span<const std::string> gold_template,
                     BleuSmoothing smoothing = BleuSmoothing::AddOne,
                     const std::string& mask_token = "[M]");

// ---------------------------------------------------------------------------
// corpus-level evaluation

struct MetricReport {
  long examples = 0;
  double bleu = 0.0;
  double ibleu = 0.0;
  double diff_bleu_ratio = 0.0;  // mean over defined examples
  long diff_bleu_na = 0;
  std::optional<double> perplexity;
  std::optional<double> answer_f1;
  std::optional<double> template_bleu;
};

struct EvaluationInputs {
  std::vector<Tokens> predictions;
  std::vector<Tokens> golds;
  std::vector<Tokens> originals;
  double alpha = 0.9;
  BleuSmoothing smoothing = BleuSmoothing::AddOne;
  const KnLanguageModel* lm = nullptr;                  // optional
  std::optional<std::vector<Tokens>> pred_templates;    // optional
  std::optional<std::vector<Tokens>> pred_answers;      // optional
  std::optional<std::vector<Tokens>> gold_answers;      // optional
};

MetricReport evaluate_corpus(const EvaluationInputs& inputs);

// One metric per line: "name<TAB>value"; absent metrics print "na".
std::string format_report(const MetricReport& report);
void write_report(const std::string& path, const MetricReport& report);

}  // namespace smg
