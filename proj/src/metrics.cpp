// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "smg/kn_lm.hpp"
#include "smg/params.hpp"
#include "smg/vocab.hpp"

namespace smg {

namespace {

// n-grams joined with a separator that cannot occur inside tokens
std::string ngram_key(std::span<const std::string> toks, std::size_t begin, int n) {
  std::string key;
  for (int k = 0; k < n; ++k) {
    if (k) key.push_back('\x1f');
    key += toks[begin + static_cast<std::size_t>(k)];
  }
  return key;
}

}  // namespace

void NgramStats::add(std::span<const std::string> candidate,
                     std::span<const std::string> reference) {
  candidate_length += static_cast<long>(candidate.size());
  reference_length += static_cast<long>(reference.size());
  for (int n = 1; n <= 4; ++n) {
    const long cn = static_cast<long>(candidate.size()) - n + 1;
    if (cn <= 0) continue;
    total[static_cast<std::size_t>(n - 1)] += cn;
    std::unordered_map<std::string, long> ref_counts;
    const long rn = static_cast<long>(reference.size()) - n + 1;
    for (long i = 0; i < rn; ++i) {
      ++ref_counts[ngram_key(reference, static_cast<std::size_t>(i), n)];
    }
    std::unordered_map<std::string, long> cand_counts;
    for (long i = 0; i < cn; ++i) {
      ++cand_counts[ngram_key(candidate, static_cast<std::size_t>(i), n)];
    }
    for (const auto& [key, count] : cand_counts) {
      const auto it = ref_counts.find(key);
      if (it != ref_counts.end()) {
        matched[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
      }
    }
  }
}

NgramStats& NgramStats::operator+=(const NgramStats& other) {
  for (std::size_t i = 0; i < 4; ++i) {
    matched[i] += other.matched[i];
    total[i] += other.total[i];
  }
  candidate_length += other.candidate_length;
  reference_length += other.reference_length;
  return *this;
}

double bleu_from_stats(const NgramStats& stats, BleuSmoothing smoothing) {
  if (stats.candidate_length == 0) return 0.0;
  double log_precision = 0.0;
  int orders = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const long t = stats.total[i];
    if (t == 0) continue;  // candidate too short for this order
    const long m = stats.matched[i];
    ++orders;
    if (m > 0) {
      log_precision += std::log(static_cast<double>(m) / static_cast<double>(t));
    } else if (i == 0 || smoothing == BleuSmoothing::None) {
      return 0.0;  // no unigram overlap, or smoothing disabled
    } else {
      log_precision += std::log(1.0 / static_cast<double>(t + 1));
    }
  }
  if (orders == 0) return 0.0;
  double brevity = 1.0;
  if (stats.candidate_length < stats.reference_length) {
    brevity = std::exp(1.0 - static_cast<double>(stats.reference_length) /
                                 static_cast<double>(stats.candidate_length));
  }
  return 100.0 * brevity * std::exp(log_precision / orders);
}

double sentence_bleu(std::span<const std::string> candidate,
                     std::span<const std::string> reference, BleuSmoothing smoothing) {
  NgramStats stats;
  stats.add(candidate, reference);
  return bleu_from_stats(stats, smoothing);
}

double ibleu(std::span<const std::string> candidate, std::span<const std::string> gold,
             std::span<const std::string> original, double alpha, BleuSmoothing smoothing) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw std::invalid_argument("ibleu: alpha outside [0, 1]");
  }
  return sentence_bleu(candidate, gold, smoothing) -
         alpha * sentence_bleu(candidate, original, smoothing);
}

std::vector<std::pair<int, int>> lcs_alignment(std::span<const std::string> a,
                                               std::span<const std::string> b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  // len[i][j] = LCS length of a[i:], b[j:]
  std::vector<std::vector<int>> len(static_cast<std::size_t>(n + 1),
                                    std::vector<int>(static_cast<std::size_t>(m + 1), 0));
  for (int i = n - 1; i >= 0; --i) {
    for (int j = m - 1; j >= 0; --j) {
      if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)]) {
        len[i][j] = 1 + len[i + 1][j + 1];
      } else {
        len[i][j] = std::max(len[i + 1][j], len[i][j + 1]);
      }
    }
  }
  std::vector<std::pair<int, int>> out;
  int i = 0, j = 0;
  while (i < n && j < m) {
    if (a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(j)] &&
        len[i][j] == 1 + len[i + 1][j + 1]) {
      out.emplace_back(i, j);
      ++i;
      ++j;
    } else if (len[i + 1][j] >= len[i][j + 1]) {
      ++i;  // prefer skipping in a: matches land at the earliest b positions
    } else {
      ++j;
    }
  }
  return out;
}

Tokens lcs(std::span<const std::string> a, std::span<const std::string> b) {
  Tokens out;
  for (const auto& [i, j] : lcs_alignment(a, b)) {
    out.push_back(a[static_cast<std::size_t>(i)]);
  }
  return out;
}

Tokens diff_sequence(std::span<const std::string> gold_modified,
                     std::span<const std::string> original) {
  const auto alignment = lcs_alignment(gold_modified, original);
  std::vector<bool> matched(gold_modified.size(), false);
  for (const auto& [i, j] : alignment) matched[static_cast<std::size_t>(i)] = true;
  Tokens out;
  bool prev_unmatched = false;
  for (std::size_t i = 0; i < gold_modified.size(); ++i) {
    if (matched[i]) {
      prev_unmatched = false;
      continue;
    }
    if (!prev_unmatched && !out.empty()) out.push_back(kDiffBoundaryToken);
    out.push_back(gold_modified[i]);
    prev_unmatched = true;
  }
  return out;
}

std::optional<double> diff_bleu_ratio(std::span<const std::string> candidate,
                                      std::span<const std::string> gold,
                                      std::span<const std::string> original,
                                      BleuSmoothing smoothing) {
  const Tokens diff = diff_sequence(gold, original);
  const double denom = sentence_bleu(gold, diff, smoothing);
  if (denom <= 0.0) return std::nullopt;
  return sentence_bleu(candidate, diff, smoothing) / denom;
}

double bow_f1(std::span<const std::string> generated, std::span<const std::string> gold) {
  if (generated.empty() && gold.empty()) return 1.0;
  if (generated.empty() || gold.empty()) return 0.0;
  std::map<std::string, long> gen_counts, gold_counts;
  for (const auto& t : generated) ++gen_counts[t];
  for (const auto& t : gold) ++gold_counts[t];
  long overlap = 0;
  for (const auto& [tok, c] : gen_counts) {
    const auto it = gold_counts.find(tok);
    if (it != gold_counts.end()) overlap += std::min(c, it->second);
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(generated.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

double template_bleu(std::span<const std::string> predicted_template,
                     std::span<const std::string> gold_template,
                     BleuSmoothing smoothing, const std::string& mask_token) {
  Tokens visible;
  for (const auto& t : predicted_template) {
    if (t != mask_token) visible.push_back(t);
  }
  return sentence_bleu(visible, gold_template, smoothing);
}

// ---------------------------------------------------------------------------
// corpus-level evaluation

MetricReport evaluate_corpus(const EvaluationInputs& in) {
  const std::size_t n = in.predictions.size();
  if (in.golds.size() != n || in.originals.size() != n) {
    throw DataError("evaluate: prediction/gold/original line counts differ");
  }
  auto check_aligned = [&](const std::optional<std::vector<Tokens>>& v, const char* what) {
    if (v && v->size() != n) {
      throw DataError(std::string("evaluate: ") + what + " line count differs");
    }
  };
  check_aligned(in.pred_templates, "template");
  check_aligned(in.pred_answers, "predicted answer");
  check_aligned(in.gold_answers, "gold answer");
  if (in.pred_answers.has_value() != in.gold_answers.has_value()) {
    throw DataError("evaluate: answer files must be given in pairs");
  }

  MetricReport report;
  report.examples = static_cast<long>(n);

  NgramStats vs_gold, vs_orig, tmpl_stats;
  double ratio_sum = 0.0;
  long ratio_count = 0;
  double f1_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vs_gold.add(in.predictions[i], in.golds[i]);
    vs_orig.add(in.predictions[i], in.originals[i]);
    if (auto ratio = diff_bleu_ratio(in.predictions[i], in.golds[i], in.originals[i],
                                     in.smoothing)) {
      ratio_sum += *ratio;
      ++ratio_count;
    } else {
      ++report.diff_bleu_na;
    }
    if (in.pred_templates) {
      Tokens visible;
      for (const auto& t : (*in.pred_templates)[i]) {
        if (t != Vocabulary::kMaskToken) visible.push_back(t);
      }
      tmpl_stats.add(visible, lcs(in.originals[i], in.golds[i]));
    }
    if (in.pred_answers) {
      f1_sum += bow_f1((*in.pred_answers)[i], (*in.gold_answers)[i]);
    }
  }
  report.bleu = bleu_from_stats(vs_gold, in.smoothing);
  report.ibleu = report.bleu - in.alpha * bleu_from_stats(vs_orig, in.smoothing);
  report.diff_bleu_ratio = ratio_count > 0 ? ratio_sum / static_cast<double>(ratio_count) : 0.0;
  if (in.pred_templates) report.template_bleu = bleu_from_stats(tmpl_stats, in.smoothing);
  if (in.pred_answers && n > 0) report.answer_f1 = f1_sum / static_cast<double>(n);
  if (in.lm) {
    std::vector<Tokens> lines = in.predictions;
    report.perplexity = in.lm->perplexity(lines);
  }
  return report;
}

std::string format_report(const MetricReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "examples\t" << r.examples << "\n";
  os << "bleu\t" << r.bleu << "\n";
  os << "ibleu\t" << r.ibleu << "\n";
  os << "diff_bleu_ratio\t" << r.diff_bleu_ratio << "\n";
  os << "diff_bleu_na\t" << r.diff_bleu_na << "\n";
  os << "perplexity\t";
  if (r.perplexity) os << *r.perplexity; else os << "na";
  os << "\n";
  os << "answer_f1\t";
  if (r.answer_f1) os << *r.answer_f1; else os << "na";
  os << "\n";
  os << "template_bleu\t";
  if (r.template_bleu) os << *r.template_bleu; else os << "na";
  os << "\n";
  return os.str();
}

void write_report(const std::string& path, const MetricReport& report) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << format_report(report);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace smg
