// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/kn_lm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "smg/params.hpp"

namespace smg {

namespace {

constexpr char kSep = '\x1f';

std::string join_key(std::span<const std::string> toks) {
  std::string key;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) key.push_back(kSep);
    key += toks[i];
  }
  return key;
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : key) {
    if (c == kSep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_first(const std::string& key) {
  return key.substr(key.find(kSep) + 1);
}

std::pair<std::string, std::string> split_last(const std::string& key) {
  const auto pos = key.rfind(kSep);
  if (pos == std::string::npos) return {"", key};
  return {key.substr(0, pos), key.substr(pos + 1)};
}

}  // namespace

KnLanguageModel KnLanguageModel::train(
    const std::vector<std::vector<std::string>>& sentences, int order) {
  if (order < 2) throw DataError("kn_train: order must be >= 2");
  long total_tokens = 0;
  for (const auto& s : sentences) total_tokens += static_cast<long>(s.size());
  if (total_tokens < order) {
    throw DataError("kn_train: corpus smaller than the n-gram order");
  }

  KnLanguageModel lm;
  lm.order_ = order;
  lm.raw_.assign(static_cast<std::size_t>(order - 1), {});
  for (const auto& sentence : sentences) {
    if (sentence.empty()) continue;
    std::vector<std::string> padded(static_cast<std::size_t>(order - 1), kSentenceStart);
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    padded.push_back(kSentenceEnd);
    for (int k = 2; k <= order; ++k) {
      auto& table = lm.raw_[static_cast<std::size_t>(k - 2)];
      for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= padded.size(); ++i) {
        ++table[join_key(std::span<const std::string>(padded).subspan(i, static_cast<std::size_t>(k)))];
      }
    }
  }
  lm.build_derived_tables();
  return lm;
}

void KnLanguageModel::build_derived_tables() {
  const auto& bigrams = raw_.front();

  // single absolute discount from the bigram count-of-counts
  long n1 = 0, n2 = 0;
  for (const auto& [key, count] : bigrams) {
    if (count == 1) ++n1;
    if (count == 2) ++n2;
  }
  discount_ = (n1 + 2 * n2) > 0
                  ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2)
                  : 0.5;
  discount_ = std::clamp(discount_, 0.05, 0.95);

  // prediction vocabulary: everything seen except <s>, plus <unk>
  std::map<std::string, bool> vocab;
  for (const auto& [key, count] : bigrams) {
    for (const auto& tok : split_key(key)) {
      if (tok != kSentenceStart) vocab[tok] = true;
    }
  }
  vocab[kUnknown] = true;
  pred_vocab_.clear();
  known_.clear();
  for (const auto& [tok, _] : vocab) {
    pred_vocab_.push_back(tok);
    known_[tok] = true;
  }

  // continuation counts: distinct left extensions per k-gram, from the
  // (k+1)-gram table
  cont_.assign(static_cast<std::size_t>(order_ - 1), {});
  for (int k = 1; k < order_; ++k) {
    const auto& higher = raw_[static_cast<std::size_t>(k - 1)];  // (k+1)-grams
    auto& table = cont_[static_cast<std::size_t>(k - 1)];
    for (const auto& [key, count] : higher) {
      ++table[strip_first(key)];
    }
  }

  // per-context totals and type counts; entries predicting <s> are ignored
  agg_.assign(static_cast<std::size_t>(order_ + 1), {});
  unigram_total_ = 0;
  unigram_types_ = 0;
  for (const auto& [key, cc] : cont_.front()) {
    if (key == kSentenceStart) continue;
    unigram_total_ += cc;
    ++unigram_types_;
  }
  for (int k = 2; k <= order_; ++k) {
    const auto& table = (k == order_) ? raw_.back() : cont_[static_cast<std::size_t>(k - 1)];
    auto& agg = agg_[static_cast<std::size_t>(k)];
    for (const auto& [key, count] : table) {
      const auto [context, last] = split_last(key);
      if (last == kSentenceStart) continue;
      auto& a = agg[context];
      a.total += count;
      a.types += 1;
    }
  }
}

std::string KnLanguageModel::map_token(const std::string& t) const {
  if (t == kSentenceStart || t == kSentenceEnd) return t;
  return known_.count(t) ? t : std::string(kUnknown);
}

double KnLanguageModel::level_prob(int level, std::span<const std::string> context,
                                   const std::string& next) const {
  if (level <= 1) {
    const double v = static_cast<double>(pred_vocab_.size());
    if (unigram_total_ == 0) return 1.0 / v;
    const auto& table = cont_.front();
    const auto it = table.find(next);
    const double cc = it == table.end() ? 0.0 : static_cast<double>(it->second);
    const double seen = std::max(cc - discount_, 0.0) / static_cast<double>(unigram_total_);
    const double lambda = discount_ * static_cast<double>(unigram_types_) /
                          static_cast<double>(unigram_total_);
    return seen + lambda / v;
  }
  const std::string ckey = join_key(context);
  const auto& agg = agg_[static_cast<std::size_t>(level)];
  const auto ait = agg.find(ckey);
  const auto shorter = context.subspan(1);
  if (ait == agg.end() || ait->second.total == 0) {
    return level_prob(level - 1, shorter, next);
  }
  const auto& table =
      (level == order_) ? raw_.back() : cont_[static_cast<std::size_t>(level - 1)];
  const auto it = table.find(ckey.empty() ? next : ckey + kSep + next);
  const double count = it == table.end() ? 0.0 : static_cast<double>(it->second);
  const double total = static_cast<double>(ait->second.total);
  const double lambda = discount_ * static_cast<double>(ait->second.types) / total;
  return std::max(count - discount_, 0.0) / total +
         lambda * level_prob(level - 1, shorter, next);
}

double KnLanguageModel::prob(std::span<const std::string> context,
                             const std::string& next) const {
  std::vector<std::string> ctx(static_cast<std::size_t>(order_ - 1), kSentenceStart);
  for (const auto& t : context) {
    ctx.erase(ctx.begin());
    ctx.push_back(map_token(t));
  }
  return level_prob(order_, ctx, map_token(next));
}

double KnLanguageModel::sentence_log_prob(std::span<const std::string> tokens) const {
  std::vector<std::string> ctx(static_cast<std::size_t>(order_ - 1), kSentenceStart);
  double logp = 0.0;
  auto score = [&](const std::string& target) {
    logp += std::log(level_prob(order_, ctx, target));
    ctx.erase(ctx.begin());
    ctx.push_back(target);
  };
  for (const auto& t : tokens) score(map_token(t));
  score(kSentenceEnd);
  return logp;
}

double KnLanguageModel::perplexity(
    const std::vector<std::vector<std::string>>& sentences) const {
  double logp = 0.0;
  long scored = 0;
  for (const auto& s : sentences) {
    logp += sentence_log_prob(s);
    scored += static_cast<long>(s.size()) + 1;
  }
  if (scored == 0) throw DataError("perplexity: nothing to score");
  return std::exp(-logp / static_cast<double>(scored));
}

void KnLanguageModel::save(const std::string& path) const {
  std::ostringstream os;
  os << "smg-knlm 1\n";
  os << "order " << order_ << "\n";
  for (int k = 2; k <= order_; ++k) {
    const auto& table = raw_[static_cast<std::size_t>(k - 2)];
    std::vector<std::pair<std::string, long>> entries(table.begin(), table.end());
    std::sort(entries.begin(), entries.end());
    os << "ngrams " << k << " " << entries.size() << "\n";
    for (const auto& [key, count] : entries) {
      os << count << "\t";
      const auto toks = split_key(key);
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) os << ' ';
        os << toks[i];
      }
      os << "\n";
    }
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << os.str();
  }
  std::filesystem::rename(tmp, path);
}

KnLanguageModel KnLanguageModel::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open language model " + path);
  std::string line;
  if (!std::getline(f, line) || line != "smg-knlm 1") {
    throw DataError(path + ": not a language model file");
  }
  KnLanguageModel lm;
  if (!(f >> line >> lm.order_) || line != "order" || lm.order_ < 2) {
    throw DataError(path + ": bad order line");
  }
  lm.raw_.assign(static_cast<std::size_t>(lm.order_ - 1), {});
  int k = 0;
  long remaining = 0;
  std::getline(f, line);  // consume rest of order line
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line.rfind("ngrams ", 0) == 0) {
      std::istringstream hs(line);
      std::string word;
      long count = 0;
      hs >> word >> k >> count;
      if (k < 2 || k > lm.order_) throw DataError(path + ": bad ngrams header");
      remaining = count;
      continue;
    }
    if (k == 0 || remaining <= 0) throw DataError(path + ": stray entry line");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path + ": malformed entry");
    const long count = std::stol(line.substr(0, tab));
    std::istringstream ts(line.substr(tab + 1));
    std::vector<std::string> toks;
    std::string t;
    while (ts >> t) toks.push_back(t);
    if (static_cast<int>(toks.size()) != k) throw DataError(path + ": entry arity");
    lm.raw_[static_cast<std::size_t>(k - 2)][join_key(toks)] = count;
    --remaining;
  }
  if (lm.raw_.front().empty()) throw DataError(path + ": empty model");
  lm.build_derived_tables();
  return lm;
}

}  // namespace smg
