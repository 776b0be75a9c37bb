// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace smg {

// Token table with four fixed reserved entries:
//   0 <pad>   padding (unused by the model, kept for file compatibility)
//   1 <unk>   out-of-vocabulary tokens
//   2 [M]     the blank symbol in context templates
//   3 </s>    end of sequence; also fed as the first decoder input
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kMask = 2;
  static constexpr int kEos = 3;
  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kUnkToken = "<unk>";
  static constexpr const char* kMaskToken = "[M]";
  static constexpr const char* kEosToken = "</s>";

  Vocabulary();

  // Restores a vocabulary from a full token list (reserved entries first),
  // e.g. from a checkpoint.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  // Adds a token if absent; returns its id either way.
  int add(const std::string& token);

  // kUnk for unknown tokens.
  int id(const std::string& token) const;
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace smg
