// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/vocab.hpp"

#include <stdexcept>

namespace smg {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
  add(kMaskToken);
  add(kEosToken);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < 4 || tokens[0] != kPadToken || tokens[1] != kUnkToken ||
      tokens[2] != kMaskToken || tokens[3] != kEosToken) {
    throw std::invalid_argument("Vocabulary: token list missing reserved entries");
  }
  Vocabulary v;
  for (std::size_t i = 4; i < tokens.size(); ++i) v.add(tokens[i]);
  return v;
}

int Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw std::invalid_argument("Vocabulary: id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

}  // namespace smg
