// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smg/params.hpp"

namespace smg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: bad number for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw DataError("config: bad boolean for " + key + ": '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string num_str(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "embedding_size") embedding_size = static_cast<int>(to_long(key, value));
  else if (key == "selector_hidden") selector_hidden = static_cast<int>(to_long(key, value));
  else if (key == "decoder_hidden") decoder_hidden = static_cast<int>(to_long(key, value));
  else if (key == "lambda_recon") lambda_recon = to_double(key, value);
  else if (key == "lambda_eoa") lambda_eoa = to_double(key, value);
  else if (key == "gumbel_temperature") gumbel_temperature = to_double(key, value);
  else if (key == "l_max") l_max = static_cast<int>(to_long(key, value));
  else if (key == "learning_rate") learning_rate = to_double(key, value);
  else if (key == "optimizer") optimizer = value;
  else if (key == "grad_clip") grad_clip = to_double(key, value);
  else if (key == "steps") steps = to_long(key, value);
  else if (key == "batch_size") batch_size = to_long(key, value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "mode") mode = value;
  else if (key == "eoa_rule") eoa_rule = value;
  else if (key == "allow_empty_fill") allow_empty_fill = to_bool(key, value);
  else if (key == "selection_penalty") selection_penalty = to_double(key, value);
  else if (key == "vocab_min_count") vocab_min_count = to_long(key, value);
  else throw DataError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  if (embedding_size <= 0 || selector_hidden <= 0 || decoder_hidden <= 0) {
    throw DataError("config: sizes must be positive");
  }
  if (lambda_recon < 0.0 || lambda_eoa < 0.0) {
    throw DataError("config: lambda values must be >= 0");
  }
  if (!(gumbel_temperature > 0.0)) throw DataError("config: gumbel_temperature must be > 0");
  if (l_max < 1) throw DataError("config: l_max must be >= 1");
  if (steps < 0) throw DataError("config: steps must be >= 0");
  if (batch_size < 1) throw DataError("config: batch_size must be >= 1");
  if (optimizer != "sgd" && optimizer != "adam") {
    throw DataError("config: optimizer must be sgd or adam");
  }
  if (mode != "smg" && mode != "seq2seq") {
    throw DataError("config: mode must be smg or seq2seq");
  }
  if (eoa_rule != "corrected" && eoa_rule != "printed") {
    throw DataError("config: eoa_rule must be corrected or printed");
  }
  if (selection_penalty < 0.0) throw DataError("config: selection_penalty must be >= 0");
}

std::map<std::string, std::string> RunConfig::to_map() const {
  return {
      {"embedding_size", std::to_string(embedding_size)},
      {"selector_hidden", std::to_string(selector_hidden)},
      {"decoder_hidden", std::to_string(decoder_hidden)},
      {"lambda_recon", num_str(lambda_recon)},
      {"lambda_eoa", num_str(lambda_eoa)},
      {"gumbel_temperature", num_str(gumbel_temperature)},
      {"l_max", std::to_string(l_max)},
      {"learning_rate", num_str(learning_rate)},
      {"optimizer", optimizer},
      {"grad_clip", num_str(grad_clip)},
      {"steps", std::to_string(steps)},
      {"batch_size", std::to_string(batch_size)},
      {"seed", std::to_string(seed)},
      {"mode", mode},
      {"eoa_rule", eoa_rule},
      {"allow_empty_fill", bool_str(allow_empty_fill)},
      {"selection_penalty", num_str(selection_penalty)},
      {"vocab_min_count", std::to_string(vocab_min_count)},
  };
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& m) {
  RunConfig cfg;
  for (const auto& [k, v] : m) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open config file " + path);
  RunConfig cfg;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("override must be key=value: '" + kv + "'");
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  cfg.validate();
}

}  // namespace smg
