// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "smg/log.hpp"
#include "smg/params.hpp"

namespace smg {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("SMG_LOG");
    if (!env) return LogLevel::Info;
    const std::string s(env);
    if (s == "quiet") return LogLevel::Quiet;
    if (s == "warn") return LogLevel::Warn;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

void log_warn(const std::string& msg) {
  if (log_level() >= LogLevel::Warn) std::fprintf(stderr, "[smg] warning: %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::fprintf(stderr, "[smg] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::fprintf(stderr, "[smg] %s\n", msg.c_str());
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

const std::vector<std::string>& default_question_whitelist() {
  static const std::vector<std::string> fields = {
      "birth date",   "name",        "birth place", "death date",
      "death place",  "occupation",  "position",    "nationality",
      "spouse",       "fullname",    "alma mater",  "children",
      "residence",    "religion",    "predecessor", "successor",
      "known for",    "origin",      "country",     "education",
      "instrument",   "college",     "citizenship", "ethnicity",
      "discipline",   "work institutions"};
  return fields;
}

// ---------------------------------------------------------------------------
// record parsing

namespace {

std::string lowercase_field(std::string_view s) {
  // Field names keep inner spaces ("known for") but are lowercased and
  // whitespace-normalized.
  return join_tokens(tokenize(s));
}

std::vector<std::string> split_lines(const std::string& block) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(block);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

}  // namespace

std::optional<InfoboxRecord> parse_record(const std::string& block) {
  InfoboxRecord rec;
  for (const std::string& line : split_lines(block)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    if (t1 == std::string::npos) {
      log_warn("malformed record line (no tab): " + line);
      return std::nullopt;
    }
    const std::string kind = line.substr(0, t1);
    if (kind == "FIELD") {
      const auto t2 = line.find('\t', t1 + 1);
      if (t2 == std::string::npos) {
        log_warn("malformed FIELD line: " + line);
        return std::nullopt;
      }
      const std::string field = lowercase_field(line.substr(t1 + 1, t2 - t1 - 1));
      auto content = tokenize(line.substr(t2 + 1));
      if (field.empty()) {
        log_warn("FIELD line with empty field name: " + line);
        return std::nullopt;
      }
      rec.pairs.emplace_back(field, std::move(content));
    } else if (kind == "TEXT") {
      auto toks = tokenize(line.substr(t1 + 1));
      rec.text.insert(rec.text.end(), toks.begin(), toks.end());
    } else {
      log_warn("malformed record line (unknown kind '" + kind + "')");
      return std::nullopt;
    }
  }
  if (rec.pairs.empty()) {
    log_warn("record skipped: no field/content pairs");
    return std::nullopt;
  }
  if (rec.text.empty()) {
    log_warn("record skipped: empty text");
    return std::nullopt;
  }
  return rec;
}

std::vector<InfoboxRecord> parse_records(std::istream& in, ParseStats* stats) {
  std::vector<InfoboxRecord> out;
  std::string block, line;
  ParseStats local;
  auto flush = [&] {
    if (block.find_first_not_of(" \t\r\n") == std::string::npos) {
      block.clear();
      return;
    }
    if (auto rec = parse_record(block)) {
      out.push_back(std::move(*rec));
      ++local.parsed;
    } else {
      ++local.skipped;
    }
    block.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
    } else {
      block += line;
      block.push_back('\n');
    }
  }
  flush();
  if (stats) *stats = local;
  return out;
}

std::vector<InfoboxRecord> load_records(const std::string& path, ParseStats* stats) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open records file " + path);
  return parse_records(f, stats);
}

// ---------------------------------------------------------------------------
// corpus construction

std::vector<Triple> build_triples(std::span<const InfoboxRecord> records,
                                  long min_field_count,
                                  std::span<const std::string> whitelist) {
  std::unordered_map<std::string, long> freq;
  for (const auto& rec : records) {
    for (const auto& [field, content] : rec.pairs) ++freq[field];
  }
  std::unordered_map<std::string, bool> allowed;
  for (const auto& f : whitelist) allowed[f] = true;

  std::vector<Triple> out;
  for (const auto& rec : records) {
    for (const auto& [field, content] : rec.pairs) {
      if (!allowed.count(field)) continue;
      if (freq[field] < min_field_count) continue;
      if (content.empty()) continue;
      out.push_back(Triple{field, rec.text, content});
    }
  }
  return out;
}

Vocabulary build_vocab(std::span<const Triple> triples, long min_count) {
  if (triples.empty()) throw DataError("build_vocab: empty corpus");
  std::unordered_map<std::string, long> counts;
  for (const auto& t : triples) {
    for (const auto& tok : t.document) ++counts[tok];
    for (const auto& tok : t.answer) ++counts[tok];
  }
  // frequency-descending, ties lexicographic, so ids are reproducible
  std::vector<std::pair<std::string, long>> order(counts.begin(), counts.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocabulary v;
  for (const auto& [tok, n] : order) {
    if (n >= min_count) v.add(tok);
  }
  return v;
}

std::vector<std::string> question_inventory(std::span<const Triple> triples) {
  std::unordered_map<std::string, bool> seen;
  for (const auto& t : triples) seen[t.question] = true;
  std::vector<std::string> out;
  for (const auto& f : default_question_whitelist()) {
    if (seen.count(f)) {
      out.push_back(f);
      seen.erase(f);
    }
  }
  // off-whitelist questions (custom whitelists) follow in sorted order
  std::vector<std::string> rest;
  for (const auto& [q, _] : seen) rest.push_back(q);
  std::sort(rest.begin(), rest.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

std::vector<EditExample> sample_eval_candidates(std::span<const Triple> triples,
                                                int target_size, Rng& rng) {
  if (target_size <= 0) throw DataError("sample_eval_candidates: target size must be > 0");
  std::map<std::string, std::vector<std::size_t>> by_question;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    by_question[triples[i].question].push_back(i);
  }
  const auto fields = question_inventory(triples);
  if (fields.empty()) throw DataError("sample_eval_candidates: no triples");
  const int quota =
      (target_size + static_cast<int>(fields.size()) - 1) / static_cast<int>(fields.size());

  std::vector<EditExample> out;
  for (const auto& q : fields) {
    auto& pool = by_question[q];
    std::vector<std::size_t> picks = pool;
    rng.shuffle(picks);
    if (static_cast<int>(picks.size()) > quota) picks.resize(static_cast<std::size_t>(quota));
    for (std::size_t src : picks) {
      const Triple& t = triples[src];
      EditExample ex;
      ex.question = t.question;
      ex.document = t.document;
      ex.answer = t.answer;
      bool assigned = false;
      for (int attempt = 0; attempt < 32 && !assigned; ++attempt) {
        const std::size_t j = pool[static_cast<std::size_t>(rng.below(pool.size()))];
        if (j == src) continue;
        if (triples[j].answer == t.answer) continue;
        ex.changed_answer = triples[j].answer;
        assigned = true;
      }
      if (!assigned) {
        // exhaustive fallback before giving up on this example
        for (std::size_t j : pool) {
          if (j != src && triples[j].answer != t.answer) {
            ex.changed_answer = triples[j].answer;
            assigned = true;
            break;
          }
        }
      }
      if (!assigned) {
        log_warn("no distinct changed answer available for question '" + q +
                 "'; example skipped");
        continue;
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// file formats

namespace {

using nlohmann::json;

json triple_to_json(const Triple& t) {
  return json{{"question", t.question},
              {"document", join_tokens(t.document)},
              {"answer", join_tokens(t.answer)}};
}

Triple triple_from_json(const json& j) {
  Triple t;
  t.question = j.at("question").get<std::string>();
  t.document = tokenize(j.at("document").get<std::string>());
  t.answer = tokenize(j.at("answer").get<std::string>());
  if (t.document.empty() || t.answer.empty()) {
    throw DataError("triple with empty document or answer");
  }
  return t;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path);
  return f;
}

}  // namespace

void write_triples(const std::string& path, std::span<const Triple> triples) {
  const std::string tmp = path + ".tmp";
  {
    auto f = open_out(tmp);
    for (const auto& t : triples) f << triple_to_json(t).dump() << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::vector<Triple> read_triples(const std::string& path) {
  auto f = open_in(path);
  std::vector<Triple> out;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(triple_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_edit_examples(const std::string& path, std::span<const EditExample> examples) {
  const std::string tmp = path + ".tmp";
  {
    auto f = open_out(tmp);
    for (const auto& ex : examples) {
      json j{{"question", ex.question},
             {"document", join_tokens(ex.document)},
             {"answer", join_tokens(ex.answer)},
             {"changed_answer", join_tokens(ex.changed_answer)}};
      if (ex.gold_document.empty()) {
        j["gold_document"] = nullptr;
      } else {
        j["gold_document"] = join_tokens(ex.gold_document);
      }
      f << j.dump() << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

std::vector<EditExample> read_edit_examples(const std::string& path) {
  auto f = open_in(path);
  std::vector<EditExample> out;
  std::string line;
  long lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      EditExample ex;
      ex.question = j.at("question").get<std::string>();
      ex.document = tokenize(j.at("document").get<std::string>());
      ex.answer = tokenize(j.at("answer").get<std::string>());
      ex.changed_answer = tokenize(j.at("changed_answer").get<std::string>());
      if (j.contains("gold_document") && !j["gold_document"].is_null()) {
        ex.gold_document = tokenize(j["gold_document"].get<std::string>());
      }
      out.push_back(std::move(ex));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  auto f = open_in(path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(f, line)) out.push_back(tokenize(line));
  return out;
}

void write_token_lines(const std::string& path,
                       std::span<const std::vector<std::string>> lines) {
  const std::string tmp = path + ".tmp";
  {
    auto f = open_out(tmp);
    for (const auto& l : lines) f << join_tokens(l) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::string> read_whitelist(const std::string& path) {
  auto f = open_in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(f, line)) {
    const std::string field = lowercase_field(line);
    if (!field.empty()) out.push_back(field);
  }
  if (out.empty()) throw DataError("whitelist file " + path + " is empty");
  return out;
}

}  // namespace smg
