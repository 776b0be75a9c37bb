// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smg/rng.hpp"
#include "smg/vocab.hpp"

namespace smg {

// One biography record: an ordered field/content list plus the reference
// paragraph, both tokenized.
struct InfoboxRecord {
  std::vector<std::pair<std::string, std::vector<std::string>>> pairs;
  std::vector<std::string> text;
};

// One training unit: question (a field name), document tokens, answer tokens.
struct Triple {
  std::string question;
  std::vector<std::string> document;
  std::vector<std::string> answer;
};

// One evaluation unit; gold_document stays empty until annotated.
struct EditExample {
  std::string question;
  std::vector<std::string> document;
  std::vector<std::string> answer;
  std::vector<std::string> changed_answer;
  std::vector<std::string> gold_document;
};

// Lowercases and splits on whitespace. The corpus is pre-tokenized, so this
// is the only normalization applied anywhere.
std::vector<std::string> tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

// The 26 retained infobox fields, in a fixed order.
const std::vector<std::string>& default_question_whitelist();

// ---------------------------------------------------------------------------
// record parsing
//
// Text format, one record per blank-line-separated block:
//   FIELD<TAB>field name<TAB>content tokens
//   ...
//   TEXT<TAB>sentence tokens          (repeatable; concatenated)

struct ParseStats {
  long parsed = 0;
  long skipped = 0;
};

// Parses one block. Returns nullopt (and logs a diagnostic) for malformed
// lines or records violating the invariants (no pairs / empty text).
std::optional<InfoboxRecord> parse_record(const std::string& block);

std::vector<InfoboxRecord> parse_records(std::istream& in, ParseStats* stats = nullptr);
std::vector<InfoboxRecord> load_records(const std::string& path,
                                        ParseStats* stats = nullptr);

// ---------------------------------------------------------------------------
// corpus construction

// One triple per whitelisted (field, content) pair whose field occurs at
// least min_field_count times across `records`.
std::vector<Triple> build_triples(std::span<const InfoboxRecord> records,
                                  long min_field_count,
                                  std::span<const std::string> whitelist);

// Tokens with count >= min_count get ids; everything else maps to <unk>.
// Counts run over documents and answers.
Vocabulary build_vocab(std::span<const Triple> triples, long min_count);

// Distinct questions present, in whitelist-then-first-seen order.
std::vector<std::string> question_inventory(std::span<const Triple> triples);

// ceil(target_size / #fields) examples per field, uniformly without
// replacement, each with a changed answer drawn from another triple with the
// same question. Deterministic for a fixed rng seed.
std::vector<EditExample> sample_eval_candidates(std::span<const Triple> triples,
                                                int target_size, Rng& rng);

// ---------------------------------------------------------------------------
// file formats (JSON lines)

void write_triples(const std::string& path, std::span<const Triple> triples);
std::vector<Triple> read_triples(const std::string& path);

void write_edit_examples(const std::string& path, std::span<const EditExample> examples);
std::vector<EditExample> read_edit_examples(const std::string& path);

// One whitespace-tokenized document per line.
std::vector<std::vector<std::string>> read_token_lines(const std::string& path);
void write_token_lines(const std::string& path,
                       std::span<const std::vector<std::string>> lines);

// One field name per line.
std::vector<std::string> read_whitelist(const std::string& path);

}  // namespace smg
