// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "smg/corpus.hpp"
#include "smg/params.hpp"

using namespace smg;

namespace {

const char* kFennerRecord =
    "FIELD\tName\tFrank Fenner\n"
    "FIELD\tBorn\t21 December 1914 , Ballarat\n"
    "FIELD\tDied\t22 November 2010 -lrb- aged 95 -rrb- Canberra\n"
    "FIELD\tOccupation\tVirology\n"
    "FIELD\tNationality\tAustralian\n"
    "FIELD\tKnown for\tEradication of smallpox , Control of Australia 's rabbit plague\n"
    "TEXT\tfrank john fenner -lrb- 21 december 1914 - 22 november 2010 -rrb- was an "
    "australian scientist with a distinguished career in the field of virology .\n"
    "TEXT\this two greatest achievements are cited as overseeing the eradication of "
    "smallpox , and the control of australia 's rabbit plague by introducing the "
    "myxoma virus .\n";

}  // namespace

TEST_CASE("tokenize: lowercase whitespace split") {
  const auto toks = tokenize("george evans -lrb- born");
  CHECK(toks == std::vector<std::string>{"george", "evans", "-lrb-", "born"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t \n ").empty());
  // idempotent through a join round trip
  const auto again = tokenize(join_tokens(toks));
  CHECK(again == toks);
  CHECK(tokenize("MiXeD CaSe") == std::vector<std::string>{"mixed", "case"});
}

TEST_CASE("parse_record: the six-pair biography example") {
  auto rec = parse_record(kFennerRecord);
  REQUIRE(rec.has_value());
  REQUIRE(rec->pairs.size() == 6);
  CHECK(rec->pairs[3].first == "occupation");
  CHECK(rec->pairs[3].second == std::vector<std::string>{"virology"});
  CHECK(rec->pairs[4].first == "nationality");
  CHECK(rec->pairs[4].second == std::vector<std::string>{"australian"});
  CHECK(rec->pairs[5].first == "known for");  // normalized key
  CHECK(!rec->text.empty());
  CHECK(rec->text.front() == "frank");
}

TEST_CASE("parse_record: invariant violations are skipped") {
  CHECK(!parse_record("FIELD\tname\tx\n").has_value());  // empty text
  CHECK(!parse_record("TEXT\tsome text only\n").has_value());  // no pairs
  CHECK(!parse_record("FIELD\tname\tx\nBOGUS\tline\nTEXT\tt\n").has_value());
  CHECK(!parse_record("FIELD no tabs here\nTEXT\tt\n").has_value());
}

TEST_CASE("parse_records: blank-line separated stream with diagnostics") {
  std::string data = std::string(kFennerRecord) + "\n" +
                     "FIELD\tname\tjane doe\nTEXT\tjane doe was a chemist .\n" + "\n" +
                     "FIELD\tname\tbroken\n" + "\n";  // last one has no text
  std::istringstream in(data);
  ParseStats stats;
  auto records = parse_records(in, &stats);
  CHECK(records.size() == 2);
  CHECK(stats.parsed == 2);
  CHECK(stats.skipped == 1);
}

TEST_CASE("build_triples: whitelist and frequency filtering") {
  std::vector<InfoboxRecord> records;
  auto fenner = parse_record(kFennerRecord);
  REQUIRE(fenner.has_value());
  records.push_back(*fenner);
  // seed extra records so the interesting fields clear a threshold of 3
  for (int i = 0; i < 3; ++i) {
    InfoboxRecord r;
    r.pairs = {{"occupation", {"chemist"}},
               {"nationality", {"german"}},
               {"high", {"school"}},  // never whitelisted
               {"known for", {"chemistry"}}};
    r.text = tokenize("a chemist from germany .");
    records.push_back(r);
  }

  const auto triples = build_triples(records, 3, default_question_whitelist());
  // fenner contributes only fields that occur >= 3 times: occupation,
  // nationality, known for (name/born/died occur once; high school is
  // outside the whitelist)
  std::set<std::string> fenner_questions;
  for (const auto& t : triples) {
    if (t.document.front() == "frank") fenner_questions.insert(t.question);
    CHECK(t.question != "high school");
  }
  CHECK(fenner_questions == std::set<std::string>{"occupation", "nationality", "known for"});

  // the occupation triple carries the biography text and the planted answer
  for (const auto& t : triples) {
    if (t.question == "occupation" && t.document.front() == "frank") {
      CHECK(t.answer == std::vector<std::string>{"virology"});
      CHECK(t.document == fenner->text);
    }
  }
}

TEST_CASE("build_triples: threshold boundary keeps fields at exactly the count") {
  std::vector<InfoboxRecord> records;
  for (int i = 0; i < 5; ++i) {
    InfoboxRecord r;
    r.pairs = {{"occupation", {"chemist"}}};
    if (i < 2) r.pairs.emplace_back("nationality", std::vector<std::string>{"german"});
    r.text = tokenize("some text .");
    records.push_back(r);
  }
  const auto triples = build_triples(records, 5, default_question_whitelist());
  CHECK(triples.size() == 5);  // nationality occurs twice -> dropped
  for (const auto& t : triples) CHECK(t.question == "occupation");
}

TEST_CASE("default whitelist holds the 26 retained fields") {
  const auto& wl = default_question_whitelist();
  CHECK(wl.size() == 26);
  CHECK(std::find(wl.begin(), wl.end(), "birth date") != wl.end());
  CHECK(std::find(wl.begin(), wl.end(), "work institutions") != wl.end());
  CHECK(std::find(wl.begin(), wl.end(), "high school") == wl.end());
}

TEST_CASE("build_vocab: min-count filtering and unknown mapping") {
  std::vector<Triple> triples{{"occupation", {"a", "a", "b"}, {"a"}}};
  Vocabulary v1 = build_vocab(triples, 1);
  CHECK(v1.size() == 6);  // 4 reserved + a + b
  CHECK(v1.id("a") >= 4);
  CHECK(v1.id("b") >= 4);

  Vocabulary v2 = build_vocab(triples, 2);
  CHECK(v2.id("a") >= 4);
  CHECK(v2.id("b") == Vocabulary::kUnk);

  // encode/decode identity for in-vocabulary tokens
  const std::vector<std::string> toks{"a", "b", "a"};
  const auto ids = v1.encode(toks);
  CHECK(v1.decode(ids) == toks);
}

TEST_CASE("vocabulary reserves fixed indices") {
  Vocabulary v;
  CHECK(v.id("<pad>") == Vocabulary::kPad);
  CHECK(v.id("<unk>") == Vocabulary::kUnk);
  CHECK(v.id("[M]") == Vocabulary::kMask);
  CHECK(v.id("</s>") == Vocabulary::kEos);
  CHECK(v.id("anything-else") == Vocabulary::kUnk);
}

namespace {

std::vector<Triple> synthetic_triples_for_sampling() {
  std::vector<Triple> triples;
  const auto& wl = default_question_whitelist();
  for (const auto& q : wl) {
    for (int i = 0; i < 50; ++i) {
      Triple t;
      t.question = q;
      t.document = {"doc", "for", q.substr(0, 3), std::to_string(i)};
      t.answer = {"ans" + std::to_string(i % 7)};
      triples.push_back(t);
    }
  }
  return triples;
}

}  // namespace

TEST_CASE("sample_eval_candidates: ceiling quota over 26 fields") {
  const auto triples = synthetic_triples_for_sampling();
  Rng rng(5);
  const auto examples = sample_eval_candidates(triples, 1000, rng);
  CHECK(examples.size() == 1014);  // ceil(1000/26) = 39 per field, 26 fields
  std::map<std::string, int> per_field;
  for (const auto& ex : examples) ++per_field[ex.question];
  for (const auto& [q, n] : per_field) CHECK(n == 39);
}

TEST_CASE("sample_eval_candidates: short fields contribute everything they have") {
  std::vector<Triple> triples;
  for (int i = 0; i < 10; ++i) {
    triples.push_back({"occupation", {"doc", std::to_string(i)}, {"a" + std::to_string(i)}});
  }
  for (int i = 0; i < 60; ++i) {
    triples.push_back({"nationality", {"doc", std::to_string(i)}, {"n" + std::to_string(i % 5)}});
  }
  Rng rng(9);
  const auto examples = sample_eval_candidates(triples, 60, rng);
  // quota ceil(60/2)=30; occupation has only 10
  std::map<std::string, int> per_field;
  for (const auto& ex : examples) ++per_field[ex.question];
  CHECK(per_field["occupation"] == 10);
  CHECK(per_field["nationality"] == 30);
}

TEST_CASE("sample_eval_candidates: changed answers share the question and differ") {
  const auto triples = synthetic_triples_for_sampling();
  Rng rng(11);
  const auto examples = sample_eval_candidates(triples, 200, rng);
  std::map<std::string, std::set<std::string>> answers_by_question;
  for (const auto& t : triples) {
    answers_by_question[t.question].insert(join_tokens(t.answer));
  }
  for (const auto& ex : examples) {
    CHECK(ex.changed_answer != ex.answer);
    CHECK(answers_by_question[ex.question].count(join_tokens(ex.changed_answer)) == 1);
    CHECK(ex.gold_document.empty());
  }
}

TEST_CASE("sample_eval_candidates: deterministic under a fixed seed") {
  const auto triples = synthetic_triples_for_sampling();
  Rng r1(123), r2(123);
  const auto a = sample_eval_candidates(triples, 100, r1);
  const auto b = sample_eval_candidates(triples, 100, r2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].question == b[i].question);
    CHECK(a[i].document == b[i].document);
    CHECK(a[i].changed_answer == b[i].changed_answer);
  }
}

TEST_CASE("sample_eval_candidates: examples without a distinct answer are skipped") {
  std::vector<Triple> triples;
  for (int i = 0; i < 4; ++i) {
    triples.push_back({"occupation", {"doc", std::to_string(i)}, {"same"}});
  }
  Rng rng(3);
  const auto examples = sample_eval_candidates(triples, 4, rng);
  CHECK(examples.empty());
}

TEST_CASE("triple files round trip through json lines") {
  const std::string path = "test_triples.jsonl";
  std::vector<Triple> triples{{"occupation", {"a", "b"}, {"c"}},
                              {"nationality", {"d"}, {"e", "f"}}};
  write_triples(path, triples);
  const auto back = read_triples(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].question == "occupation");
  CHECK(back[0].document == triples[0].document);
  CHECK(back[1].answer == triples[1].answer);
  std::remove(path.c_str());
}

TEST_CASE("edit example files round trip, empty gold marked null") {
  const std::string path = "test_examples.jsonl";
  std::vector<EditExample> examples{{"occupation", {"a"}, {"b"}, {"c"}, {}},
                                    {"origin", {"x"}, {"y"}, {"z"}, {"w", "v"}}};
  write_edit_examples(path, examples);
  const auto back = read_edit_examples(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].gold_document.empty());
  CHECK(back[1].gold_document == std::vector<std::string>{"w", "v"});
  std::remove(path.c_str());
}

TEST_CASE("missing files raise data errors") {
  CHECK_THROWS_AS(read_triples("does_not_exist.jsonl"), DataError);
  CHECK_THROWS_AS(load_records("does_not_exist.txt"), DataError);
}
