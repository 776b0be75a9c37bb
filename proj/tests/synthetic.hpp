// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#pragma once

#include <string>
#include <vector>

#include "smg/corpus.hpp"
#include "smg/rng.hpp"

namespace smg::test {

// Templated biography generator. Each biography renders one of two sentence
// shapes with four slots (occupation, nationality, instrument, residence);
// slot values are planted verbatim so token positions of every field are
// known exactly. One triple is derived per biography, rotating through the
// four question types.
struct SyntheticBio {
  Triple triple;
  std::vector<int> answer_positions;  // positions of the answer tokens in D
  // slot values, kept so documents can be re-rendered with a swapped answer
  std::string first, last;
  std::vector<std::string> occupation, nationality, instrument, residence;
  int shape = 0;
};

struct SyntheticCorpus {
  std::vector<SyntheticBio> bios;
  std::vector<std::string> questions{"occupation", "nationality", "instrument",
                                     "residence"};
};

namespace detail {

inline const std::vector<std::vector<std::string>>& occupations() {
  static const std::vector<std::vector<std::string>> v = {
      {"violinist"}, {"pianist"}, {"guitarist"}, {"drummer"}, {"composer"},
      {"conductor"}, {"singer"},  {"cellist"},   {"organist"}, {"flutist"}};
  return v;
}

inline const std::vector<std::vector<std::string>>& nationalities() {
  static const std::vector<std::vector<std::string>> v = {
      {"french"}, {"german"},  {"spanish"}, {"italian"}, {"dutch"},
      {"polish"}, {"danish"},  {"swedish"}, {"austrian"}, {"belgian"}};
  return v;
}

inline const std::vector<std::vector<std::string>>& instruments() {
  static const std::vector<std::vector<std::string>> v = {
      {"violin"}, {"piano"}, {"guitar"}, {"drums"}, {"cello"},
      {"organ"},  {"flute"}, {"trumpet"}, {"harp"},  {"oboe"}};
  return v;
}

inline const std::vector<std::vector<std::string>>& residences() {
  static const std::vector<std::vector<std::string>> v = {
      {"paris"},          {"berlin"}, {"madrid"},        {"rome"},
      {"vienna"},         {"oslo"},   {"prague"},        {"new", "york"},
      {"los", "angeles"}, {"san", "francisco"}};
  return v;
}

inline const std::vector<std::string>& first_names() {
  static const std::vector<std::string> v = {
      "anna",  "boris", "clara", "david", "elena", "felix", "greta",
      "henry", "irene", "jonas", "karla", "liam",  "marta", "nils",
      "olga",  "pavel", "quinn", "rosa",  "stefan", "tilda"};
  return v;
}

inline const std::vector<std::string>& last_names() {
  static const std::vector<std::string> v = {
      "abel",   "brandt", "costa",  "dietrich", "eriksen", "fischer", "gruber",
      "hansen", "ivanov", "jensen", "keller",   "larsen",  "meyer",   "novak",
      "orlov",  "paulsen", "quist", "richter",  "sommer",  "torres"};
  return v;
}

}  // namespace detail

// Renders one biography with the given slot values; when `track` names a
// field, the positions of that field's tokens are reported.
inline std::vector<std::string> render_bio(const SyntheticBio& bio,
                                           const std::string& track,
                                           std::vector<int>* positions) {
  std::vector<std::string> doc;
  auto emit = [&](const std::vector<std::string>& toks, const std::string& field) {
    for (const auto& t : toks) {
      if (positions && field == track) positions->push_back(static_cast<int>(doc.size()));
      doc.push_back(t);
    }
  };
  auto word = [&](const std::string& t) { doc.push_back(t); };

  word(bio.first);
  word(bio.last);
  word("is");
  word("a");
  emit(bio.nationality, "nationality");
  emit(bio.occupation, "occupation");
  if (bio.shape == 0) {
    word(".");
    word("they");
    word("play");
    emit(bio.instrument, "instrument");
    word("in");
    emit(bio.residence, "residence");
    word(".");
  } else {
    word("playing");
    emit(bio.instrument, "instrument");
    word("in");
    emit(bio.residence, "residence");
    word(".");
  }
  return doc;
}

inline const std::vector<std::string>& field_value(const SyntheticBio& bio,
                                                   const std::string& field) {
  if (field == "occupation") return bio.occupation;
  if (field == "nationality") return bio.nationality;
  if (field == "instrument") return bio.instrument;
  return bio.residence;
}

inline SyntheticCorpus make_synthetic_corpus(int n, std::uint64_t seed) {
  SyntheticCorpus corpus;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    SyntheticBio bio;
    bio.first = detail::first_names()[rng.below(detail::first_names().size())];
    bio.last = detail::last_names()[rng.below(detail::last_names().size())];
    bio.occupation = detail::occupations()[rng.below(10)];
    bio.nationality = detail::nationalities()[rng.below(10)];
    bio.instrument = detail::instruments()[rng.below(10)];
    bio.residence = detail::residences()[rng.below(10)];
    bio.shape = i % 2;
    const std::string question = corpus.questions[static_cast<std::size_t>(i % 4)];
    bio.triple.question = question;
    bio.triple.answer = field_value(bio, question);
    bio.triple.document = render_bio(bio, question, &bio.answer_positions);
    corpus.bios.push_back(std::move(bio));
  }
  return corpus;
}

// Gold edited document: the biography re-rendered with `new_value` in the
// tracked field's slot.
inline std::vector<std::string> render_with_value(const SyntheticBio& bio,
                                                  const std::string& field,
                                                  const std::vector<std::string>& value) {
  SyntheticBio changed = bio;
  if (field == "occupation") changed.occupation = value;
  if (field == "nationality") changed.nationality = value;
  if (field == "instrument") changed.instrument = value;
  if (field == "residence") changed.residence = value;
  return render_bio(changed, field, nullptr);
}

// Gold template: the document with the answer positions blanked.
inline std::vector<std::string> gold_template(const SyntheticBio& bio) {
  std::vector<std::string> tmpl = bio.triple.document;
  for (int pos : bio.answer_positions) {
    tmpl[static_cast<std::size_t>(pos)] = "[M]";
  }
  return tmpl;
}

// Records file content with every whitelisted field present, for exercising
// the corpus pipeline end to end.
inline std::string records_text_for_fields(const std::vector<std::string>& fields,
                                           int copies) {
  std::string out;
  for (int i = 0; i < copies; ++i) {
    for (const auto& f : fields) {
      out += "FIELD\t" + f + "\tvalue " + std::to_string(i % 7) + "\n";
    }
    out += "TEXT\tperson number " + std::to_string(i) + " wrote value " +
           std::to_string(i % 7) + " things .\n\n";
  }
  return out;
}

}  // namespace smg::test
