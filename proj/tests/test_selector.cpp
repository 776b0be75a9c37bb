// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smg/selector.hpp"
#include "smg/trainer.hpp"
#include "model_fixture.hpp"
#include "test_util.hpp"

using namespace smg;

TEST_CASE("select_mask: length and binary-valued entries") {
  auto model = test::tiny_model();
  const auto doc = test::ids_of(model, {"the", "cat", "sat", "on", "mat"});
  Graph g;
  Rng rng(4);
  auto mask = select_mask(g, model, doc, 0, 1.0, rng);
  REQUIRE(mask.values.size() == doc.size());
  REQUIRE(mask.hard.size() == doc.size());
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    const double v = mask.values[i].scalar();
    CHECK((v == 0.0 || v == 1.0));
    CHECK(mask.hard[i] == static_cast<int>(v));
  }
}

TEST_CASE("select_mask: identical seeds give identical masks") {
  auto model = test::tiny_model();
  const auto doc = test::ids_of(model, {"the", "dog", "ran", "on", "the", "mat"});
  std::vector<int> first, second;
  for (int run = 0; run < 2; ++run) {
    Graph g;
    Rng rng(321);
    auto mask = select_mask(g, model, doc, 1, 1.0, rng);
    (run == 0 ? first : second) = mask.hard;
  }
  CHECK(first == second);
}

TEST_CASE("select_mask: empty documents and unknown questions are rejected") {
  auto model = test::tiny_model();
  Graph g;
  Rng rng(1);
  std::vector<int> empty;
  CHECK_THROWS_AS(select_mask(g, model, empty, 0, 1.0, rng), std::invalid_argument);
  const auto doc = test::ids_of(model, {"the", "cat"});
  CHECK_THROWS_AS(select_mask(g, model, doc, 7, 1.0, rng), DataError);
}

TEST_CASE("select_mask_argmax is deterministic for a fixed store") {
  auto model = test::tiny_model();
  const auto doc = test::ids_of(model, {"a", "dog", "sat"});
  Graph g1, g2;
  CHECK(select_mask_argmax(g1, model, doc, 0) == select_mask_argmax(g2, model, doc, 0));
}

TEST_CASE("complement: involution and edge masks") {
  const std::vector<int> m{0, 1, 1, 0};
  CHECK(complement(m) == std::vector<int>{1, 0, 0, 1});
  CHECK(complement(complement(m)) == m);
  CHECK(complement(std::vector<int>{0, 0, 0}) == std::vector<int>{1, 1, 1});
}

TEST_CASE("make_template: masked positions become the blank symbol") {
  const std::vector<std::string> doc{"a", "b", "c"};
  CHECK(make_template(doc, std::vector<int>{0, 1, 0}) ==
        std::vector<std::string>{"a", "[M]", "c"});
  CHECK(make_template(doc, std::vector<int>{0, 0, 0}) == doc);
  CHECK(make_template(doc, std::vector<int>{1, 1, 1}) ==
        std::vector<std::string>{"[M]", "[M]", "[M]"});
  CHECK_THROWS_AS(make_template(doc, std::vector<int>{0, 1}), std::invalid_argument);
}

TEST_CASE("template/mask consistency round trip") {
  auto model = test::tiny_model();
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> doc, mask;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) {
      doc.push_back(4 + static_cast<int>(rng.below(12)));
      mask.push_back(rng.bernoulli(0.4) ? 1 : 0);
    }
    const auto tmpl = make_template_ids(doc, mask);
    CHECK(mask_from_template(tmpl) == mask);
  }
}

TEST_CASE("random_mask: degenerate probabilities and concentration") {
  Rng rng(77);
  CHECK(random_mask(10, 0.0, rng) == std::vector<int>(10, 0));
  CHECK(random_mask(10, 1.0, rng) == std::vector<int>(10, 1));
  const auto m = random_mask(10000, 0.1, rng);
  long ones = 0;
  for (int v : m) ones += v;
  CHECK(ones >= 900);
  CHECK(ones <= 1100);
  CHECK_THROWS_AS(random_mask(5, 1.5, rng), std::invalid_argument);
}

TEST_CASE("gradients reach the selector through the straight-through mask") {
  auto model = test::tiny_model(9);
  const auto doc = test::ids_of(model, {"the", "cat", "sat", "on", "mat"});
  EncodedTriple triple;
  triple.question = 0;
  triple.document = doc;
  triple.answer = test::ids_of(model, {"virology"});

  Graph g;
  Rng rng(12);
  TrainingLosses losses = build_training_losses(g, model, triple, rng);
  g.backward(losses.total);
  double selector_grad = 0.0;
  for (const char* name : {"sel.fwd.W", "sel.bwd.W", "sel.head.W", "embed.questions"}) {
    selector_grad += model.store().get(name).grad.norm();
  }
  CHECK(selector_grad > 0.0);
  model.store().zero_grads();
}
