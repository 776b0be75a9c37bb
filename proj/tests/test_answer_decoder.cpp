// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "smg/answer_decoder.hpp"
#include "model_fixture.hpp"
#include "test_util.hpp"

using namespace smg;
using test::fd_max_rel_error;
using test::rand_mat;

TEST_CASE("pool_selected: single pick, averaging, zero-mask fallback") {
  Graph g;
  Rng rng(3);
  Mat v1 = rand_mat(rng, 4, 1), v2 = rand_mat(rng, 4, 1);
  std::vector<Expr> embs{input(g, v1), input(g, v2)};

  std::vector<Expr> m10{input(g, 1.0), input(g, 0.0)};
  CHECK((pool_selected(embs, m10).value() - v1).norm() == doctest::Approx(0.0));

  std::vector<Expr> m11{input(g, 1.0), input(g, 1.0)};
  CHECK((pool_selected(embs, m11).value() - 0.5 * (v1 + v2)).norm() == doctest::Approx(0.0));

  std::vector<Expr> m00{input(g, 0.0), input(g, 0.0)};
  CHECK(pool_selected(embs, m00).value().isZero(0.0));
}

TEST_CASE("answer_loss: uniform decoder scores L * ln V") {
  auto model = test::tiny_model();
  // zero every parameter the answer decoder touches: logits become uniform
  for (const char* name : {"ansdec.lstm.W", "ansdec.lstm.b", "ansdec.out.W",
                           "ansdec.out.b", "ansdec.init_h.W", "ansdec.init_h.b",
                           "ansdec.init_c.W", "ansdec.init_c.b"}) {
    model.store().get(name).value.setZero();
  }
  Graph g;
  Expr condition = input(g, Mat::Zero(6, 1));
  const auto answer = test::ids_of(model, {"virology", "chemist", "blue"});
  const double loss = answer_loss(g, model, answer, condition).scalar();
  const double v = model.vocab().size();
  CHECK(loss == doctest::Approx(3.0 * std::log(v)).epsilon(1e-12));
}

TEST_CASE("answer_loss: nearly saturated probabilities drive the loss to zero") {
  auto model = test::tiny_model();
  // one-token vocabulary trick: crank the output bias for the gold token
  const int gold = model.vocab().id("virology");
  Param& bias = model.store().get("ansdec.out.b");
  bias.value.setConstant(-100.0);
  bias.value(gold, 0) = 100.0;
  Graph g;
  Expr condition = input(g, Mat::Zero(6, 1));
  const std::vector<int> answer{gold, gold};
  const double loss = answer_loss(g, model, answer, condition).scalar();
  CHECK(loss >= 0.0);
  CHECK(loss < 1e-8);
}

TEST_CASE("answer_loss: matches an independent per-step probability walk") {
  auto model = test::tiny_model(21);
  Rng rng(8);
  Graph g;
  Expr condition = input(g, rand_mat(rng, 6, 1));
  const auto answer = test::ids_of(model, {"cat", "mat", "dog"});
  const double loss = answer_loss(g, model, answer, condition).scalar();

  // independent walk with explicit matrix arithmetic
  ParamStore& s = model.store();
  const Mat w = s.get("ansdec.lstm.W").value;
  const Mat b = s.get("ansdec.lstm.b").value;
  auto sig = [](const Mat& m) { return (1.0 / (1.0 + (-m.array()).exp())).matrix(); };
  Mat h = s.get("ansdec.init_h.W").value * condition.value() + s.get("ansdec.init_h.b").value;
  Mat c = s.get("ansdec.init_c.W").value * condition.value() + s.get("ansdec.init_c.b").value;
  const Mat& emb = s.get("embed.tokens").value;
  int prev = Vocabulary::kEos;
  double walk = 0.0;
  for (int gold : answer) {
    Mat x(emb.rows() + h.rows(), 1);
    x << emb.col(prev), h;
    const Mat z = w * x + b;
    const int hd = 5;
    const Mat i = sig(z.block(0, 0, hd, 1));
    const Mat f = sig(z.block(hd, 0, hd, 1));
    const Mat cand = z.block(2 * hd, 0, hd, 1).array().tanh().matrix();
    const Mat o = sig(z.block(3 * hd, 0, hd, 1));
    c = f.cwiseProduct(c) + i.cwiseProduct(cand);
    h = o.cwiseProduct(c.array().tanh().matrix());
    const Mat logits = s.get("ansdec.out.W").value * h + s.get("ansdec.out.b").value;
    const Mat probs = ((logits.array() - logits.maxCoeff()).exp() /
                       (logits.array() - logits.maxCoeff()).exp().sum())
                          .matrix();
    walk += -std::log(probs(gold, 0));
    prev = gold;
  }
  CHECK(loss == doctest::Approx(walk).epsilon(1e-10));
}

TEST_CASE("answer_loss is non-negative on random models") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto model = test::tiny_model(1000 + trial);
    Graph g;
    Expr condition = input(g, rand_mat(rng, 6, 1));
    const std::vector<int> answer{4 + static_cast<int>(rng.below(12))};
    CHECK(answer_loss(g, model, answer, condition).scalar() >= 0.0);
  }
}

TEST_CASE("answer_loss rejects an empty answer") {
  auto model = test::tiny_model();
  Graph g;
  Expr condition = input(g, Mat::Zero(6, 1));
  std::vector<int> empty;
  CHECK_THROWS_AS(answer_loss(g, model, empty, condition), std::invalid_argument);
}

TEST_CASE("answer_loss gradients pass finite differences") {
  // gradients w.r.t. the condition and every decoder parameter
  auto model = test::tiny_model(31);
  ParamStore probe_store;
  probe_store.create("condition", 6, 1);
  Rng rng(17);
  const auto answer = test::ids_of(model, {"blue", "red"});

  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    test::randomize(probe_store.get("condition"), rng);
    worst = std::max(worst, fd_max_rel_error(probe_store, [&](Graph& g) {
      return answer_loss(g, model, answer, parameter(g, probe_store.get("condition")));
    }));
  }
  CHECK(worst <= 1e-4);

  // decoder parameters, loss built from a fixed condition
  const Mat condition = rand_mat(rng, 6, 1);
  const double worst_params = fd_max_rel_error(model.store(), [&](Graph& g) {
    return answer_loss(g, model, answer, input(g, condition));
  });
  CHECK(worst_params <= 1e-4);
}

TEST_CASE("generate_answer: bounded length and determinism") {
  auto model = test::tiny_model(7);
  Graph g;
  Rng rng(2);
  const Mat cv = rand_mat(rng, 6, 1);
  const auto a = generate_answer(g, model, input(g, cv), 4);
  CHECK(a.size() <= 4);
  Graph g2;
  const auto b = generate_answer(g2, model, input(g2, cv), 4);
  CHECK(a == b);
  for (int tok : a) CHECK(tok != Vocabulary::kEos);
}
