// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "smg/metrics.hpp"
#include "smg/rng.hpp"

#include "oracles.hpp"

using namespace smg;

namespace {

using test::bleu_oracle;
using test::lcs_exhaustive;
using test::random_tokens;

}  // namespace

TEST_CASE("bleu: identity scores 100, disjoint scores 0") {
  const Tokens t{"the", "cat", "sat"};
  CHECK(sentence_bleu(t, t) == 100.0);
  const Tokens longer{"a", "b", "c", "d", "e", "f"};
  CHECK(sentence_bleu(longer, longer) == 100.0);
  CHECK(sentence_bleu(Tokens{"x", "y"}, Tokens{"p", "q"}) == 0.0);
  CHECK(sentence_bleu(Tokens{}, t) == 0.0);  // empty candidate convention
}

TEST_CASE("bleu: worked example against the enumeration oracle") {
  const Tokens cand{"the", "cat", "sat", "on", "mat"};
  const Tokens ref{"the", "cat", "sat", "on", "the", "mat"};
  const double got = sentence_bleu(cand, ref);
  const double want = bleu_oracle(cand, ref, BleuSmoothing::AddOne);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
  CHECK(got > 0.0);
  CHECK(got < 100.0);
}

TEST_CASE("bleu: 50 random pairs match the oracle within 1e-9, both smoothings") {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const Tokens cand = random_tokens(rng, 12);
    const Tokens ref = random_tokens(rng, 12);
    for (BleuSmoothing s : {BleuSmoothing::AddOne, BleuSmoothing::None}) {
      const double got = sentence_bleu(cand, ref, s);
      const double want = bleu_oracle(cand, ref, s);
      CHECK(std::abs(got - want) <= 1e-9);
      CHECK(got >= 0.0);
      CHECK(got <= 100.0);
    }
  }
}

TEST_CASE("ibleu: identity case lands exactly on 100 - 90") {
  const Tokens t{"a", "b", "c", "d"};
  CHECK(ibleu(t, t, t, 0.9) == 10.0);
  const Tokens disjoint{"x", "y", "z", "w"};
  CHECK(ibleu(t, t, disjoint, 0.9) == 100.0);
}

TEST_CASE("ibleu: compositional against two bleu calls") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Tokens cand = random_tokens(rng, 10);
    const Tokens gold = random_tokens(rng, 10);
    const Tokens orig = random_tokens(rng, 10);
    const double direct = ibleu(cand, gold, orig, 0.9);
    const double composed =
        sentence_bleu(cand, gold) - 0.9 * sentence_bleu(cand, orig);
    CHECK(direct == doctest::Approx(composed).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ibleu(Tokens{"a"}, Tokens{"a"}, Tokens{"a"}, 1.5),
                  std::invalid_argument);
}

TEST_CASE("lcs: identity, disjoint, classic mid-substitution") {
  const Tokens x{"p", "q", "r"};
  CHECK(lcs(x, x) == x);
  CHECK(lcs(Tokens{"a", "b"}, Tokens{"c", "d"}).empty());
  CHECK(lcs(Tokens{"a", "b", "c", "d"}, Tokens{"a", "b", "e", "d"}) ==
        Tokens{"a", "b", "d"});
}

TEST_CASE("lcs: output is a common subsequence with exhaustive-optimal length") {
  Rng rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    const Tokens a = random_tokens(rng, 10, 4);
    const Tokens b = random_tokens(rng, 10, 4);
    const auto got = lcs(a, b);
    CHECK(got.size() <= a.size());
    CHECK(got.size() <= b.size());
    auto is_subseq = [](const Tokens& s, const Tokens& whole) {
      std::size_t j = 0;
      for (const auto& t : whole) {
        if (j < s.size() && t == s[j]) ++j;
      }
      return j == s.size();
    };
    CHECK(is_subseq(got, a));
    CHECK(is_subseq(got, b));
    CHECK(static_cast<int>(got.size()) == lcs_exhaustive(a, b));
  }
}

TEST_CASE("lcs alignment ties prefer earlier positions in the second input") {
  const auto alignment = lcs_alignment(Tokens{"x"}, Tokens{"x", "x"});
  REQUIRE(alignment.size() == 1);
  CHECK(alignment[0].second == 0);
  const auto swapped = lcs_alignment(Tokens{"p", "q"}, Tokens{"q", "p"});
  REQUIRE(swapped.size() == 1);
  CHECK(swapped[0].second == 0);  // picks "q" at the first b position
}

TEST_CASE("diff_sequence: identity, substitution, boundary insertion") {
  const Tokens d{"a", "b"};
  CHECK(diff_sequence(d, d).empty());
  CHECK(diff_sequence(Tokens{"a", "b", "e", "d"}, Tokens{"a", "b", "c", "d"}) ==
        Tokens{"e"});
  CHECK(diff_sequence(Tokens{"x", "a", "b", "y"}, Tokens{"a", "b"}) ==
        Tokens{"x", kDiffBoundaryToken, "y"});
  // adjacent unmatched tokens form one run without a separator
  CHECK(diff_sequence(Tokens{"x", "y", "a"}, Tokens{"a"}) == Tokens{"x", "y"});
}

TEST_CASE("diff_bleu_ratio: exact one on the gold edit, zero on a disjoint copy") {
  const Tokens orig{"the", "cat", "sat", "on", "the", "mat"};
  const Tokens gold{"the", "dog", "ran", "on", "the", "mat"};
  auto ratio = diff_bleu_ratio(gold, gold, orig);
  REQUIRE(ratio.has_value());
  CHECK(*ratio == 1.0);

  // candidate equal to the original shares nothing with the difference
  auto low = diff_bleu_ratio(orig, gold, orig);
  REQUIRE(low.has_value());
  CHECK(*low < *ratio);

  // identical gold and original leave no difference sequence: undefined
  CHECK(!diff_bleu_ratio(orig, orig, orig).has_value());
}

TEST_CASE("diff_bleu_ratio: compositional against its parts") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const Tokens cand = random_tokens(rng, 10);
    const Tokens gold = random_tokens(rng, 10);
    const Tokens orig = random_tokens(rng, 10);
    const auto got = diff_bleu_ratio(cand, gold, orig);
    const Tokens diff = diff_sequence(gold, orig);
    const double denom = sentence_bleu(gold, diff);
    if (denom <= 0.0) {
      CHECK(!got.has_value());
    } else {
      REQUIRE(got.has_value());
      CHECK(*got == doctest::Approx(sentence_bleu(cand, diff) / denom).epsilon(1e-12));
    }
  }
}

TEST_CASE("bow_f1: identity, disjoint, multiset arithmetic") {
  const Tokens a{"x", "y"};
  CHECK(bow_f1(a, a) == 1.0);
  CHECK(bow_f1(a, Tokens{"p", "q"}) == 0.0);
  CHECK(bow_f1(Tokens{}, Tokens{}) == 1.0);
  CHECK(bow_f1(Tokens{}, a) == 0.0);
  CHECK(bow_f1(a, Tokens{}) == 0.0);
  // intersection {a:1, b:1} of [a,a,b] and [a,b,b]: P=R=2/3
  CHECK(bow_f1(Tokens{"a", "a", "b"}, Tokens{"a", "b", "b"}) ==
        doctest::Approx(2.0 / 3.0));
}

TEST_CASE("bow_f1: symmetric and order-invariant, matches multiset oracle") {
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const Tokens a = random_tokens(rng, 8, 3);
    const Tokens b = random_tokens(rng, 8, 3);
    CHECK(bow_f1(a, b) == doctest::Approx(bow_f1(b, a)));
    Tokens shuffled = a;
    rng.shuffle(shuffled);
    CHECK(bow_f1(shuffled, b) == doctest::Approx(bow_f1(a, b)));

    // independent multiset arithmetic
    std::map<std::string, int> ca, cb;
    for (const auto& t : a) ++ca[t];
    for (const auto& t : b) ++cb[t];
    int inter = 0;
    for (const auto& [t, c] : ca) {
      if (cb.count(t)) inter += std::min(c, cb[t]);
    }
    double want = 0.0;
    if (a.empty() && b.empty()) {
      want = 1.0;
    } else if (inter > 0) {
      const double p = static_cast<double>(inter) / a.size();
      const double r = static_cast<double>(inter) / b.size();
      want = 2 * p * r / (p + r);
    }
    CHECK(bow_f1(a, b) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("template_bleu: perfect selector, all-mask prediction, composition") {
  const Tokens orig{"the", "cat", "sat", "on", "the", "mat"};
  const Tokens gold_doc{"the", "dog", "sat", "on", "the", "mat"};
  const Tokens gold_template = lcs(orig, gold_doc);

  // predicted template masking exactly the changed word
  const Tokens perfect{"the", "[M]", "sat", "on", "the", "mat"};
  CHECK(template_bleu(perfect, gold_template) == 100.0);

  const Tokens all_mask{"[M]", "[M]", "[M]", "[M]", "[M]", "[M]"};
  CHECK(template_bleu(all_mask, gold_template) == 0.0);

  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    Tokens pred;
    for (const auto& t : orig) pred.push_back(rng.bernoulli(0.3) ? "[M]" : t);
    Tokens visible;
    for (const auto& t : pred) {
      if (t != "[M]") visible.push_back(t);
    }
    CHECK(template_bleu(pred, gold_template) ==
          doctest::Approx(sentence_bleu(visible, gold_template)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_corpus: identity predictions and misalignment errors") {
  EvaluationInputs in;
  in.predictions = {{"the", "dog", "sat"}, {"a", "red", "door"}};
  in.golds = in.predictions;
  in.originals = {{"the", "cat", "sat"}, {"a", "blue", "door"}};
  const MetricReport r = evaluate_corpus(in);
  CHECK(r.examples == 2);
  CHECK(r.bleu == 100.0);
  CHECK(r.diff_bleu_ratio == doctest::Approx(1.0));
  CHECK(r.diff_bleu_na == 0);
  CHECK(!r.perplexity.has_value());

  EvaluationInputs bad = in;
  bad.golds.pop_back();
  CHECK_THROWS(evaluate_corpus(bad));
}

TEST_CASE("report formatting is machine-parseable with na markers") {
  MetricReport r;
  r.examples = 3;
  r.bleu = 87.5;
  r.ibleu = 9.25;
  r.diff_bleu_ratio = 0.625;
  const std::string text = format_report(r);
  CHECK(text.find("bleu\t87.500000\n") != std::string::npos);
  CHECK(text.find("perplexity\tna\n") != std::string::npos);
  CHECK(text.find("answer_f1\tna\n") != std::string::npos);
}
