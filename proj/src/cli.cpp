// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/cli.hpp"

#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "smg/kn_lm.hpp"
#include "smg/log.hpp"
#include "smg/metrics.hpp"
#include "smg/partial_generator.hpp"
#include "smg/trainer.hpp"

namespace smg {

namespace {

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}

}  // namespace

int cmd_build_data(const BuildDataArgs& args) {
  return guarded([&] {
    ParseStats stats;
    const auto records = load_records(args.records, &stats);
    const std::vector<std::string> whitelist =
        args.whitelist.empty() ? default_question_whitelist()
                               : read_whitelist(args.whitelist);

    // field frequencies are counted over the whole input; the train/dev
    // split happens afterwards at record granularity
    Rng rng(args.seed);
    std::vector<InfoboxRecord> train_records, dev_records;
    for (const auto& rec : records) {
      (rng.bernoulli(args.dev_fraction) ? dev_records : train_records).push_back(rec);
    }
    std::unordered_map<std::string, long> freq;
    for (const auto& rec : records) {
      for (const auto& [field, content] : rec.pairs) ++freq[field];
    }
    auto filter = [&](std::span<const InfoboxRecord> subset) {
      std::vector<Triple> out;
      for (const auto& rec : subset) {
        for (const auto& [field, content] : rec.pairs) {
          const bool listed =
              std::find(whitelist.begin(), whitelist.end(), field) != whitelist.end();
          if (!listed || freq[field] < args.min_field_count || content.empty()) continue;
          out.push_back(Triple{field, rec.text, content});
        }
      }
      return out;
    };
    const auto train = filter(train_records);
    const auto dev = filter(dev_records);
    write_triples(args.out_train, train);
    write_triples(args.out_dev, dev);
    const auto questions = question_inventory(train);
    std::printf("records=%ld skipped=%ld train=%zu dev=%zu questions=%zu\n",
                stats.parsed, stats.skipped, train.size(), dev.size(), questions.size());
    return kExitOk;
  });
}

int cmd_sample_test(const SampleTestArgs& args) {
  return guarded([&] {
    const auto triples = read_triples(args.triples);
    Rng rng(args.seed);
    const auto examples = sample_eval_candidates(triples, args.size, rng);
    write_edit_examples(args.out, examples);
    std::printf("examples=%zu\n", examples.size());
    return kExitOk;
  });
}

int cmd_train(const TrainArgs& args) {
  return guarded([&] {
    RunConfig cfg = args.config.empty() ? RunConfig{} : load_config(args.config);
    apply_overrides(cfg, args.overrides);
    if (args.seed) cfg.seed = *args.seed;
    if (args.mode) cfg.mode = *args.mode;
    if (args.eoa_rule) cfg.eoa_rule = *args.eoa_rule;
    cfg.validate();

    const auto triples = read_triples(args.triples);
    if (triples.empty()) throw DataError("no triples in " + args.triples);
    Vocabulary vocab = build_vocab(triples, cfg.vocab_min_count);
    const auto questions = question_inventory(triples);

    Rng init_rng(cfg.seed);
    SmgModel model(cfg, std::move(vocab), questions, init_rng);
    const std::string log_path = args.log.empty() ? args.out + ".log" : args.log;
    const TrainSummary summary = train_model(model, triples, args.out, log_path);
    std::printf("steps=%ld answer=%.6f recon=%.6f eoa=%.6f total=%.6f\n", summary.steps,
                summary.last.answer, summary.last.recon, summary.last.eoa,
                summary.last.total);
    return kExitOk;
  });
}

namespace {

std::vector<std::string> read_document_tokens(const std::string& path) {
  std::vector<std::string> all;
  for (auto& line : read_token_lines(path)) {
    all.insert(all.end(), line.begin(), line.end());
  }
  if (all.empty()) throw DataError("document file " + path + " is empty");
  return all;
}

}  // namespace

int cmd_edit(const EditArgs& args) {
  return guarded([&] {
    SmgModel model = SmgModel::load(args.model);
    const auto qid = model.question_id(args.question);
    if (!qid) {
      std::string valid;
      for (const auto& q : model.questions()) {
        if (!valid.empty()) valid += ", ";
        valid += q;
      }
      throw DataError("unknown question '" + args.question + "'; valid questions: " + valid);
    }
    const auto doc_tokens = read_document_tokens(args.document);
    const auto doc = model.encode_tokens(doc_tokens);
    const auto answer_tokens = tokenize(args.new_answer);
    if (answer_tokens.empty()) throw DataError("--new-answer is empty");
    const auto new_answer = model.encode_tokens(answer_tokens);

    DecodeOptions opts;
    opts.l_max = args.l_max.value_or(model.config().l_max);
    opts.allow_empty_fill = args.allow_empty_fill.value_or(model.config().allow_empty_fill);

    std::vector<int> mask;
    std::vector<int> template_ids;
    if (args.template_source == "gold") {
      if (args.template_path.empty()) {
        throw DataError("--template-source gold requires --template <path>");
      }
      const auto template_tokens = read_document_tokens(args.template_path);
      template_ids = model.encode_tokens(template_tokens);
      mask = mask_from_template(template_ids);
    } else if (args.template_source == "predicted") {
      Graph g;
      mask = select_mask_argmax(g, model, doc, *qid);
      template_ids = make_template_ids(doc, mask);
    } else {
      throw DataError("--template-source must be 'predicted' or 'gold'");
    }

    if (args.show_mask) {
      std::string mask_line, template_line;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (i) {
          mask_line += ' ';
          template_line += ' ';
        }
        mask_line += std::to_string(mask[i]);
        template_line += model.vocab().token(template_ids[i]);
      }
      std::printf("mask\t%s\n", mask_line.c_str());
      std::printf("template\t%s\n", template_line.c_str());
    }

    std::vector<int> output;
    if (model.config().mode == "seq2seq") {
      output = seq2seq_full_decode(model, template_ids, new_answer,
                                   static_cast<int>(doc.size()) + opts.l_max * 4);
    } else {
      DecodeResult result = smg_partial_decode(model, template_ids, new_answer, opts);
      if (result.truncated) log_warn("decode hit the step limit; output truncated");
      output = std::move(result.tokens);
    }
    std::printf("%s\n", join_tokens(model.vocab().decode(output)).c_str());
    return kExitOk;
  });
}

int cmd_evaluate(const EvaluateArgs& args) {
  return guarded([&] {
    EvaluationInputs in;
    in.predictions = read_token_lines(args.pred);
    in.golds = read_token_lines(args.gold);
    in.originals = read_token_lines(args.orig);
    in.alpha = args.alpha;
    if (args.smoothing == "none") {
      in.smoothing = BleuSmoothing::None;
    } else if (args.smoothing == "addone") {
      in.smoothing = BleuSmoothing::AddOne;
    } else {
      throw DataError("--smoothing must be 'addone' or 'none'");
    }
    if (args.pred_answers.empty() != args.gold_answers.empty()) {
      throw DataError("--pred-answers and --gold-answers must be given together");
    }
    if (!args.pred_template.empty()) in.pred_templates = read_token_lines(args.pred_template);
    if (!args.pred_answers.empty()) {
      in.pred_answers = read_token_lines(args.pred_answers);
      in.gold_answers = read_token_lines(args.gold_answers);
    }
    std::optional<KnLanguageModel> lm;
    if (!args.lm.empty()) {
      lm = KnLanguageModel::load(args.lm);
      in.lm = &*lm;
    }
    const MetricReport report = evaluate_corpus(in);
    if (!args.report.empty()) write_report(args.report, report);
    std::fputs(format_report(report).c_str(), stdout);
    return kExitOk;
  });
}

int cmd_lm_train(const LmTrainArgs& args) {
  return guarded([&] {
    const auto sentences = read_token_lines(args.corpus);
    const KnLanguageModel lm = KnLanguageModel::train(sentences, args.order);
    lm.save(args.out);
    std::printf("order=%d vocab=%zu discount=%.6f\n", lm.order(),
                lm.prediction_vocab().size(), lm.discount());
    return kExitOk;
  });
}

int cmd_lm_ppl(const LmPplArgs& args) {
  return guarded([&] {
    const KnLanguageModel lm = KnLanguageModel::load(args.model);
    const auto lines = read_token_lines(args.text);
    std::printf("perplexity\t%.6f\n", lm.perplexity(lines));
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"select-mask-generate text editing"};
  app.require_subcommand(1);

  BuildDataArgs bd;
  auto* build_data = app.add_subcommand("build-data", "build training/dev triples");
  build_data->add_option("--records", bd.records, "records file")->required();
  build_data->add_option("--out-train", bd.out_train)->required();
  build_data->add_option("--out-dev", bd.out_dev)->required();
  build_data->add_option("--min-field-count", bd.min_field_count);
  build_data->add_option("--whitelist", bd.whitelist, "field list file");
  build_data->add_option("--dev-fraction", bd.dev_fraction);
  build_data->add_option("--seed", bd.seed);

  SampleTestArgs st;
  auto* sample_test = app.add_subcommand("sample-test", "sample edit candidates");
  sample_test->add_option("--triples", st.triples)->required();
  sample_test->add_option("--size", st.size);
  sample_test->add_option("--seed", st.seed);
  sample_test->add_option("--out", st.out)->required();

  TrainArgs tr;
  std::uint64_t tr_seed = 0;
  std::string tr_mode, tr_eoa;
  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--triples", tr.triples)->required();
  train->add_option("--config", tr.config, "key=value config file");
  train->add_option("--out", tr.out, "checkpoint path")->required();
  train->add_option("--log", tr.log, "training log (default <out>.log)");
  auto* seed_opt = train->add_option("--seed", tr_seed);
  auto* mode_opt = train->add_option("--mode", tr_mode)->check(CLI::IsMember({"smg", "seq2seq"}));
  auto* eoa_opt =
      train->add_option("--eoa-rule", tr_eoa)->check(CLI::IsMember({"corrected", "printed"}));
  train->add_option("--set", tr.overrides, "config override key=value")->take_all();

  EditArgs ed;
  bool ed_no_empty_fill = false, ed_empty_fill = false;
  int ed_lmax = 0;
  auto* edit = app.add_subcommand("edit", "edit a document");
  edit->add_option("--model", ed.model)->required();
  edit->add_option("--document", ed.document)->required();
  edit->add_option("--question", ed.question)->required();
  edit->add_option("--new-answer", ed.new_answer)->required();
  edit->add_option("--template-source", ed.template_source)
      ->check(CLI::IsMember({"predicted", "gold"}));
  edit->add_option("--template", ed.template_path, "gold template file");
  auto* lmax_opt = edit->add_option("--l-max", ed_lmax);
  edit->add_flag("--show-mask", ed.show_mask);
  edit->add_flag("--allow-empty-fill", ed_empty_fill);
  edit->add_flag("--no-empty-fill", ed_no_empty_fill);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score predictions");
  evaluate->add_option("--pred", ev.pred)->required();
  evaluate->add_option("--gold", ev.gold)->required();
  evaluate->add_option("--orig", ev.orig)->required();
  evaluate->add_option("--alpha", ev.alpha);
  evaluate->add_option("--report", ev.report);
  evaluate->add_option("--lm", ev.lm, "language model for perplexity");
  evaluate->add_option("--pred-template", ev.pred_template);
  evaluate->add_option("--pred-answers", ev.pred_answers);
  evaluate->add_option("--gold-answers", ev.gold_answers);
  evaluate->add_option("--smoothing", ev.smoothing)->check(CLI::IsMember({"addone", "none"}));

  auto* lm_cmd = app.add_subcommand("lm", "language model utilities");
  lm_cmd->require_subcommand(1);
  LmTrainArgs lt;
  auto* lm_train = lm_cmd->add_subcommand("train", "train a language model");
  lm_train->add_option("--corpus", lt.corpus)->required();
  lm_train->add_option("--order", lt.order);
  lm_train->add_option("--out", lt.out)->required();
  LmPplArgs lp;
  auto* lm_ppl = lm_cmd->add_subcommand("ppl", "perplexity of a text");
  lm_ppl->add_option("--model", lp.model)->required();
  lm_ppl->add_option("--text", lp.text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*build_data) return cmd_build_data(bd);
  if (*sample_test) return cmd_sample_test(st);
  if (*train) {
    if (*seed_opt) tr.seed = tr_seed;
    if (*mode_opt) tr.mode = tr_mode;
    if (*eoa_opt) tr.eoa_rule = tr_eoa;
    return cmd_train(tr);
  }
  if (*edit) {
    if (*lmax_opt) ed.l_max = ed_lmax;
    if (ed_empty_fill) ed.allow_empty_fill = true;
    if (ed_no_empty_fill) ed.allow_empty_fill = false;
    return cmd_edit(ed);
  }
  if (*evaluate) return cmd_evaluate(ev);
  if (*lm_train) return cmd_lm_train(lt);
  if (*lm_ppl) return cmd_lm_ppl(lp);
  return kExitUsage;
}

}  // namespace smg
