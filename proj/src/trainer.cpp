// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/trainer.hpp"

#include <cstdio>
#include <fstream>

#include "smg/log.hpp"

namespace smg {

TrainingLosses build_training_losses(Graph& g, SmgModel& model,
                                     const EncodedTriple& triple, Rng& rng,
                                     const LossOptions& opts) {
  const RunConfig& cfg = model.config();
  TrainingLosses out;

  if (opts.fixed_mask) {
    if (opts.fixed_mask->size() != triple.document.size()) {
      throw std::invalid_argument("fixed mask length does not match document");
    }
    for (int m : *opts.fixed_mask) {
      out.mask.values.push_back(input(g, static_cast<double>(m)));
      out.mask.hard.push_back(m);
    }
  } else {
    out.mask = select_mask(g, model, triple.document, triple.question,
                           cfg.gumbel_temperature, rng, opts.mask_mode);
  }

  auto embeddings = model.embed_tokens(g, triple.document);
  Expr condition = pool_selected(embeddings, out.mask.values);
  std::vector<int> answer_with_eos = triple.answer;
  answer_with_eos.push_back(Vocabulary::kEos);
  out.answer = answer_loss(g, model, answer_with_eos, condition);

  std::vector<Expr> complement_exprs;
  complement_exprs.reserve(out.mask.values.size());
  for (const Expr& m : out.mask.values) complement_exprs.push_back(one_minus(m));
  ContextEncoding enc = encode_context(g, model, triple.document, complement_exprs);
  Expr v_answer = answer_condition_vector(g, model, triple.answer);

  // Loss gating: the straight-through sample acts as a constant weight in
  // the reconstruction and end-of-answer sums. Differentiating through the
  // lambda-weighted gates pushes every selected position down uniformly and
  // collapses the selector to the empty mask; selector gradients instead
  // flow through the answer pooling and the encoder masking. The relaxed
  // mode stays fully differentiable for gradient checks.
  std::vector<Expr> gate = out.mask.values;
  if (opts.mask_mode == MaskMode::StraightThrough || opts.mask_mode == MaskMode::Argmax) {
    gate.clear();
    for (int m : out.mask.hard) gate.push_back(input(g, static_cast<double>(m)));
  }

  if (cfg.mode == "seq2seq") {
    std::vector<int> doc_with_eos = triple.document;
    doc_with_eos.push_back(Vocabulary::kEos);
    out.recon = full_generation_loss(g, model, doc_with_eos, enc, v_answer, triple.answer);
    out.eoa = input(g, 0.0);
  } else {
    std::vector<DecoderStep> steps;
    out.recon = reconstruction_loss(g, model, triple.document, gate, enc,
                                    v_answer, triple.answer, &steps);
    const std::vector<int> targets =
        opts.fixed_eoa_targets
            ? *opts.fixed_eoa_targets
            : eoa_targets(out.mask.hard, cfg.eoa_rule == "printed" ? EoaRule::Printed
                                                                   : EoaRule::Corrected);
    std::vector<Expr> eoa_dists;
    eoa_dists.reserve(steps.size());
    for (const DecoderStep& s : steps) eoa_dists.push_back(s.eoa_dist);
    out.eoa = eoa_loss(g, targets, eoa_dists, gate);
    if (opts.steps_out) *opts.steps_out = std::move(steps);
  }

  out.total = total_loss(out.answer, out.recon, out.eoa, cfg.lambda_recon, cfg.lambda_eoa);
  if (cfg.selection_penalty > 0.0) {
    out.total = add(out.total, scale(sum(out.mask.values), cfg.selection_penalty));
  }
  return out;
}

OptimConfig optim_from_config(const RunConfig& cfg) {
  OptimConfig opt;
  opt.kind = cfg.optimizer == "adam" ? OptimConfig::Kind::Adam : OptimConfig::Kind::Sgd;
  opt.learning_rate = cfg.learning_rate;
  opt.grad_clip = cfg.grad_clip;
  return opt;
}

StepLosses train_step(SmgModel& model, const EncodedTriple& triple, Rng& rng,
                      const OptimConfig& opt) {
  Graph g;
  TrainingLosses losses = build_training_losses(g, model, triple, rng);
  StepLosses out;
  out.answer = losses.answer.scalar();
  out.recon = losses.recon.scalar();
  out.eoa = losses.eoa.scalar();
  out.total = backward_and_update(g, losses.total, model.store(), opt);
  return out;
}

TrainSummary train_model(SmgModel& model, std::span<const Triple> triples,
                         const std::string& checkpoint_path,
                         const std::string& log_path) {
  if (triples.empty()) throw DataError("train: no triples");
  const RunConfig& cfg = model.config();
  std::vector<EncodedTriple> encoded;
  encoded.reserve(triples.size());
  for (const Triple& t : triples) encoded.push_back(model.encode(t));

  std::ofstream log;
  if (!log_path.empty()) {
    log.open(log_path, std::ios::app);
    if (!log) throw DataError("cannot open training log " + log_path);
  }

  Rng rng(cfg.seed + 1);
  const OptimConfig opt = optim_from_config(cfg);
  std::vector<std::size_t> order(encoded.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainSummary summary;
  std::size_t pos = order.size();  // trigger a shuffle on the first step
  for (long step = 1; step <= cfg.steps; ++step) {
    // gradients accumulate over the batch, then one optimizer step
    StepLosses losses;
    try {
      for (long b = 0; b < cfg.batch_size; ++b) {
        if (pos >= order.size()) {
          rng.shuffle(order);
          pos = 0;
        }
        const EncodedTriple& triple = encoded[order[pos++]];
        Graph g;
        TrainingLosses built = build_training_losses(g, model, triple, rng);
        const double total = built.total.scalar();
        if (!std::isfinite(total)) {
          auto bad = g.first_nonfinite();
          throw NumericError("non-finite loss; first offending node: " +
                             bad.value_or("<loss itself>"));
        }
        losses.answer += built.answer.scalar();
        losses.recon += built.recon.scalar();
        losses.eoa += built.eoa.scalar();
        losses.total += total;
        g.backward(built.total);
      }
    } catch (const NumericError& e) {
      // the store still holds the last finite parameters; keep them
      model.store().zero_grads();
      model.save(checkpoint_path);
      throw NumericError(std::string(e.what()) + " (at step " + std::to_string(step) +
                         "; last finite checkpoint written)");
    }
    const double scale = 1.0 / static_cast<double>(cfg.batch_size);
    losses.answer *= scale;
    losses.recon *= scale;
    losses.eoa *= scale;
    losses.total *= scale;
    model.store().scale_grads(scale);
    model.store().update(opt);
    summary.last = losses;
    summary.steps = step;
    if (log) {
      char line[160];
      std::snprintf(line, sizeof(line), "%ld\t%.6f\t%.6f\t%.6f\t%.6f\n", step,
                    losses.answer, losses.recon, losses.eoa, losses.total);
      log << line;
    }
  }
  if (log) log.flush();
  model.save(checkpoint_path);
  return summary;
}

}  // namespace smg
