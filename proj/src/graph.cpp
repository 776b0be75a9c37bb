// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/graph.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smg/params.hpp"

namespace smg {

namespace {

std::string shape_of(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

[[noreturn]] void shape_error(const std::string& op, const std::string& detail) {
  throw std::invalid_argument("smg::" + op + ": " + detail);
}

void require(bool ok, const std::string& op, const std::string& detail) {
  if (!ok) shape_error(op, detail);
}

void require_same_shape(const std::string& op, const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    shape_error(op, "shape mismatch " + shape_of(a) + " vs " + shape_of(b));
  }
}

void require_vector(const std::string& op, const Mat& a) {
  if (a.cols() != 1) shape_error(op, "expected a column vector, got " + shape_of(a));
}

Graph* graph_of(std::span<const Expr> xs, const std::string& op) {
  if (xs.empty()) shape_error(op, "empty sequence");
  return xs.front().g;
}

}  // namespace

const Mat& Expr::value() const { return g->node(id).value; }

double Expr::scalar() const {
  const Mat& v = value();
  if (v.size() != 1) shape_error("scalar", "node is " + shape_of(v) + ", not 1x1");
  return v(0, 0);
}

long Expr::rows() const { return value().rows(); }
long Expr::cols() const { return value().cols(); }

Expr Graph::emplace(Mat value, std::string label,
                    std::function<void(Graph&)> backward) {
  Node n;
  n.grad = Mat::Zero(value.rows(), value.cols());
  n.value = std::move(value);
  n.label = std::move(label);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Expr{this, static_cast<int>(nodes_.size()) - 1};
}

void Graph::backward(Expr loss) {
  require(loss.g == this, "backward", "expression belongs to another graph");
  require(!swept_, "backward", "tape already swept; build a fresh graph");
  const Mat& v = node(loss.id).value;
  require(v.size() == 1, "backward", "loss must be scalar, got " + shape_of(v));
  swept_ = true;
  node(loss.id).grad(0, 0) = 1.0;
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    auto& fn = nodes_[static_cast<std::size_t>(i)].backward;
    if (fn) fn(*this);
  }
}

void Graph::clear() {
  nodes_.clear();
  swept_ = false;
}

std::optional<std::string> Graph::first_nonfinite() const {
  for (const auto& n : nodes_) {
    if (!n.value.allFinite()) return n.label;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// leaves

Expr input(Graph& g, Mat value, std::string label) {
  return g.emplace(std::move(value), std::move(label));
}

Expr input(Graph& g, double value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return g.emplace(std::move(m), "input");
}

Expr parameter(Graph& g, Param& p) {
  Param* ptr = &p;
  Expr out = g.emplace(p.value, "param:" + p.name);
  int id = out.id;
  g.node(id).backward = [ptr, id](Graph& gr) { ptr->grad += gr.grad(id); };
  return out;
}

Expr lookup(Graph& g, Param& table, int column) {
  require(column >= 0 && column < table.value.cols(), "lookup",
          "column " + std::to_string(column) + " out of range for " + table.name);
  Param* ptr = &table;
  Expr out = g.emplace(table.value.col(column), "lookup:" + table.name);
  int id = out.id;
  g.node(id).backward = [ptr, id, column](Graph& gr) {
    ptr->grad.col(column) += gr.grad(id).col(0);
  };
  return out;
}

// ---------------------------------------------------------------------------
// elementwise

Expr add(Expr a, Expr b) {
  require_same_shape("add", a.value(), b.value());
  Graph& g = *a.g;
  Expr out = g.emplace(a.value() + b.value(), "add");
  int id = out.id, ia = a.id, ib = b.id;
  g.node(id).backward = [id, ia, ib](Graph& gr) {
    gr.grad(ia) += gr.grad(id);
    gr.grad(ib) += gr.grad(id);
  };
  return out;
}

Expr sub(Expr a, Expr b) {
  require_same_shape("sub", a.value(), b.value());
  Graph& g = *a.g;
  Expr out = g.emplace(a.value() - b.value(), "sub");
  int id = out.id, ia = a.id, ib = b.id;
  g.node(id).backward = [id, ia, ib](Graph& gr) {
    gr.grad(ia) += gr.grad(id);
    gr.grad(ib) -= gr.grad(id);
  };
  return out;
}

Expr cmult(Expr a, Expr b) {
  require_same_shape("cmult", a.value(), b.value());
  Graph& g = *a.g;
  Expr out = g.emplace(a.value().cwiseProduct(b.value()), "cmult");
  int id = out.id, ia = a.id, ib = b.id;
  g.node(id).backward = [id, ia, ib](Graph& gr) {
    gr.grad(ia) += gr.grad(id).cwiseProduct(gr.node(ib).value);
    gr.grad(ib) += gr.grad(id).cwiseProduct(gr.node(ia).value);
  };
  return out;
}

Expr scale(Expr a, double k) {
  Graph& g = *a.g;
  Expr out = g.emplace(a.value() * k, "scale");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia, k](Graph& gr) { gr.grad(ia) += k * gr.grad(id); };
  return out;
}

Expr scale_by(Expr a, Expr scalar) {
  require(scalar.value().size() == 1, "scale_by", "scale factor must be 1x1");
  Graph& g = *a.g;
  Expr out = g.emplace(a.value() * scalar.scalar(), "scale_by");
  int id = out.id, ia = a.id, is = scalar.id;
  g.node(id).backward = [id, ia, is](Graph& gr) {
    const double s = gr.node(is).value(0, 0);
    gr.grad(ia) += s * gr.grad(id);
    gr.grad(is)(0, 0) +=
        gr.grad(id).cwiseProduct(gr.node(ia).value).sum();
  };
  return out;
}

Expr one_minus(Expr a) {
  Graph& g = *a.g;
  Expr out = g.emplace((1.0 - a.value().array()).matrix(), "one_minus");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia](Graph& gr) { gr.grad(ia) -= gr.grad(id); };
  return out;
}

Expr sigmoid(Expr a) {
  Graph& g = *a.g;
  Mat y = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  Expr out = g.emplace(std::move(y), "sigmoid");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia](Graph& gr) {
    const Mat& y = gr.node(id).value;
    gr.grad(ia).array() += gr.grad(id).array() * y.array() * (1.0 - y.array());
  };
  return out;
}

Expr tanh(Expr a) {
  Graph& g = *a.g;
  Expr out = g.emplace(a.value().array().tanh().matrix(), "tanh");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia](Graph& gr) {
    const Mat& y = gr.node(id).value;
    gr.grad(ia).array() += gr.grad(id).array() * (1.0 - y.array().square());
  };
  return out;
}

Expr log(Expr a) {
  Graph& g = *a.g;
  Expr out = g.emplace(a.value().array().log().matrix(), "log");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia](Graph& gr) {
    gr.grad(ia).array() += gr.grad(id).array() / gr.node(ia).value.array();
  };
  return out;
}

// ---------------------------------------------------------------------------
// linear algebra

Expr matmul(Expr w, Expr x) {
  require(w.value().cols() == x.value().rows(), "matmul",
          "inner dimensions " + shape_of(w.value()) + " * " + shape_of(x.value()));
  Graph& g = *w.g;
  Expr out = g.emplace(w.value() * x.value(), "matmul");
  int id = out.id, iw = w.id, ix = x.id;
  g.node(id).backward = [id, iw, ix](Graph& gr) {
    gr.grad(iw) += gr.grad(id) * gr.node(ix).value.transpose();
    gr.grad(ix) += gr.node(iw).value.transpose() * gr.grad(id);
  };
  return out;
}

Expr matmul_transposed(Expr w, Expr x) {
  require(w.value().rows() == x.value().rows(), "matmul_transposed",
          "dimensions " + shape_of(w.value()) + "^T * " + shape_of(x.value()));
  Graph& g = *w.g;
  Expr out = g.emplace(w.value().transpose() * x.value(), "matmul_transposed");
  int id = out.id, iw = w.id, ix = x.id;
  g.node(id).backward = [id, iw, ix](Graph& gr) {
    gr.grad(iw) += gr.node(ix).value * gr.grad(id).transpose();
    gr.grad(ix) += gr.node(iw).value * gr.grad(id);
  };
  return out;
}

Expr affine(Expr w, Expr x, Expr b) {
  require(w.value().cols() == x.value().rows(), "affine",
          "inner dimensions " + shape_of(w.value()) + " * " + shape_of(x.value()));
  require(w.value().rows() == b.value().rows() && b.value().cols() == 1, "affine",
          "bias shape " + shape_of(b.value()) + " does not match output rows " +
              std::to_string(w.value().rows()));
  Graph& g = *w.g;
  Expr out = g.emplace(w.value() * x.value() + b.value(), "affine");
  int id = out.id, iw = w.id, ix = x.id, ib = b.id;
  g.node(id).backward = [id, iw, ix, ib](Graph& gr) {
    gr.grad(iw) += gr.grad(id) * gr.node(ix).value.transpose();
    gr.grad(ix) += gr.node(iw).value.transpose() * gr.grad(id);
    gr.grad(ib) += gr.grad(id);
  };
  return out;
}

Expr dot(Expr a, Expr b) {
  require_same_shape("dot", a.value(), b.value());
  require_vector("dot", a.value());
  Graph& g = *a.g;
  Mat m(1, 1);
  m(0, 0) = a.value().col(0).dot(b.value().col(0));
  Expr out = g.emplace(std::move(m), "dot");
  int id = out.id, ia = a.id, ib = b.id;
  g.node(id).backward = [id, ia, ib](Graph& gr) {
    const double s = gr.grad(id)(0, 0);
    gr.grad(ia) += s * gr.node(ib).value;
    gr.grad(ib) += s * gr.node(ia).value;
  };
  return out;
}

// ---------------------------------------------------------------------------
// structure

Expr concat(std::span<const Expr> parts) {
  Graph& g = *graph_of(parts, "concat");
  long rows = 0;
  for (const Expr& e : parts) {
    require_vector("concat", e.value());
    rows += e.rows();
  }
  Mat v(rows, 1);
  long off = 0;
  std::vector<int> ids;
  std::vector<long> offsets, lens;
  ids.reserve(parts.size());
  for (const Expr& e : parts) {
    v.block(off, 0, e.rows(), 1) = e.value();
    ids.push_back(e.id);
    offsets.push_back(off);
    lens.push_back(e.rows());
    off += e.rows();
  }
  Expr out = g.emplace(std::move(v), "concat");
  int id = out.id;
  g.node(id).backward = [id, ids, offsets, lens](Graph& gr) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      gr.grad(ids[k]) += gr.grad(id).block(offsets[k], 0, lens[k], 1);
    }
  };
  return out;
}

Expr concat(Expr a, Expr b) {
  const Expr parts[] = {a, b};
  return concat(std::span<const Expr>(parts, 2));
}

Expr slice_rows(Expr a, int begin, int len) {
  require_vector("slice_rows", a.value());
  require(begin >= 0 && len >= 0 && begin + len <= a.rows(), "slice_rows",
          "range [" + std::to_string(begin) + ", " + std::to_string(begin + len) +
              ") out of " + std::to_string(a.rows()) + " rows");
  Graph& g = *a.g;
  Expr out = g.emplace(a.value().block(begin, 0, len, 1), "slice_rows");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia, begin, len](Graph& gr) {
    gr.grad(ia).block(begin, 0, len, 1) += gr.grad(id);
  };
  return out;
}

Expr pick(Expr a, int index) {
  require_vector("pick", a.value());
  require(index >= 0 && index < a.rows(), "pick",
          "index " + std::to_string(index) + " out of " + std::to_string(a.rows()));
  Graph& g = *a.g;
  Mat m(1, 1);
  m(0, 0) = a.value()(index, 0);
  Expr out = g.emplace(std::move(m), "pick");
  int id = out.id, ia = a.id;
  g.node(id).backward = [id, ia, index](Graph& gr) {
    gr.grad(ia)(index, 0) += gr.grad(id)(0, 0);
  };
  return out;
}

Expr sum(std::span<const Expr> xs) {
  Graph& g = *graph_of(xs, "sum");
  Mat v = xs.front().value();
  std::vector<int> ids{xs.front().id};
  for (std::size_t i = 1; i < xs.size(); ++i) {
    require_same_shape("sum", v, xs[i].value());
    v += xs[i].value();
    ids.push_back(xs[i].id);
  }
  Expr out = g.emplace(std::move(v), "sum");
  int id = out.id;
  g.node(id).backward = [id, ids](Graph& gr) {
    for (int ia : ids) gr.grad(ia) += gr.grad(id);
  };
  return out;
}

Expr average(std::span<const Expr> xs) {
  return scale(sum(xs), 1.0 / static_cast<double>(xs.size()));
}

// ---------------------------------------------------------------------------
// sequence reductions

Expr max_pool_over_time(std::span<const Expr> xs) {
  Graph& g = *graph_of(xs, "max_pool_over_time");
  const long rows = xs.front().rows();
  for (const Expr& e : xs) {
    require_vector("max_pool_over_time", e.value());
    require(e.rows() == rows, "max_pool_over_time", "ragged vector sizes");
  }
  Mat v(rows, 1);
  std::vector<int> winner(static_cast<std::size_t>(rows));
  for (long r = 0; r < rows; ++r) {
    double best = xs[0].value()(r, 0);
    int arg = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double x = xs[i].value()(r, 0);
      if (x > best) {
        best = x;
        arg = static_cast<int>(i);
      }
    }
    v(r, 0) = best;
    winner[static_cast<std::size_t>(r)] = arg;
  }
  std::vector<int> ids;
  ids.reserve(xs.size());
  for (const Expr& e : xs) ids.push_back(e.id);
  Expr out = g.emplace(std::move(v), "max_pool_over_time");
  int id = out.id;
  g.node(id).backward = [id, ids, winner](Graph& gr) {
    const Mat& go = gr.grad(id);
    for (long r = 0; r < go.rows(); ++r) {
      gr.grad(ids[static_cast<std::size_t>(winner[static_cast<std::size_t>(r)])])(r, 0) +=
          go(r, 0);
    }
  };
  return out;
}

Expr masked_mean(std::span<const Expr> xs, std::span<const Expr> weights) {
  Graph& g = *graph_of(xs, "masked_mean");
  require(xs.size() == weights.size(), "masked_mean",
          "sequence and weight counts differ");
  const long rows = xs.front().rows();
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    require_vector("masked_mean", xs[i].value());
    require(xs[i].rows() == rows, "masked_mean", "ragged vector sizes");
    require(weights[i].value().size() == 1, "masked_mean", "weights must be scalar");
    total += weights[i].scalar();
  }
  std::vector<int> xids, wids;
  for (const Expr& e : xs) xids.push_back(e.id);
  for (const Expr& e : weights) wids.push_back(e.id);

  Mat v = Mat::Zero(rows, 1);
  if (total != 0.0) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      v += weights[i].scalar() * xs[i].value();
    }
    v /= total;
  }
  Expr out = g.emplace(std::move(v), "masked_mean");
  int id = out.id;
  g.node(id).backward = [id, xids, wids, total](Graph& gr) {
    if (total == 0.0) return;
    const Mat& go = gr.grad(id);
    const Mat& y = gr.node(id).value;
    for (std::size_t i = 0; i < xids.size(); ++i) {
      const double w = gr.node(wids[i]).value(0, 0);
      gr.grad(xids[i]) += (w / total) * go;
      gr.grad(wids[i])(0, 0) += go.col(0).dot((gr.node(xids[i]).value - y).col(0)) / total;
    }
  };
  return out;
}

// ---------------------------------------------------------------------------
// distributions

Expr softmax(Expr logits) {
  require_vector("softmax", logits.value());
  require(logits.rows() > 0, "softmax", "empty logit vector");
  Graph& g = *logits.g;
  const Mat& l = logits.value();
  const double m = l.maxCoeff();
  Mat y = (l.array() - m).exp().matrix();
  y /= y.sum();
  Expr out = g.emplace(std::move(y), "softmax");
  int id = out.id, il = logits.id;
  g.node(id).backward = [id, il](Graph& gr) {
    const Mat& y = gr.node(id).value;
    const Mat& go = gr.grad(id);
    const double dotv = y.col(0).dot(go.col(0));
    gr.grad(il).array() += y.array() * (go.array() - dotv);
  };
  return out;
}

Expr pick_neg_log_softmax(Expr logits, int index) {
  require_vector("pick_neg_log_softmax", logits.value());
  require(index >= 0 && index < logits.rows(), "pick_neg_log_softmax",
          "index " + std::to_string(index) + " out of " + std::to_string(logits.rows()));
  Graph& g = *logits.g;
  const Mat& l = logits.value();
  const double m = l.maxCoeff();
  const double lse = m + std::log((l.array() - m).exp().sum());
  Mat out_v(1, 1);
  out_v(0, 0) = lse - l(index, 0);
  Expr out = g.emplace(std::move(out_v), "pick_neg_log_softmax");
  int id = out.id, il = logits.id;
  g.node(id).backward = [id, il, index, lse](Graph& gr) {
    const double s = gr.grad(id)(0, 0);
    const Mat& l = gr.node(il).value;
    Mat p = (l.array() - lse).exp().matrix();
    p(index, 0) -= 1.0;
    gr.grad(il) += s * p;
  };
  return out;
}

Expr scatter_add(Expr base, const std::vector<int>& indices,
                 const std::vector<Expr>& amounts) {
  require_vector("scatter_add", base.value());
  require(indices.size() == amounts.size(), "scatter_add",
          "index and amount counts differ");
  Graph& g = *base.g;
  Mat v = base.value();
  for (std::size_t k = 0; k < indices.size(); ++k) {
    require(indices[k] >= 0 && indices[k] < v.rows(), "scatter_add",
            "index " + std::to_string(indices[k]) + " out of " +
                std::to_string(v.rows()));
    require(amounts[k].value().size() == 1, "scatter_add", "amounts must be scalar");
    v(indices[k], 0) += amounts[k].scalar();
  }
  std::vector<int> aids;
  for (const Expr& e : amounts) aids.push_back(e.id);
  Expr out = g.emplace(std::move(v), "scatter_add");
  int id = out.id, ib = base.id;
  g.node(id).backward = [id, ib, indices, aids](Graph& gr) {
    gr.grad(ib) += gr.grad(id);
    for (std::size_t k = 0; k < aids.size(); ++k) {
      gr.grad(aids[k])(0, 0) += gr.grad(id)(indices[k], 0);
    }
  };
  return out;
}

// ---------------------------------------------------------------------------
// stochastic

namespace {

// Shared machinery for the two Gumbel-softmax variants.
Expr gumbel_softmax_impl(Expr logit_pair, double temperature, Rng& rng, bool hard) {
  require_vector("gumbel_binary_sample", logit_pair.value());
  require(logit_pair.rows() == 2, "gumbel_binary_sample", "expected a logit pair");
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("smg::gumbel_binary_sample: temperature must be > 0");
  }
  Graph& g = *logit_pair.g;
  Vec z(2);
  z(0) = (logit_pair.value()(0, 0) + rng.gumbel()) / temperature;
  z(1) = (logit_pair.value()(1, 0) + rng.gumbel()) / temperature;
  const double m = z.maxCoeff();
  Vec soft = (z.array() - m).exp();
  soft /= soft.sum();

  Mat v = Mat::Zero(2, 1);
  if (hard) {
    v(soft(0) >= soft(1) ? 0 : 1, 0) = 1.0;
  } else {
    v.col(0) = soft;
  }
  Expr out = g.emplace(std::move(v), hard ? "gumbel_binary_sample"
                                          : "gumbel_softmax_relaxed");
  int id = out.id, il = logit_pair.id;
  g.node(id).backward = [id, il, soft, temperature](Graph& gr) {
    const Mat& go = gr.grad(id);
    const double dotv = soft.dot(go.col(0));
    gr.grad(il).array() += (soft.array() * (go.col(0).array() - dotv)) / temperature;
  };
  return out;
}

}  // namespace

Expr gumbel_binary_sample(Expr logit_pair, double temperature, Rng& rng) {
  return gumbel_softmax_impl(logit_pair, temperature, rng, true);
}

Expr gumbel_softmax_relaxed(Expr logit_pair, double temperature, Rng& rng) {
  return gumbel_softmax_impl(logit_pair, temperature, rng, false);
}

}  // namespace smg
