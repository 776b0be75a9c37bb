// Copyright 2026 the smg authors. Licensed under the Apache License 2.0.
#include "smg/params.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace smg {

Param& ParamStore::create(const std::string& name, long rows, long cols) {
  if (index_.count(name)) {
    throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  }
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("ParamStore: bad shape for " + name);
  }
  auto p = std::make_unique<Param>();
  p->name = name;
  p->value = Mat::Zero(rows, cols);
  p->grad = Mat::Zero(rows, cols);
  p->m1 = Mat::Zero(rows, cols);
  p->m2 = Mat::Zero(rows, cols);
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Param& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  }
  return *params_[it->second];
}

const Param& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw std::invalid_argument("ParamStore: unknown parameter " + name);
  }
  return *params_[it->second];
}

bool ParamStore::has(const std::string& name) const { return index_.count(name) > 0; }

void ParamStore::zero_grads() {
  for (auto& p : params_) p->grad.setZero();
}

void ParamStore::scale_grads(double factor) {
  for (auto& p : params_) p->grad *= factor;
}

double ParamStore::grad_norm() const {
  double s = 0.0;
  for (const auto& p : params_) s += p->grad.squaredNorm();
  return std::sqrt(s);
}

void ParamStore::update(const OptimConfig& opt) {
  double clip_scale = 1.0;
  if (opt.grad_clip > 0.0) {
    const double norm = grad_norm();
    if (norm > opt.grad_clip) clip_scale = opt.grad_clip / norm;
  }
  ++step_;
  if (opt.kind == OptimConfig::Kind::Sgd) {
    for (auto& p : params_) {
      p->value -= opt.learning_rate * clip_scale * p->grad;
    }
  } else {
    const double b1t = 1.0 - std::pow(opt.beta1, static_cast<double>(step_));
    const double b2t = 1.0 - std::pow(opt.beta2, static_cast<double>(step_));
    for (auto& p : params_) {
      const Mat g = clip_scale * p->grad;
      p->m1 = opt.beta1 * p->m1 + (1.0 - opt.beta1) * g;
      p->m2 = opt.beta2 * p->m2 + (1.0 - opt.beta2) * g.cwiseProduct(g);
      p->value.array() -= opt.learning_rate * (p->m1.array() / b1t) /
                          ((p->m2.array() / b2t).sqrt() + opt.eps);
    }
  }
  zero_grads();
}

double backward_and_update(Graph& g, Expr loss, ParamStore& store,
                           const OptimConfig& opt) {
  const double value = loss.scalar();
  if (!std::isfinite(value)) {
    auto bad = g.first_nonfinite();
    g.clear();
    store.zero_grads();
    throw NumericError("non-finite loss; first offending node: " +
                       bad.value_or("<loss itself>"));
  }
  g.backward(loss);
  store.update(opt);
  g.clear();
  return value;
}

// ---------------------------------------------------------------------------
// checkpoint serialization

namespace {

constexpr char kMagic[8] = {'S', 'M', 'G', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<std::uint64_t>(d));
}

void put_str(std::string& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void raw(const void* expect, std::size_t n, const char* what) {
    need(n);
    if (std::memcmp(data_.data() + pos_, expect, n) != 0) {
      throw DataError(std::string("checkpoint: bad ") + what);
    }
    pos_ += n;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > data_.size()) throw DataError("checkpoint: truncated file");
  }
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::string& path, const ParamStore& store,
                     const std::map<std::string, std::string>& hyper,
                     const std::vector<std::string>& vocab,
                     const std::vector<std::string>& questions) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(vocab.size()));
  put_u32(out, static_cast<std::uint32_t>(hyper.size()));
  for (const auto& [k, v] : hyper) put_str(out, k + "=" + v);
  put_u32(out, static_cast<std::uint32_t>(questions.size()));
  for (const auto& q : questions) put_str(out, q);
  for (const auto& t : vocab) put_str(out, t);
  put_u32(out, static_cast<std::uint32_t>(store.entries().size()));
  for (const auto& p : store.entries()) {
    put_str(out, p->name);
    put_u32(out, 2);
    put_u64(out, static_cast<std::uint64_t>(p->value.rows()));
    put_u64(out, static_cast<std::uint64_t>(p->value.cols()));
    for (long c = 0; c < p->value.cols(); ++c) {
      for (long r = 0; r < p->value.rows(); ++r) {
        put_f64(out, p->value(r, c));
      }
    }
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + tmp);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) {
      std::filesystem::remove(tmp);
      throw DataError("short write to " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path);
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(std::move(data));
  r.raw(kMagic, sizeof(kMagic), "magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  LoadedCheckpoint ck;
  const std::uint32_t vocab_size = r.u32();
  const std::uint32_t n_hyper = r.u32();
  for (std::uint32_t i = 0; i < n_hyper; ++i) {
    const std::string kv = r.str();
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint: bad hyperparameter entry");
    ck.hyper[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const std::uint32_t n_questions = r.u32();
  for (std::uint32_t i = 0; i < n_questions; ++i) ck.questions.push_back(r.str());
  for (std::uint32_t i = 0; i < vocab_size; ++i) ck.vocab.push_back(r.str());
  const std::uint32_t n_params = r.u32();
  for (std::uint32_t i = 0; i < n_params; ++i) {
    const std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank != 2) throw DataError("checkpoint: unsupported rank for " + name);
    const auto rows = static_cast<long>(r.u64());
    const auto cols = static_cast<long>(r.u64());
    if (rows <= 0 || cols <= 0 || rows > (1L << 32) || cols > (1L << 32)) {
      throw DataError("checkpoint: bad shape for " + name);
    }
    Mat m(rows, cols);
    for (long c = 0; c < cols; ++c) {
      for (long rr = 0; rr < rows; ++rr) {
        m(rr, c) = r.f64();
      }
    }
    ck.params.emplace_back(name, std::move(m));
  }
  if (!r.done()) throw DataError("checkpoint: trailing bytes");
  return ck;
}

}  // namespace smg
