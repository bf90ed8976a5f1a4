#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wikimrc/reader/config.hpp"
#include "wikimrc/reader/params.hpp"
#include "wikimrc/reader/scores.hpp"
#include "wikimrc/reader/vocab.hpp"
#include "wikimrc/taskconv/unified.hpp"
#include "wikimrc/util/error.hpp"
#include "wikimrc/util/log.hpp"
#include "wikimrc/util/random.hpp"

namespace wikimrc::reader {

template <typename T>
using ColVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Candidate labels for the span objective: gold spans plus the [CLS] slot
// are positive when the input is answerable, everything is negative
// otherwise. Gold spans that are not candidates are dropped with a warning.
// Throws DataError for an answerable input without gold.
std::vector<uint8_t> wae_targets(const std::vector<TokenSpan> &candidates,
                                 const std::vector<TokenSpan> &gold, bool answerable);

// Mean binary cross-entropy over all candidates. When `dlogits` is given it
// receives d loss / d logit.
template <typename T>
T wae_loss(const std::vector<T> &logits, const std::vector<uint8_t> &targets,
           std::vector<T> *dlogits = nullptr) {
  if (logits.size() != targets.size() || logits.empty()) {
    throw DataError("loss needs one target per candidate");
  }
  const T n = static_cast<T>(logits.size());
  T total = 0;
  if (dlogits) dlogits->assign(logits.size(), T(0));
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const T l = logits[k];
    const T y = targets[k] ? T(1) : T(0);
    total += std::max(l, T(0)) - l * y + std::log1p(std::exp(-std::abs(l)));
    if (dlogits) {
      const T p = l >= 0 ? T(1) / (T(1) + std::exp(-l)) : std::exp(l) / (T(1) + std::exp(l));
      (*dlogits)[k] = (p - y) / n;
    }
  }
  return total / n;
}

template <typename T>
T wae_loss(const std::vector<T> &logits, const std::vector<TokenSpan> &candidates,
           const std::vector<TokenSpan> &gold, bool answerable, std::vector<T> *dlogits = nullptr) {
  return wae_loss(logits, wae_targets(candidates, gold, answerable), dlogits);
}

// An input mapped to ids, truncated to the length budget, with its
// candidates and targets.
struct PreparedInput {
  std::vector<int32_t> ids;
  std::size_t context_offset = 0;
  std::size_t context_length = 0;
  std::vector<TokenSpan> candidates;
  std::vector<uint8_t> targets;
  bool truncated = false;
};

// Sinusoidal position table, rows = positions.
template <typename T>
Mat<T> sinusoid_table(std::size_t positions, std::size_t width) {
  Mat<T> p(static_cast<Eigen::Index>(positions), static_cast<Eigen::Index>(width));
  for (std::size_t pos = 0; pos < positions; ++pos) {
    for (std::size_t i = 0; i < width; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(width));
      const double angle = static_cast<double>(pos) * rate;
      p(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)) =
          static_cast<T>(i % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  return p;
}

// Transformer encoder plus boundary-pair span extractor.
//
// logit(i, j) = w_out . tanh(H_i W_start + H_j W_end + b_hidden) + b_out
template <typename T>
class Reader {
 public:
  using M = Mat<T>;
  using V = ColVec<T>;

  Reader() = default;

  static Reader initialize(const ReaderConfig &config, Vocabulary vocab, uint64_t seed) {
    config.validate();
    Reader r;
    r.config_ = config;
    r.vocab_ = std::move(vocab);
    r.declare_params();
    Rng rng(seed);
    for (auto &b : r.params_.blocks()) init_block(b.name, b.value, rng);
    return r;
  }

  // Rebuilds a reader from stored parts; shapes are checked.
  static Reader from_parts(const ReaderConfig &config, Vocabulary vocab, ParamSet<T> params) {
    config.validate();
    Reader r;
    r.config_ = config;
    r.vocab_ = std::move(vocab);
    r.declare_params();
    for (auto &b : r.params_.blocks()) {
      const std::size_t i = params.index_of(b.name);
      if (params[i].rows() != b.value.rows() || params[i].cols() != b.value.cols()) {
        throw DataError("parameter block " + b.name + " has the wrong shape");
      }
      b.value = params[i];
    }
    if (params.size() != r.params_.size()) throw DataError("unexpected parameter blocks in checkpoint");
    return r;
  }

  const ReaderConfig &config() const { return config_; }
  ReaderConfig &mutable_config() { return config_; }
  const Vocabulary &vocab() const { return vocab_; }
  ParamSet<T> &params() { return params_; }
  const ParamSet<T> &params() const { return params_; }

  // Appends tokens seen in `inputs` with freshly drawn embedding rows.
  std::size_t extend_vocab(const std::vector<taskconv::UnifiedInput> &inputs, uint64_t seed) {
    const std::size_t before = vocab_.size();
    const std::size_t added = vocab_.add_from(inputs);
    if (added == 0) return 0;
    M &emb = params_[lay_.embed];
    M grown(static_cast<Eigen::Index>(vocab_.size()), emb.cols());
    grown.topRows(emb.rows()) = emb;
    Rng rng(seed);
    for (Eigen::Index r = static_cast<Eigen::Index>(before); r < grown.rows(); ++r) {
      for (Eigen::Index c = 0; c < grown.cols(); ++c) grown(r, c) = static_cast<T>(rng.normal());
    }
    emb = std::move(grown);
    return added;
  }

  PreparedInput prepare(const taskconv::UnifiedInput &input) const {
    PreparedInput p;
    const std::size_t q = input.query.size();
    if (q + 5 > config_.max_seq_len) {
      throw DataError("input " + input.id + ": query of " + std::to_string(q) +
                      " tokens leaves no room for context within " +
                      std::to_string(config_.max_seq_len));
    }
    std::size_t m = input.context.size();
    if (q + m + 4 > config_.max_seq_len) {
      m = config_.max_seq_len - q - 4;
      p.truncated = true;
      logger()->warn("input {}: context truncated from {} to {} tokens", input.id,
                     input.context.size(), m);
    }
    p.context_offset = q + 3;
    p.context_length = m;
    p.ids.reserve(q + m + 4);
    p.ids.push_back(kClsId);
    for (const auto &t : input.query) p.ids.push_back(vocab_.id(t));
    p.ids.push_back(kSepId);
    p.ids.push_back(kSepId);
    for (std::size_t i = 0; i < m; ++i) p.ids.push_back(vocab_.id(input.context[i]));
    p.ids.push_back(kSepId);
    p.candidates = candidate_spans(p.context_offset, m, config_.max_span);
    std::vector<TokenSpan> gold;
    bool answerable = input.answerable();
    if (answerable) {
      const std::size_t limit = p.context_offset + m;
      bool cls_only = false;
      for (const auto &g : input.gold) {
        if (g == TokenSpan{0, 0}) {
          cls_only = true;
        } else if (g.end < limit) {
          gold.push_back(g);
        }
      }
      if (gold.empty() && !cls_only) answerable = false;  // every answer was cut away
      if (cls_only) gold.push_back(TokenSpan{0, 0});
    }
    p.targets = wae_targets(p.candidates, gold, answerable);
    return p;
  }

  // Final hidden states, one row per assembled token.
  M encode(const std::vector<int32_t> &ids) const {
    EncoderCache cache;
    return encode_forward(ids, cache);
  }

  // Logits for the prepared candidates.
  std::vector<T> logits(const PreparedInput &p) const {
    EncoderCache enc;
    const M h = encode_forward(p.ids, enc);
    ExtractorCache ext;
    return extractor_forward(h, p.candidates, ext);
  }

  SpanScores score(const taskconv::UnifiedInput &input) const {
    const PreparedInput p = prepare(input);
    const auto l = logits(p);
    SpanScores s;
    s.context_offset = p.context_offset;
    s.context_length = p.context_length;
    s.candidates = p.candidates;
    s.logits.assign(l.begin(), l.end());
    return s;
  }

  // Extractor logits straight from hidden states, for arbitrary candidates.
  std::vector<T> score_spans(const M &h, const std::vector<TokenSpan> &candidates) const {
    ExtractorCache ext;
    return extractor_forward(h, candidates, ext);
  }

  // Loss on one prepared input; when `grads` is given the gradient is added
  // to it, scaled by `weight`.
  T loss(const PreparedInput &p, ParamSet<T> *grads = nullptr, T weight = T(1)) const {
    EncoderCache enc;
    const M h = encode_forward(p.ids, enc);
    ExtractorCache ext;
    const std::vector<T> l = extractor_forward(h, p.candidates, ext);
    if (grads == nullptr) return wae_loss(l, p.targets);
    std::vector<T> dl;
    const T value = wae_loss(l, p.targets, &dl);
    for (auto &x : dl) x *= weight;
    M dh = extractor_backward(h, p.candidates, ext, dl, *grads);
    encoder_backward(p.ids, enc, dh, *grads);
    return value;
  }

 private:
  static constexpr double kLnEps = 1e-5;

  struct LayerIdx {
    std::size_t ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
  };
  struct Layout {
    std::size_t embed = 0;
    std::vector<LayerIdx> layers;
    std::size_t lnf_g = 0, lnf_b = 0;
    std::size_t w_start = 0, w_end = 0, b_hidden = 0, w_out = 0, b_out = 0;
  };

  struct LayerCache {
    M x_in, xhat1, a1, q, k, v, o, h, xhat2, a2, u, g;
    V rstd1, rstd2;
    std::vector<M> probs;
  };
  struct EncoderCache {
    std::vector<LayerCache> layers;
    M xhat_f;
    V rstd_f;
  };
  struct ExtractorCache {
    M start_proj, end_proj, z;
  };

  void declare_params() {
    params_ = ParamSet<T>{};
    lay_ = Layout{};
    const std::size_t d = config_.hidden, f = config_.ffn_width(), k = config_.extractor_width();
    lay_.embed = params_.add("embed.token", vocab_.size(), d);
    for (std::size_t l = 0; l < config_.layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      LayerIdx li{};
      li.ln1_g = params_.add(p + "ln1.gain", 1, d);
      li.ln1_b = params_.add(p + "ln1.bias", 1, d);
      li.wq = params_.add(p + "attn.query.weight", d, d);
      li.bq = params_.add(p + "attn.query.bias", 1, d);
      li.wk = params_.add(p + "attn.key.weight", d, d);
      li.bk = params_.add(p + "attn.key.bias", 1, d);
      li.wv = params_.add(p + "attn.value.weight", d, d);
      li.bv = params_.add(p + "attn.value.bias", 1, d);
      li.wo = params_.add(p + "attn.output.weight", d, d);
      li.bo = params_.add(p + "attn.output.bias", 1, d);
      li.ln2_g = params_.add(p + "ln2.gain", 1, d);
      li.ln2_b = params_.add(p + "ln2.bias", 1, d);
      li.w1 = params_.add(p + "ffn.in.weight", d, f);
      li.b1 = params_.add(p + "ffn.in.bias", 1, f);
      li.w2 = params_.add(p + "ffn.out.weight", f, d);
      li.b2 = params_.add(p + "ffn.out.bias", 1, d);
      lay_.layers.push_back(li);
    }
    lay_.lnf_g = params_.add("final_ln.gain", 1, d);
    lay_.lnf_b = params_.add("final_ln.bias", 1, d);
    lay_.w_start = params_.add("extractor.start.weight", d, k);
    lay_.w_end = params_.add("extractor.end.weight", d, k);
    lay_.b_hidden = params_.add("extractor.hidden.bias", 1, k);
    lay_.w_out = params_.add("extractor.out.weight", 1, k);
    lay_.b_out = params_.add("extractor.out.bias", 1, 1);
    positions_ = sinusoid_table<T>(config_.max_seq_len, d);
  }

  static void init_block(const std::string &name, M &value, Rng &rng) {
    auto ends_with = [&](const char *s) { return name.ends_with(s); };
    if (ends_with(".gain")) {
      value.setOnes();
    } else if (ends_with(".bias")) {
      value.setZero();
    } else {
      const double scale = name == "embed.token" ? 1.0 : 1.0 / std::sqrt(static_cast<double>(
                                                             name == "extractor.out.weight" ? value.cols() : value.rows()));
      for (Eigen::Index r = 0; r < value.rows(); ++r) {
        for (Eigen::Index c = 0; c < value.cols(); ++c) value(r, c) = static_cast<T>(rng.normal() * scale);
      }
    }
  }

  static M layer_norm(const M &x, const M &gain, const M &bias, M &xhat, V &rstd) {
    const V mean = x.rowwise().mean();
    xhat = x.colwise() - mean;
    rstd = (xhat.array().square().rowwise().mean() + T(kLnEps)).rsqrt().matrix();
    xhat = (xhat.array().colwise() * rstd.array()).matrix();
    return ((xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array()).matrix();
  }

  static M layer_norm_backward(const M &dy, const M &xhat, const V &rstd, const M &gain, M &dgain,
                               M &dbias) {
    dgain.row(0) += (dy.array() * xhat.array()).colwise().sum().matrix();
    dbias.row(0) += dy.colwise().sum();
    const M dxhat = (dy.array().rowwise() * gain.row(0).array()).matrix();
    const V m1 = dxhat.rowwise().mean();
    const V m2 = (dxhat.array() * xhat.array()).rowwise().mean().matrix();
    M dx = dxhat.colwise() - m1;
    dx = ((dx.array() - xhat.array().colwise() * m2.array()).colwise() * rstd.array()).matrix();
    return dx;
  }

  static T gelu(T u) {
    const T c = T(0.7978845608028654);
    return T(0.5) * u * (T(1) + std::tanh(c * (u + T(0.044715) * u * u * u)));
  }
  static T gelu_grad(T u) {
    const T c = T(0.7978845608028654);
    const T t = std::tanh(c * (u + T(0.044715) * u * u * u));
    return T(0.5) * (T(1) + t) + T(0.5) * u * (T(1) - t * t) * c * (T(1) + T(3) * T(0.044715) * u * u);
  }

  M encode_forward(const std::vector<int32_t> &ids, EncoderCache &cache) const {
    const auto n = static_cast<Eigen::Index>(ids.size());
    if (ids.size() > config_.max_seq_len) throw DataError("sequence exceeds the maximum length");
    const M &emb = params_[lay_.embed];
    M x(n, static_cast<Eigen::Index>(config_.hidden));
    for (Eigen::Index t = 0; t < n; ++t) {
      const int32_t id = ids[static_cast<std::size_t>(t)];
      if (id < 0 || id >= emb.rows()) throw DataError("token id out of range");
      x.row(t) = emb.row(id) + positions_.row(t);
    }
    const std::size_t heads = config_.heads;
    const auto dh = static_cast<Eigen::Index>(config_.hidden / heads);
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));
    cache.layers.resize(config_.layers);
    for (std::size_t l = 0; l < config_.layers; ++l) {
      const LayerIdx &li = lay_.layers[l];
      LayerCache &c = cache.layers[l];
      c.x_in = x;
      c.a1 = layer_norm(x, params_[li.ln1_g], params_[li.ln1_b], c.xhat1, c.rstd1);
      c.q = (c.a1 * params_[li.wq]).rowwise() + params_[li.bq].row(0);
      c.k = (c.a1 * params_[li.wk]).rowwise() + params_[li.bk].row(0);
      c.v = (c.a1 * params_[li.wv]).rowwise() + params_[li.bv].row(0);
      c.o.resize(n, x.cols());
      c.probs.resize(heads);
      for (std::size_t hd = 0; hd < heads; ++hd) {
        const Eigen::Index off = static_cast<Eigen::Index>(hd) * dh;
        M s = (c.q.middleCols(off, dh) * c.k.middleCols(off, dh).transpose()) * scale;
        for (Eigen::Index r = 0; r < n; ++r) {
          const T mx = s.row(r).maxCoeff();
          s.row(r) = (s.row(r).array() - mx).exp().matrix();
          s.row(r) /= s.row(r).sum();
        }
        c.o.middleCols(off, dh).noalias() = s * c.v.middleCols(off, dh);
        c.probs[hd] = std::move(s);
      }
      c.h = x + ((c.o * params_[li.wo]).rowwise() + params_[li.bo].row(0));
      c.a2 = layer_norm(c.h, params_[li.ln2_g], params_[li.ln2_b], c.xhat2, c.rstd2);
      c.u = (c.a2 * params_[li.w1]).rowwise() + params_[li.b1].row(0);
      c.g = c.u.unaryExpr([](T u) { return gelu(u); });
      x = c.h + ((c.g * params_[li.w2]).rowwise() + params_[li.b2].row(0));
    }
    return layer_norm(x, params_[lay_.lnf_g], params_[lay_.lnf_b], cache.xhat_f, cache.rstd_f);
  }

  void encoder_backward(const std::vector<int32_t> &ids, const EncoderCache &cache, const M &dh_final,
                        ParamSet<T> &grads) const {
    M dx = layer_norm_backward(dh_final, cache.xhat_f, cache.rstd_f, params_[lay_.lnf_g],
                               grads[lay_.lnf_g], grads[lay_.lnf_b]);
    const std::size_t heads = config_.heads;
    const auto dh = static_cast<Eigen::Index>(config_.hidden / heads);
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));
    for (std::size_t l = config_.layers; l-- > 0;) {
      const LayerIdx &li = lay_.layers[l];
      const LayerCache &c = cache.layers[l];
      // Feed-forward branch.
      grads[li.w2].noalias() += c.g.transpose() * dx;
      grads[li.b2].row(0) += dx.colwise().sum();
      M du = dx * params_[li.w2].transpose();
      du = (du.array() * c.u.unaryExpr([](T u) { return gelu_grad(u); }).array()).matrix();
      grads[li.w1].noalias() += c.a2.transpose() * du;
      grads[li.b1].row(0) += du.colwise().sum();
      const M da2 = du * params_[li.w1].transpose();
      M dhid = dx + layer_norm_backward(da2, c.xhat2, c.rstd2, params_[li.ln2_g], grads[li.ln2_g],
                                        grads[li.ln2_b]);
      // Attention branch.
      grads[li.wo].noalias() += c.o.transpose() * dhid;
      grads[li.bo].row(0) += dhid.colwise().sum();
      const M d_o = dhid * params_[li.wo].transpose();
      M dq(d_o.rows(), d_o.cols()), dk(d_o.rows(), d_o.cols()), dv(d_o.rows(), d_o.cols());
      for (std::size_t hd = 0; hd < heads; ++hd) {
        const Eigen::Index off = static_cast<Eigen::Index>(hd) * dh;
        const M &p = c.probs[hd];
        const M doh = d_o.middleCols(off, dh);
        dv.middleCols(off, dh).noalias() = p.transpose() * doh;
        const M dp = doh * c.v.middleCols(off, dh).transpose();
        const V rows = (dp.array() * p.array()).rowwise().sum().matrix();
        const M ds = ((dp.colwise() - rows).array() * p.array()).matrix() * scale;
        dq.middleCols(off, dh).noalias() = ds * c.k.middleCols(off, dh);
        dk.middleCols(off, dh).noalias() = ds.transpose() * c.q.middleCols(off, dh);
      }
      grads[li.wq].noalias() += c.a1.transpose() * dq;
      grads[li.bq].row(0) += dq.colwise().sum();
      grads[li.wk].noalias() += c.a1.transpose() * dk;
      grads[li.bk].row(0) += dk.colwise().sum();
      grads[li.wv].noalias() += c.a1.transpose() * dv;
      grads[li.bv].row(0) += dv.colwise().sum();
      const M da1 = dq * params_[li.wq].transpose() + dk * params_[li.wk].transpose() +
                    dv * params_[li.wv].transpose();
      dx = dhid + layer_norm_backward(da1, c.xhat1, c.rstd1, params_[li.ln1_g], grads[li.ln1_g],
                                      grads[li.ln1_b]);
    }
    M &demb = grads[lay_.embed];
    for (std::size_t t = 0; t < ids.size(); ++t) {
      demb.row(ids[t]) += dx.row(static_cast<Eigen::Index>(t));
    }
  }

  std::vector<T> extractor_forward(const M &h, const std::vector<TokenSpan> &candidates,
                                   ExtractorCache &c) const {
    c.start_proj = h * params_[lay_.w_start];
    c.end_proj = h * params_[lay_.w_end];
    const auto width = params_[lay_.w_out].cols();
    c.z.resize(static_cast<Eigen::Index>(candidates.size()), width);
    std::vector<T> out(candidates.size());
    const auto &bias = params_[lay_.b_hidden];
    const auto &w_out = params_[lay_.w_out];
    const T b_out = params_[lay_.b_out](0, 0);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const auto &s = candidates[k];
      if (s.start > s.end || static_cast<Eigen::Index>(s.end) >= h.rows()) {
        throw DataError("candidate span outside the sequence");
      }
      const auto row = static_cast<Eigen::Index>(k);
      c.z.row(row) = (c.start_proj.row(static_cast<Eigen::Index>(s.start)) +
                      c.end_proj.row(static_cast<Eigen::Index>(s.end)) + bias.row(0))
                         .array()
                         .tanh()
                         .matrix();
      out[k] = c.z.row(row).dot(w_out.row(0)) + b_out;
    }
    return out;
  }

  M extractor_backward(const M &h, const std::vector<TokenSpan> &candidates, const ExtractorCache &c,
                       const std::vector<T> &dlogits, ParamSet<T> &grads) const {
    M d_start = M::Zero(c.start_proj.rows(), c.start_proj.cols());
    M d_end = M::Zero(c.end_proj.rows(), c.end_proj.cols());
    const auto &w_out = params_[lay_.w_out];
    auto &g_out = grads[lay_.w_out];
    auto &g_bias = grads[lay_.b_hidden];
    T g_bout = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const T dl = dlogits[k];
      if (dl == T(0)) continue;
      const auto row = static_cast<Eigen::Index>(k);
      g_out.row(0) += dl * c.z.row(row);
      g_bout += dl;
      const auto dpre = (dl * w_out.row(0).array() * (T(1) - c.z.row(row).array().square())).matrix();
      g_bias.row(0) += dpre;
      d_start.row(static_cast<Eigen::Index>(candidates[k].start)) += dpre;
      d_end.row(static_cast<Eigen::Index>(candidates[k].end)) += dpre;
    }
    grads[lay_.b_out](0, 0) += g_bout;
    grads[lay_.w_start].noalias() += h.transpose() * d_start;
    grads[lay_.w_end].noalias() += h.transpose() * d_end;
    return d_start * params_[lay_.w_start].transpose() + d_end * params_[lay_.w_end].transpose();
  }

  ReaderConfig config_;
  Vocabulary vocab_;
  ParamSet<T> params_;
  Layout lay_;
  M positions_;
};

}  // namespace wikimrc::reader
