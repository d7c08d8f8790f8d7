#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eat/ops.hpp"
#include "eat/rng.hpp"
#include "eat/tensor.hpp"

namespace eat::nn {

using diff::Tensor;

template <class T>
using ParamVisitor = std::function<void(const std::string&, Tensor<T>&)>;

template <class T>
Tensor<T> trunc_normal_init(diff::Shape shape, Rng& rng, double stddev = 0.02) {
  Tensor<T> t(std::move(shape), true);
  for (auto& v : t.values()) v = static_cast<T>(rng.trunc_normal(stddev));
  return t;
}

template <class T>
struct Linear {
  Tensor<T> weight;  // in x out
  Tensor<T> bias;    // 1 x out

  Linear() = default;
  Linear(int in, int out, Rng& rng)
      : weight(trunc_normal_init<T>({in, out}, rng)), bias({1, out}, true) {}

  Tensor<T> forward(const Tensor<T>& x) const {
    return diff::add_rowvec(diff::matmul(x, weight), bias);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".weight", weight);
    fn(prefix + ".bias", bias);
  }
};

template <class T>
struct LayerNorm {
  Tensor<T> gamma;  // 1 x d, init 1
  Tensor<T> beta;   // 1 x d, init 0
  double eps = 1e-5;

  LayerNorm() = default;
  explicit LayerNorm(int d) : gamma({1, d}, true), beta({1, d}, true) {
    for (auto& v : gamma.values()) v = T(1);
  }

  Tensor<T> forward(const Tensor<T>& x) const {
    return diff::add_rowvec(diff::mul_rowvec(diff::layer_norm_rows(x, eps), gamma), beta);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".gamma", gamma);
    fn(prefix + ".beta", beta);
  }
};

template <class T>
struct Conv1dSame {
  Tensor<T> weight;  // {k, c_in, c_out}
  Tensor<T> bias;    // 1 x c_out
  Conv1dSame() = default;
  Conv1dSame(int channels, int kernel, Rng& rng)
      : weight(trunc_normal_init<T>({kernel, channels, channels}, rng)),
        bias({1, channels}, true) {}

  Tensor<T> forward(const Tensor<T>& x) const {
    return diff::conv1d_same(x, weight, bias);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".weight", weight);
    fn(prefix + ".bias", bias);
  }
};

// Realized attention weights of the most recent forward pass.
template <class T>
struct AttentionRecord {
  int heads = 0;
  int queries = 0;
  int keys = 0;
  std::vector<T> maps;  // [head][query][key]

  T at(int h, int q, int k) const {
    return maps[(static_cast<size_t>(h) * queries + q) * keys + k];
  }
};

// Multi-head attention with packed per-head projections. Self-attention is
// forward(x, x); the task head calls it with an external query stream.
template <class T>
struct MultiHeadAttention {
  int dim = 0;    // model width of this attention (d_m)
  int heads = 0;  // h; per-head width d_k = d_v = dim / h
  Linear<T> wq, wk, wv, wo;
  AttentionRecord<T> last_attention;

  MultiHeadAttention() = default;
  MultiHeadAttention(int dim_, int heads_, Rng& rng)
      : dim(dim_),
        heads(heads_),
        wq(dim_, dim_, rng),
        wk(dim_, dim_, rng),
        wv(dim_, dim_, rng),
        wo(dim_, dim_, rng) {
    if (heads < 1 || dim % heads != 0) {
      throw InvalidConfig("attention heads " + std::to_string(heads) +
                          " do not divide width " + std::to_string(dim));
    }
  }

  Tensor<T> forward(const Tensor<T>& query_in, const Tensor<T>& kv_in) {
    if (query_in.cols() != dim || kv_in.cols() != dim) {
      throw ShapeMismatch("attention: inputs " + diff::shape_str(query_in.shape()) +
                          ", " + diff::shape_str(kv_in.shape()) + " need width " +
                          std::to_string(dim));
    }
    const int dk = dim / heads;
    const Tensor<T> q = wq.forward(query_in);
    const Tensor<T> k = wk.forward(kv_in);
    const Tensor<T> v = wv.forward(kv_in);
    const auto qh = diff::split_cols(q, heads);
    const auto kh = diff::split_cols(k, heads);
    const auto vh = diff::split_cols(v, heads);

    last_attention.heads = heads;
    last_attention.queries = query_in.rows();
    last_attention.keys = kv_in.rows();
    last_attention.maps.assign(
        static_cast<size_t>(heads) * last_attention.queries * last_attention.keys, T(0));

    std::vector<Tensor<T>> outputs;
    outputs.reserve(heads);
    for (int h = 0; h < heads; ++h) {
      Tensor<T> logits =
          diff::scale(diff::matmul(qh[h], diff::transpose(kh[h])), 1.0 / std::sqrt(dk));
      Tensor<T> attn = diff::row_softmax(logits);
      std::copy(attn.values().begin(), attn.values().end(),
                last_attention.maps.begin() +
                    static_cast<size_t>(h) * last_attention.queries * last_attention.keys);
      outputs.push_back(diff::matmul(attn, vh[h]));
    }
    return wo.forward(diff::concat_cols(outputs));
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    wq.visit(prefix + ".wq", fn);
    wk.visit(prefix + ".wk", fn);
    wv.visit(prefix + ".wv", fn);
    wo.visit(prefix + ".wo", fn);
  }
};

enum class Activation { relu, gelu };

// Position-wise two-layer map; tokens never interact.
template <class T>
struct Ffn {
  Linear<T> fc1, fc2;
  Activation activation = Activation::relu;

  Ffn() = default;
  Ffn(int dim, int ratio, Rng& rng, Activation act = Activation::relu)
      : fc1(dim, dim * ratio, rng), fc2(dim * ratio, dim, rng), activation(act) {}

  Tensor<T> forward(const Tensor<T>& x) const {
    Tensor<T> h = fc1.forward(x);
    h = activation == Activation::relu ? diff::relu(h) : diff::gelu(h);
    return fc2.forward(h);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fc1.visit(prefix + ".fc1", fn);
    fc2.visit(prefix + ".fc2", fn);
  }
};

struct MixedAttentionConfig {
  int dim = 0;
  double local_ratio = 0.5;
  int heads = 1;       // global-path heads
  int kernel = 3;      // local conv kernel (odd)
  bool conv_activation = false;  // optional nonlinearity after the local conv
  Activation activation = Activation::relu;

  int local_width() const { return static_cast<int>(local_ratio * dim); }
  int global_width() const { return dim - local_width(); }
};

// Pre-norm mixed global/local sublayer: one shared LN, channel split with
// ratio p, global MSA on d1 channels, pointwise linear + 1D conv on d2,
// concatenated back and added to the residual stream.
template <class T>
struct MixedAttention {
  MixedAttentionConfig cfg;
  LayerNorm<T> norm;
  std::optional<MultiHeadAttention<T>> global_attn;
  std::optional<Linear<T>> local_pre;
  std::optional<Conv1dSame<T>> local_conv;

  MixedAttention() = default;
  MixedAttention(const MixedAttentionConfig& cfg_, Rng& rng) : cfg(cfg_), norm(cfg_.dim) {
    if (cfg.local_ratio < 0.0 || cfg.local_ratio > 1.0) {
      throw InvalidConfig("local_ratio must be in [0, 1]");
    }
    if (cfg.kernel < 1 || cfg.kernel % 2 == 0) {
      throw InvalidConfig("local kernel must be odd, got " + std::to_string(cfg.kernel));
    }
    const int d1 = cfg.global_width(), d2 = cfg.local_width();
    if (d1 > 0) {
      if (d1 % cfg.heads != 0) {
        throw InvalidConfig("heads " + std::to_string(cfg.heads) +
                            " do not divide global width " + std::to_string(d1));
      }
      global_attn.emplace(d1, cfg.heads, rng);
    }
    if (d2 > 0) {
      local_pre.emplace(d2, d2, rng);
      local_conv.emplace(d2, cfg.kernel, rng);
    }
  }

  Tensor<T> forward(const Tensor<T>& x) {
    if (x.cols() != cfg.dim) {
      throw ShapeMismatch("mixed attention: input " + diff::shape_str(x.shape()) +
                          " needs width " + std::to_string(cfg.dim));
    }
    const Tensor<T> y = norm.forward(x);
    const int d1 = cfg.global_width(), d2 = cfg.local_width();
    if (d2 == 0) return diff::add(x, global_attn->forward(y, y));
    if (d1 == 0) return diff::add(x, local_path(y));
    auto parts = diff::split_cols(y, std::vector<int>{d1, d2});
    Tensor<T> g = global_attn->forward(parts[0], parts[0]);
    Tensor<T> lo = local_path(parts[1]);
    return diff::add(x, diff::concat_cols(g, lo));
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    norm.visit(prefix + ".norm", fn);
    if (global_attn) global_attn->visit(prefix + ".attn", fn);
    if (local_pre) local_pre->visit(prefix + ".local_pre", fn);
    if (local_conv) local_conv->visit(prefix + ".local_conv", fn);
  }

 private:
  Tensor<T> local_path(const Tensor<T>& y_local) {
    Tensor<T> h = local_conv->forward(local_pre->forward(y_local));
    if (!cfg.conv_activation) return h;
    return cfg.activation == Activation::relu ? diff::relu(h) : diff::gelu(h);
  }
};

// One encoder layer: mixed-attention sublayer then pre-norm FFN, each with
// its residual connection.
template <class T>
struct EncoderBlock {
  MixedAttention<T> ma;
  LayerNorm<T> ffn_norm;
  Ffn<T> ffn;

  EncoderBlock() = default;
  EncoderBlock(const MixedAttentionConfig& cfg, int ffn_ratio, Rng& rng)
      : ma(cfg, rng), ffn_norm(cfg.dim), ffn(cfg.dim, ffn_ratio, rng, cfg.activation) {}

  Tensor<T> forward(const Tensor<T>& x) {
    Tensor<T> h = ma.forward(x);
    return diff::add(h, ffn.forward(ffn_norm.forward(h)));
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    ma.visit(prefix + ".ma", fn);
    ffn_norm.visit(prefix + ".ffn_norm", fn);
    ffn.visit(prefix + ".ffn", fn);
  }
};

// Projects each length-s run of the serialized pixel sequence to one token
// and adds the learned positional entry.
template <class T>
struct SliceEmbedding {
  int slice_len = 0;
  int channels = 0;
  Linear<T> proj;     // (s * C) -> d
  Tensor<T> positions;  // (L / s) x d

  SliceEmbedding() = default;
  SliceEmbedding(int slice_len_, int channels_, int tokens, int dim, Rng& rng)
      : slice_len(slice_len_),
        channels(channels_),
        proj(slice_len_ * channels_, dim, rng),
        positions(trunc_normal_init<T>({tokens, dim}, rng)) {}

  Tensor<T> forward(const Tensor<T>& seq) const {
    if (seq.shape().size() != 2 || seq.cols() != channels) {
      throw ShapeMismatch("slice_embed: sequence " + diff::shape_str(seq.shape()) +
                          " needs " + std::to_string(channels) + " channels");
    }
    const int len = seq.rows();
    if (len % slice_len != 0) {
      throw LengthMismatch("slice_embed: slice length " + std::to_string(slice_len) +
                           " does not divide sequence length " + std::to_string(len));
    }
    const int tokens = len / slice_len;
    if (tokens != positions.rows()) {
      throw LengthMismatch("slice_embed: " + std::to_string(tokens) +
                           " tokens but positional table has " +
                           std::to_string(positions.rows()) + " rows");
    }
    Tensor<T> flat = diff::reshape(seq, {tokens, slice_len * channels});
    return diff::add(proj.forward(flat), positions);
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    proj.visit(prefix + ".proj", fn);
    fn(prefix + ".positions", positions);
  }
};

}  // namespace eat::nn
