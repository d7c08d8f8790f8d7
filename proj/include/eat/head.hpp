#pragma once

#include <string>
#include <vector>

#include "eat/layers.hpp"

namespace eat::nn {

struct HeadConfig {
  int dim = 0;
  int layers = 2;      // M
  int heads = 1;
  int task_tokens = 1;  // n_q, 1 for classification
  Activation activation = Activation::relu;
  int ffn_ratio = 4;
};

// One cross-attention layer of the task head: the token stream queries the
// backbone features, then passes through a position-wise FFN, both pre-norm
// with residuals.
template <class T>
struct HeadLayer {
  LayerNorm<T> norm_q, norm_kv, norm_ffn;
  MultiHeadAttention<T> attn;
  Ffn<T> ffn;

  HeadLayer() = default;
  HeadLayer(const HeadConfig& cfg, Rng& rng)
      : norm_q(cfg.dim),
        norm_kv(cfg.dim),
        norm_ffn(cfg.dim),
        attn(cfg.dim, cfg.heads, rng),
        ffn(cfg.dim, cfg.ffn_ratio, rng, cfg.activation) {}

  Tensor<T> forward(const Tensor<T>& q, const Tensor<T>& features) {
    Tensor<T> h = diff::add(q, attn.forward(norm_q.forward(q), norm_kv.forward(features)));
    return diff::add(h, ffn.forward(norm_ffn.forward(h)));
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    norm_q.visit(prefix + ".norm_q", fn);
    norm_kv.visit(prefix + ".norm_kv", fn);
    norm_ffn.visit(prefix + ".norm_ffn", fn);
    attn.visit(prefix + ".attn", fn);
    ffn.visit(prefix + ".ffn", fn);
  }
};

// The recorded cross-attention maps of one forward pass: M x h x n_q x l.
template <class T>
struct HeadAttentionMaps {
  int layers = 0, heads = 0, queries = 0, keys = 0;
  std::vector<T> maps;

  T at(int m, int h, int q, int k) const {
    return maps[((static_cast<size_t>(m) * heads + h) * queries + q) * keys + k];
  }

  // Head-averaged map of one layer: n_q x l.
  std::vector<T> layer_average(int m) const {
    std::vector<T> avg(static_cast<size_t>(queries) * keys, T(0));
    for (int h = 0; h < heads; ++h) {
      for (int q = 0; q < queries; ++q) {
        for (int k = 0; k < keys; ++k) {
          avg[static_cast<size_t>(q) * keys + k] += at(m, h, q, k);
        }
      }
    }
    for (auto& v : avg) v /= static_cast<T>(heads);
    return avg;
  }
};

// Task-related head: a learned task token refined by M cross-attention
// layers over the backbone features. The classifier affine lives with the
// model, not here.
template <class T>
struct TaskHead {
  HeadConfig cfg;
  Tensor<T> task_token;  // n_q x d
  std::vector<HeadLayer<T>> layers;

  TaskHead() = default;
  TaskHead(const HeadConfig& cfg_, Rng& rng)
      : cfg(cfg_), task_token(trunc_normal_init<T>({cfg_.task_tokens, cfg_.dim}, rng)) {
    if (cfg.layers < 1) throw InvalidConfig("head needs at least one layer");
    if (cfg.heads < 1 || cfg.dim % cfg.heads != 0) {
      throw InvalidConfig("head heads " + std::to_string(cfg.heads) +
                          " do not divide width " + std::to_string(cfg.dim));
    }
    layers.reserve(cfg.layers);
    for (int m = 0; m < cfg.layers; ++m) layers.emplace_back(cfg, rng);
  }

  // features: l x d (already through the backbone's final norm).
  Tensor<T> forward(const Tensor<T>& features) {
    if (features.cols() != cfg.dim) {
      throw ShapeMismatch("head: features " + diff::shape_str(features.shape()) +
                          " need width " + std::to_string(cfg.dim));
    }
    Tensor<T> q = task_token;
    for (auto& layer : layers) q = layer.forward(q, features);
    record_maps(features.rows());
    return q;
  }

  // Maps of the most recent forward pass; throws when none was recorded.
  const HeadAttentionMaps<T>& attention_maps() const {
    if (recorded_.maps.empty()) {
      throw NoRecordedPass("head attention maps requested before any forward pass");
    }
    return recorded_;
  }

  void visit(const std::string& prefix, const ParamVisitor<T>& fn) {
    fn(prefix + ".task_token", task_token);
    for (size_t m = 0; m < layers.size(); ++m) {
      layers[m].visit(prefix + ".layers." + std::to_string(m), fn);
    }
  }

 private:
  void record_maps(int keys) {
    recorded_.layers = cfg.layers;
    recorded_.heads = cfg.heads;
    recorded_.queries = cfg.task_tokens;
    recorded_.keys = keys;
    recorded_.maps.resize(static_cast<size_t>(cfg.layers) * cfg.heads *
                          cfg.task_tokens * keys);
    size_t off = 0;
    for (auto& layer : layers) {
      const auto& rec = layer.attn.last_attention;
      std::copy(rec.maps.begin(), rec.maps.end(), recorded_.maps.begin() + off);
      off += rec.maps.size();
    }
  }

  HeadAttentionMaps<T> recorded_;
};

}  // namespace eat::nn
