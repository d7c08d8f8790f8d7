#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eat/eat_config.hpp"
#include "eat/head.hpp"
#include "eat/layers.hpp"
#include "eat/sfc.hpp"

namespace eat::nn {

// Full EAT pipeline: SFC serialization, slice embedding, N mixed encoder
// blocks, final norm, task head, classifier.
template <class T>
struct EatModel {
  EatConfig cfg;
  sfc::CurveKind curve;
  sfc::Grid grid;
  SliceEmbedding<T> embed;
  std::vector<EncoderBlock<T>> blocks;
  LayerNorm<T> final_norm;
  TaskHead<T> head;
  Linear<T> classifier;

  static EatModel build(const EatConfig& cfg) {
    cfg.validate();
    EatModel m;
    m.cfg = cfg;
    m.curve = sfc::CurveKind::parse(cfg.sfc_mode);
    m.grid = sfc::Grid{cfg.image_size, cfg.image_size, 1};
    Rng rng(cfg.seed);
    m.embed = SliceEmbedding<T>(cfg.slice_len, cfg.channels, cfg.tokens(),
                                cfg.embed_dim, rng);
    MixedAttentionConfig mac;
    mac.dim = cfg.embed_dim;
    mac.local_ratio = cfg.local_ratio;
    mac.heads = cfg.msa_heads;
    mac.kernel = cfg.kernel_size;
    m.blocks.reserve(cfg.depth);
    for (int i = 0; i < cfg.depth; ++i) m.blocks.emplace_back(mac, cfg.ffn_ratio, rng);
    m.final_norm = LayerNorm<T>(cfg.embed_dim);
    HeadConfig hc;
    hc.dim = cfg.embed_dim;
    hc.layers = cfg.head_layers;
    hc.heads = cfg.effective_head_heads();
    hc.task_tokens = cfg.task_tokens();
    hc.ffn_ratio = cfg.ffn_ratio;
    m.head = TaskHead<T>(hc, rng);
    m.classifier = Linear<T>(cfg.embed_dim, cfg.class_count, rng);
    return m;
  }

  // seq: (H*W) x C serialized pixel rows in curve order.
  Tensor<T> forward_seq(const Tensor<T>& seq) {
    Tensor<T> x = embed.forward(seq);
    for (auto& block : blocks) x = block.forward(x);
    x = final_norm.forward(x);
    Tensor<T> q = head.forward(x);
    return classifier.forward(q);  // n_q x class_count
  }

  // image: H x W x C row-major values (normalized by the caller).
  Tensor<T> forward_image(const std::vector<T>& image) {
    const auto seq = sfc::serialize<T>(image, grid, cfg.channels, curve);
    return forward_seq(Tensor<T>::from(
        {static_cast<int>(grid.cells()), cfg.channels}, std::move(seq.values)));
  }

  void visit(const ParamVisitor<T>& fn) {
    embed.visit("embed", fn);
    for (size_t i = 0; i < blocks.size(); ++i) {
      blocks[i].visit("blocks." + std::to_string(i), fn);
    }
    final_norm.visit("final_norm", fn);
    head.visit("head", fn);
    classifier.visit("classifier", fn);
  }

  std::vector<Tensor<T>> parameters() {
    std::vector<Tensor<T>> out;
    visit([&](const std::string&, Tensor<T>& t) { out.push_back(t); });
    return out;
  }

  long long param_count() {
    long long total = 0;
    visit([&](const std::string&, Tensor<T>& t) { total += t.size(); });
    return total;
  }

  std::vector<std::pair<std::string, diff::Shape>> manifest() {
    std::vector<std::pair<std::string, diff::Shape>> out;
    visit([&](const std::string& name, Tensor<T>& t) { out.emplace_back(name, t.shape()); });
    return out;
  }

  void zero_grad() {
    visit([](const std::string&, Tensor<T>& t) { t.zero_grad(); });
  }
};

}  // namespace eat::nn
