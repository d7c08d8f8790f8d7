#pragma once

#include <string>
#include <vector>

#include "eat/eat_config.hpp"
#include "eat/errors.hpp"

namespace eat::cost {

// Cost polynomials at d=768, l=196 overflow 32-bit early; 128-bit keeps the
// arithmetic exact without an external bignum.
using bigint = __int128;

std::string to_string(bigint v);

struct CostReport {
  bigint params = 0;
  bigint flops = 0;

  CostReport& operator+=(const CostReport& o) {
    params += o.params;
    flops += o.flops;
    return *this;
  }
};

enum class Layer { linear, conv1d, self_attention, local_self_attention, cross_attention };

struct Geometry {
  long long d = 0;  // channel width
  long long l = 0;  // sequence length
  long long k = 0;  // conv / local-attention kernel
  long long n = 0;  // query length (cross-attention)
};

// Per-layer exact costs:
//   Linear               (d+1)d        2d^2*l
//   1D Convolution       (kd+1)d       2d^2*l*k
//   Self-Attention       4(d+1)d       8d^2*l + 4d*l^2 + 3l^2
//   Local Self-Attention 4(d+1)d       8d^2*l + 4d*l*k + 3l*d
//   Cross-Attention      4(d+1)d       4d^2*l + (4d*l + 2d^2 + 3l)*n
CostReport layer_cost(Layer layer, const Geometry& g);

// Mixed attention layer with global width d1 and local width d2:
//   params = 4(d1+1)d1 + (d2+1)d2 + (k*d2+1)d2
//   flops  = 8d1^2*l + 4d1*l^2 + 3l^2 + 2d2^2*l + 2d2^2*l*k
CostReport mixed_cost(long long d1, long long d2, long long l, long long k);

struct SplitSolution {
  long long d2_star = 0;  // smallest optimal local width
  long long d1_star = 0;
  bigint minimum = 0;
  std::vector<long long> ties;  // every d2 attaining the minimum
  double vertex = 0.0;          // real stationary point of the quadratic in d2
  std::string closed_form;      // the closed form the integer argmin matched
  std::string note;             // discrepancy flags, empty when none
};

// Exhaustive scan of integer d2 in [0, d] minimizing the mixed parameter
// count. Real vertex (8d+2)/(2(5+k)) reported alongside.
SplitSolution optimal_split_params(long long d, long long k);

// Exhaustive scan of integer d2 in [0, d] minimizing the mixed FLOP count.
// Real vertex (16d+4l)/(2(10+2k)). The published statement and its proof
// disagree on which branch carries d/2 + l/8; the scan decides, and the
// note flags the discrepancy.
SplitSolution optimal_split_flops(long long d, long long l, long long k);

struct ComponentCost {
  std::string component;
  CostReport cost;
};

struct ModelCost {
  std::vector<ComponentCost> components;
  CostReport total;

  const CostReport* find(const std::string& component) const;
  // Table-1 style split: the classifier affine counts with the backbone.
  CostReport backbone() const;
  CostReport head() const;
};

// Census-exact parameter count plus the per-layer FLOP sum over the whole
// pipeline. Components: embedding, mixed_attention (all blocks), ffn (all
// blocks), final_norm, head, classifier. Parameter counts include layer
// norms and the positional table so that they match the built model's
// census integer-exactly; FLOPs count only the per-layer terms above.
ModelCost model_cost(const EatConfig& cfg);

}  // namespace eat::cost
