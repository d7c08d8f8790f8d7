#include "eat/cost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace eat::cost {

std::string to_string(bigint v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v)
                            : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidGeometry(what);
}

bigint B(long long v) { return static_cast<bigint>(v); }

}  // namespace

CostReport layer_cost(Layer layer, const Geometry& g) {
  const bigint d = B(g.d), l = B(g.l), k = B(g.k), n = B(g.n);
  switch (layer) {
    case Layer::linear:
      require(g.d >= 1 && g.l >= 1, "linear needs d, l >= 1");
      return {(d + 1) * d, 2 * d * d * l};
    case Layer::conv1d:
      require(g.d >= 1 && g.l >= 1 && g.k >= 1, "conv1d needs d, l, k >= 1");
      return {(k * d + 1) * d, 2 * d * d * l * k};
    case Layer::self_attention:
      require(g.d >= 1 && g.l >= 1, "self-attention needs d, l >= 1");
      return {4 * (d + 1) * d, 8 * d * d * l + 4 * d * l * l + 3 * l * l};
    case Layer::local_self_attention:
      require(g.d >= 1 && g.l >= 1 && g.k >= 1,
              "local self-attention needs d, l, k >= 1");
      return {4 * (d + 1) * d, 8 * d * d * l + 4 * d * l * k + 3 * l * d};
    case Layer::cross_attention:
      require(g.d >= 1 && g.l >= 1 && g.n >= 1,
              "cross-attention needs d, l, n >= 1");
      return {4 * (d + 1) * d, 4 * d * d * l + (4 * d * l + 2 * d * d + 3 * l) * n};
  }
  throw InvalidGeometry("unreachable layer kind");
}

CostReport mixed_cost(long long d1, long long d2, long long l, long long k) {
  require(d1 >= 0 && d2 >= 0 && l >= 0 && k >= 1, "mixed_cost needs d1, d2 >= 0, k >= 1");
  const bigint D1 = B(d1), D2 = B(d2), L = B(l), K = B(k);
  CostReport r;
  r.params = 4 * (D1 + 1) * D1 + (D2 + 1) * D2 + (K * D2 + 1) * D2;
  r.flops = 8 * D1 * D1 * L + 4 * D1 * L * L + 3 * L * L + 2 * D2 * D2 * L +
            2 * D2 * D2 * L * K;
  return r;
}

namespace {

SplitSolution scan_split(long long d, double vertex,
                         const std::function<bigint(long long)>& objective) {
  SplitSolution s;
  s.vertex = vertex;
  bigint best = objective(0);
  s.ties = {0};
  for (long long d2 = 1; d2 <= d; ++d2) {
    const bigint v = objective(d2);
    if (v < best) {
      best = v;
      s.ties = {d2};
    } else if (v == best) {
      s.ties.push_back(d2);
    }
  }
  s.minimum = best;
  s.d2_star = s.ties.front();
  s.d1_star = d - s.d2_star;
  return s;
}

}  // namespace

SplitSolution optimal_split_params(long long d, long long k) {
  require(d >= 1 && k >= 1, "optimal_split_params needs d, k >= 1");
  const double vertex = (8.0 * d + 2.0) / (2.0 * (5.0 + k));
  // l does not enter the parameter objective; any positive value works.
  SplitSolution s = scan_split(
      d, vertex, [&](long long d2) { return mixed_cost(d - d2, d2, 1, k).params; });
  s.closed_form = "d2 = (8d+2)/(2(5+k))";
  if (d % 2 == 0 &&
      std::find(s.ties.begin(), s.ties.end(), d / 2) != s.ties.end()) {
    s.closed_form += " ~ d/2";
  }
  return s;
}

SplitSolution optimal_split_flops(long long d, long long l, long long k) {
  require(d >= 1 && l >= 0 && k >= 1, "optimal_split_flops needs d >= 1, l >= 0, k >= 1");
  const double vertex = (16.0 * d + 4.0 * l) / (2.0 * (10.0 + 2.0 * k));
  SplitSolution s = scan_split(
      d, vertex, [&](long long d2) { return mixed_cost(d - d2, d2, l, k).flops; });
  // The published statement assigns d/2 + l/8 to d1; its proof assigns it to
  // d2. The scan sides with the proof whenever l > 0 (argmin above d/2).
  const bool proof_side = s.d2_star * 2 >= d;
  s.closed_form = proof_side ? "d2 = d/2 + l/8 (proof)" : "d1 = d/2 + l/8 (statement)";
  if (l > 0) {
    s.note = proof_side
                 ? "statement/proof discrepancy: the statement swaps d1 and d2; "
                   "the scan matches the proof's assignment (d2 carries +l/8)"
                 : "scan matched the statement's assignment, contradicting the proof";
  }
  return s;
}

const CostReport* ModelCost::find(const std::string& component) const {
  for (const auto& c : components) {
    if (c.component == component) return &c.cost;
  }
  return nullptr;
}

CostReport ModelCost::backbone() const {
  CostReport r;
  for (const auto& c : components) {
    if (c.component != "head") r += c.cost;
  }
  return r;
}

CostReport ModelCost::head() const {
  const CostReport* h = find("head");
  return h ? *h : CostReport{};
}

ModelCost model_cost(const EatConfig& cfg) {
  cfg.validate();
  const bigint d = B(cfg.embed_dim);
  const bigint l = B(cfg.tokens());
  const bigint d1 = B(cfg.global_width());
  const bigint d2 = B(cfg.local_width());
  const bigint k = B(cfg.kernel_size);
  const bigint r = B(cfg.ffn_ratio);
  const bigint n = B(cfg.depth);
  const bigint nq = B(cfg.task_tokens());
  const bigint m = B(cfg.head_layers);
  const bigint in = B(cfg.slice_len) * B(cfg.channels);
  const bigint classes = B(cfg.class_count);

  ModelCost mc;
  auto push = [&](const std::string& name, bigint params, bigint flops) {
    mc.components.push_back({name, {params, flops}});
    mc.total += mc.components.back().cost;
  };

  // slice projection (in -> d) with bias, plus the learned positional table
  push("embedding", (in + 1) * d + l * d, 2 * in * d * l);

  // per block: shared pre-norm + global MSA + local pointwise linear + conv
  const CostReport ma = mixed_cost(cfg.global_width(), cfg.local_width(),
                                   cfg.tokens(), cfg.kernel_size);
  push("mixed_attention", n * (2 * d + ma.params), n * ma.flops);

  // per block: pre-norm + expansion/contraction pair
  const bigint ffn_params = d * (r * d) + r * d + (r * d) * d + d;
  const bigint ffn_flops_per_token = 2 * d * (r * d) + 2 * (r * d) * d;
  push("ffn", n * (2 * d + ffn_params), n * ffn_flops_per_token * l);

  push("final_norm", 2 * d, 0);

  // task token + M layers of (3 norms, cross-attention, FFN on nq tokens)
  const CostReport ca = layer_cost(
      Layer::cross_attention,
      {cfg.embed_dim, cfg.tokens(), 0, cfg.task_tokens()});
  push("head",
       nq * d + m * (6 * d + ca.params + ffn_params),
       m * (ca.flops + ffn_flops_per_token * nq));

  push("classifier", d * classes + classes, 2 * d * classes * nq);
  return mc;
}

}  // namespace eat::cost
