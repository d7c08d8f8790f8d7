#pragma once

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "eat/tensor.hpp"

namespace eat::diff {

namespace detail {

template <class T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using Map = Eigen::Map<EMat<T>>;
template <class T>
using CMap = Eigen::Map<const EMat<T>>;

template <class T>
void require_2d(const Tensor<T>& t, const char* op) {
  if (t.shape().size() != 2) {
    throw ShapeMismatch(std::string(op) + ": expected a rank-2 tensor, got " +
                        shape_str(t.shape()));
  }
}

template <class T>
void accumulate(const std::shared_ptr<TensorNode<T>>& node, const TensorNode<T>& out,
                const std::function<void(std::vector<T>&)>& add) {
  if (!node->requires_grad) return;
  node->ensure_grad();
  (void)out;
  add(node->grad);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// matmul(a: m x k, b: k x n) -> m x n
template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_2d(a, "matmul");
  detail::require_2d(b, "matmul");
  const int m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) {
    throw ShapeMismatch("matmul: inner dimensions of " + shape_str(a.shape()) +
                        " and " + shape_str(b.shape()) + " differ");
  }
  std::vector<T> out(static_cast<size_t>(m) * n);
  {
    detail::CMap<T> ma(a.values().data(), m, k);
    detail::CMap<T> mb(b.values().data(), k, n);
    detail::Map<T> mo(out.data(), m, n);
    mo.noalias() = ma * mb;
  }
  auto an = a.node();
  auto bn = b.node();
  return make_result<T>(
      {m, n}, std::move(out), {a, b}, [an, bn, m, k, n](TensorNode<T>& o) {
        detail::CMap<T> mg(o.grad.data(), m, n);
        if (an->requires_grad) {
          an->ensure_grad();
          detail::CMap<T> mb(bn->value.data(), k, n);
          detail::Map<T> ga(an->grad.data(), m, k);
          ga.noalias() += mg * mb.transpose();
        }
        if (bn->requires_grad) {
          bn->ensure_grad();
          detail::CMap<T> ma(an->value.data(), m, k);
          detail::Map<T> gb(bn->grad.data(), k, n);
          gb.noalias() += ma.transpose() * mg;
        }
      });
}

// ---------------------------------------------------------------------------
// elementwise sum of two same-shape tensors
template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("add: shapes " + shape_str(a.shape()) + " and " +
                        shape_str(b.shape()) + " differ");
  }
  std::vector<T> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] += b.values()[i];
  auto an = a.node();
  auto bn = b.node();
  return make_result<T>(a.shape(), std::move(out), {a, b}, [an, bn](TensorNode<T>& o) {
    for (auto* n : {an.get(), bn.get()}) {
      if (!n->requires_grad) continue;
      n->ensure_grad();
      for (size_t i = 0; i < o.grad.size(); ++i) n->grad[i] += o.grad[i];
    }
  });
}

// x: m x n plus a broadcast 1 x n row vector
template <class T>
Tensor<T> add_rowvec(const Tensor<T>& x, const Tensor<T>& v) {
  detail::require_2d(x, "add_rowvec");
  if (v.shape() != Shape{1, x.cols()}) {
    throw ShapeMismatch("add_rowvec: vector " + shape_str(v.shape()) +
                        " does not broadcast over " + shape_str(x.shape()));
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.values());
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) out[static_cast<size_t>(r) * n + c] += v.values()[c];
  }
  auto xn = x.node();
  auto vn = v.node();
  return make_result<T>(x.shape(), std::move(out), {x, v}, [xn, vn, m, n](TensorNode<T>& o) {
    if (xn->requires_grad) {
      xn->ensure_grad();
      for (size_t i = 0; i < o.grad.size(); ++i) xn->grad[i] += o.grad[i];
    }
    if (vn->requires_grad) {
      vn->ensure_grad();
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < n; ++c) vn->grad[c] += o.grad[static_cast<size_t>(r) * n + c];
      }
    }
  });
}

// x: m x n scaled per column by a 1 x n row vector
template <class T>
Tensor<T> mul_rowvec(const Tensor<T>& x, const Tensor<T>& v) {
  detail::require_2d(x, "mul_rowvec");
  if (v.shape() != Shape{1, x.cols()}) {
    throw ShapeMismatch("mul_rowvec: vector " + shape_str(v.shape()) +
                        " does not broadcast over " + shape_str(x.shape()));
  }
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.values());
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) out[static_cast<size_t>(r) * n + c] *= v.values()[c];
  }
  auto xn = x.node();
  auto vn = v.node();
  return make_result<T>(x.shape(), std::move(out), {x, v}, [xn, vn, m, n](TensorNode<T>& o) {
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) {
        const size_t i = static_cast<size_t>(r) * n + c;
        if (xn->requires_grad) {
          xn->ensure_grad();
          xn->grad[i] += o.grad[i] * vn->value[c];
        }
        if (vn->requires_grad) {
          vn->ensure_grad();
          vn->grad[c] += o.grad[i] * xn->value[i];
        }
      }
    }
  });
}

// multiply-by-scalar (compile-time constant, not a traced tensor)
template <class T>
Tensor<T> scale(const Tensor<T>& x, double c) {
  std::vector<T> out(x.values());
  for (auto& v : out) v = static_cast<T>(v * c);
  auto xn = x.node();
  return make_result<T>(x.shape(), std::move(out), {x}, [xn, c](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (size_t i = 0; i < o.grad.size(); ++i) {
      xn->grad[i] += static_cast<T>(o.grad[i] * c);
    }
  });
}

// elementwise product of two same-shape tensors
template <class T>
Tensor<T> hadamard(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeMismatch("hadamard: shapes " + shape_str(a.shape()) + " and " +
                        shape_str(b.shape()) + " differ");
  }
  std::vector<T> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= b.values()[i];
  auto an = a.node();
  auto bn = b.node();
  return make_result<T>(a.shape(), std::move(out), {a, b}, [an, bn](TensorNode<T>& o) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (size_t i = 0; i < o.grad.size(); ++i) an->grad[i] += o.grad[i] * bn->value[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (size_t i = 0; i < o.grad.size(); ++i) bn->grad[i] += o.grad[i] * an->value[i];
    }
  });
}

template <class T>
Tensor<T> transpose(const Tensor<T>& x) {
  detail::require_2d(x, "transpose");
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.values().size());
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) {
      out[static_cast<size_t>(c) * m + r] = x.values()[static_cast<size_t>(r) * n + c];
    }
  }
  auto xn = x.node();
  return make_result<T>({n, m}, std::move(out), {x}, [xn, m, n](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) {
        xn->grad[static_cast<size_t>(r) * n + c] += o.grad[static_cast<size_t>(c) * m + r];
      }
    }
  });
}

// concat along the channel (column) axis
template <class T>
Tensor<T> concat_cols(const std::vector<Tensor<T>>& parts) {
  if (parts.empty()) throw ShapeMismatch("concat_cols: no inputs");
  const int m = parts[0].rows();
  int total = 0;
  for (const auto& p : parts) {
    detail::require_2d(p, "concat_cols");
    if (p.rows() != m) {
      throw ShapeMismatch("concat_cols: row counts " + shape_str(parts[0].shape()) +
                          " and " + shape_str(p.shape()) + " differ");
    }
    total += p.cols();
  }
  std::vector<T> out(static_cast<size_t>(m) * total);
  int off = 0;
  for (const auto& p : parts) {
    const int n = p.cols();
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < n; ++c) {
        out[static_cast<size_t>(r) * total + off + c] =
            p.values()[static_cast<size_t>(r) * n + c];
      }
    }
    off += n;
  }
  std::vector<std::shared_ptr<TensorNode<T>>> nodes;
  std::vector<int> widths;
  for (const auto& p : parts) {
    nodes.push_back(p.node());
    widths.push_back(p.cols());
  }
  return make_result<T>({m, total}, std::move(out), parts,
                        [nodes, widths, m, total](TensorNode<T>& o) {
                          int off = 0;
                          for (size_t pi = 0; pi < nodes.size(); ++pi) {
                            const int n = widths[pi];
                            auto& node = nodes[pi];
                            if (node->requires_grad) {
                              node->ensure_grad();
                              for (int r = 0; r < m; ++r) {
                                for (int c = 0; c < n; ++c) {
                                  node->grad[static_cast<size_t>(r) * n + c] +=
                                      o.grad[static_cast<size_t>(r) * total + off + c];
                                }
                              }
                            }
                            off += n;
                          }
                        });
}

template <class T>
Tensor<T> concat_cols(const Tensor<T>& a, const Tensor<T>& b) {
  return concat_cols<T>(std::vector<Tensor<T>>{a, b});
}

// split along the channel (column) axis into the given widths
template <class T>
std::vector<Tensor<T>> split_cols(const Tensor<T>& x, const std::vector<int>& widths) {
  detail::require_2d(x, "split_cols");
  int total = 0;
  for (int w : widths) total += w;
  if (total != x.cols()) {
    throw ShapeMismatch("split_cols: widths sum to " + std::to_string(total) +
                        " but tensor is " + shape_str(x.shape()));
  }
  const int m = x.rows(), n = x.cols();
  std::vector<Tensor<T>> parts;
  auto xn = x.node();
  int off = 0;
  for (int w : widths) {
    std::vector<T> out(static_cast<size_t>(m) * w);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < w; ++c) {
        out[static_cast<size_t>(r) * w + c] = x.values()[static_cast<size_t>(r) * n + off + c];
      }
    }
    const int this_off = off;
    parts.push_back(make_result<T>(
        {m, w}, std::move(out), {x}, [xn, m, n, w, this_off](TensorNode<T>& o) {
          if (!xn->requires_grad) return;
          xn->ensure_grad();
          for (int r = 0; r < m; ++r) {
            for (int c = 0; c < w; ++c) {
              xn->grad[static_cast<size_t>(r) * n + this_off + c] +=
                  o.grad[static_cast<size_t>(r) * w + c];
            }
          }
        }));
    off += w;
  }
  return parts;
}

// split into h equal-width chunks
template <class T>
std::vector<Tensor<T>> split_cols(const Tensor<T>& x, int chunks) {
  detail::require_2d(x, "split_cols");
  if (chunks < 1 || x.cols() % chunks != 0) {
    throw ShapeMismatch("split_cols: " + std::to_string(chunks) +
                        " chunks do not divide " + shape_str(x.shape()));
  }
  return split_cols(x, std::vector<int>(chunks, x.cols() / chunks));
}

// numerically stable softmax over each row
template <class T>
Tensor<T> row_softmax(const Tensor<T>& x) {
  detail::require_2d(x, "row_softmax");
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.values().size());
  for (int r = 0; r < m; ++r) {
    const T* row = x.values().data() + static_cast<size_t>(r) * n;
    T* orow = out.data() + static_cast<size_t>(r) * n;
    T mx = row[0];
    for (int c = 1; c < n; ++c) mx = std::max(mx, row[c]);
    T denom = T(0);
    for (int c = 0; c < n; ++c) {
      orow[c] = std::exp(row[c] - mx);
      denom += orow[c];
    }
    for (int c = 0; c < n; ++c) orow[c] /= denom;
  }
  auto xn = x.node();
  return make_result<T>(x.shape(), std::move(out), {x}, [xn, m, n](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (int r = 0; r < m; ++r) {
      const size_t base = static_cast<size_t>(r) * n;
      T dot = T(0);
      for (int c = 0; c < n; ++c) dot += o.grad[base + c] * o.value[base + c];
      for (int c = 0; c < n; ++c) {
        xn->grad[base + c] += o.value[base + c] * (o.grad[base + c] - dot);
      }
    }
  });
}

// per-row normalization to zero mean / unit variance (no affine part)
template <class T>
Tensor<T> layer_norm_rows(const Tensor<T>& x, double eps = 1e-5) {
  detail::require_2d(x, "layer_norm");
  const int m = x.rows(), n = x.cols();
  std::vector<T> out(x.values().size());
  std::vector<T> inv_std(m);
  for (int r = 0; r < m; ++r) {
    const T* row = x.values().data() + static_cast<size_t>(r) * n;
    T* orow = out.data() + static_cast<size_t>(r) * n;
    T mu = T(0);
    for (int c = 0; c < n; ++c) mu += row[c];
    mu /= T(n);
    T var = T(0);
    for (int c = 0; c < n; ++c) var += (row[c] - mu) * (row[c] - mu);
    var /= T(n);
    const T is = T(1) / std::sqrt(var + static_cast<T>(eps));
    inv_std[r] = is;
    for (int c = 0; c < n; ++c) orow[c] = (row[c] - mu) * is;
  }
  auto xn = x.node();
  return make_result<T>(
      x.shape(), std::move(out), {x}, [xn, m, n, inv_std](TensorNode<T>& o) {
        if (!xn->requires_grad) return;
        xn->ensure_grad();
        for (int r = 0; r < m; ++r) {
          const size_t base = static_cast<size_t>(r) * n;
          T mean_g = T(0), mean_gy = T(0);
          for (int c = 0; c < n; ++c) {
            mean_g += o.grad[base + c];
            mean_gy += o.grad[base + c] * o.value[base + c];
          }
          mean_g /= T(n);
          mean_gy /= T(n);
          for (int c = 0; c < n; ++c) {
            xn->grad[base + c] += (o.grad[base + c] - mean_g -
                                   o.value[base + c] * mean_gy) *
                                  inv_std[r];
          }
        }
      });
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> out(x.values());
  for (auto& v : out) v = std::max(v, T(0));
  auto xn = x.node();
  return make_result<T>(x.shape(), std::move(out), {x}, [xn](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (size_t i = 0; i < o.grad.size(); ++i) {
      if (xn->value[i] > T(0)) xn->grad[i] += o.grad[i];
    }
  });
}

// exact GELU: x * Phi(x)
template <class T>
Tensor<T> gelu(const Tensor<T>& x) {
  std::vector<T> out(x.values());
  for (auto& v : out) {
    v = static_cast<T>(0.5) * v * (T(1) + std::erf(v * static_cast<T>(M_SQRT1_2)));
  }
  auto xn = x.node();
  return make_result<T>(x.shape(), std::move(out), {x}, [xn](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (size_t i = 0; i < o.grad.size(); ++i) {
      const T v = xn->value[i];
      const T phi = static_cast<T>(0.5) * (T(1) + std::erf(v * static_cast<T>(M_SQRT1_2)));
      const T pdf = std::exp(v * v * static_cast<T>(-0.5)) *
                    static_cast<T>(0.3989422804014327);  // 1/sqrt(2*pi)
      xn->grad[i] += o.grad[i] * (phi + v * pdf);
    }
  });
}

// 1D convolution over the sequence axis, stride 1, zero padding (k-1)/2.
// x: l x c_in, w: {k, c_in, c_out}, b: {1, c_out}.
template <class T>
Tensor<T> conv1d_same(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  detail::require_2d(x, "conv1d_same");
  if (w.shape().size() != 3) {
    throw ShapeMismatch("conv1d_same: weight must be {k, c_in, c_out}, got " +
                        shape_str(w.shape()));
  }
  const int l = x.rows(), cin = x.cols();
  const int k = w.shape()[0], wcin = w.shape()[1], cout = w.shape()[2];
  if (wcin != cin || k % 2 == 0) {
    throw ShapeMismatch("conv1d_same: weight " + shape_str(w.shape()) +
                        " incompatible with input " + shape_str(x.shape()) +
                        " (kernel must be odd)");
  }
  if (b.shape() != Shape{1, cout}) {
    throw ShapeMismatch("conv1d_same: bias " + shape_str(b.shape()) +
                        " must be (1, " + std::to_string(cout) + ")");
  }
  const int off = (k - 1) / 2;
  std::vector<T> out(static_cast<size_t>(l) * cout);
  for (int t = 0; t < l; ++t) {
    T* orow = out.data() + static_cast<size_t>(t) * cout;
    for (int o = 0; o < cout; ++o) orow[o] = b.values()[o];
    for (int j = 0; j < k; ++j) {
      const int src = t + j - off;
      if (src < 0 || src >= l) continue;
      const T* xrow = x.values().data() + static_cast<size_t>(src) * cin;
      const T* wmat = w.values().data() + static_cast<size_t>(j) * cin * cout;
      for (int i = 0; i < cin; ++i) {
        const T xv = xrow[i];
        const T* wrow = wmat + static_cast<size_t>(i) * cout;
        for (int o = 0; o < cout; ++o) orow[o] += xv * wrow[o];
      }
    }
  }
  auto xn = x.node();
  auto wn = w.node();
  auto bn = b.node();
  return make_result<T>(
      {l, cout}, std::move(out), {x, w, b},
      [xn, wn, bn, l, cin, k, cout, off](TensorNode<T>& o) {
        if (bn->requires_grad) {
          bn->ensure_grad();
          for (int t = 0; t < l; ++t) {
            for (int c = 0; c < cout; ++c) {
              bn->grad[c] += o.grad[static_cast<size_t>(t) * cout + c];
            }
          }
        }
        for (int t = 0; t < l; ++t) {
          const T* grow = o.grad.data() + static_cast<size_t>(t) * cout;
          for (int j = 0; j < k; ++j) {
            const int src = t + j - off;
            if (src < 0 || src >= l) continue;
            const size_t wbase = static_cast<size_t>(j) * cin * cout;
            for (int i = 0; i < cin; ++i) {
              const size_t xi = static_cast<size_t>(src) * cin + i;
              const size_t wi = wbase + static_cast<size_t>(i) * cout;
              if (xn->requires_grad) {
                xn->ensure_grad();
                T acc = T(0);
                for (int c = 0; c < cout; ++c) acc += grow[c] * wn->value[wi + c];
                xn->grad[xi] += acc;
              }
              if (wn->requires_grad) {
                wn->ensure_grad();
                const T xv = xn->value[xi];
                for (int c = 0; c < cout; ++c) wn->grad[wi + c] += grow[c] * xv;
              }
            }
          }
        }
      });
}

// view with a new shape (same element count, row-major order preserved)
template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw ShapeMismatch("reshape: cannot view " + shape_str(x.shape()) + " as " +
                        shape_str(shape));
  }
  auto xn = x.node();
  return make_result<T>(std::move(shape), x.values(), {x}, [xn](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (size_t i = 0; i < o.grad.size(); ++i) xn->grad[i] += o.grad[i];
  });
}

// mean cross-entropy between logits (n x classes) and integer labels
template <class T>
Tensor<T> cross_entropy_mean(const Tensor<T>& logits, const std::vector<int>& labels) {
  detail::require_2d(logits, "cross_entropy_mean");
  const int n = logits.rows(), classes = logits.cols();
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeMismatch("cross_entropy_mean: " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(n) + " logit rows");
  }
  for (int label : labels) {
    if (label < 0 || label >= classes) {
      throw ShapeMismatch("cross_entropy_mean: label " + std::to_string(label) +
                          " outside [0, " + std::to_string(classes) + ")");
    }
  }
  T loss = T(0);
  for (int r = 0; r < n; ++r) {
    const T* row = logits.values().data() + static_cast<size_t>(r) * classes;
    T mx = row[0];
    for (int c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
    T denom = T(0);
    for (int c = 0; c < classes; ++c) denom += std::exp(row[c] - mx);
    loss += mx + std::log(denom) - row[labels[r]];
  }
  loss /= T(n);
  auto ln = logits.node();
  return make_result<T>(
      {1}, {loss}, {logits}, [ln, labels, n, classes](TensorNode<T>& o) {
        if (!ln->requires_grad) return;
        ln->ensure_grad();
        const T g = o.grad[0] / T(n);
        for (int r = 0; r < n; ++r) {
          const size_t base = static_cast<size_t>(r) * classes;
          const T* row = ln->value.data() + base;
          T mx = row[0];
          for (int c = 1; c < classes; ++c) mx = std::max(mx, row[c]);
          T denom = T(0);
          for (int c = 0; c < classes; ++c) denom += std::exp(row[c] - mx);
          for (int c = 0; c < classes; ++c) {
            T p = std::exp(row[c] - mx) / denom;
            if (c == labels[r]) p -= T(1);
            ln->grad[base + c] += g * p;
          }
        }
      });
}

template <class T>
Tensor<T> sum(const Tensor<T>& x) {
  T total = T(0);
  for (T v : x.values()) total += v;
  auto xn = x.node();
  return make_result<T>({1}, {total}, {x}, [xn](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (auto& g : xn->grad) g += o.grad[0];
  });
}

template <class T>
Tensor<T> mean(const Tensor<T>& x) {
  T total = T(0);
  for (T v : x.values()) total += v;
  const T denom = static_cast<T>(x.size());
  auto xn = x.node();
  return make_result<T>({1}, {total / denom}, {x}, [xn, denom](TensorNode<T>& o) {
    if (!xn->requires_grad) return;
    xn->ensure_grad();
    for (auto& g : xn->grad) g += o.grad[0] / denom;
  });
}

}  // namespace eat::diff
