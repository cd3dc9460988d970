#include "sketchvos/numerics/ops.hpp"

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <string>

namespace sketchvos::numerics {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

template <typename T>
ConstMatMap<T> as_matrix(const Tensor<T>& t, int rows, int cols) {
  return ConstMatMap<T>(t.data(), rows, cols);
}
template <typename T>
MatMap<T> as_matrix(Tensor<T>& t, int rows, int cols) {
  return MatMap<T>(t.data(), rows, cols);
}

// Gradient buffer of parent i, or nullptr when that parent needs none.
template <typename T>
Tensor<T>* parent_grad(Node<T>& n, std::size_t i) {
  Node<T>& p = *n.parents[i];
  return p.requires_grad ? &p.grad_buffer() : nullptr;
}

template <typename T>
const Tensor<T>& parent_value(const Node<T>& n, std::size_t i) {
  return n.parents[i]->value;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

template <typename T>
void require_rank(const Tensor<T>& t, int rank, const char* op) {
  require(t.rank() == rank, std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                                shape_str(t.shape()));
}

}  // namespace

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  a.value().require_same_shape(b.value(), "add");
  Tensor<T> out = a.value();
  out += b.value();
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& n) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (auto* g = parent_grad(n, i)) *g += n.grad;
    }
  });
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  a.value().require_same_shape(b.value(), "sub");
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) *g += n.grad;
    if (auto* g = parent_grad(n, 1)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] -= n.grad[i];
    }
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  a.value().require_same_shape(b.value(), "mul");
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make_op<T>(std::move(out), {a, b}, [](Node<T>& n) {
    const auto& av = parent_value(n, 0);
    const auto& bv = parent_value(n, 1);
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += n.grad[i] * bv[i];
    }
    if (auto* g = parent_grad(n, 1)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += n.grad[i] * av[i];
    }
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v *= s;
  return make_op<T>(std::move(out), {a}, [s](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += s * n.grad[i];
    }
  });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) v = v > T(0) ? v : T(0);
  return make_op<T>(std::move(out), {x}, [](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      const auto& xv = parent_value(n, 0);
      for (std::size_t i = 0; i < g->size(); ++i) {
        if (xv[i] > T(0)) (*g)[i] += n.grad[i];
      }
    }
  });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  Tensor<T> out = x.value();
  for (auto& v : out.values()) {
    if (v >= T(0)) {
      v = T(1) / (T(1) + std::exp(-v));
    } else {
      const T e = std::exp(v);
      v = e / (T(1) + e);
    }
  }
  return make_op<T>(std::move(out), {x}, [](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) {
        const T y = n.value[i];
        (*g)[i] += n.grad[i] * y * (T(1) - y);
      }
    }
  });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  Tensor<T> out({1}, x.value().sum());
  return make_op<T>(std::move(out), {x}, [](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (auto& v : g->values()) v += n.grad[0];
    }
  });
}

template <typename T>
Var<T> mean(const Var<T>& x) {
  const auto count = static_cast<T>(x.value().size());
  Tensor<T> out({1}, x.value().sum() / count);
  return make_op<T>(std::move(out), {x}, [count](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (auto& v : g->values()) v += n.grad[0] / count;
    }
  });
}

template <typename T>
Var<T> weighted_sum(const Var<T>& x, const Tensor<T>& weights) {
  x.value().require_same_shape(weights, "weighted_sum");
  T acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += x.value()[i] * weights[i];
  return make_op<T>(Tensor<T>({1}, acc), {x}, [weights](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += n.grad[0] * weights[i];
    }
  });
}

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  Tensor<T> out = x.value().reshaped(std::move(shape));
  return make_op<T>(std::move(out), {x}, [](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < g->size(); ++i) (*g)[i] += n.grad[i];
    }
  });
}

template <typename T>
Var<T> slice_flat(const Var<T>& x, std::size_t offset, Shape shape) {
  const std::size_t count = shape_numel(shape);
  require(offset + count <= x.value().size(), "slice_flat: range exceeds input");
  std::vector<T> data(x.value().data() + offset, x.value().data() + offset + count);
  return make_op<T>(Tensor<T>(std::move(shape), std::move(data)), {x}, [offset](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (std::size_t i = 0; i < n.grad.size(); ++i) (*g)[offset + i] += n.grad[i];
    }
  });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& xs) {
  require(!xs.empty(), "concat_channels: no inputs");
  const int h = xs[0].dim(1);
  const int w = xs[0].dim(2);
  int channels = 0;
  for (const auto& x : xs) {
    require_rank(x.value(), 3, "concat_channels");
    require(x.dim(1) == h && x.dim(2) == w, "concat_channels: spatial size mismatch " +
                                                shape_str(xs[0].shape()) + " vs " + shape_str(x.shape()));
    channels += x.dim(0);
  }
  Tensor<T> out({channels, h, w});
  std::size_t offset = 0;
  for (const auto& x : xs) {
    std::copy(x.value().values().begin(), x.value().values().end(), out.data() + offset);
    offset += x.value().size();
  }
  return make_op<T>(std::move(out), xs, [](Node<T>& n) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < n.parents.size(); ++i) {
      const std::size_t len = n.parents[i]->value.size();
      if (auto* g = parent_grad(n, i)) {
        for (std::size_t j = 0; j < len; ++j) (*g)[j] += n.grad[off + j];
      }
      off += len;
    }
  });
}

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  require_rank(a.value(), 2, "matmul");
  require_rank(b.value(), 2, "matmul");
  const int m = a.dim(0), k = a.dim(1), nc = b.dim(1);
  require(b.dim(0) == k, "matmul: inner dimension mismatch " + shape_str(a.shape()) + " * " +
                             shape_str(b.shape()));
  Tensor<T> out({m, nc});
  as_matrix(out, m, nc).noalias() = as_matrix(a.value(), m, k) * as_matrix(b.value(), k, nc);
  return make_op<T>(std::move(out), {a, b}, [m, k, nc](Node<T>& n) {
    auto gout = as_matrix(n.grad, m, nc);
    if (auto* g = parent_grad(n, 0)) {
      as_matrix(*g, m, k).noalias() += gout * as_matrix(parent_value(n, 1), k, nc).transpose();
    }
    if (auto* g = parent_grad(n, 1)) {
      as_matrix(*g, k, nc).noalias() += as_matrix(parent_value(n, 0), m, k).transpose() * gout;
    }
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  require_rank(a.value(), 2, "transpose");
  const int r = a.dim(0), c = a.dim(1);
  Tensor<T> out({c, r});
  as_matrix(out, c, r) = as_matrix(a.value(), r, c).transpose();
  return make_op<T>(std::move(out), {a}, [r, c](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) as_matrix(*g, r, c) += as_matrix(n.grad, c, r).transpose();
  });
}

template <typename T>
Var<T> softmax(const Var<T>& x, int axis) {
  require_rank(x.value(), 2, "softmax");
  if (axis != 0 && axis != 1) throw ShapeError("softmax: axis must be 0 or 1");
  if (!x.value().all_finite()) throw DomainError("softmax: non-finite input");
  const int rows = x.dim(0), cols = x.dim(1);
  Tensor<T> out = x.value();
  // Normalize lines: a line is a row (axis 1) or a column (axis 0).
  const int lines = axis == 1 ? rows : cols;
  const int len = axis == 1 ? cols : rows;
  const std::size_t line_stride = axis == 1 ? static_cast<std::size_t>(cols) : 1;
  const std::size_t elem_stride = axis == 1 ? 1 : static_cast<std::size_t>(cols);
  for (int l = 0; l < lines; ++l) {
    T* base = out.data() + l * line_stride;
    T mx = -std::numeric_limits<T>::infinity();
    for (int i = 0; i < len; ++i) mx = std::max(mx, base[i * elem_stride]);
    T total = 0;
    for (int i = 0; i < len; ++i) {
      T& v = base[i * elem_stride];
      v = std::exp(v - mx);
      total += v;
    }
    for (int i = 0; i < len; ++i) base[i * elem_stride] /= total;
  }
  return make_op<T>(std::move(out), {x},
                    [lines, len, line_stride, elem_stride](Node<T>& n) {
                      auto* g = parent_grad(n, 0);
                      if (!g) return;
                      for (int l = 0; l < lines; ++l) {
                        const std::size_t base = l * line_stride;
                        T dot = 0;
                        for (int i = 0; i < len; ++i) {
                          const std::size_t idx = base + i * elem_stride;
                          dot += n.grad[idx] * n.value[idx];
                        }
                        for (int i = 0; i < len; ++i) {
                          const std::size_t idx = base + i * elem_stride;
                          (*g)[idx] += n.value[idx] * (n.grad[idx] - dot);
                        }
                      }
                    });
}

template <typename T>
Var<T> scaled_dot_scores(const Var<T>& q, const Var<T>& k) {
  require_rank(q.value(), 2, "scaled_dot_scores");
  require_rank(k.value(), 2, "scaled_dot_scores");
  const int c = q.dim(0), p = q.dim(1), r = k.dim(1);
  require(c >= 1, "scaled_dot_scores: channel count must be >= 1");
  require(k.dim(0) == c, "scaled_dot_scores: channel mismatch " + shape_str(q.shape()) + " vs " +
                             shape_str(k.shape()));
  const T inv = T(1) / std::sqrt(static_cast<T>(c));
  Tensor<T> out({p, r});
  as_matrix(out, p, r).noalias() =
      inv * (as_matrix(q.value(), c, p).transpose() * as_matrix(k.value(), c, r));
  return make_op<T>(std::move(out), {q, k}, [c, p, r, inv](Node<T>& n) {
    auto gout = as_matrix(n.grad, p, r);
    if (auto* g = parent_grad(n, 0)) {
      as_matrix(*g, c, p).noalias() += inv * (as_matrix(parent_value(n, 1), c, r) * gout.transpose());
    }
    if (auto* g = parent_grad(n, 1)) {
      as_matrix(*g, c, r).noalias() += inv * (as_matrix(parent_value(n, 0), c, p) * gout);
    }
  });
}

template <typename T>
Var<T> neg_sq_distance(const Var<T>& k, const Var<T>& q) {
  require_rank(k.value(), 2, "neg_sq_distance");
  require_rank(q.value(), 2, "neg_sq_distance");
  const int c = k.dim(0), r = k.dim(1), p = q.dim(1);
  require(q.dim(0) == c, "neg_sq_distance: channel mismatch " + shape_str(k.shape()) + " vs " +
                             shape_str(q.shape()));
  auto km = as_matrix(k.value(), c, r);
  auto qm = as_matrix(q.value(), c, p);
  Tensor<T> out({r, p});
  auto om = as_matrix(out, r, p);
  om.noalias() = T(2) * (km.transpose() * qm);
  const auto kn = km.colwise().squaredNorm().eval();
  const auto qn = qm.colwise().squaredNorm().eval();
  om.colwise() -= kn.transpose();
  om.rowwise() -= qn;
  return make_op<T>(std::move(out), {k, q}, [c, r, p](Node<T>& n) {
    auto gm = as_matrix(n.grad, r, p);
    auto km = as_matrix(parent_value(n, 0), c, r);
    auto qm = as_matrix(parent_value(n, 1), c, p);
    if (auto* g = parent_grad(n, 0)) {
      const auto row_sum = gm.rowwise().sum().eval();  // r
      auto gk = as_matrix(*g, c, r);
      gk.noalias() += T(2) * (qm * gm.transpose());
      gk -= T(2) * (km * row_sum.asDiagonal());
    }
    if (auto* g = parent_grad(n, 1)) {
      const auto col_sum = gm.colwise().sum().eval();  // p
      auto gq = as_matrix(*g, c, p);
      gq.noalias() += T(2) * (km * gm);
      gq -= T(2) * (qm * col_sum.transpose().asDiagonal());
    }
  });
}

namespace {

template <typename T>
void im2col(const T* x, int channels, int h, int w, int k, int stride, int pad, int out_h, int out_w,
            T* col) {
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          T* dst = row + static_cast<std::size_t>(oy) * out_w;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + out_w, T(0));
            continue;
          }
          const T* src = x + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            dst[ox] = (ix >= 0 && ix < w) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, int channels, int h, int w, int k, int stride, int pad, int out_h, int out_w,
            T* x) {
  const std::size_t plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = col + ((static_cast<std::size_t>(c) * k + ky) * k + kx) * plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          T* dst = x + (static_cast<std::size_t>(c) * h + iy) * w;
          const T* src = row + static_cast<std::size_t>(oy) * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, int stride, int pad) {
  require_rank(x.value(), 3, "conv2d input");
  require_rank(w.value(), 4, "conv2d weight");
  require_rank(b.value(), 1, "conv2d bias");
  const int cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const int cout = w.dim(0), k = w.dim(2);
  require(w.dim(1) == cin, "conv2d: weight expects " + std::to_string(w.dim(1)) +
                               " input channels, got " + std::to_string(cin));
  require(w.dim(3) == k && k % 2 == 1, "conv2d: kernel must be square with odd size");
  require(b.dim(0) == cout, "conv2d: bias length mismatch");
  if (stride < 1 || pad < 0) throw ShapeError("conv2d: stride must be >= 1 and pad >= 0");
  const int out_h = (h + 2 * pad - k) / stride + 1;
  const int out_w = (wd + 2 * pad - k) / stride + 1;
  if (h + 2 * pad - k < 0 || wd + 2 * pad - k < 0 || out_h < 1 || out_w < 1) {
    throw ShapeError("conv2d: output dimension < 1 for input " + shape_str(x.shape()));
  }
  const int patch = cin * k * k;
  const int plane = out_h * out_w;
  const bool pointwise = k == 1 && stride == 1 && pad == 0;

  Tensor<T> col;
  if (!pointwise) {
    col = Tensor<T>({patch, plane});
    im2col(x.value().data(), cin, h, wd, k, stride, pad, out_h, out_w, col.data());
  }
  const Tensor<T>& cols = pointwise ? x.value() : col;

  Tensor<T> out({cout, out_h, out_w});
  auto om = as_matrix(out, cout, plane);
  om.noalias() = as_matrix(w.value(), cout, patch) * as_matrix(cols, patch, plane);
  for (int o = 0; o < cout; ++o) om.row(o).array() += b.value()[o];

  return make_op<T>(std::move(out), {x, w, b},
                    [col = std::move(col), pointwise, cin, h, wd, cout, k, stride, pad, out_h, out_w,
                     patch, plane](Node<T>& n) {
                      auto gout = as_matrix(n.grad, cout, plane);
                      const Tensor<T>& cols = pointwise ? parent_value(n, 0) : col;
                      if (auto* g = parent_grad(n, 1)) {
                        as_matrix(*g, cout, patch).noalias() +=
                            gout * as_matrix(cols, patch, plane).transpose();
                      }
                      if (auto* g = parent_grad(n, 2)) {
                        for (int o = 0; o < cout; ++o) (*g)[o] += gout.row(o).sum();
                      }
                      if (auto* g = parent_grad(n, 0)) {
                        auto wm = as_matrix(parent_value(n, 1), cout, patch);
                        if (pointwise) {
                          as_matrix(*g, patch, plane).noalias() += wm.transpose() * gout;
                        } else {
                          RowMat<T> gcol = wm.transpose() * gout;
                          col2im(gcol.data(), cin, h, wd, k, stride, pad, out_h, out_w, g->data());
                        }
                      }
                    });
}

namespace {

struct AxisInterp {
  std::vector<int> lo, hi;
  std::vector<double> frac;
};

AxisInterp half_pixel_axis(int in, int out) {
  AxisInterp a;
  a.lo.resize(out);
  a.hi.resize(out);
  a.frac.resize(out);
  const double ratio = static_cast<double>(in) / out;
  for (int i = 0; i < out; ++i) {
    double src = (i + 0.5) * ratio - 0.5;
    if (src < 0) src = 0;
    int lo = static_cast<int>(std::floor(src));
    if (lo > in - 1) lo = in - 1;
    const int hi = std::min(lo + 1, in - 1);
    a.lo[i] = lo;
    a.hi[i] = hi;
    a.frac[i] = hi == lo ? 0.0 : src - lo;
  }
  return a;
}

}  // namespace

template <typename T>
Var<T> bilinear_resize(const Var<T>& x, int out_h, int out_w) {
  require_rank(x.value(), 3, "bilinear_resize");
  if (out_h < 1 || out_w < 1) throw ShapeError("bilinear_resize: output size must be >= 1");
  const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
  if (h == out_h && w == out_w) return reshape(x, x.shape());
  auto ay = half_pixel_axis(h, out_h);
  auto ax = half_pixel_axis(w, out_w);
  Tensor<T> out({c, out_h, out_w});
  const auto& xv = x.value();
  for (int ch = 0; ch < c; ++ch) {
    for (int oy = 0; oy < out_h; ++oy) {
      const T fy = static_cast<T>(ay.frac[oy]);
      for (int ox = 0; ox < out_w; ++ox) {
        const T fx = static_cast<T>(ax.frac[ox]);
        const T top = xv.at(ch, ay.lo[oy], ax.lo[ox]) * (T(1) - fx) + xv.at(ch, ay.lo[oy], ax.hi[ox]) * fx;
        const T bot = xv.at(ch, ay.hi[oy], ax.lo[ox]) * (T(1) - fx) + xv.at(ch, ay.hi[oy], ax.hi[ox]) * fx;
        out.at(ch, oy, ox) = top * (T(1) - fy) + bot * fy;
      }
    }
  }
  return make_op<T>(std::move(out), {x}, [ay, ax, c, out_h, out_w](Node<T>& n) {
    auto* g = parent_grad(n, 0);
    if (!g) return;
    for (int ch = 0; ch < c; ++ch) {
      for (int oy = 0; oy < out_h; ++oy) {
        const T fy = static_cast<T>(ay.frac[oy]);
        for (int ox = 0; ox < out_w; ++ox) {
          const T fx = static_cast<T>(ax.frac[ox]);
          const T go = n.grad.at(ch, oy, ox);
          g->at(ch, ay.lo[oy], ax.lo[ox]) += go * (T(1) - fy) * (T(1) - fx);
          g->at(ch, ay.lo[oy], ax.hi[ox]) += go * (T(1) - fy) * fx;
          g->at(ch, ay.hi[oy], ax.lo[ox]) += go * fy * (T(1) - fx);
          g->at(ch, ay.hi[oy], ax.hi[ox]) += go * fy * fx;
        }
      }
    }
  });
}

template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  require_rank(x.value(), 3, "global_avg_pool");
  const int c = x.dim(0);
  const int plane = x.dim(1) * x.dim(2);
  Tensor<T> out({c, 1, 1});
  for (int ch = 0; ch < c; ++ch) {
    T s = 0;
    for (int i = 0; i < plane; ++i) s += x.value()[static_cast<std::size_t>(ch) * plane + i];
    out[ch] = s / static_cast<T>(plane);
  }
  return make_op<T>(std::move(out), {x}, [c, plane](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (int ch = 0; ch < c; ++ch) {
        const T v = n.grad[ch] / static_cast<T>(plane);
        for (int i = 0; i < plane; ++i) (*g)[static_cast<std::size_t>(ch) * plane + i] += v;
      }
    }
  });
}

template <typename T>
Var<T> broadcast_spatial(const Var<T>& x, int h, int w) {
  const int c = x.dim(0);
  require(x.value().size() == static_cast<std::size_t>(c), "broadcast_spatial: expects one value per channel");
  const int plane = h * w;
  Tensor<T> out({c, h, w});
  for (int ch = 0; ch < c; ++ch) {
    std::fill(out.data() + static_cast<std::size_t>(ch) * plane,
              out.data() + static_cast<std::size_t>(ch + 1) * plane, x.value()[ch]);
  }
  return make_op<T>(std::move(out), {x}, [c, plane](Node<T>& n) {
    if (auto* g = parent_grad(n, 0)) {
      for (int ch = 0; ch < c; ++ch) {
        T s = 0;
        for (int i = 0; i < plane; ++i) s += n.grad[static_cast<std::size_t>(ch) * plane + i];
        (*g)[ch] += s;
      }
    }
  });
}

template <typename T>
Var<T> bce_loss(const Var<T>& prob, const Tensor<T>& target) {
  prob.value().require_same_shape(target, "bce_loss");
  const T lo = static_cast<T>(kBceClamp);
  const T hi = T(1) - lo;
  const std::size_t count = target.size();
  if (count == 0) throw ShapeError("bce_loss: empty input");
  double acc = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const T t = target[i];
    if (t != T(0) && t != T(1)) throw DomainError("bce_loss: target values must be 0 or 1");
    const T p = std::clamp(prob.value()[i], lo, hi);
    acc += -(t * std::log(p) + (T(1) - t) * std::log(T(1) - p));
  }
  Tensor<T> out({1}, static_cast<T>(acc / static_cast<double>(count)));
  return make_op<T>(std::move(out), {prob}, [target, lo, hi, count](Node<T>& n) {
    auto* g = parent_grad(n, 0);
    if (!g) return;
    const auto& pv = parent_value(n, 0);
    const T scale_factor = n.grad[0] / static_cast<T>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const T p = pv[i];
      if (p < lo || p > hi) continue;
      const T t = target[i];
      (*g)[i] += scale_factor * (-t / p + (T(1) - t) / (T(1) - p));
    }
  });
}

#define SKETCHVOS_INSTANTIATE_OPS(T)                                                       \
  template Var<T> add(const Var<T>&, const Var<T>&);                                       \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                       \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                       \
  template Var<T> scale(const Var<T>&, T);                                                 \
  template Var<T> relu(const Var<T>&);                                                     \
  template Var<T> sigmoid(const Var<T>&);                                                  \
  template Var<T> sum(const Var<T>&);                                                      \
  template Var<T> mean(const Var<T>&);                                                     \
  template Var<T> weighted_sum(const Var<T>&, const Tensor<T>&);                           \
  template Var<T> reshape(const Var<T>&, Shape);                                           \
  template Var<T> slice_flat(const Var<T>&, std::size_t, Shape);                           \
  template Var<T> concat_channels(const std::vector<Var<T>>&);                             \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                    \
  template Var<T> transpose(const Var<T>&);                                                \
  template Var<T> softmax(const Var<T>&, int);                                             \
  template Var<T> scaled_dot_scores(const Var<T>&, const Var<T>&);                         \
  template Var<T> neg_sq_distance(const Var<T>&, const Var<T>&);                           \
  template Var<T> conv2d(const Var<T>&, const Var<T>&, const Var<T>&, int, int);           \
  template Var<T> bilinear_resize(const Var<T>&, int, int);                                \
  template Var<T> global_avg_pool(const Var<T>&);                                          \
  template Var<T> broadcast_spatial(const Var<T>&, int, int);                              \
  template Var<T> bce_loss(const Var<T>&, const Tensor<T>&);

SKETCHVOS_INSTANTIATE_OPS(float)
SKETCHVOS_INSTANTIATE_OPS(double)

}  // namespace sketchvos::numerics
