#include "tsdsae/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tsdsae/kernels.hpp"

namespace tsdsae {

namespace detail {

// Propagation never touches the persistent grads directly, so repeated
// backward calls on one tape accumulate instead of double-counting
// already-propagated paths.
class GradAccumulator {
 public:
  const std::vector<double>* find(const TensorImpl* t) const {
    auto it = grads_.find(t);
    return it == grads_.end() ? nullptr : &it->second;
  }

  std::vector<double>& acc(const std::shared_ptr<TensorImpl>& t) {
    auto it = grads_.find(t.get());
    if (it == grads_.end()) {
      it = grads_.emplace(t.get(), std::vector<double>(t->data.size(), 0.0))
               .first;
    }
    return it->second;
  }

  const std::unordered_map<const TensorImpl*, std::vector<double>>& entries()
      const {
    return grads_;
  }

 private:
  std::unordered_map<const TensorImpl*, std::vector<double>> grads_;
};

}  // namespace detail

namespace {

std::atomic<std::int64_t> g_next_id{1};

using ImplPtr = std::shared_ptr<detail::TensorImpl>;
using GradStore = detail::GradAccumulator;

void record_node(ImplPtr out, BackwardFn fn) {
  Tape& t = Tape::active();
  if (!t.recording()) return;
  t.record_node(std::move(out), std::move(fn));
}

}  // namespace

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << 'x';
    os << s[i];
  }
  os << ']';
  return os.str();
}

int shape_size(const Shape& s) {
  int n = 1;
  for (int e : s) n *= e;
  return n;
}

// --- Tensor -----------------------------------------------------------------

Tensor make_tensor(Shape shape) {
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->id = g_next_id.fetch_add(1, std::memory_order_relaxed);
  impl->data.assign(static_cast<std::size_t>(shape_size(shape)), 0.0);
  impl->shape = std::move(shape);
  return Tensor(std::move(impl));
}

Tensor Tensor::zeros(const Shape& shape) { return make_tensor(shape); }

Tensor Tensor::full(const Shape& shape, double value) {
  Tensor t = make_tensor(shape);
  std::fill(t.impl_->data.begin(), t.impl_->data.end(), value);
  return t;
}

Tensor Tensor::scalar(double value) { return full({}, value); }

Tensor Tensor::from(const Shape& shape, std::vector<double> values) {
  if (static_cast<int>(values.size()) != shape_size(shape)) {
    throw DimensionError("value count " + std::to_string(values.size()) +
                         " does not fill shape " + shape_str(shape));
  }
  Tensor t = make_tensor(shape);
  t.impl_->data = std::move(values);
  return t;
}

Tensor Tensor::normal(const Shape& shape, Rng& rng) {
  Tensor t = make_tensor(shape);
  rng.fill_normal(t.data());
  return t;
}

int Tensor::extent(int axis) const {
  if (axis < 0 || axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(shape()));
  }
  return impl_->shape[static_cast<std::size_t>(axis)];
}

double Tensor::value() const {
  if (!defined() || size() != 1) {
    throw ContractError("value() requires a single-element tensor, got " +
                        (defined() ? shape_str(shape()) : std::string("null")));
  }
  return impl_->data[0];
}

std::span<double> Tensor::grad() {
  if (!has_grad()) {
    throw ContractError("gradient not allocated for tensor of shape " +
                        shape_str(shape()));
  }
  return impl_->grad;
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) {
    throw ContractError("gradient not allocated for tensor of shape " +
                        shape_str(shape()));
  }
  return impl_->grad;
}

void Tensor::ensure_grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), 0.0);
}

void Tensor::zero_grad() {
  impl_->grad.assign(impl_->data.size(), 0.0);
}

void Tensor::drop_grad() { impl_->grad.clear(); }

Tensor Tensor::clone() const {
  Tensor t = make_tensor(impl_->shape);
  t.impl_->data = impl_->data;
  return t;
}

// --- Tape -------------------------------------------------------------------

Tape& Tape::active() {
  static thread_local Tape tape;
  return tape;
}

void Tape::clear() { nodes_.clear(); }

void Tape::record_node(std::shared_ptr<detail::TensorImpl> out,
                       BackwardFn fn) {
  nodes_.push_back({std::move(out), std::move(fn)});
}

void Tape::backward(const Tensor& loss) {
  if (loss.size() != 1) {
    throw ContractError("backward requires a scalar loss, got shape " +
                        shape_str(loss.shape()));
  }
  GradStore store;
  store.acc(loss.impl())[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (store.find(it->out.get()) != nullptr) it->back(store);
  }
  // Leaves always receive persistent grads; intermediates only when the
  // caller pre-allocated one (e.g. to inspect it).
  std::unordered_set<const detail::TensorImpl*> produced;
  produced.reserve(nodes_.size());
  for (const auto& n : nodes_) produced.insert(n.out.get());
  for (const auto& [impl, g] : store.entries()) {
    auto* mut = const_cast<detail::TensorImpl*>(impl);
    const bool is_leaf = produced.find(impl) == produced.end();
    if (!is_leaf && mut->grad.empty()) continue;
    if (mut->grad.empty()) mut->grad.assign(mut->data.size(), 0.0);
    kern::axpy(g.size(), 1.0, g.data(), mut->grad.data());
  }
}

void backward(const Tensor& loss) { Tape::active().backward(loss); }

// --- broadcast machinery ----------------------------------------------------

namespace {

struct BcastPlan {
  bool same = false;
  // Fast path: b's shape equals a trailing suffix of a's shape.
  bool suffix = false;
  std::size_t lead = 1;   // product of a's leading extents (suffix case)
  std::size_t bsize = 1;  // element count of b
  // General case: per-axis extents of a and the matching stride into b
  // (0 on broadcast axes).
  std::vector<int> dims;
  std::vector<std::size_t> bstride;
};

BcastPlan make_bcast_plan(const Shape& a, const Shape& b) {
  if (b.size() > a.size()) {
    throw DimensionError("cannot broadcast " + shape_str(b) + " onto " +
                         shape_str(a));
  }
  BcastPlan plan;
  plan.bsize = static_cast<std::size_t>(shape_size(b));
  if (a == b) {
    plan.same = true;
    return plan;
  }
  const std::size_t offset = a.size() - b.size();
  plan.dims.assign(a.begin(), a.end());
  plan.bstride.assign(a.size(), 0);
  std::size_t stride = 1;
  bool suffix = true;
  for (std::size_t i = b.size(); i-- > 0;) {
    const int be = b[i];
    const int ae = a[offset + i];
    if (be == ae) {
      plan.bstride[offset + i] = stride;
    } else if (be == 1) {
      plan.bstride[offset + i] = 0;
      suffix = false;
    } else {
      throw DimensionError("cannot broadcast " + shape_str(b) + " onto " +
                           shape_str(a));
    }
    stride *= static_cast<std::size_t>(be);
  }
  plan.suffix = suffix;
  if (suffix) {
    std::size_t lead = 1;
    for (std::size_t i = 0; i < offset; ++i) {
      lead *= static_cast<std::size_t>(a[i]);
    }
    plan.lead = lead;
  }
  return plan;
}

// Calls fn(a_flat_index, b_flat_index) over a's elements in row-major order.
template <typename Fn>
void for_each_bcast(const BcastPlan& plan, std::size_t total, Fn&& fn) {
  const std::size_t rank = plan.dims.size();
  std::vector<std::size_t> idx(rank, 0);
  std::size_t bi = 0;
  for (std::size_t ai = 0; ai < total; ++ai) {
    fn(ai, bi);
    for (std::size_t d = rank; d-- > 0;) {
      idx[d]++;
      bi += plan.bstride[d];
      if (idx[d] < static_cast<std::size_t>(plan.dims[d])) break;
      bi -= plan.bstride[d] * static_cast<std::size_t>(plan.dims[d]);
      idx[d] = 0;
    }
  }
}

Tensor binary_op(kern::Binary op, const Tensor& a, const Tensor& b) {
  const BcastPlan plan = make_bcast_plan(a.shape(), b.shape());
  Tensor out = make_tensor(a.shape());
  const std::size_t n = static_cast<std::size_t>(a.size());
  const double* ap = a.data().data();
  const double* bp = b.data().data();
  double* yp = out.data().data();
  if (plan.same) {
    kern::binary_forward(op, n, ap, bp, yp);
  } else if (plan.suffix) {
    for (std::size_t l = 0; l < plan.lead; ++l) {
      kern::binary_forward(op, plan.bsize, ap + l * plan.bsize, bp,
                           yp + l * plan.bsize);
    }
  } else {
    for_each_bcast(plan, n, [&](std::size_t ai, std::size_t bi) {
      switch (op) {
        case kern::Binary::Add:
          yp[ai] = ap[ai] + bp[bi];
          break;
        case kern::Binary::Sub:
          yp[ai] = ap[ai] - bp[bi];
          break;
        case kern::Binary::Mul:
          yp[ai] = ap[ai] * bp[bi];
          break;
      }
    });
  }

  auto ai = a.impl();
  auto bi_ = b.impl();
  auto oi = out.impl();
  record_node(oi, [op, plan, n, ai, bi_, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    const double* gp = g->data();
    // d/da
    {
      std::vector<double>& ga = store.acc(ai);
      if (plan.same) {
        kern::binary_backward_a(op, n, bi_->data.data(), gp, ga.data());
      } else if (plan.suffix) {
        for (std::size_t l = 0; l < plan.lead; ++l) {
          kern::binary_backward_a(op, plan.bsize, bi_->data.data(),
                                  gp + l * plan.bsize, ga.data() + l * plan.bsize);
        }
      } else {
        const double* bp = bi_->data.data();
        for_each_bcast(plan, n, [&](std::size_t i, std::size_t j) {
          ga[i] += (op == kern::Binary::Mul) ? bp[j] * gp[i] : gp[i];
        });
      }
    }
    // d/db, summing over broadcast axes in a's row-major order
    {
      std::vector<double>& gb = store.acc(bi_);
      if (plan.same) {
        kern::binary_backward_b(op, n, ai->data.data(), gp, gb.data());
      } else if (plan.suffix) {
        for (std::size_t l = 0; l < plan.lead; ++l) {
          kern::binary_backward_b(op, plan.bsize, ai->data.data() + l * plan.bsize,
                                  gp + l * plan.bsize, gb.data());
        }
      } else {
        const double* ap = ai->data.data();
        for_each_bcast(plan, n, [&](std::size_t i, std::size_t j) {
          switch (op) {
            case kern::Binary::Add:
              gb[j] += gp[i];
              break;
            case kern::Binary::Sub:
              gb[j] -= gp[i];
              break;
            case kern::Binary::Mul:
              gb[j] += ap[i] * gp[i];
              break;
          }
        });
      }
    }
  });
  return out;
}

Tensor unary_op(kern::Unary op, const Tensor& a, double c = 0.0) {
  if (op == kern::Unary::Log) {
    const auto d = a.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0)) {
        throw DomainError("log of non-positive value " + std::to_string(d[i]) +
                          " at flat index " + std::to_string(i));
      }
    }
  }
  Tensor out = make_tensor(a.shape());
  const std::size_t n = static_cast<std::size_t>(a.size());
  kern::unary_forward(op, n, a.data().data(), out.data().data(), c);
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [op, c, n, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    kern::unary_backward(op, n, ai->data.data(), oi->data.data(), g->data(),
                         ga.data(), c);
  });
  return out;
}

}  // namespace

// --- public ops -------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.shape()[1] != b.shape()[0]) {
    throw DimensionError("matmul shapes do not agree: " + shape_str(a.shape()) +
                         " x " + shape_str(b.shape()));
  }
  const int m = a.shape()[0];
  const int k = a.shape()[1];
  const int n = b.shape()[1];
  Tensor out = make_tensor({m, n});
  kern::gemm(false, false, m, n, k, a.data().data(), b.data().data(),
             out.data().data(), false);
  auto ai = a.impl();
  auto bi = b.impl();
  auto oi = out.impl();
  record_node(oi, [m, n, k, ai, bi, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    // dA = g . B^T, dB = A^T . g
    std::vector<double>& ga = store.acc(ai);
    kern::gemm(false, true, m, k, n, g->data(), bi->data.data(), ga.data(),
               true);
    std::vector<double>& gb = store.acc(bi);
    kern::gemm(true, false, k, n, m, ai->data.data(), g->data(), gb.data(),
               true);
  });
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(kern::Binary::Add, a, b);
}
Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(kern::Binary::Sub, a, b);
}
Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(kern::Binary::Mul, a, b);
}

Tensor tanh(const Tensor& a) { return unary_op(kern::Unary::Tanh, a); }
Tensor sigmoid(const Tensor& a) { return unary_op(kern::Unary::Sigmoid, a); }
Tensor exp(const Tensor& a) { return unary_op(kern::Unary::Exp, a); }
Tensor log(const Tensor& a) { return unary_op(kern::Unary::Log, a); }
Tensor negate(const Tensor& a) { return unary_op(kern::Unary::Negate, a); }
Tensor square(const Tensor& a) { return unary_op(kern::Unary::Square, a); }
Tensor scale(const Tensor& a, double c) {
  return unary_op(kern::Unary::Scale, a, c);
}
Tensor shift(const Tensor& a, double c) {
  return unary_op(kern::Unary::Shift, a, c);
}

namespace {

struct AxisSplit {
  std::size_t outer = 1, axis = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, int axis) {
  if (axis < 0 || axis >= static_cast<int>(s.size())) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_str(s));
  }
  AxisSplit sp;
  for (int i = 0; i < axis; ++i) sp.outer *= static_cast<std::size_t>(s[static_cast<std::size_t>(i)]);
  sp.axis = static_cast<std::size_t>(s[static_cast<std::size_t>(axis)]);
  for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < s.size(); ++i) {
    sp.inner *= static_cast<std::size_t>(s[i]);
  }
  return sp;
}

Tensor reduce_op(const Tensor& a, int axis, bool mean) {
  const AxisSplit sp = split_at(a.shape(), axis);
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + axis);
  Tensor out = make_tensor(out_shape);
  kern::reduce_axis(sp.outer, sp.axis, sp.inner, a.data().data(),
                    out.data().data(), mean);
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [sp, mean, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    kern::reduce_axis_backward(sp.outer, sp.axis, sp.inner, g->data(),
                               ga.data(), mean);
  });
  return out;
}

Tensor reduce_all_op(const Tensor& a, bool mean) {
  const std::size_t n = static_cast<std::size_t>(a.size());
  const double scale = mean ? 1.0 / static_cast<double>(n) : 1.0;
  double acc = 0.0;
  const double* p = a.data().data();
  for (std::size_t i = 0; i < n; ++i) acc += p[i];
  Tensor out = Tensor::scalar(acc * scale);
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [n, scale, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    const double gv = (*g)[0] * scale;
    for (std::size_t i = 0; i < n; ++i) ga[i] += gv;
  });
  return out;
}

}  // namespace

Tensor reduce_sum(const Tensor& a, int axis) { return reduce_op(a, axis, false); }
Tensor reduce_mean(const Tensor& a, int axis) { return reduce_op(a, axis, true); }
Tensor reduce_sum_all(const Tensor& a) { return reduce_all_op(a, false); }
Tensor reduce_mean_all(const Tensor& a) { return reduce_all_op(a, true); }

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ContractError("concat of zero tensors");
  const Shape& first = parts[0].shape();
  int total = 0;
  for (const Tensor& p : parts) {
    if (p.rank() != parts[0].rank()) {
      throw DimensionError("concat rank mismatch: " + shape_str(first) +
                           " vs " + shape_str(p.shape()));
    }
    for (int d = 0; d < p.rank(); ++d) {
      if (d != axis && p.shape()[static_cast<std::size_t>(d)] != first[static_cast<std::size_t>(d)]) {
        throw DimensionError("concat extent mismatch on axis " +
                             std::to_string(d) + ": " + shape_str(first) +
                             " vs " + shape_str(p.shape()));
      }
    }
    total += p.extent(axis);
  }
  Shape out_shape = first;
  out_shape[static_cast<std::size_t>(axis)] = total;
  Tensor out = make_tensor(out_shape);
  const AxisSplit osp = split_at(out_shape, axis);
  std::size_t seg_off = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> seglens;
  for (const Tensor& p : parts) {
    const std::size_t seg = static_cast<std::size_t>(p.extent(axis)) * osp.inner;
    offsets.push_back(seg_off);
    seglens.push_back(seg);
    const double* src = p.data().data();
    double* dst = out.data().data();
    for (std::size_t o = 0; o < osp.outer; ++o) {
      std::memcpy(dst + o * osp.axis * osp.inner + seg_off, src + o * seg,
                  seg * sizeof(double));
    }
    seg_off += seg;
  }
  std::vector<ImplPtr> impls;
  for (const Tensor& p : parts) impls.push_back(p.impl());
  auto oi = out.impl();
  record_node(oi, [osp, offsets, seglens, impls, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    for (std::size_t pi = 0; pi < impls.size(); ++pi) {
      std::vector<double>& gp = store.acc(impls[pi]);
      const std::size_t seg = seglens[pi];
      for (std::size_t o = 0; o < osp.outer; ++o) {
        const double* src = g->data() + o * osp.axis * osp.inner + offsets[pi];
        kern::axpy(seg, 1.0, src, gp.data() + o * seg);
      }
    }
  });
  return out;
}

Tensor slice(const Tensor& a, int axis, int start, int len) {
  const AxisSplit sp = split_at(a.shape(), axis);
  if (start < 0 || len <= 0 ||
      start + len > static_cast<int>(sp.axis)) {
    throw DimensionError("slice [" + std::to_string(start) + ", " +
                         std::to_string(start + len) + ") exceeds extent " +
                         std::to_string(sp.axis) + " of shape " +
                         shape_str(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[static_cast<std::size_t>(axis)] = len;
  Tensor out = make_tensor(out_shape);
  const std::size_t seg = static_cast<std::size_t>(len) * sp.inner;
  const std::size_t off = static_cast<std::size_t>(start) * sp.inner;
  const double* src = a.data().data();
  double* dst = out.data().data();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    std::memcpy(dst + o * seg, src + o * sp.axis * sp.inner + off,
                seg * sizeof(double));
  }
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [sp, seg, off, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    for (std::size_t o = 0; o < sp.outer; ++o) {
      kern::axpy(seg, 1.0, g->data() + o * seg,
                 ga.data() + o * sp.axis * sp.inner + off);
    }
  });
  return out;
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  if (shape_size(shape) != a.size()) {
    throw DimensionError("reshape " + shape_str(a.shape()) + " -> " +
                         shape_str(shape) + " changes element count");
  }
  Tensor out = make_tensor(shape);
  std::copy(a.data().begin(), a.data().end(), out.data().begin());
  auto ai = a.impl();
  auto oi = out.impl();
  const std::size_t n = static_cast<std::size_t>(a.size());
  record_node(oi, [n, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    kern::axpy(n, 1.0, g->data(), ga.data());
  });
  return out;
}

Tensor tile_axis(const Tensor& a, int axis, int n) {
  const AxisSplit sp = split_at(a.shape(), axis);
  if (sp.axis != 1) {
    throw DimensionError("tile_axis requires extent 1 at axis " +
                         std::to_string(axis) + ", got " +
                         shape_str(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[static_cast<std::size_t>(axis)] = n;
  Tensor out = make_tensor(out_shape);
  const double* src = a.data().data();
  double* dst = out.data().data();
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (int r = 0; r < n; ++r) {
      std::memcpy(dst + (o * static_cast<std::size_t>(n) + static_cast<std::size_t>(r)) * sp.inner,
                  src + o * sp.inner, sp.inner * sizeof(double));
    }
  }
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [sp, n, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (int r = 0; r < n; ++r) {
        kern::axpy(sp.inner, 1.0,
                   g->data() + (o * static_cast<std::size_t>(n) +
                                static_cast<std::size_t>(r)) * sp.inner,
                   ga.data() + o * sp.inner);
      }
    }
  });
  return out;
}

Tensor permute_rows(const Tensor& a, const std::vector<int>& perm) {
  if (a.rank() < 1 || static_cast<int>(perm.size()) != a.extent(0)) {
    throw ContractError("permutation size " + std::to_string(perm.size()) +
                        " does not match leading extent of " +
                        shape_str(a.shape()));
  }
  const int rows = a.extent(0);
  std::vector<char> seen(static_cast<std::size_t>(rows), 0);
  for (int p : perm) {
    if (p < 0 || p >= rows || seen[static_cast<std::size_t>(p)]) {
      throw ContractError("permute_rows argument is not a permutation");
    }
    seen[static_cast<std::size_t>(p)] = 1;
  }
  const std::size_t inner = static_cast<std::size_t>(a.size()) /
                            static_cast<std::size_t>(rows);
  Tensor out = make_tensor(a.shape());
  const double* src = a.data().data();
  double* dst = out.data().data();
  for (int i = 0; i < rows; ++i) {
    std::memcpy(dst + static_cast<std::size_t>(i) * inner,
                src + static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * inner,
                inner * sizeof(double));
  }
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [perm, inner, rows, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    for (int i = 0; i < rows; ++i) {
      kern::axpy(inner, 1.0, g->data() + static_cast<std::size_t>(i) * inner,
                 ga.data() + static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]) * inner);
    }
  });
  return out;
}

Tensor detach(const Tensor& a) { return a.clone(); }

Tensor custom_unary_op(const Tensor& a,
                       const std::function<double(double)>& f,
                       const std::function<double(double, double)>& dfdx) {
  Tensor out = make_tensor(a.shape());
  const std::size_t n = static_cast<std::size_t>(a.size());
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = f(a.data()[i]);
  auto ai = a.impl();
  auto oi = out.impl();
  record_node(oi, [n, dfdx, ai, oi](GradStore& store) {
    const std::vector<double>* g = store.find(oi.get());
    if (!g) return;
    std::vector<double>& ga = store.acc(ai);
    for (std::size_t i = 0; i < n; ++i) {
      ga[i] += dfdx(ai->data[i], oi->data[i]) * (*g)[i];
    }
  });
  return out;
}

}  // namespace tsdsae
