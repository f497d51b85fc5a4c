#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsdsae/rng.hpp"

namespace tsdsae {

using Shape = std::vector<int>;

// Shape or axis violations; the message names the offending shapes.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API preconditions (non-scalar backward, missing gradient, bad pairing...).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Math domain violations (log of a non-positive value).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shape_str(const Shape& s);
int shape_size(const Shape& s);

namespace detail {

struct TensorImpl {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty means "no gradient allocated"
  std::int64_t id = 0;
};

// Per-backward-pass gradient buffers; defined in tensor.cpp.
class GradAccumulator;

}  // namespace detail

using BackwardFn = std::function<void(detail::GradAccumulator&)>;

// Dense row-major array of doubles. Copying a Tensor copies the handle;
// clone() copies storage. Arithmetic on Tensors records backward rules on the
// thread's active Tape (when recording is on), so gradients of any scalar
// result can be pulled back with backward().
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(const Shape& shape);
  static Tensor full(const Shape& shape, double value);
  static Tensor scalar(double value);
  static Tensor from(const Shape& shape, std::vector<double> values);
  static Tensor normal(const Shape& shape, Rng& rng);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  int size() const { return static_cast<int>(impl_->data.size()); }
  int extent(int axis) const;

  std::span<double> data() { return impl_->data; }
  std::span<const double> data() const { return impl_->data; }
  double& at(int flat_index) { return impl_->data[static_cast<std::size_t>(flat_index)]; }
  double at(int flat_index) const { return impl_->data[static_cast<std::size_t>(flat_index)]; }

  // Value of a single-element tensor.
  double value() const;

  bool has_grad() const { return defined() && !impl_->grad.empty(); }
  std::span<double> grad();
  std::span<const double> grad() const;
  // Allocates a zero gradient if absent; keeps an existing one.
  void ensure_grad();
  void zero_grad();
  void drop_grad();

  std::int64_t id() const { return impl_->id; }
  Tensor clone() const;

  std::shared_ptr<detail::TensorImpl> impl() const { return impl_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<detail::TensorImpl> impl_;

  friend Tensor make_tensor(Shape shape);
};

Tensor make_tensor(Shape shape);

// Define-by-run tape. Operations append a node per result; backward() replays
// the nodes in reverse, visiting each exactly once. Construction and backward
// are single-threaded per tape; each thread has its own active tape. Nodes
// are rebuilt each forward pass: call clear() between steps.
class Tape {
 public:
  static Tape& active();

  void clear();
  std::size_t size() const { return nodes_.size(); }
  bool recording() const { return recording_; }
  void set_recording(bool on) { recording_ = on; }

  void record_node(std::shared_ptr<detail::TensorImpl> out, BackwardFn fn);

  // Accumulates d loss / d t into the persistent grad of every leaf the loss
  // depends on (and of any intermediate whose grad was pre-allocated).
  // Repeated calls accumulate: grads of a sum of losses equal the sum of
  // grads from separate passes.
  void backward(const Tensor& loss);

 private:
  struct Node {
    std::shared_ptr<detail::TensorImpl> out;
    BackwardFn back;
  };
  std::vector<Node> nodes_;
  bool recording_ = true;
};

// Turns off tape recording for the current scope (forward-only evaluation).
class NoGradGuard {
 public:
  NoGradGuard() : prev_(Tape::active().recording()) {
    Tape::active().set_recording(false);
  }
  ~NoGradGuard() { Tape::active().set_recording(prev_); }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

// --- differentiable operations ---------------------------------------------
//
// Broadcast rule for binary ops: shapes are aligned at the trailing axes; b
// may omit leading axes, and each aligned extent of b must equal a's extent
// or be 1. The result always has a's shape, and b's gradient sums over the
// broadcast axes.

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor negate(const Tensor& a);
Tensor square(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor shift(const Tensor& a, double c);

Tensor reduce_sum(const Tensor& a, int axis);
Tensor reduce_mean(const Tensor& a, int axis);
Tensor reduce_sum_all(const Tensor& a);
Tensor reduce_mean_all(const Tensor& a);

Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& a, int axis, int start, int len);
Tensor reshape(const Tensor& a, const Shape& shape);
// Replicates an axis of extent 1 to extent n.
Tensor tile_axis(const Tensor& a, int axis, int n);
// Reorders along axis 0: out[i] = a[perm[i]]; perm must be a permutation.
Tensor permute_rows(const Tensor& a, const std::vector<int>& perm);

// Copies values into a fresh leaf; gradients do not flow through.
Tensor detach(const Tensor& a);

// Entry point of reverse mode; loss must hold exactly one element.
void backward(const Tensor& loss);

// Test seam: records a custom node computing `out` from `a` with the given
// backward rule. Used by the gradient-check harness for fault injection.
Tensor custom_unary_op(const Tensor& a,
                       const std::function<double(double)>& f,
                       const std::function<double(double, double)>& dfdx);

}  // namespace tsdsae
