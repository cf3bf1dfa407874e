#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sigkan/errors.hpp"

namespace sigkan {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);
std::size_t shape_size(const Shape& s);  // product of extents, 1 for rank 0

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a backward pass allocates it
  bool requires_grad = false;
  std::string name;
};

}  // namespace detail

/// Dense row-major float-64 tensor. A Tensor is a shared handle onto its
/// storage node; values are written only at construction time (and by the
/// optimizer, which is the single writer of parameter state). The gradient
/// accumulator lives on the node and is managed by the Tape.
class Tensor {
 public:
  Tensor() = default;

  static Tensor scalar(double v);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);
  static Tensor from(Shape shape, std::vector<double> data);
  /// Named leaf participating in gradient accumulation.
  static Tensor param(std::string name, Shape shape, std::vector<double> data);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::span<const double> values() const;
  /// Mutable view of the payload; intended for initializers and the optimizer.
  std::span<double> mutable_values();
  std::span<const double> grad() const;
  bool has_grad() const;
  bool requires_grad() const;
  void set_requires_grad(bool on);
  const std::string& name() const;
  /// Value of a one-element tensor.
  double item() const;

  std::shared_ptr<detail::TensorNode> node() const { return node_; }
  /// Adopts an existing node; used by fused ops that record custom backward rules.
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::TensorNode> node_;
};

/// Reverse-mode tape. Constructing a Tape makes it the active tape of the
/// current thread (define-by-run); primitives record themselves onto it.
/// Destruction restores the previously active tape. Ops executed with no
/// active tape run in inference mode and record nothing.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() noexcept;

  /// Records one primitive. `backward` reads output->grad and accumulates
  /// (+=) into each input's grad. Inputs must already exist: recording order
  /// is the topological order.
  void record(const char* op_name,
              std::vector<std::shared_ptr<detail::TensorNode>> inputs,
              std::shared_ptr<detail::TensorNode> output,
              std::function<void()> backward);

  /// Zeroes every touched accumulator, seeds d(loss)/d(loss)=1 and replays
  /// the recorded ops once, in reverse order.
  void backward(const Tensor& loss);

  std::size_t num_ops() const { return records_.size(); }
  void clear();

 private:
  struct Record {
    const char* name;
    std::vector<std::shared_ptr<detail::TensorNode>> inputs;
    std::shared_ptr<detail::TensorNode> output;
    std::function<void()> backward;
  };
  std::vector<Record> records_;
  Tape* prev_ = nullptr;
};

// --- primitives ---------------------------------------------------------
// Elementwise binary ops broadcast numpy-style after right-aligning shapes,
// but only unit extents may stretch; any other disagreement is a shape error.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // Hadamard
Tensor div(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);

/// 2-d x 2-d, 2-d x 1-d and 1-d x 2-d products.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sigmoid(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor elu(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor sqrt(const Tensor& x);

/// Softmax over the last axis, computed with the max-shift for stability.
Tensor softmax(const Tensor& x);

Tensor mean_all(const Tensor& x);  // rank-0 result
Tensor sum_all(const Tensor& x);   // rank-0 result
/// Mean over the last axis, keeping it as a unit extent.
Tensor mean_last(const Tensor& x);
/// Population variance over the last axis, keeping it as a unit extent.
Tensor variance_last(const Tensor& x);

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t len);
Tensor reshape(const Tensor& x, Shape new_shape);
Tensor flatten(const Tensor& x);
/// Select rows of a 2-d tensor by index (duplicates allowed).
Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& rows);

// Scalar activation values, shared with fused ops elsewhere.
double sigmoid_val(double x);
double silu_val(double x);
double silu_deriv(double x);
double elu_val(double x);
double elu_deriv(double x);

}  // namespace sigkan
