#include "sigkan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace sigkan {

using detail::TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

namespace {

thread_local Tape* g_active_tape = nullptr;

[[noreturn]] void shape_error(const char* op, const std::string& detail) {
  throw ValidationError(std::string(op) + ": " + detail);
}

NodePtr make_node(Shape shape, std::vector<double> data) {
  auto n = std::make_shared<TensorNode>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  return n;
}

void ensure_grad(TensorNode& n) {
  if (n.grad.size() != n.value.size()) n.grad.assign(n.value.size(), 0.0);
}

// Right-aligned broadcast of two shapes; only unit extents may stretch.
struct BroadcastPlan {
  Shape out_shape;
  bool identity = false;             // shapes were equal
  std::vector<std::size_t> a_index;  // per output element, flat index into a/b
  std::vector<std::size_t> b_index;
};

BroadcastPlan plan_broadcast(const char* op, const Shape& a, const Shape& b) {
  BroadcastPlan plan;
  if (a == b) {
    plan.out_shape = a;
    plan.identity = true;
    return plan;
  }
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank), ea(rank), eb(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = (i >= rank - a.size()) ? a[i - (rank - a.size())] : 1;
    const std::size_t db = (i >= rank - b.size()) ? b[i - (rank - b.size())] : 1;
    if (da != db && da != 1 && db != 1)
      shape_error(op, "cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    ea[i] = da;
    eb[i] = db;
    out[i] = std::max(da, db);
  }
  plan.out_shape = out;
  const std::size_t n = shape_size(out);
  plan.a_index.resize(n);
  plan.b_index.resize(n);
  // row-major strides, zero where an operand is broadcast along the axis
  std::vector<std::size_t> sa(rank, 0), sb(rank, 0), so(rank, 0);
  std::size_t acc = 1;
  for (std::size_t i = rank; i-- > 0;) {
    so[i] = acc;
    acc *= out[i];
  }
  acc = 1;
  for (std::size_t i = rank; i-- > 0;) {
    sa[i] = (ea[i] == 1) ? 0 : acc;
    if (ea[i] != 1) acc *= ea[i];
  }
  acc = 1;
  for (std::size_t i = rank; i-- > 0;) {
    sb[i] = (eb[i] == 1) ? 0 : acc;
    if (eb[i] != 1) acc *= eb[i];
  }
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat, ia = 0, ib = 0;
    for (std::size_t i = 0; i < rank; ++i) {
      const std::size_t idx = rem / so[i];
      rem %= so[i];
      ia += idx * sa[i];
      ib += idx * sb[i];
    }
    plan.a_index[flat] = ia;
    plan.b_index[flat] = ib;
  }
  return plan;
}

void record_op(const char* name, std::vector<NodePtr> inputs, NodePtr output,
               std::function<void()> backward) {
  if (Tape* t = Tape::active()) t->record(name, std::move(inputs), std::move(output), std::move(backward));
}

// Elementwise binary op with broadcasting. dfa/dfb compute the partials
// with respect to a and b from the operand values.
template <class F, class Dfa, class Dfb>
Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, F f, Dfa dfa, Dfb dfb) {
  auto an = a.node();
  auto bn = b.node();
  if (!an || !bn) shape_error(name, "undefined operand");
  BroadcastPlan plan = plan_broadcast(name, an->shape, bn->shape);
  const std::size_t n = shape_size(plan.out_shape);
  std::vector<double> out(n);
  if (plan.identity) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(an->value[i], bn->value[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = f(an->value[plan.a_index[i]], bn->value[plan.b_index[i]]);
  }
  auto on = make_node(plan.out_shape, std::move(out));
  record_op(name, {an, bn}, on, [an, bn, on, plan = std::move(plan), dfa, dfb]() {
    ensure_grad(*an);
    ensure_grad(*bn);
    const std::size_t n = on->value.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ia = plan.identity ? i : plan.a_index[i];
      const std::size_t ib = plan.identity ? i : plan.b_index[i];
      const double g = on->grad[i];
      an->grad[ia] += g * dfa(an->value[ia], bn->value[ib]);
      bn->grad[ib] += g * dfb(an->value[ia], bn->value[ib]);
    }
  });
  return Tensor(on);
}

template <class F, class Df>
Tensor unary_op(const char* name, const Tensor& x, F f, Df df) {
  auto xn = x.node();
  if (!xn) shape_error(name, "undefined operand");
  const std::size_t n = xn->value.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(xn->value[i]);
  auto on = make_node(xn->shape, std::move(out));
  record_op(name, {xn}, on, [xn, on, df]() {
    ensure_grad(*xn);
    for (std::size_t i = 0; i < xn->value.size(); ++i)
      xn->grad[i] += on->grad[i] * df(xn->value[i]);
  });
  return Tensor(on);
}

}  // namespace

// --- shape helpers -------------------------------------------------------

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto e : s) n *= e;
  return n;
}

// --- Tensor --------------------------------------------------------------

Tensor Tensor::scalar(double v) { return Tensor(make_node({}, {v})); }

Tensor Tensor::zeros(Shape shape) {
  std::size_t n = shape_size(shape);
  return Tensor(make_node(std::move(shape), std::vector<double>(n, 0.0)));
}

Tensor Tensor::full(Shape shape, double v) {
  std::size_t n = shape_size(shape);
  return Tensor(make_node(std::move(shape), std::vector<double>(n, v)));
}

Tensor Tensor::from(Shape shape, std::vector<double> data) {
  if (shape_size(shape) != data.size())
    throw ValidationError("Tensor::from: shape " + shape_str(shape) + " does not hold " +
                          std::to_string(data.size()) + " values");
  return Tensor(make_node(std::move(shape), std::move(data)));
}

Tensor Tensor::param(std::string name, Shape shape, std::vector<double> data) {
  Tensor t = from(std::move(shape), std::move(data));
  t.node()->requires_grad = true;
  t.node()->name = std::move(name);
  return t;
}

const Shape& Tensor::shape() const {
  if (!node_) throw ValidationError("Tensor: use of undefined tensor");
  return node_->shape;
}

std::size_t Tensor::size() const { return node_ ? node_->value.size() : 0; }

std::span<const double> Tensor::values() const {
  if (!node_) throw ValidationError("Tensor: use of undefined tensor");
  return node_->value;
}

std::span<double> Tensor::mutable_values() {
  if (!node_) throw ValidationError("Tensor: use of undefined tensor");
  return node_->value;
}

std::span<const double> Tensor::grad() const {
  if (!node_) throw ValidationError("Tensor: use of undefined tensor");
  return node_->grad;
}

bool Tensor::has_grad() const { return node_ && node_->grad.size() == node_->value.size(); }

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

void Tensor::set_requires_grad(bool on) {
  if (!node_) throw ValidationError("Tensor: use of undefined tensor");
  node_->requires_grad = on;
}

const std::string& Tensor::name() const {
  static const std::string empty;
  return node_ ? node_->name : empty;
}

double Tensor::item() const {
  if (!node_ || node_->value.size() != 1)
    throw ValidationError("Tensor::item: tensor is not a single element, shape " +
                          (node_ ? shape_str(node_->shape) : std::string("<undefined>")));
  return node_->value[0];
}

// --- Tape ----------------------------------------------------------------

Tape::Tape() {
  prev_ = g_active_tape;
  g_active_tape = this;
}

Tape::~Tape() { g_active_tape = prev_; }

Tape* Tape::active() noexcept { return g_active_tape; }

void Tape::record(const char* op_name, std::vector<NodePtr> inputs, NodePtr output,
                  std::function<void()> backward) {
  records_.push_back(Record{op_name, std::move(inputs), std::move(output), std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  auto ln = loss.node();
  if (!ln) throw ValidationError("Tape::backward: undefined loss tensor");
  if (ln->value.size() != 1)
    throw ValidationError("Tape::backward: loss must be scalar, got shape " + shape_str(ln->shape));
  if (records_.empty()) throw ValidationError("Tape::backward: tape is empty");
  for (auto& r : records_) {
    for (auto& in : r.inputs) {
      in->grad.assign(in->value.size(), 0.0);
    }
    r.output->grad.assign(r.output->value.size(), 0.0);
  }
  ln->grad.assign(1, 1.0);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->backward();
}

void Tape::clear() { records_.clear(); }

// --- elementwise ---------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary_op(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_op(
      "add_scalar", a, [c](double x) { return x + c; }, [](double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double c) {
  return unary_op(
      "mul_scalar", a, [c](double x) { return x * c; }, [c](double) { return c; });
}

// --- activations ---------------------------------------------------------

double sigmoid_val(double x) {
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double silu_val(double x) { return x * sigmoid_val(x); }

double silu_deriv(double x) {
  const double s = sigmoid_val(x);
  return s * (1.0 + x * (1.0 - s));
}

double elu_val(double x) { return x > 0 ? x : std::expm1(x); }

double elu_deriv(double x) { return x > 0 ? 1.0 : std::exp(x); }

Tensor sigmoid(const Tensor& x) {
  return unary_op(
      "sigmoid", x, [](double v) { return sigmoid_val(v); },
      [](double v) {
        const double s = sigmoid_val(v);
        return s * (1.0 - s);
      });
}

Tensor silu(const Tensor& x) {
  return unary_op(
      "silu", x, [](double v) { return silu_val(v); }, [](double v) { return silu_deriv(v); });
}

Tensor elu(const Tensor& x) {
  return unary_op(
      "elu", x, [](double v) { return elu_val(v); }, [](double v) { return elu_deriv(v); });
}

Tensor relu(const Tensor& x) {
  return unary_op(
      "relu", x, [](double v) { return v > 0 ? v : 0.0; },
      [](double v) { return v > 0 ? 1.0 : 0.0; });
}

Tensor sqrt(const Tensor& x) {
  return unary_op(
      "sqrt", x, [](double v) { return std::sqrt(v); },
      [](double v) { return 0.5 / std::sqrt(v); });
}

// --- matmul --------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  auto an = a.node();
  auto bn = b.node();
  if (!an || !bn) shape_error("matmul", "undefined operand");
  const Shape& sa = an->shape;
  const Shape& sb = bn->shape;
  const bool a_vec = sa.size() == 1;
  const bool b_vec = sb.size() == 1;
  if ((sa.size() != 2 && !a_vec) || (sb.size() != 2 && !b_vec))
    shape_error("matmul", "operands must be rank 1 or 2, got " + shape_str(sa) + " and " + shape_str(sb));
  if (a_vec && b_vec) shape_error("matmul", "at least one operand must be rank 2");
  const std::size_t m = a_vec ? 1 : sa[0];
  const std::size_t k = a_vec ? sa[0] : sa[1];
  const std::size_t k2 = b_vec ? sb[0] : sb[0];
  const std::size_t n = b_vec ? 1 : sb[1];
  if (k != k2)
    shape_error("matmul", "inner dimensions differ: " + shape_str(sa) + " vs " + shape_str(sb));

  std::vector<double> out(m * n, 0.0);
  const double* A = an->value.data();
  const double* B = bn->value.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      const double av = A[i * k + t];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * B[t * n + j];
    }

  Shape out_shape;
  if (a_vec)
    out_shape = {n};  // [k] x [k,n] -> [n]
  else if (b_vec)
    out_shape = {m};  // [m,k] x [k] -> [m]
  else
    out_shape = {m, n};
  auto on = make_node(std::move(out_shape), std::move(out));
  record_op("matmul", {an, bn}, on, [an, bn, on, m, k, n]() {
    ensure_grad(*an);
    ensure_grad(*bn);
    const double* A = an->value.data();
    const double* B = bn->value.data();
    const double* G = on->grad.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double g = G[i * n + j];
        if (g == 0.0) continue;
        for (std::size_t t = 0; t < k; ++t) {
          an->grad[i * k + t] += g * B[t * n + j];
          bn->grad[t * n + j] += g * A[i * k + t];
        }
      }
  });
  return Tensor(on);
}

// --- softmax and reductions ----------------------------------------------

Tensor softmax(const Tensor& x) {
  auto xn = x.node();
  if (!xn) shape_error("softmax", "undefined operand");
  if (xn->shape.empty()) shape_error("softmax", "rank-0 input");
  const std::size_t d = xn->shape.back();
  const std::size_t rows = xn->value.size() / d;
  std::vector<double> out(xn->value.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* v = xn->value.data() + r * d;
    double mx = v[0];
    for (std::size_t i = 1; i < d; ++i) mx = std::max(mx, v[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      out[r * d + i] = std::exp(v[i] - mx);
      sum += out[r * d + i];
    }
    for (std::size_t i = 0; i < d; ++i) out[r * d + i] /= sum;
  }
  auto on = make_node(xn->shape, std::move(out));
  record_op("softmax", {xn}, on, [xn, on, d, rows]() {
    ensure_grad(*xn);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = on->value.data() + r * d;
      const double* g = on->grad.data() + r * d;
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += g[i] * y[i];
      for (std::size_t i = 0; i < d; ++i) xn->grad[r * d + i] += y[i] * (g[i] - dot);
    }
  });
  return Tensor(on);
}

Tensor mean_all(const Tensor& x) {
  auto xn = x.node();
  if (!xn) shape_error("mean_all", "undefined operand");
  const std::size_t n = xn->value.size();
  double s = 0.0;
  for (double v : xn->value) s += v;
  auto on = make_node({}, {s / static_cast<double>(n)});
  record_op("mean_all", {xn}, on, [xn, on, n]() {
    ensure_grad(*xn);
    const double g = on->grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) xn->grad[i] += g;
  });
  return Tensor(on);
}

Tensor sum_all(const Tensor& x) {
  auto xn = x.node();
  if (!xn) shape_error("sum_all", "undefined operand");
  double s = 0.0;
  for (double v : xn->value) s += v;
  auto on = make_node({}, {s});
  record_op("sum_all", {xn}, on, [xn, on]() {
    ensure_grad(*xn);
    const double g = on->grad[0];
    for (std::size_t i = 0; i < xn->value.size(); ++i) xn->grad[i] += g;
  });
  return Tensor(on);
}

Tensor mean_last(const Tensor& x) {
  auto xn = x.node();
  if (!xn) shape_error("mean_last", "undefined operand");
  if (xn->shape.empty()) shape_error("mean_last", "rank-0 input");
  const std::size_t d = xn->shape.back();
  const std::size_t rows = xn->value.size() / d;
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += xn->value[r * d + i];
    out[r] = s / static_cast<double>(d);
  }
  Shape os = xn->shape;
  os.back() = 1;
  auto on = make_node(std::move(os), std::move(out));
  record_op("mean_last", {xn}, on, [xn, on, d, rows]() {
    ensure_grad(*xn);
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = on->grad[r] / static_cast<double>(d);
      for (std::size_t i = 0; i < d; ++i) xn->grad[r * d + i] += g;
    }
  });
  return Tensor(on);
}

Tensor variance_last(const Tensor& x) {
  auto xn = x.node();
  if (!xn) shape_error("variance_last", "undefined operand");
  if (xn->shape.empty()) shape_error("variance_last", "rank-0 input");
  const std::size_t d = xn->shape.back();
  const std::size_t rows = xn->value.size() / d;
  std::vector<double> out(rows), means(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += xn->value[r * d + i];
    const double mu = s / static_cast<double>(d);
    means[r] = mu;
    double v = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double c = xn->value[r * d + i] - mu;
      v += c * c;
    }
    out[r] = v / static_cast<double>(d);
  }
  Shape os = xn->shape;
  os.back() = 1;
  auto on = make_node(std::move(os), std::move(out));
  // d var / d x_i = 2 (x_i - mu) / d; the mu path cancels since sum(x-mu)=0
  record_op("variance_last", {xn}, on, [xn, on, d, rows, means = std::move(means)]() {
    ensure_grad(*xn);
    for (std::size_t r = 0; r < rows; ++r) {
      const double g = 2.0 * on->grad[r] / static_cast<double>(d);
      for (std::size_t i = 0; i < d; ++i)
        xn->grad[r * d + i] += g * (xn->value[r * d + i] - means[r]);
    }
  });
  return Tensor(on);
}

// --- layout ops ----------------------------------------------------------

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) shape_error("concat", "no inputs");
  std::vector<NodePtr> nodes;
  nodes.reserve(parts.size());
  for (auto& p : parts) {
    if (!p.defined()) shape_error("concat", "undefined operand");
    nodes.push_back(p.node());
  }
  const Shape& s0 = nodes[0]->shape;
  if (axis >= s0.size()) shape_error("concat", "axis out of range for shape " + shape_str(s0));
  Shape out_shape = s0;
  std::size_t total_axis = 0;
  for (auto& n : nodes) {
    const Shape& s = n->shape;
    if (s.size() != s0.size()) shape_error("concat", "rank mismatch: " + shape_str(s0) + " vs " + shape_str(s));
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != axis && s[i] != s0[i])
        shape_error("concat", "extent mismatch off the concat axis: " + shape_str(s0) + " vs " + shape_str(s));
    total_axis += s[axis];
  }
  out_shape[axis] = total_axis;

  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  for (std::size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];

  std::vector<double> out(shape_size(out_shape));
  std::size_t axis_offset = 0;
  for (auto& n : nodes) {
    const std::size_t a = n->shape[axis];
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(n->value.data() + o * a * inner, a * inner,
                  out.data() + (o * total_axis + axis_offset) * inner);
    axis_offset += a;
  }
  auto on = make_node(std::move(out_shape), std::move(out));
  record_op("concat", nodes, on, [nodes, on, outer, inner, total_axis, axis]() {
    std::size_t axis_offset = 0;
    for (auto& n : nodes) {
      ensure_grad(*n);
      const std::size_t a = n->shape[axis];
      for (std::size_t o = 0; o < outer; ++o) {
        const double* src = on->grad.data() + (o * total_axis + axis_offset) * inner;
        double* dst = n->grad.data() + o * a * inner;
        for (std::size_t i = 0; i < a * inner; ++i) dst[i] += src[i];
      }
      axis_offset += a;
    }
  });
  return Tensor(on);
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t start, std::size_t len) {
  auto xn = x.node();
  if (!xn) shape_error("slice", "undefined operand");
  const Shape& s = xn->shape;
  if (axis >= s.size()) shape_error("slice", "axis out of range for shape " + shape_str(s));
  if (start + len > s[axis])
    shape_error("slice", "range [" + std::to_string(start) + "," + std::to_string(start + len) +
                             ") exceeds extent " + std::to_string(s[axis]));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  Shape out_shape = s;
  out_shape[axis] = len;
  std::vector<double> out(shape_size(out_shape));
  for (std::size_t o = 0; o < outer; ++o)
    std::copy_n(xn->value.data() + (o * s[axis] + start) * inner, len * inner,
                out.data() + o * len * inner);
  auto on = make_node(std::move(out_shape), std::move(out));
  const std::size_t extent = s[axis];
  record_op("slice", {xn}, on, [xn, on, outer, inner, extent, start, len]() {
    ensure_grad(*xn);
    for (std::size_t o = 0; o < outer; ++o) {
      const double* src = on->grad.data() + o * len * inner;
      double* dst = xn->grad.data() + (o * extent + start) * inner;
      for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
    }
  });
  return Tensor(on);
}

Tensor reshape(const Tensor& x, Shape new_shape) {
  auto xn = x.node();
  if (!xn) shape_error("reshape", "undefined operand");
  if (shape_size(new_shape) != xn->value.size())
    shape_error("reshape", "cannot reshape " + shape_str(xn->shape) + " to " + shape_str(new_shape));
  auto on = make_node(std::move(new_shape), xn->value);
  record_op("reshape", {xn}, on, [xn, on]() {
    ensure_grad(*xn);
    for (std::size_t i = 0; i < xn->value.size(); ++i) xn->grad[i] += on->grad[i];
  });
  return Tensor(on);
}

Tensor flatten(const Tensor& x) { return reshape(x, Shape{x.size()}); }

Tensor gather_rows(const Tensor& x, const std::vector<std::size_t>& rows) {
  auto xn = x.node();
  if (!xn) shape_error("gather_rows", "undefined operand");
  if (xn->shape.size() != 2) shape_error("gather_rows", "input must be rank 2, got " + shape_str(xn->shape));
  const std::size_t r = xn->shape[0], c = xn->shape[1];
  std::vector<double> out(rows.size() * c);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= r)
      shape_error("gather_rows", "row " + std::to_string(rows[i]) + " out of range " + std::to_string(r));
    std::copy_n(xn->value.data() + rows[i] * c, c, out.data() + i * c);
  }
  auto on = make_node({rows.size(), c}, std::move(out));
  record_op("gather_rows", {xn}, on, [xn, on, rows, c]() {
    ensure_grad(*xn);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < c; ++j) xn->grad[rows[i] * c + j] += on->grad[i * c + j];
  });
  return Tensor(on);
}

}  // namespace sigkan
