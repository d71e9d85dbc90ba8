#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "move/errors.hpp"
#include "move/types.hpp"

// Reverse-mode differentiation over dense Eigen matrices. A BasicTape
// records one forward pass; backward() replays it once and is then done
// with. Parameters live outside the tape and collect gradients through
// leaf() bindings, so the tape can be destroyed after every step.
//
// Tapes and their tensors are confined to one thread; independent tapes
// may run concurrently.

namespace move::ad {

template <typename S>
struct BasicParam {
  std::string name;
  MatrixX<S> value;
  MatrixX<S> grad;                 // empty until zero_grad() or a backward pass
  std::vector<std::uint32_t> dims; // logical dims for checkpointing (rank 1 or 2)

  bool has_grad() const { return grad.size() == value.size() && value.size() > 0; }
  void zero_grad() { grad = MatrixX<S>::Zero(value.rows(), value.cols()); }
  void drop_grad() { grad.resize(0, 0); }
};

template <typename S>
BasicParam<S> make_param(std::string name, MatrixX<S> value) {
  BasicParam<S> p;
  p.name = std::move(name);
  if (value.rows() == 1) {
    p.dims = {static_cast<std::uint32_t>(value.cols())};
  } else {
    p.dims = {static_cast<std::uint32_t>(value.rows()),
              static_cast<std::uint32_t>(value.cols())};
  }
  p.value = std::move(value);
  return p;
}

template <typename S>
class BasicTape;

template <typename S>
class BasicTensor {
 public:
  BasicTensor() = default;

  const MatrixX<S>& value() const;
  const MatrixX<S>& grad() const;
  bool requires_grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool valid() const { return tape_ != nullptr; }
  int index() const { return index_; }
  BasicTape<S>* tape() const { return tape_; }

 private:
  friend class BasicTape<S>;
  BasicTensor(BasicTape<S>* tape, int index) : tape_(tape), index_(index) {}

  BasicTape<S>* tape_ = nullptr;
  int index_ = -1;
};

template <typename S>
class BasicTape {
 public:
  using Mat = MatrixX<S>;
  using Tensor = BasicTensor<S>;
  using Backward = std::function<void(BasicTape&, int)>;

  BasicTape() = default;
  BasicTape(const BasicTape&) = delete;
  BasicTape& operator=(const BasicTape&) = delete;

  Tensor constant(Mat v) { return emit(std::move(v), false, nullptr); }

  Tensor variable(Mat v) { return emit(std::move(v), true, nullptr); }

  // Leaf bound to a persistent parameter; backward() accumulates into
  // param.grad.
  Tensor leaf(BasicParam<S>& param) {
    Tensor t = emit(param.value, true, nullptr);
    nodes_[static_cast<std::size_t>(t.index())].bound = &param;
    return t;
  }

  Tensor emit(Mat v, bool requires_grad, Backward backward) {
    Node node;
    node.value = std::move(v);
    node.requires_grad = requires_grad;
    node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Tensor(this, static_cast<int>(nodes_.size()) - 1);
  }

  const Mat& value(int i) const { return nodes_[static_cast<std::size_t>(i)].value; }
  const Mat& grad(int i) const { return nodes_[static_cast<std::size_t>(i)].grad; }
  bool requires_grad(int i) const { return nodes_[static_cast<std::size_t>(i)].requires_grad; }
  bool has_grad(int i) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    return n.grad.size() == n.value.size() && n.value.size() > 0;
  }
  int size() const { return static_cast<int>(nodes_.size()); }

  template <typename Expr>
  void accumulate(int i, const Expr& g) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.requires_grad) return;
    if (n.grad.size() != n.value.size()) {
      n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    }
    n.grad += g;
  }

  // Reverse pass from a scalar (1x1) loss. Tape creation order is a
  // topological order, so one reverse sweep suffices.
  void backward(const Tensor& loss) {
    if (loss.tape() != this) throw StateError("backward: tensor belongs to another tape");
    if (loss.rows() != 1 || loss.cols() != 1) {
      throw DimensionError("backward: loss must be a 1x1 scalar");
    }
    accumulate(loss.index(), Mat::Constant(1, 1, S(1)));
    for (int i = loss.index(); i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (!n.requires_grad || !has_grad(i)) continue;
      if (n.backward) n.backward(*this, i);
    }
    for (Node& n : nodes_) {
      if (n.bound != nullptr && n.grad.size() == n.value.size()) {
        if (!n.bound->has_grad()) n.bound->zero_grad();
        n.bound->grad += n.grad;
      }
    }
  }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    Backward backward;
    BasicParam<S>* bound = nullptr;
  };

  // deque keeps node references stable while ops append.
  std::deque<Node> nodes_;
};

template <typename S>
const MatrixX<S>& BasicTensor<S>::value() const {
  return tape_->value(index_);
}

template <typename S>
const MatrixX<S>& BasicTensor<S>::grad() const {
  return tape_->grad(index_);
}

template <typename S>
bool BasicTensor<S>::requires_grad() const {
  return tape_->requires_grad(index_);
}

namespace detail {

template <typename S>
BasicTape<S>& tape_of(const BasicTensor<S>& a) {
  if (!a.valid()) throw StateError("op on default-constructed tensor");
  return *a.tape();
}

template <typename S>
BasicTape<S>& tape_of(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  BasicTape<S>& t = tape_of(a);
  if (b.tape() != &t) throw StateError("operands live on different tapes");
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ops. Each returns a fresh node whose backward closure pulls the upstream
// gradient from the tape and pushes into its parents.
// ---------------------------------------------------------------------------

template <typename S>
BasicTensor<S> matmul(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions disagree (" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
  }
  MatrixX<S> v = a.value() * b.value();
  const int ia = a.index(), ib = b.index();
  return t.emit(std::move(v), a.requires_grad() || b.requires_grad(),
                [ia, ib](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, g * tp.value(ib).transpose());
                  tp.accumulate(ib, tp.value(ia).transpose() * g);
                });
}

template <typename S>
BasicTensor<S> transpose(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.index();
  return t.emit(a.value().transpose(), a.requires_grad(),
                [ia](BasicTape<S>& tp, int self) {
                  tp.accumulate(ia, tp.grad(self).transpose());
                });
}

namespace detail {

template <typename S>
void require_same_shape(const BasicTensor<S>& a, const BasicTensor<S>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes disagree");
  }
}

}  // namespace detail

template <typename S>
BasicTensor<S> add(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "add");
  const int ia = a.index(), ib = b.index();
  return t.emit(a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                [ia, ib](BasicTape<S>& tp, int self) {
                  tp.accumulate(ia, tp.grad(self));
                  tp.accumulate(ib, tp.grad(self));
                });
}

template <typename S>
BasicTensor<S> sub(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "sub");
  const int ia = a.index(), ib = b.index();
  return t.emit(a.value() - b.value(), a.requires_grad() || b.requires_grad(),
                [ia, ib](BasicTape<S>& tp, int self) {
                  tp.accumulate(ia, tp.grad(self));
                  tp.accumulate(ib, -tp.grad(self));
                });
}

// Elementwise product.
template <typename S>
BasicTensor<S> mul(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  auto& t = detail::tape_of(a, b);
  detail::require_same_shape(a, b, "mul");
  const int ia = a.index(), ib = b.index();
  return t.emit(a.value().cwiseProduct(b.value()), a.requires_grad() || b.requires_grad(),
                [ia, ib](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
                  tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
                });
}

template <typename S>
BasicTensor<S> scale(const BasicTensor<S>& a, S c) {
  auto& t = detail::tape_of(a);
  const int ia = a.index();
  return t.emit(a.value() * c, a.requires_grad(),
                [ia, c](BasicTape<S>& tp, int self) {
                  tp.accumulate(ia, tp.grad(self) * c);
                });
}

// a[M x N] + bias[1 x N] broadcast over rows.
template <typename S>
BasicTensor<S> add_bias(const BasicTensor<S>& a, const BasicTensor<S>& bias) {
  auto& t = detail::tape_of(a, bias);
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw DimensionError("add_bias: bias must be 1 x cols(a)");
  }
  MatrixX<S> v = a.value().rowwise() + bias.value().row(0);
  const int ia = a.index(), ib = bias.index();
  return t.emit(std::move(v), a.requires_grad() || bias.requires_grad(),
                [ia, ib](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, g);
                  tp.accumulate(ib, g.colwise().sum());
                });
}

// Row broadcast of a weight vector: out(t, c) = a(t, c) * s(0, t). This is
// the frame-mask multiply, with s a constant 0/1 row.
template <typename S>
BasicTensor<S> scale_rows(const BasicTensor<S>& a, const BasicTensor<S>& s) {
  auto& t = detail::tape_of(a, s);
  if (s.rows() != 1 || s.cols() != a.rows()) {
    throw DimensionError("scale_rows: scales must be 1 x rows(a)");
  }
  MatrixX<S> v = s.value().row(0).transpose().asDiagonal() * a.value();
  const int ia = a.index(), is = s.index();
  return t.emit(std::move(v), a.requires_grad() || s.requires_grad(),
                [ia, is](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, tp.value(is).row(0).transpose().asDiagonal() * g);
                  tp.accumulate(is, g.cwiseProduct(tp.value(ia)).rowwise().sum().transpose());
                });
}

// Row-stabilized softmax; rows sum to 1.
template <typename S>
BasicTensor<S> softmax_rows(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  if (!a.value().allFinite()) throw NumericError("softmax_rows: non-finite input");
  MatrixX<S> v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    v.row(r).array() -= v.row(r).maxCoeff();
    v.row(r) = v.row(r).array().exp();
    v.row(r) /= v.row(r).sum();
  }
  const int ia = a.index();
  return t.emit(std::move(v), a.requires_grad(),
                [ia](BasicTape<S>& tp, int self) {
                  const auto& y = tp.value(self);
                  const auto& g = tp.grad(self);
                  MatrixX<S> out(y.rows(), y.cols());
                  for (Eigen::Index r = 0; r < y.rows(); ++r) {
                    const S dot = y.row(r).dot(g.row(r));
                    out.row(r) = y.row(r).cwiseProduct(
                        (g.row(r).array() - dot).matrix());
                  }
                  tp.accumulate(ia, out);
                });
}

// Mean over the row axis (temporal pooling): [M x N] -> [1 x N].
template <typename S>
BasicTensor<S> mean_rows(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.index();
  const S inv = S(1) / static_cast<S>(a.rows());
  return t.emit(a.value().colwise().mean(), a.requires_grad(),
                [ia, inv](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  const Eigen::Index m = tp.value(ia).rows();
                  tp.accumulate(ia, (g * inv).replicate(m, 1));
                });
}

// Sum over the row axis: [M x N] -> [1 x N].
template <typename S>
BasicTensor<S> sum_rows(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.index();
  return t.emit(a.value().colwise().sum(), a.requires_grad(),
                [ia](BasicTape<S>& tp, int self) {
                  const Eigen::Index m = tp.value(ia).rows();
                  tp.accumulate(ia, tp.grad(self).replicate(m, 1));
                });
}

template <typename S>
BasicTensor<S> sum_all(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.index();
  return t.emit(MatrixX<S>::Constant(1, 1, a.value().sum()), a.requires_grad(),
                [ia](BasicTape<S>& tp, int self) {
                  const S g = tp.grad(self)(0, 0);
                  const auto& av = tp.value(ia);
                  tp.accumulate(ia, MatrixX<S>::Constant(av.rows(), av.cols(), g));
                });
}

// Feature-axis concatenation: [M x N1] ++ [M x N2] -> [M x (N1+N2)].
template <typename S>
BasicTensor<S> concat_cols(const BasicTensor<S>& a, const BasicTensor<S>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.rows() != b.rows()) throw DimensionError("concat_cols: row counts disagree");
  MatrixX<S> v(a.rows(), a.cols() + b.cols());
  v.leftCols(a.cols()) = a.value();
  v.rightCols(b.cols()) = b.value();
  const int ia = a.index(), ib = b.index();
  const Eigen::Index na = a.cols(), nb = b.cols();
  return t.emit(std::move(v), a.requires_grad() || b.requires_grad(),
                [ia, ib, na, nb](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, g.leftCols(na));
                  tp.accumulate(ib, g.rightCols(nb));
                });
}

// Stack row blocks: list of [M_i x N] -> [sum(M_i) x N].
template <typename S>
BasicTensor<S> vstack(std::span<const BasicTensor<S>> parts) {
  if (parts.empty()) throw ArgumentError("vstack: nothing to stack");
  auto& t = detail::tape_of(parts[0]);
  Eigen::Index rows = 0;
  const Eigen::Index n = parts[0].cols();
  bool needs_grad = false;
  for (const auto& p : parts) {
    if (p.tape() != &t) throw StateError("vstack: operands live on different tapes");
    if (p.cols() != n) throw DimensionError("vstack: column counts disagree");
    rows += p.rows();
    needs_grad = needs_grad || p.requires_grad();
  }
  MatrixX<S> v(rows, n);
  std::vector<int> indices;
  std::vector<Eigen::Index> heights;
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    indices.push_back(p.index());
    heights.push_back(p.rows());
    at += p.rows();
  }
  return t.emit(std::move(v), needs_grad,
                [indices = std::move(indices), heights = std::move(heights)](BasicTape<S>& tp,
                                                                             int self) {
                  const auto& g = tp.grad(self);
                  Eigen::Index at = 0;
                  for (std::size_t i = 0; i < indices.size(); ++i) {
                    tp.accumulate(indices[i], g.middleRows(at, heights[i]));
                    at += heights[i];
                  }
                });
}

// [M x N] -> [1 x M*N] in row-major order.
template <typename S>
BasicTensor<S> flatten_row(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  const Eigen::Index m = a.rows(), n = a.cols();
  MatrixX<S> v = Eigen::Map<const MatrixX<S>>(a.value().data(), 1, m * n);
  const int ia = a.index();
  return t.emit(std::move(v), a.requires_grad(),
                [ia, m, n](BasicTape<S>& tp, int self) {
                  const auto& g = tp.grad(self);
                  tp.accumulate(ia, Eigen::Map<const MatrixX<S>>(g.data(), m, n));
                });
}

// L2-normalize each row; the norm is stabilized so zero rows stay zero.
template <typename S>
BasicTensor<S> l2_normalize_rows(const BasicTensor<S>& a) {
  auto& t = detail::tape_of(a);
  constexpr S kEps2 = S(1e-24);
  MatrixX<S> v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    v.row(r) /= std::sqrt(v.row(r).squaredNorm() + kEps2);
  }
  const int ia = a.index();
  return t.emit(std::move(v), a.requires_grad(),
                [ia](BasicTape<S>& tp, int self) {
                  const auto& x = tp.value(ia);
                  const auto& g = tp.grad(self);
                  MatrixX<S> out(x.rows(), x.cols());
                  for (Eigen::Index r = 0; r < x.rows(); ++r) {
                    const S n2 = x.row(r).squaredNorm() + kEps2;
                    const S n = std::sqrt(n2);
                    const S dot = x.row(r).dot(g.row(r));
                    out.row(r) = g.row(r) / n - x.row(r) * (dot / (n2 * n));
                  }
                  tp.accumulate(ia, out);
                });
}

// Mean binary cross-entropy on logits, log-space stable. Targets may be
// soft labels in [0, 1].
template <typename S>
BasicTensor<S> bce_with_logits(const BasicTensor<S>& logits, const BasicTensor<S>& targets) {
  auto& t = detail::tape_of(logits, targets);
  detail::require_same_shape(logits, targets, "bce_with_logits");
  const auto& l = logits.value();
  const auto& y = targets.value();
  // max(l,0) - l*y + log(1 + exp(-|l|))
  MatrixX<S> term = l.cwiseMax(S(0)) - l.cwiseProduct(y) +
                    ((-l.cwiseAbs().array()).exp() + S(1)).log().matrix();
  const S inv = S(1) / static_cast<S>(l.size());
  const int il = logits.index(), iy = targets.index();
  return t.emit(MatrixX<S>::Constant(1, 1, term.sum() * inv),
                logits.requires_grad() || targets.requires_grad(),
                [il, iy, inv](BasicTape<S>& tp, int self) {
                  const S g = tp.grad(self)(0, 0) * inv;
                  const auto& l = tp.value(il);
                  const auto& y = tp.value(iy);
                  MatrixX<S> sig = (S(1) / (S(1) + (-l.array()).exp())).matrix();
                  tp.accumulate(il, (sig - y) * g);
                  tp.accumulate(iy, -l * g);
                });
}

using Param = BasicParam<double>;
using Tape = BasicTape<double>;
using Tensor = BasicTensor<double>;

}  // namespace move::ad
