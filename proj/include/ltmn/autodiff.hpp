#pragma once

// Dense reverse-mode differentiation over double-precision matrices.
//
// A Graph is a tape: every operation appends a record holding its value and
// parents, so records are already in topological order and backward() is a
// single reverse sweep. Learnable weights live outside the graph in
// Parameter objects; a graph only borrows them.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ltmn/errors.hpp"

namespace ltmn::ad {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string shape_str(const Matrix& m);

// Learnable matrix with its gradient accumulator. Gradients add up across
// backward() calls until zero_grad() is called, so a weight shared across
// decoder steps or across the examples of a batch sums correctly.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
};

// Sparse column: (row index, weight) pairs. Used for bag-of-words inputs so
// that embedding a sentence touches only the columns of its tokens.
using SparseColumn = std::vector<std::pair<std::size_t, double>>;

enum class Op {
  Constant,
  Parameter,
  MatMul,
  Add,
  Hadamard,
  Sigmoid,
  Tanh,
  Softmax,
  CrossEntropy,
  Sum,
  Transpose,
  Column,
  SparseEmbed,
};

const char* op_name(Op op);

class Graph;

// Handle to one record of a Graph. Cheap to copy; valid while the graph lives.
class Node {
 public:
  Node() = default;

  const Matrix& value() const;
  const Matrix& grad() const;
  Op op() const;
  std::vector<Node> parents() const;
  Graph* graph() const { return graph_; }
  std::size_t id() const { return id_; }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double scalar() const;

 private:
  friend class Graph;
  Node(Graph* g, std::size_t id) : graph_(g), id_(id) {}
  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Node constant(Matrix value);
  // Registers a parameter; repeated calls with the same object return the
  // same node.
  Node parameter(Parameter& p);

  // Reverse sweep from a 1x1 root. Node gradients are recomputed from zero on
  // every call; parameter gradients are *added* to Parameter::grad.
  void backward(Node root);

  std::size_t size() const { return records_.size(); }

 private:
  friend class Node;
  friend Node matmul(Node, Node);
  friend Node add(Node, Node);
  friend Node hadamard(Node, Node);
  friend Node sigmoid(Node);
  friend Node tanh_op(Node);
  friend Node softmax(Node);
  friend Node cross_entropy(Node, std::size_t);
  friend Node sum(Node);
  friend Node transpose(Node);
  friend Node column(Node, std::size_t);
  friend Node sparse_embed(Node, std::vector<SparseColumn>);

  struct Record {
    Op op = Op::Constant;
    Matrix value;
    Matrix grad;
    std::size_t parents[2] = {0, 0};
    int n_parents = 0;
    Parameter* param = nullptr;
    std::size_t index = 0;                 // Column / CrossEntropy target
    std::vector<SparseColumn> sparse;      // SparseEmbed inputs
  };

  Node push(Record r);
  const Record& rec(std::size_t id) const { return records_[id]; }

  std::vector<Record> records_;
  std::unordered_map<const Parameter*, std::size_t> param_ids_;
};

// Matrix product. a.cols must equal b.rows.
Node matmul(Node a, Node b);
// Elementwise sum. Equal shapes, or b an (a.rows x 1) column that is
// broadcast across every column of a (bias over batch columns).
Node add(Node a, Node b);
// Elementwise product; shapes must be equal.
Node hadamard(Node a, Node b);
Node sigmoid(Node a);
Node tanh_op(Node a);
// Softmax over every entry of a row or column vector, max-shifted.
Node softmax(Node z);
// -log(max(pred[target], 1e-12)) for a probability vector. When pred comes
// straight from softmax() the gradient is sent to the logits as
// (pred - onehot), bypassing the Jacobian.
Node cross_entropy(Node pred, std::size_t target);
// Sum of all entries, 1x1.
Node sum(Node a);
Node transpose(Node a);
// Column j of a, as a (rows x 1) node.
Node column(Node a, std::size_t j);
// out[:, k] = sum_j w_j * a[:, j] over the entries of columns[k]. Equivalent
// to matmul(a, X) where X is the dense matrix whose k-th column is columns[k].
Node sparse_embed(Node a, std::vector<SparseColumn> columns);

inline constexpr double kLogClamp = 1e-12;

double sigmoid_scalar(double x);

// Finite-difference gradient verification.
struct ParamCheck {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_error = 0.0;
  double epsilon = 0.0;
  double tolerance = 0.0;
  bool passed = true;
  bool degraded_epsilon = false;  // epsilon above the recommended 1e-2
};

// relative error |a-n| / max(|a|, |n|, 1e-8)
double relative_error(double analytic, double numeric);

// `build` constructs a scalar loss on a fresh graph from the current values
// of `params`. Analytic gradients come from one backward pass; numeric ones
// from central differences (f(t+eps) - f(t-eps)) / 2eps per entry.
// `analytic_hook`, when set, may alter the analytic gradients before
// comparison (used as a negative control).
GradCheckReport gradient_check(const std::function<Node(Graph&)>& build,
                               std::span<Parameter* const> params, double epsilon,
                               double tolerance,
                               const std::function<void(std::span<Parameter* const>)>&
                                   analytic_hook = {});

}  // namespace ltmn::ad
