#include "ltmn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ltmn::ad {

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

const char* op_name(Op op) {
  switch (op) {
    case Op::Constant: return "constant";
    case Op::Parameter: return "parameter";
    case Op::MatMul: return "matmul";
    case Op::Add: return "add";
    case Op::Hadamard: return "hadamard";
    case Op::Sigmoid: return "sigmoid";
    case Op::Tanh: return "tanh";
    case Op::Softmax: return "softmax";
    case Op::CrossEntropy: return "cross_entropy";
    case Op::Sum: return "sum";
    case Op::Transpose: return "transpose";
    case Op::Column: return "column";
    case Op::SparseEmbed: return "sparse_embed";
  }
  return "?";
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Node

const Matrix& Node::value() const {
  const auto& r = graph_->rec(id_);
  return r.op == Op::Parameter ? r.param->value : r.value;
}

const Matrix& Node::grad() const { return graph_->rec(id_).grad; }

Op Node::op() const { return graph_->rec(id_).op; }

std::vector<Node> Node::parents() const {
  const auto& r = graph_->rec(id_);
  std::vector<Node> out;
  for (int i = 0; i < r.n_parents; ++i) out.push_back(Node(graph_, r.parents[i]));
  return out;
}

double Node::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw DimensionError("scalar() on a " + shape_str(v) + " node");
  }
  return v(0, 0);
}

// ---------------------------------------------------------------------------
// Graph

Node Graph::push(Record r) {
  if (!r.value.allFinite()) {
    throw NumericError(std::string("non-finite value produced by ") + op_name(r.op));
  }
  if (r.op != Op::Parameter) r.grad = Matrix::Zero(r.value.rows(), r.value.cols());
  records_.push_back(std::move(r));
  return Node(this, records_.size() - 1);
}

Node Graph::constant(Matrix value) {
  Record r;
  r.op = Op::Constant;
  r.value = std::move(value);
  return push(std::move(r));
}

Node Graph::parameter(Parameter& p) {
  if (auto it = param_ids_.find(&p); it != param_ids_.end()) return Node(this, it->second);
  Record r;
  r.op = Op::Parameter;
  r.param = &p;
  r.grad = Matrix::Zero(p.value.rows(), p.value.cols());
  records_.push_back(std::move(r));
  param_ids_[&p] = records_.size() - 1;
  return Node(this, records_.size() - 1);
}

namespace {

Graph* same_graph(Node a, Node b) {
  if (a.graph() == nullptr || a.graph() != b.graph()) {
    throw ContractError("operands belong to different graphs");
  }
  return a.graph();
}

}  // namespace

Node matmul(Node a, Node b) {
  Graph* g = same_graph(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw DimensionError("matmul: " + shape_str(av) + " x " + shape_str(bv));
  }
  Graph::Record r;
  r.op = Op::MatMul;
  r.value = av * bv;
  r.parents[0] = a.id();
  r.parents[1] = b.id();
  r.n_parents = 2;
  return g->push(std::move(r));
}

Node add(Node a, Node b) {
  Graph* g = same_graph(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Graph::Record r;
  r.op = Op::Add;
  if (av.rows() == bv.rows() && av.cols() == bv.cols()) {
    r.value = av + bv;
  } else if (bv.cols() == 1 && av.rows() == bv.rows()) {
    r.value = av.colwise() + bv.col(0);
  } else {
    throw DimensionError("add: " + shape_str(av) + " + " + shape_str(bv));
  }
  r.parents[0] = a.id();
  r.parents[1] = b.id();
  r.n_parents = 2;
  return g->push(std::move(r));
}

Node hadamard(Node a, Node b) {
  Graph* g = same_graph(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) {
    throw DimensionError("hadamard: " + shape_str(av) + " vs " + shape_str(bv));
  }
  Graph::Record r;
  r.op = Op::Hadamard;
  r.value = av.cwiseProduct(bv);
  r.parents[0] = a.id();
  r.parents[1] = b.id();
  r.n_parents = 2;
  return g->push(std::move(r));
}

Node sigmoid(Node a) {
  Graph::Record r;
  r.op = Op::Sigmoid;
  r.value = a.value().unaryExpr([](double x) { return sigmoid_scalar(x); });
  r.parents[0] = a.id();
  r.n_parents = 1;
  return a.graph()->push(std::move(r));
}

Node tanh_op(Node a) {
  Graph::Record r;
  r.op = Op::Tanh;
  r.value = a.value().array().tanh().matrix();
  r.parents[0] = a.id();
  r.n_parents = 1;
  return a.graph()->push(std::move(r));
}

Node softmax(Node z) {
  const Matrix& zv = z.value();
  if (zv.size() == 0) throw DomainError("softmax of an empty vector");
  if (zv.rows() != 1 && zv.cols() != 1) {
    throw DimensionError("softmax expects a vector, got " + shape_str(zv));
  }
  Graph::Record r;
  r.op = Op::Softmax;
  const double mx = zv.maxCoeff();
  r.value = (zv.array() - mx).exp().matrix();
  r.value /= r.value.sum();
  r.parents[0] = z.id();
  r.n_parents = 1;
  return z.graph()->push(std::move(r));
}

Node cross_entropy(Node pred, std::size_t target) {
  const Matrix& pv = pred.value();
  if (pv.rows() != 1 && pv.cols() != 1) {
    throw DimensionError("cross_entropy expects a vector, got " + shape_str(pv));
  }
  if (target >= static_cast<std::size_t>(pv.size())) {
    throw DomainError("cross_entropy target " + std::to_string(target) + " outside vector of " +
                      std::to_string(pv.size()));
  }
  Graph::Record r;
  r.op = Op::CrossEntropy;
  r.value = Matrix::Constant(1, 1, -std::log(std::max(pv(target), kLogClamp)));
  r.parents[0] = pred.id();
  r.n_parents = 1;
  r.index = target;
  return pred.graph()->push(std::move(r));
}

Node sum(Node a) {
  Graph::Record r;
  r.op = Op::Sum;
  r.value = Matrix::Constant(1, 1, a.value().sum());
  r.parents[0] = a.id();
  r.n_parents = 1;
  return a.graph()->push(std::move(r));
}

Node transpose(Node a) {
  Graph::Record r;
  r.op = Op::Transpose;
  r.value = a.value().transpose();
  r.parents[0] = a.id();
  r.n_parents = 1;
  return a.graph()->push(std::move(r));
}

Node column(Node a, std::size_t j) {
  const Matrix& av = a.value();
  if (j >= static_cast<std::size_t>(av.cols())) {
    throw DomainError("column " + std::to_string(j) + " of a " + shape_str(av) + " node");
  }
  Graph::Record r;
  r.op = Op::Column;
  r.value = av.col(static_cast<Eigen::Index>(j));
  r.parents[0] = a.id();
  r.n_parents = 1;
  r.index = j;
  return a.graph()->push(std::move(r));
}

Node sparse_embed(Node a, std::vector<SparseColumn> columns) {
  const Matrix& av = a.value();
  Graph::Record r;
  r.op = Op::SparseEmbed;
  r.value = Matrix::Zero(av.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (const auto& [j, w] : columns[k]) {
      if (j >= static_cast<std::size_t>(av.cols())) {
        throw DomainError("sparse_embed: index " + std::to_string(j) + " outside " +
                             shape_str(av));
      }
      r.value.col(static_cast<Eigen::Index>(k)) += w * av.col(static_cast<Eigen::Index>(j));
    }
  }
  r.parents[0] = a.id();
  r.n_parents = 1;
  r.sparse = std::move(columns);
  return a.graph()->push(std::move(r));
}

void Graph::backward(Node root) {
  if (root.graph() != this) throw ContractError("backward root belongs to another graph");
  const Matrix& rv = root.value();
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw ContractError("backward requires a scalar root, got " + shape_str(rv));
  }
  for (auto& r : records_) r.grad.setZero();
  records_[root.id()].grad(0, 0) = 1.0;

  for (std::size_t id = root.id() + 1; id-- > 0;) {
    Record& r = records_[id];
    const Matrix& g = r.grad;
    if (r.n_parents == 0) continue;
    Record& p0 = records_[r.parents[0]];
    const Matrix& v0 = p0.op == Op::Parameter ? p0.param->value : p0.value;

    switch (r.op) {
      case Op::Constant:
      case Op::Parameter:
        break;
      case Op::MatMul: {
        Record& p1 = records_[r.parents[1]];
        const Matrix& v1 = p1.op == Op::Parameter ? p1.param->value : p1.value;
        p0.grad.noalias() += g * v1.transpose();
        records_[r.parents[1]].grad.noalias() += v0.transpose() * g;
        break;
      }
      case Op::Add: {
        Record& p1 = records_[r.parents[1]];
        p0.grad += g;
        if (p1.grad.cols() == g.cols()) {
          p1.grad += g;
        } else {
          p1.grad.col(0) += g.rowwise().sum();
        }
        break;
      }
      case Op::Hadamard: {
        Record& p1 = records_[r.parents[1]];
        const Matrix& v1 = p1.op == Op::Parameter ? p1.param->value : p1.value;
        p0.grad += g.cwiseProduct(v1);
        p1.grad += g.cwiseProduct(v0);
        break;
      }
      case Op::Sigmoid:
        p0.grad.array() += g.array() * r.value.array() * (1.0 - r.value.array());
        break;
      case Op::Tanh:
        p0.grad.array() += g.array() * (1.0 - r.value.array().square());
        break;
      case Op::Softmax: {
        const double dot = (g.array() * r.value.array()).sum();
        p0.grad.array() += r.value.array() * (g.array() - dot);
        break;
      }
      case Op::CrossEntropy: {
        const double gs = g(0, 0);
        if (p0.op == Op::Softmax) {
          Record& logits = records_[p0.parents[0]];
          logits.grad.array() += gs * p0.value.array();
          logits.grad(static_cast<Eigen::Index>(r.index)) -= gs;
        } else {
          const double pt = v0(static_cast<Eigen::Index>(r.index));
          if (pt > kLogClamp) p0.grad(static_cast<Eigen::Index>(r.index)) -= gs / pt;
        }
        break;
      }
      case Op::Sum:
        p0.grad.array() += g(0, 0);
        break;
      case Op::Transpose:
        p0.grad += g.transpose();
        break;
      case Op::Column:
        p0.grad.col(static_cast<Eigen::Index>(r.index)) += g;
        break;
      case Op::SparseEmbed:
        for (std::size_t k = 0; k < r.sparse.size(); ++k) {
          for (const auto& [j, w] : r.sparse[k]) {
            p0.grad.col(static_cast<Eigen::Index>(j)) += w * g.col(static_cast<Eigen::Index>(k));
          }
        }
        break;
    }
  }

  for (auto& r : records_) {
    if (r.op == Op::Parameter) r.param->grad += r.grad;
  }
}

// ---------------------------------------------------------------------------
// Gradient check

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport gradient_check(const std::function<Node(Graph&)>& build,
                               std::span<Parameter* const> params, double epsilon,
                               double tolerance,
                               const std::function<void(std::span<Parameter* const>)>&
                                   analytic_hook) {
  if (!(epsilon > 0.0)) throw ContractError("gradient_check: epsilon must be positive");
  GradCheckReport report;
  report.epsilon = epsilon;
  report.tolerance = tolerance;
  report.degraded_epsilon = epsilon > 1e-2;
  if (params.empty()) return report;

  std::vector<Matrix> saved;
  saved.reserve(params.size());
  for (Parameter* p : params) {
    saved.push_back(p->grad);
    p->zero_grad();
  }

  auto evaluate = [&]() {
    Graph g;
    const double v = build(g).scalar();
    if (!std::isfinite(v)) throw NumericError("gradient_check: non-finite loss");
    return v;
  };

  {
    Graph g;
    Node loss = build(g);
    if (!std::isfinite(loss.scalar())) throw NumericError("gradient_check: non-finite loss");
    g.backward(loss);
  }
  if (analytic_hook) analytic_hook(params);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter* p = params[k];
    ParamCheck pc;
    pc.name = p->name;
    // A parameter may appear twice (tied matrices); check it once.
    bool duplicate = false;
    for (std::size_t m = 0; m < k; ++m) duplicate = duplicate || params[m] == p;
    if (duplicate) continue;
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      double& theta = p->value.data()[i];
      const double orig = theta;
      theta = orig + epsilon;
      const double fp = evaluate();
      theta = orig - epsilon;
      const double fm = evaluate();
      theta = orig;
      const double numeric = (fp - fm) / (2.0 * epsilon);
      const double analytic = p->grad.data()[i];
      const double err = relative_error(analytic, numeric);
      if (i == 0 || err > pc.max_rel_error) {
        pc.max_rel_error = err;
        pc.worst_index = static_cast<std::size_t>(i);
        pc.analytic = analytic;
        pc.numeric = numeric;
      }
    }
    report.max_rel_error = std::max(report.max_rel_error, pc.max_rel_error);
    report.params.push_back(std::move(pc));
  }
  report.passed = report.max_rel_error <= tolerance;

  for (std::size_t k = params.size(); k-- > 0;) params[k]->grad = saved[k];
  return report;
}

}  // namespace ltmn::ad
