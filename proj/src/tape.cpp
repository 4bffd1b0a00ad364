#include "plgrad/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "plgrad/gumbel.hpp"

namespace plgrad {

namespace {

Eigen::MatrixXd broadcast_to(const Eigen::MatrixXd& x, Eigen::Index rows,
                             Eigen::Index cols) {
  if (x.rows() == rows && x.cols() == cols) return x;
  return Eigen::MatrixXd::Constant(rows, cols, x(0, 0));
}

}  // namespace

Tape::Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

bool Tape::is_scalar(Var v) const {
  return node(v).value.rows() == 1 && node(v).value.cols() == 1;
}

Tape::Var Tape::leaf(const Eigen::MatrixXd& value) {
  return push(Node{Op::kLeaf, -1, -1, value, {}, 0});
}

Tape::Var Tape::leaf(double value) {
  return leaf(Eigen::MatrixXd::Constant(1, 1, value));
}

Tape::Var Tape::constant(const Eigen::MatrixXd& value) {
  return push(Node{Op::kConst, -1, -1, value, {}, 0});
}

Tape::Var Tape::constant(double value) {
  return constant(Eigen::MatrixXd::Constant(1, 1, value));
}

Tape::Var Tape::binary(Op op, Var a, Var b) {
  const Eigen::MatrixXd& va = node(a).value;
  const Eigen::MatrixXd& vb = node(b).value;
  const bool sa = va.size() == 1;
  const bool sb = vb.size() == 1;
  if (!sa && !sb && (va.rows() != vb.rows() || va.cols() != vb.cols())) {
    throw std::invalid_argument("shape mismatch in elementwise op");
  }
  const Eigen::Index rows = sa ? vb.rows() : va.rows();
  const Eigen::Index cols = sa ? vb.cols() : va.cols();
  const Eigen::MatrixXd xa = broadcast_to(va, rows, cols);
  const Eigen::MatrixXd xb = broadcast_to(vb, rows, cols);
  Eigen::MatrixXd out(rows, cols);
  switch (op) {
    case Op::kAdd:
      out = xa + xb;
      break;
    case Op::kSub:
      out = xa - xb;
      break;
    case Op::kMul:
      out = xa.cwiseProduct(xb);
      break;
    case Op::kDiv:
      out = xa.cwiseQuotient(xb);
      break;
    case Op::kLogAddExp:
      for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
          out(i, j) = plgrad::logaddexp(xa(i, j), xb(i, j));
        }
      }
      break;
    default:
      throw std::logic_error("not a binary op");
  }
  return push(Node{op, a.id, b.id, std::move(out), {}, 0});
}

Tape::Var Tape::add(Var a, Var b) { return binary(Op::kAdd, a, b); }
Tape::Var Tape::sub(Var a, Var b) { return binary(Op::kSub, a, b); }
Tape::Var Tape::mul(Var a, Var b) { return binary(Op::kMul, a, b); }
Tape::Var Tape::div(Var a, Var b) { return binary(Op::kDiv, a, b); }
Tape::Var Tape::logaddexp(Var a, Var b) { return binary(Op::kLogAddExp, a, b); }

Tape::Var Tape::neg(Var a) {
  return push(Node{Op::kNeg, a.id, -1, -node(a).value, {}, 0});
}

Tape::Var Tape::exp(Var a) {
  return push(Node{Op::kExp, a.id, -1, node(a).value.array().exp(), {}, 0});
}

Tape::Var Tape::log(Var a) {
  return push(Node{Op::kLog, a.id, -1, node(a).value.array().log(), {}, 0});
}

Tape::Var Tape::abs(Var a) {
  return push(Node{Op::kAbs, a.id, -1, node(a).value.array().abs(), {}, 0});
}

Tape::Var Tape::relu(Var a) {
  return push(Node{Op::kRelu, a.id, -1, node(a).value.cwiseMax(0.0), {}, 0});
}

Tape::Var Tape::matmul(Var a, Var b) {
  const Eigen::MatrixXd& va = node(a).value;
  const Eigen::MatrixXd& vb = node(b).value;
  if (va.cols() != vb.rows()) {
    throw std::invalid_argument("shape mismatch in matmul");
  }
  return push(Node{Op::kMatMul, a.id, b.id, va * vb, {}, 0});
}

Tape::Var Tape::transpose(Var a) {
  return push(Node{Op::kTranspose, a.id, -1, node(a).value.transpose(), {}, 0});
}

Tape::Var Tape::sum(Var a) {
  return push(Node{Op::kSum, a.id, -1,
                   Eigen::MatrixXd::Constant(1, 1, node(a).value.sum()),
                   {},
                   0});
}

Tape::Var Tape::gather(Var a, std::vector<int> indices) {
  const Eigen::MatrixXd& va = node(a).value;
  if (va.cols() != 1) {
    throw std::invalid_argument("gather expects a column vector");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), 1);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0 || indices[i] >= va.rows()) {
      throw std::invalid_argument("gather index out of range");
    }
    out(static_cast<Eigen::Index>(i), 0) = va(indices[i], 0);
  }
  return push(Node{Op::kGather, a.id, -1, std::move(out), std::move(indices), 0});
}

Tape::Var Tape::scatter(Var a, std::vector<int> indices, int rows) {
  const Eigen::MatrixXd& va = node(a).value;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, 1);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out(indices[i], 0) += va(static_cast<Eigen::Index>(i), 0);
  }
  return push(
      Node{Op::kScatter, a.id, -1, std::move(out), std::move(indices), rows});
}

Tape::Var Tape::stack(const std::vector<Var>& scalars) {
  if (scalars.empty()) {
    throw std::invalid_argument("stack needs at least one input");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(scalars.size()), 1);
  std::vector<int> ids;
  ids.reserve(scalars.size());
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (!is_scalar(scalars[i])) {
      throw std::invalid_argument("stack inputs must be scalars");
    }
    out(static_cast<Eigen::Index>(i), 0) = node(scalars[i]).value(0, 0);
    ids.push_back(scalars[i].id);
  }
  return push(Node{Op::kStack, -1, -1, std::move(out), std::move(ids), 0});
}

const Eigen::MatrixXd& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar_value(Var v) const {
  if (!is_scalar(v)) throw std::invalid_argument("node is not a scalar");
  return node(v).value(0, 0);
}

Tape::Var Tape::reduce_like(Var g, Var target) {
  if (is_scalar(target) && !is_scalar(g)) return sum(g);
  return g;
}

void Tape::accumulate(std::vector<int>& adjoint, int node_id,
                      Var contribution) {
  if (adjoint[node_id] < 0) {
    adjoint[node_id] = contribution.id;
  } else {
    adjoint[node_id] = add(Var{adjoint[node_id]}, contribution).id;
  }
}

std::vector<Tape::Var> Tape::gradient(Var output,
                                      const std::vector<Var>& wrt) {
  if (!is_scalar(output)) {
    throw std::invalid_argument("gradient target must be a scalar");
  }
  std::vector<int> adjoint(static_cast<std::size_t>(output.id) + 1, -1);
  adjoint[output.id] = constant(1.0).id;

  for (int i = output.id; i >= 0; --i) {
    if (adjoint[i] < 0) continue;
    const Var u{adjoint[i]};
    // Copy fields we need: push() may reallocate nodes_.
    const Op op = nodes_[i].op;
    const Var a{nodes_[i].a};
    const Var b{nodes_[i].b};
    const Var self{i};
    switch (op) {
      case Op::kLeaf:
      case Op::kConst:
        break;
      case Op::kAdd:
        accumulate(adjoint, a.id, reduce_like(u, a));
        accumulate(adjoint, b.id, reduce_like(u, b));
        break;
      case Op::kSub:
        accumulate(adjoint, a.id, reduce_like(u, a));
        accumulate(adjoint, b.id, reduce_like(neg(u), b));
        break;
      case Op::kNeg:
        accumulate(adjoint, a.id, neg(u));
        break;
      case Op::kMul:
        accumulate(adjoint, a.id, reduce_like(mul(u, b), a));
        accumulate(adjoint, b.id, reduce_like(mul(u, a), b));
        break;
      case Op::kDiv:
        accumulate(adjoint, a.id, reduce_like(div(u, b), a));
        accumulate(adjoint, b.id, reduce_like(neg(mul(u, div(self, b))), b));
        break;
      case Op::kMatMul:
        accumulate(adjoint, a.id, matmul(u, transpose(b)));
        accumulate(adjoint, b.id, matmul(transpose(a), u));
        break;
      case Op::kTranspose:
        accumulate(adjoint, a.id, transpose(u));
        break;
      case Op::kExp:
        accumulate(adjoint, a.id, mul(u, self));
        break;
      case Op::kLog:
        accumulate(adjoint, a.id, div(u, a));
        break;
      case Op::kAbs: {
        Eigen::MatrixXd sign = nodes_[a.id].value.array().sign();
        accumulate(adjoint, a.id, mul(u, constant(sign)));
        break;
      }
      case Op::kRelu: {
        Eigen::MatrixXd step = (nodes_[a.id].value.array() > 0.0).cast<double>();
        accumulate(adjoint, a.id, mul(u, constant(step)));
        break;
      }
      case Op::kLogAddExp:
        accumulate(adjoint, a.id, reduce_like(mul(u, exp(sub(a, self))), a));
        accumulate(adjoint, b.id, reduce_like(mul(u, exp(sub(b, self))), b));
        break;
      case Op::kSum: {
        const Eigen::MatrixXd& va = nodes_[a.id].value;
        accumulate(adjoint, a.id,
                   mul(u, constant(Eigen::MatrixXd::Ones(va.rows(), va.cols()))));
        break;
      }
      case Op::kGather: {
        std::vector<int> idx = nodes_[i].index;
        const int rows = static_cast<int>(nodes_[a.id].value.rows());
        accumulate(adjoint, a.id, scatter(u, std::move(idx), rows));
        break;
      }
      case Op::kScatter: {
        std::vector<int> idx = nodes_[i].index;
        accumulate(adjoint, a.id, gather(u, std::move(idx)));
        break;
      }
      case Op::kStack: {
        const std::vector<int> ids = nodes_[i].index;
        for (std::size_t j = 0; j < ids.size(); ++j) {
          accumulate(adjoint, ids[j], gather(u, {static_cast<int>(j)}));
        }
        break;
      }
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (const Var& w : wrt) {
    if (w.id <= output.id && adjoint[w.id] >= 0) {
      out.push_back(Var{adjoint[w.id]});
    } else {
      const Eigen::MatrixXd& v = node(w).value;
      out.push_back(constant(Eigen::MatrixXd::Zero(v.rows(), v.cols())));
    }
  }
  return out;
}

Tape::Var softmax_rows(Tape& t, Tape::Var logits) {
  const Eigen::MatrixXd& x = t.value(logits);
  const Eigen::Index n = x.cols();
  // Subtracting the row max is a per-row constant shift: exact for softmax.
  const Eigen::MatrixXd rowmax = x.rowwise().maxCoeff().replicate(1, n);
  Tape::Var e = t.exp(t.sub(logits, t.constant(rowmax)));
  Tape::Var rowsum = t.matmul(e, t.constant(Eigen::MatrixXd::Ones(n, 1)));
  Tape::Var denom = t.matmul(rowsum, t.constant(Eigen::MatrixXd::Ones(1, n)));
  return t.div(e, denom);
}

Tape::Var logsumexp_vec(Tape& t, Tape::Var v) {
  const double m = t.value(v).maxCoeff();
  Tape::Var shifted = t.sub(v, t.constant(m));
  return t.add(t.constant(m), t.log(t.sum(t.exp(shifted))));
}

Tape::Var frobenius_sq(Tape& t, Tape::Var a) { return t.sum(t.mul(a, a)); }

std::pair<double, std::vector<Eigen::MatrixXd>> evaluate_with_gradient(
    const ProgramBuilder& program, const std::vector<Eigen::MatrixXd>& inputs) {
  Tape t;
  std::vector<Tape::Var> leaves;
  leaves.reserve(inputs.size());
  for (const auto& x : inputs) leaves.push_back(t.leaf(x));
  Tape::Var out = program(t, leaves);
  std::vector<Tape::Var> grads = t.gradient(out, leaves);
  std::vector<Eigen::MatrixXd> grad_values;
  grad_values.reserve(grads.size());
  for (const auto& g : grads) grad_values.push_back(t.value(g));
  return {t.scalar_value(out), std::move(grad_values)};
}

GradientCheckReport finite_difference_check(
    const ProgramBuilder& program, const std::vector<Eigen::MatrixXd>& inputs,
    double h) {
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  auto eval = [&](const std::vector<Eigen::MatrixXd>& x) {
    Tape t;
    std::vector<Tape::Var> leaves;
    for (const auto& m : x) leaves.push_back(t.leaf(m));
    return t.scalar_value(program(t, leaves));
  };

  const auto [f0, grads] = evaluate_with_gradient(program, inputs);
  GradientCheckReport report;
  std::vector<Eigen::MatrixXd> x = inputs;
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (Eigen::Index j = 0; j < x[n].cols(); ++j) {
      for (Eigen::Index i = 0; i < x[n].rows(); ++i) {
        const double saved = x[n](i, j);
        x[n](i, j) = saved + h;
        const double fp = eval(x);
        x[n](i, j) = saved - h;
        const double fm = eval(x);
        x[n](i, j) = saved;

        const double left = (f0 - fm) / h;
        const double right = (fp - f0) / h;
        // One-sided slopes that disagree mark a kink; exclude the coordinate.
        if (std::abs(left - right) >
            1e-2 * (1.0 + std::abs(left) + std::abs(right))) {
          ++report.excluded;
          continue;
        }
        const double central = (fp - fm) / (2.0 * h);
        const double ad = grads[n](i, j);
        const double denom =
            std::max({1e-3, std::abs(central), std::abs(ad)});
        report.max_rel_error =
            std::max(report.max_rel_error, std::abs(ad - central) / denom);
        ++report.compared;
      }
    }
  }
  return report;
}

}  // namespace plgrad
