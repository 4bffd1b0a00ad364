// Define-by-run reverse-mode differentiation over dense matrices. Vectors are
// k x 1 and scalars 1 x 1. Values are computed eagerly as nodes are built.
//
// gradient() records the adjoints as ordinary tape nodes, so a gradient is
// itself differentiable; differentiating a squared-gradient-norm node w.r.t.
// other leaves yields the exact mixed second-order term.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace plgrad {

class Tape {
 public:
  struct Var {
    int id = -1;
  };

  Var leaf(const Eigen::MatrixXd& value);
  Var leaf(double value);
  Var constant(const Eigen::MatrixXd& value);
  Var constant(double value);

  // Elementwise binary ops accept equal shapes or a 1x1 on either side.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var logaddexp(Var a, Var b);

  Var neg(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var abs(Var a);   // derivative at 0 taken as 0
  Var relu(Var a);  // derivative at 0 taken as 0

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var sum(Var a);  // all entries -> 1x1

  // Column-vector indexing; indices are constants and carry no gradient.
  Var gather(Var a, std::vector<int> indices);
  // 1x1 nodes -> column vector.
  Var stack(const std::vector<Var>& scalars);

  const Eigen::MatrixXd& value(Var v) const;
  double scalar_value(Var v) const;

  // Adjoint of `output` (must be 1x1) w.r.t. each entry of `wrt`, recorded as
  // new nodes. Inputs the backward sweep never reaches yield zero constants.
  std::vector<Var> gradient(Var output, const std::vector<Var>& wrt);

  std::size_t size() const { return nodes_.size(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

 private:
  enum class Op {
    kLeaf,
    kConst,
    kAdd,
    kSub,
    kNeg,
    kMul,
    kDiv,
    kMatMul,
    kTranspose,
    kExp,
    kLog,
    kAbs,
    kRelu,
    kLogAddExp,
    kSum,
    kGather,
    kScatter,
    kStack,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Eigen::MatrixXd value;
    std::vector<int> index;  // gather/scatter targets or stack inputs
    int scatter_rows = 0;
  };

  Var scatter(Var a, std::vector<int> indices, int rows);
  Var push(Node node);
  Var binary(Op op, Var a, Var b);
  const Node& node(Var v) const { return nodes_[v.id]; }
  bool is_scalar(Var v) const;
  // Sums `g` down to a 1x1 when the forward op broadcast `target` up.
  Var reduce_like(Var g, Var target);
  void accumulate(std::vector<int>& adjoint, int node_id, Var contribution);

  std::vector<Node> nodes_;
};

// Composite builders on top of the primitive ops.
Tape::Var softmax_rows(Tape& t, Tape::Var logits);
Tape::Var logsumexp_vec(Tape& t, Tape::Var v);
Tape::Var frobenius_sq(Tape& t, Tape::Var a);

// A program is a builder from input leaves to a scalar output.
using ProgramBuilder =
    std::function<Tape::Var(Tape&, const std::vector<Tape::Var>&)>;

std::pair<double, std::vector<Eigen::MatrixXd>> evaluate_with_gradient(
    const ProgramBuilder& program, const std::vector<Eigen::MatrixXd>& inputs);

struct GradientCheckReport {
  double max_rel_error = 0.0;
  int compared = 0;
  int excluded = 0;  // coordinates sitting on a kink (one-sided slopes differ)
};

GradientCheckReport finite_difference_check(
    const ProgramBuilder& program, const std::vector<Eigen::MatrixXd>& inputs,
    double h);

}  // namespace plgrad
