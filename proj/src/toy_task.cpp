#include "plgrad/toy_task.hpp"

#include <numeric>
#include <stdexcept>

#include "plgrad/relaxed_sort.hpp"

namespace plgrad {

TargetMatrix target_matrix(int k, double t) {
  if (k < 2) throw std::invalid_argument("target needs k >= 2");
  const double off = 1.0 / k - t / (k - 1);
  if (off < 0.0) {
    throw std::invalid_argument("t too large: off-diagonal would be negative");
  }
  TargetMatrix target;
  target.k = k;
  target.t = t;
  target.m = Eigen::MatrixXd::Constant(k, k, off);
  target.m.diagonal().setConstant(1.0 / k + t);
  return target;
}

double toy_loss(const Eigen::MatrixXd& p, const TargetMatrix& target) {
  if (p.rows() != target.k || p.cols() != target.k) {
    throw std::invalid_argument("matrix shape does not match target");
  }
  return (p - target.m).squaredNorm();
}

std::pair<Permutation, double> brute_force_optimum(int k, double t) {
  if (k > 8) throw std::invalid_argument("brute force limited to k <= 8");
  const TargetMatrix target = target_matrix(k, t);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Permutation best;
  double best_loss = std::numeric_limits<double>::infinity();
  do {
    const Permutation b = Eigen::Map<const Permutation>(perm.data(), k);
    const double loss = toy_loss(hard_permutation_matrix(b), target);
    if (loss < best_loss) {
      best_loss = loss;
      best = b;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, best_loss};
}

PermutationObjective toy_objective(const TargetMatrix& target) {
  return [target](const Permutation& b) {
    return toy_loss(hard_permutation_matrix(b), target);
  };
}

RelaxedObjective toy_relaxed_objective(const TargetMatrix& target) {
  return [target](Tape& t, Tape::Var p) {
    return frobenius_sq(t, t.sub(p, t.constant(target.m)));
  };
}

}  // namespace plgrad
