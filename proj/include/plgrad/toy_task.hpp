// Assignment-style benchmark: f(P_b) = |P_b - P_t|_F^2 against a doubly
// stochastic target with 1/k + t on the diagonal.
#pragma once

#include <Eigen/Dense>
#include <utility>

#include "plgrad/control_variate.hpp"
#include "plgrad/estimators.hpp"

namespace plgrad {

struct TargetMatrix {
  int k = 0;
  double t = 0.0;
  Eigen::MatrixXd m;
};

// 1/k + t on the diagonal, 1/k - t/(k-1) elsewhere. Requires k >= 2 and
// t small enough that off-diagonal entries stay nonnegative.
TargetMatrix target_matrix(int k, double t);

// Squared Frobenius distance; accepts hard and relaxed matrices.
double toy_loss(const Eigen::MatrixXd& p, const TargetMatrix& target);

// Exhaustive minimum of toy_loss over all k! permutations; k <= 8.
std::pair<Permutation, double> brute_force_optimum(int k, double t);

PermutationObjective toy_objective(const TargetMatrix& target);
RelaxedObjective toy_relaxed_objective(const TargetMatrix& target);

}  // namespace plgrad
