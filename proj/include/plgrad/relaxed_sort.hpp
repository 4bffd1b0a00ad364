// Continuous relaxation of the descending-sort operator onto unimodal
// row-stochastic matrices, plus hard permutation matrices.
#pragma once

#include <Eigen/Dense>

#include "plgrad/plackett_luce.hpp"
#include "plgrad/tape.hpp"

namespace plgrad {

// Row i of the result is softmax_j[((k - 1 - 2i) z_j - sum_l |z_j - z_l|)/tau]
// (0-based i). For distinct z the row-wise argmax equals argsort-descending(z)
// and the matrix converges to the hard sort permutation matrix as tau -> 0.
Eigen::MatrixXd relaxed_permutation_matrix(const Eigen::VectorXd& z, double tau);

// Tape twin of the same construction; differentiable in z and tau.
Tape::Var relaxed_permutation_matrix(Tape& t, Tape::Var z, Tape::Var tau);

// Binary matrix with p(i, b_i) = 1.
Eigen::MatrixXd hard_permutation_matrix(const Permutation& b);

}  // namespace plgrad
