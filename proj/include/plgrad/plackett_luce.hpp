// The Plackett-Luce distribution over permutations: log-probability, analytic
// score gradient, Gumbel-argsort sampling, conditional noise sampling, mode,
// and an exact enumeration oracle for small k.
#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "plgrad/random.hpp"

namespace plgrad {

// b[i] is the (0-based) item placed at position i; position 0 holds the
// largest Gumbel value under the descending-order convention.
using Permutation = Eigen::VectorXi;

bool is_permutation(const Permutation& b);

// Indices of z sorted in strictly descending order; ties broken by lower
// original index.
Permutation argsort_descending(const Eigen::VectorXd& z);

// pos[item] = position of item in b.
Permutation inverse_permutation(const Permutation& b);

// Stable logsumexp of a vector.
double logsumexp(const Eigen::VectorXd& x);

struct GumbelDraw {
  Eigen::VectorXd z;
  Eigen::VectorXd seeds;
};

struct ConditionalGumbelDraw {
  Eigen::VectorXd z_tilde;            // item order; argsorts to b exactly
  Eigen::VectorXd cumulative_scores;  // Theta_i on normalized scores, by position
  Eigen::VectorXd seeds;
};

double log_prob(const Eigen::VectorXd& theta, const Permutation& b);

// d/dtheta log p(b | theta); coordinates sum to zero.
Eigen::VectorXd grad_log_prob(const Eigen::VectorXd& theta, const Permutation& b);

// z_i = theta_i - log(-log v_i); b = argsort-descending(z). Over random seeds
// b is Plackett-Luce distributed (Gumbel argsort).
std::pair<Permutation, GumbelDraw> sample(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& seeds);
std::pair<Permutation, GumbelDraw> sample(const Eigen::VectorXd& theta,
                                          RandomStream& stream);

// Reparametrized draw from p(z | b, theta) as a chain of truncated Gumbels.
// Scores are normalized internally so that sum(exp theta) = 1.
ConditionalGumbelDraw sample_conditional(const Eigen::VectorXd& theta,
                                         const Permutation& b,
                                         const Eigen::VectorXd& seeds);
ConditionalGumbelDraw sample_conditional(const Eigen::VectorXd& theta,
                                         const Permutation& b,
                                         RandomStream& stream);

// Descending order permutation of the scores, ties by lower index.
Permutation mode(const Eigen::VectorXd& theta);

// theta - logsumexp(theta); leaves log_prob unchanged for every b.
Eigen::VectorXd normalize_scores(const Eigen::VectorXd& theta);

// All k! permutations in lexicographic order with their probabilities.
// Rejects k > 8.
std::vector<std::pair<Permutation, double>> enumerate_distribution(
    const Eigen::VectorXd& theta);

}  // namespace plgrad
