// Variational optimization of a black-box function over permutations:
// min_theta E_{p(b|theta)}[f(b)] by stochastic gradient descent with
// simultaneous control-variate training.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <vector>

#include "plgrad/estimators.hpp"

namespace plgrad {

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
};

// Standard adaptive moment update, beta = (0.9, 0.999), eps = 1e-8, with bias
// correction. Mutates params and state in place.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad,
               AdamState& state, double lr);

struct TrainConfig {
  int iters = 5000;
  double lr_theta = 0.1;
  double lr_phi = 1e-3;
  int batch_size = 1;
  EstimatorKind estimator = EstimatorKind::kRelax;
  std::uint64_t seed = 0;
  int log_every = 50;
  int variance_probe_n = 64;
  int cv_hidden = 64;
  int mc_probe_n = 512;  // objective probe when enumeration is unavailable
  double stop_objective = -std::numeric_limits<double>::infinity();
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;      // exact for k <= 8, Monte-Carlo mean otherwise
  double log_variance = 0.0;
  std::uint64_t theta_hash = 0;
};

struct TrainResult {
  Eigen::VectorXd theta;
  ControlVariateParams cv;
  std::vector<TraceRow> trace;
  Permutation decision;  // mode of the final distribution
  bool diverged = false;
  int iters_run = 0;
};

// f_relaxed may be null; required for the rebar estimator.
TrainResult train(const PermutationObjective& f,
                  const RelaxedObjective* f_relaxed, int k,
                  const TrainConfig& config);

std::uint64_t hash_vector(const Eigen::VectorXd& x);

}  // namespace plgrad
