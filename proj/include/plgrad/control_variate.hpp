// Learned control variates: c(z) = f(sigma(z, tau)) + rho(z) with a two-layer
// ReLU network rho for the free-form estimator, and c(z) = eta * f(sigma(z,
// tau)) for the rescaled-relaxation estimator. When the objective has no
// relaxed-matrix evaluation path the free-form variate reduces to rho alone.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "plgrad/tape.hpp"

namespace plgrad {

struct ControlVariateParams {
  Eigen::MatrixXd w1;  // hidden x k
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // 1 x hidden
  double b2 = 0.0;
  double log_tau = 0.0;
  double eta = 1.0;

  int hidden() const { return static_cast<int>(w1.rows()); }
  int input_dim() const { return static_cast<int>(w1.cols()); }

  // Flat layout: w1 (row-major by Eigen default col-major storage), b1, w2,
  // b2, log_tau, eta. Used by the optimizer.
  Eigen::VectorXd flatten() const;
  static ControlVariateParams unflatten(const Eigen::VectorXd& flat, int k,
                                        int hidden);
};

// Per-parameter gradients, same shapes as the parameters.
using ControlVariateGrads = ControlVariateParams;

// Weights uniform in [-a, a] with a = 1/sqrt(fan_in); log_tau = 0, eta = 1.
ControlVariateParams cv_init(int k, int hidden, std::uint64_t seed);

// Objective evaluated on a (relaxed) matrix, recorded on the tape.
using RelaxedObjective = std::function<Tape::Var(Tape&, Tape::Var)>;

struct CvLeaves {
  Tape::Var w1, b1, w2, b2, log_tau, eta;
};

CvLeaves cv_leaves(Tape& t, const ControlVariateParams& params);

// f(sigma(z, exp(log_tau))) + w2 relu(w1 z + b1) + b2; pass f = nullptr for
// the rho-only variate used with black-box objectives.
Tape::Var cv_eval_relax(Tape& t, const CvLeaves& cv, Tape::Var z,
                        const RelaxedObjective* f);

// eta * f(sigma(z, exp(log_tau)))
Tape::Var cv_eval_rebar(Tape& t, const CvLeaves& cv, Tape::Var z,
                        const RelaxedObjective& f);

}  // namespace plgrad
