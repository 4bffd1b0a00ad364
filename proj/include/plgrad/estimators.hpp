// Gradient estimators for d/dtheta E_{p(b|theta)}[f(b)]: exact enumeration,
// REINFORCE, and the control-variate estimators with conditionally
// marginalized noise (relax: free-form variate; rebar: rescaled relaxation).
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "plgrad/control_variate.hpp"
#include "plgrad/plackett_luce.hpp"
#include "plgrad/random.hpp"
#include "plgrad/tape.hpp"

namespace plgrad {

using PermutationObjective = std::function<double(const Permutation&)>;

enum class EstimatorKind { kExact, kReinforce, kRelax, kRebar };

struct EstimatorOutput {
  Eigen::VectorXd grad_theta;
  ControlVariateGrads grad_phi;  // gradient of |grad_theta|^2 w.r.t. phi
  bool has_phi_grad = false;
  double f_value = 0.0;
  Eigen::VectorXd z;
  Eigen::VectorXd z_tilde;
  Permutation b;
};

// Exact gradient sum_b p(b|theta) f(b) grad_log_prob(theta, b); k <= 8.
Eigen::VectorXd exact_grad(const PermutationObjective& f,
                           const Eigen::VectorXd& theta);
double exact_expectation(const PermutationObjective& f,
                         const Eigen::VectorXd& theta);

EstimatorOutput reinforce_grad(const PermutationObjective& f,
                               const Eigen::VectorXd& theta,
                               RandomStream stream);

// Free-form control variate; f_relaxed may be null for black-box objectives.
EstimatorOutput relax_grad(const PermutationObjective& f,
                           const RelaxedObjective* f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams& cv, RandomStream stream,
                           bool want_phi_grad = true);

// c(z) = eta * f(sigma(z, tau)); requires the relaxed evaluation path.
EstimatorOutput rebar_grad(const PermutationObjective& f,
                           const RelaxedObjective& f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams& cv, RandomStream stream,
                           bool want_phi_grad = true);

// Tape twins of the reparametrized samplers, exposed for gradient checks.
// z = theta + (-log(-log v)); the identity Jacobian sampler.
Tape::Var gumbel_noise_on_tape(Tape& t, Tape::Var theta,
                               const Eigen::VectorXd& seeds);
// Truncated-Gumbel chain for p(z | b, theta); expects normalized scores and
// returns z-tilde in item order.
Tape::Var conditional_chain_on_tape(Tape& t, Tape::Var theta_normalized,
                                    const Permutation& b,
                                    const Eigen::VectorXd& seeds);

struct VarianceDiag {
  Eigen::VectorXd mean;
  Eigen::VectorXd per_coordinate_variance;
  double log_total_variance = 0.0;
};

// Unbiased sample variance over n independent estimator draws; draw i uses
// stream.child(i), so the result does not depend on evaluation order.
VarianceDiag variance_diag(
    const std::function<Eigen::VectorXd(RandomStream)>& single_draw, int n,
    const RandomStream& stream);

VarianceDiag variance_diag(EstimatorKind kind, const PermutationObjective& f,
                           const RelaxedObjective* f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams* cv, int n,
                           const RandomStream& stream);

}  // namespace plgrad
