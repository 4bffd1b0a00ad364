#include "plgrad/varopt.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace plgrad {

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grad,
               AdamState& state, double lr) {
  if (params.size() != grad.size()) {
    throw std::invalid_argument("parameter/gradient shape mismatch");
  }
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  if (state.m.size() != params.size()) {
    state.m = Eigen::VectorXd::Zero(params.size());
    state.v = Eigen::VectorXd::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = beta1 * state.m + (1.0 - beta1) * grad;
  state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  params -= (lr * (state.m / c1).array() /
             ((state.v / c2).array().sqrt() + eps))
                .matrix();
}

std::uint64_t hash_vector(const Eigen::VectorXd& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  const auto* bytes = reinterpret_cast<const unsigned char*>(x.data());
  for (Eigen::Index i = 0; i < x.size() * 8; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

void validate(const TrainConfig& config, int k,
              const RelaxedObjective* f_relaxed) {
  if (config.iters < 1) throw std::invalid_argument("iters must be >= 1");
  if (!(config.lr_theta > 0.0) || !(config.lr_phi > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (config.estimator == EstimatorKind::kExact && k > 8) {
    throw std::invalid_argument("exact estimator requires k <= 8");
  }
  if (config.estimator == EstimatorKind::kRebar && f_relaxed == nullptr) {
    throw std::invalid_argument("rebar needs a relaxed objective");
  }
}

}  // namespace

TrainResult train(const PermutationObjective& f,
                  const RelaxedObjective* f_relaxed, int k,
                  const TrainConfig& config) {
  validate(config, k, f_relaxed);
  const RandomStream root(config.seed);
  const RandomStream draw_lane = root.child(0);
  const RandomStream probe_lane = root.child(1);

  TrainResult result;
  result.theta = Eigen::VectorXd::Zero(k);
  result.cv = cv_init(k, config.cv_hidden, root.child_key(2));

  const bool owns_cv = config.estimator == EstimatorKind::kRelax ||
                       config.estimator == EstimatorKind::kRebar;
  Eigen::VectorXd phi = result.cv.flatten();
  AdamState theta_state, phi_state;

  auto probe_objective = [&](int iter) {
    if (k <= 8) return exact_expectation(f, result.theta);
    RandomStream mc = probe_lane.child(iter).child(0);
    double mean = 0.0;
    for (int j = 0; j < config.mc_probe_n; ++j) {
      RandomStream s = mc.child(j);
      mean += f(sample(result.theta, s).first);
    }
    return mean / config.mc_probe_n;
  };

  auto one_draw = [&](RandomStream s) {
    switch (config.estimator) {
      case EstimatorKind::kReinforce:
        return reinforce_grad(f, result.theta, s);
      case EstimatorKind::kRelax:
        return relax_grad(f, f_relaxed, result.theta, result.cv, s, true);
      case EstimatorKind::kRebar:
        return rebar_grad(f, *f_relaxed, result.theta, result.cv, s, true);
      default:
        throw std::logic_error("unreachable");
    }
  };

  bool stop = false;
  for (int iter = 0; iter < config.iters && !stop; ++iter) {
    if (iter % config.log_every == 0) {
      TraceRow row;
      row.iter = iter;
      row.objective = probe_objective(iter);
      const VarianceDiag diag = variance_diag(
          config.estimator, f, f_relaxed, result.theta,
          owns_cv ? &result.cv : nullptr, config.variance_probe_n,
          probe_lane.child(iter).child(1));
      row.log_variance = diag.log_total_variance;
      row.theta_hash = hash_vector(result.theta);
      result.trace.push_back(row);
      if (!std::isfinite(row.objective) || !result.theta.allFinite()) {
        result.diverged = true;
        break;
      }
      if (row.objective <= config.stop_objective) stop = true;
    }

    Eigen::VectorXd grad_theta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd grad_phi = Eigen::VectorXd::Zero(phi.size());
    if (config.estimator == EstimatorKind::kExact) {
      grad_theta = exact_grad(f, result.theta);
    } else {
      const RandomStream iter_stream = draw_lane.child(iter);
      for (int j = 0; j < config.batch_size; ++j) {
        const EstimatorOutput out = one_draw(iter_stream.child(j));
        grad_theta += out.grad_theta;
        if (out.has_phi_grad) grad_phi += out.grad_phi.flatten();
      }
      grad_theta /= config.batch_size;
      grad_phi /= config.batch_size;
    }

    adam_step(result.theta, grad_theta, theta_state, config.lr_theta);
    if (owns_cv) {
      adam_step(phi, grad_phi, phi_state, config.lr_phi);
      result.cv = ControlVariateParams::unflatten(phi, k, config.cv_hidden);
    }
    result.iters_run = iter + 1;
  }

  result.decision = mode(result.theta);
  return result;
}

}  // namespace plgrad
