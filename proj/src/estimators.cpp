#include "plgrad/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "plgrad/gumbel.hpp"

namespace plgrad {

namespace {

double checked_objective(const PermutationObjective& f, const Permutation& b) {
  const double value = f(b);
  if (!std::isfinite(value)) {
    throw std::runtime_error("objective returned a non-finite value");
  }
  return value;
}

Eigen::VectorXd draw_seeds(RandomStream& stream, int k) {
  Eigen::VectorXd seeds(k);
  for (int i = 0; i < k; ++i) seeds[i] = stream.uniform();
  return seeds;
}

}  // namespace

Eigen::VectorXd exact_grad(const PermutationObjective& f,
                           const Eigen::VectorXd& theta) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  for (const auto& [b, prob] : enumerate_distribution(theta)) {
    grad += prob * checked_objective(f, b) * grad_log_prob(theta, b);
  }
  return grad;
}

double exact_expectation(const PermutationObjective& f,
                         const Eigen::VectorXd& theta) {
  double mean = 0.0;
  for (const auto& [b, prob] : enumerate_distribution(theta)) {
    mean += prob * checked_objective(f, b);
  }
  return mean;
}

EstimatorOutput reinforce_grad(const PermutationObjective& f,
                               const Eigen::VectorXd& theta,
                               RandomStream stream) {
  RandomStream zs = stream.child(0);
  auto [b, draw] = sample(theta, zs);
  EstimatorOutput out;
  out.f_value = checked_objective(f, b);
  out.grad_theta = out.f_value * grad_log_prob(theta, b);
  out.z = draw.z;
  out.b = b;
  return out;
}

Tape::Var gumbel_noise_on_tape(Tape& t, Tape::Var theta,
                               const Eigen::VectorXd& seeds) {
  Eigen::VectorXd noise(seeds.size());
  for (int i = 0; i < seeds.size(); ++i) noise[i] = sample_gumbel(0.0, seeds[i]);
  return t.add(theta, t.constant(noise));
}

Tape::Var conditional_chain_on_tape(Tape& t, Tape::Var theta_normalized,
                                    const Permutation& b,
                                    const Eigen::VectorXd& seeds) {
  const int k = static_cast<int>(b.size());
  std::vector<int> order(b.data(), b.data() + k);
  Tape::Var by_position = t.gather(theta_normalized, order);

  // log Theta_i = log sum_{j >= i} exp theta'[b_j]
  std::vector<Tape::Var> log_cum(k);
  log_cum[k - 1] = t.gather(by_position, {k - 1});
  for (int i = k - 2; i >= 0; --i) {
    log_cum[i] = t.logaddexp(t.gather(by_position, {i}), log_cum[i + 1]);
  }

  // Top of the chain is Gumbel(0,1): no dependence on theta under the
  // normalization, so it enters as a constant.
  std::vector<Tape::Var> chain(k);
  chain[0] = t.constant(sample_gumbel(0.0, seeds[0]));
  for (int i = 1; i < k; ++i) {
    const double log_neg_log_v = std::log(-std::log(clamp_uniform(seeds[i])));
    Tape::Var arg = t.sub(t.constant(log_neg_log_v), log_cum[i]);
    chain[i] = t.neg(t.logaddexp(arg, t.neg(chain[i - 1])));
  }

  const Permutation pos = inverse_permutation(b);
  std::vector<int> item_to_position(pos.data(), pos.data() + k);
  return t.gather(t.stack(chain), item_to_position);
}

namespace {

EstimatorOutput control_variate_grad(const PermutationObjective& f,
                                     const RelaxedObjective* f_relaxed,
                                     const Eigen::VectorXd& theta,
                                     const ControlVariateParams& cv,
                                     RandomStream stream, bool want_phi_grad,
                                     bool rebar) {
  const int k = static_cast<int>(theta.size());
  RandomStream noise_stream = stream.child(0);
  RandomStream cond_stream = stream.child(1);
  const Eigen::VectorXd z_seeds = draw_seeds(noise_stream, k);
  const Eigen::VectorXd cond_seeds = draw_seeds(cond_stream, k);

  Tape t;
  t.reserve(1024);
  Tape::Var th = t.leaf(theta);
  // Both noise branches run at normalized scores, matching the conditional
  // sampler's assumption; the permutation law is unchanged by the shift.
  Tape::Var thn = t.sub(th, logsumexp_vec(t, th));
  Tape::Var z = gumbel_noise_on_tape(t, thn, z_seeds);

  const Eigen::VectorXd z_value = t.value(z);
  const Permutation b = argsort_descending(z_value);
  Tape::Var z_tilde = conditional_chain_on_tape(t, thn, b, cond_seeds);

  CvLeaves leaves = cv_leaves(t, cv);
  Tape::Var c_z, c_zt;
  if (rebar) {
    c_z = cv_eval_rebar(t, leaves, z, *f_relaxed);
    c_zt = cv_eval_rebar(t, leaves, z_tilde, *f_relaxed);
  } else {
    c_z = cv_eval_relax(t, leaves, z, f_relaxed);
    c_zt = cv_eval_relax(t, leaves, z_tilde, f_relaxed);
  }

  EstimatorOutput out;
  out.f_value = checked_objective(f, b);
  out.b = b;
  out.z = z_value;
  out.z_tilde = t.value(z_tilde);

  // [f(b) - c(z~)] grad_log_prob + d/dtheta [c(z) - c(z~)], with the score
  // term from the closed form and the reparametrized terms from the tape.
  Tape::Var reparam = t.gradient(t.sub(c_z, c_zt), {th})[0];
  Tape::Var bracket = t.sub(t.constant(out.f_value), c_zt);
  Tape::Var score = t.constant(grad_log_prob(theta, b));
  Tape::Var grad_theta = t.add(t.mul(score, bracket), reparam);
  out.grad_theta = t.value(grad_theta);

  if (want_phi_grad) {
    Tape::Var surrogate = t.sum(t.mul(grad_theta, grad_theta));
    std::vector<Tape::Var> wrt = {leaves.w1, leaves.b1,      leaves.w2,
                                  leaves.b2, leaves.log_tau, leaves.eta};
    std::vector<Tape::Var> grads = t.gradient(surrogate, wrt);
    out.grad_phi.w1 = t.value(grads[0]);
    out.grad_phi.b1 = t.value(grads[1]);
    out.grad_phi.w2 = t.value(grads[2]);
    out.grad_phi.b2 = t.scalar_value(grads[3]);
    out.grad_phi.log_tau = t.scalar_value(grads[4]);
    out.grad_phi.eta = t.scalar_value(grads[5]);
    out.has_phi_grad = true;
  }
  return out;
}

}  // namespace

EstimatorOutput relax_grad(const PermutationObjective& f,
                           const RelaxedObjective* f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams& cv, RandomStream stream,
                           bool want_phi_grad) {
  return control_variate_grad(f, f_relaxed, theta, cv, stream, want_phi_grad,
                              /*rebar=*/false);
}

EstimatorOutput rebar_grad(const PermutationObjective& f,
                           const RelaxedObjective& f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams& cv, RandomStream stream,
                           bool want_phi_grad) {
  return control_variate_grad(f, &f_relaxed, theta, cv, stream, want_phi_grad,
                              /*rebar=*/true);
}

VarianceDiag variance_diag(
    const std::function<Eigen::VectorXd(RandomStream)>& single_draw, int n,
    const RandomStream& stream) {
  if (n < 2) throw std::invalid_argument("variance needs at least two draws");
  Eigen::VectorXd sum, sum_sq;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd g = single_draw(stream.child(i));
    if (i == 0) {
      sum = Eigen::VectorXd::Zero(g.size());
      sum_sq = Eigen::VectorXd::Zero(g.size());
    }
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  VarianceDiag diag;
  diag.mean = sum / n;
  diag.per_coordinate_variance =
      ((sum_sq - n * diag.mean.cwiseProduct(diag.mean)) / (n - 1))
          .cwiseMax(0.0);
  diag.log_total_variance = std::log(diag.per_coordinate_variance.sum());
  return diag;
}

VarianceDiag variance_diag(EstimatorKind kind, const PermutationObjective& f,
                           const RelaxedObjective* f_relaxed,
                           const Eigen::VectorXd& theta,
                           const ControlVariateParams* cv, int n,
                           const RandomStream& stream) {
  if (kind == EstimatorKind::kExact) {
    VarianceDiag diag;
    diag.mean = exact_grad(f, theta);
    diag.per_coordinate_variance = Eigen::VectorXd::Zero(theta.size());
    diag.log_total_variance = -std::numeric_limits<double>::infinity();
    return diag;
  }
  auto draw = [&](RandomStream s) -> Eigen::VectorXd {
    switch (kind) {
      case EstimatorKind::kReinforce:
        return reinforce_grad(f, theta, s).grad_theta;
      case EstimatorKind::kRelax:
        return relax_grad(f, f_relaxed, theta, *cv, s, false).grad_theta;
      case EstimatorKind::kRebar:
        return rebar_grad(f, *f_relaxed, theta, *cv, s, false).grad_theta;
      default:
        throw std::logic_error("unreachable");
    }
  };
  return variance_diag(draw, n, stream);
}

}  // namespace plgrad
