#include "plgrad/control_variate.hpp"

#include <cmath>
#include <stdexcept>

#include "plgrad/random.hpp"
#include "plgrad/relaxed_sort.hpp"

namespace plgrad {

Eigen::VectorXd ControlVariateParams::flatten() const {
  const Eigen::Index n = w1.size() + b1.size() + w2.size() + 3;
  Eigen::VectorXd flat(n);
  Eigen::Index at = 0;
  flat.segment(at, w1.size()) = Eigen::Map<const Eigen::VectorXd>(w1.data(), w1.size());
  at += w1.size();
  flat.segment(at, b1.size()) = b1;
  at += b1.size();
  flat.segment(at, w2.size()) = Eigen::Map<const Eigen::VectorXd>(w2.data(), w2.size());
  at += w2.size();
  flat[at++] = b2;
  flat[at++] = log_tau;
  flat[at++] = eta;
  return flat;
}

ControlVariateParams ControlVariateParams::unflatten(const Eigen::VectorXd& flat,
                                                     int k, int hidden) {
  ControlVariateParams p;
  const Eigen::Index nw1 = static_cast<Eigen::Index>(hidden) * k;
  if (flat.size() != nw1 + hidden + hidden + 3) {
    throw std::invalid_argument("flat parameter vector has wrong length");
  }
  Eigen::Index at = 0;
  p.w1 = Eigen::Map<const Eigen::MatrixXd>(flat.data() + at, hidden, k);
  at += nw1;
  p.b1 = flat.segment(at, hidden);
  at += hidden;
  p.w2 = Eigen::Map<const Eigen::MatrixXd>(flat.data() + at, 1, hidden);
  at += hidden;
  p.b2 = flat[at++];
  p.log_tau = flat[at++];
  p.eta = flat[at++];
  return p;
}

ControlVariateParams cv_init(int k, int hidden, std::uint64_t seed) {
  if (k < 1 || hidden < 1) {
    throw std::invalid_argument("dimensions must be at least 1");
  }
  RandomStream stream(seed);
  auto uniform_pm = [&](double a) { return a * (2.0 * stream.uniform() - 1.0); };

  ControlVariateParams p;
  const double a1 = 1.0 / std::sqrt(static_cast<double>(k));
  p.w1.resize(hidden, k);
  for (Eigen::Index j = 0; j < p.w1.cols(); ++j) {
    for (Eigen::Index i = 0; i < p.w1.rows(); ++i) p.w1(i, j) = uniform_pm(a1);
  }
  p.b1.resize(hidden);
  for (Eigen::Index i = 0; i < hidden; ++i) p.b1[i] = uniform_pm(a1);
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  p.w2.resize(1, hidden);
  for (Eigen::Index i = 0; i < hidden; ++i) p.w2(0, i) = uniform_pm(a2);
  p.b2 = uniform_pm(a2);
  p.log_tau = 0.0;
  p.eta = 1.0;
  return p;
}

CvLeaves cv_leaves(Tape& t, const ControlVariateParams& params) {
  CvLeaves leaves;
  leaves.w1 = t.leaf(params.w1);
  leaves.b1 = t.leaf(params.b1);
  leaves.w2 = t.leaf(params.w2);
  leaves.b2 = t.leaf(params.b2);
  leaves.log_tau = t.leaf(params.log_tau);
  leaves.eta = t.leaf(params.eta);
  return leaves;
}

namespace {

Tape::Var rho_network(Tape& t, const CvLeaves& cv, Tape::Var z) {
  Tape::Var hidden = t.relu(t.add(t.matmul(cv.w1, z), cv.b1));
  return t.add(t.matmul(cv.w2, hidden), cv.b2);
}

Tape::Var relaxed_term(Tape& t, const CvLeaves& cv, Tape::Var z,
                       const RelaxedObjective& f) {
  Tape::Var tau = t.exp(cv.log_tau);
  Tape::Var sigma = relaxed_permutation_matrix(t, z, tau);
  Tape::Var out = f(t, sigma);
  if (!std::isfinite(t.scalar_value(out))) {
    throw std::runtime_error("objective returned a non-finite value");
  }
  return out;
}

}  // namespace

Tape::Var cv_eval_relax(Tape& t, const CvLeaves& cv, Tape::Var z,
                        const RelaxedObjective* f) {
  Tape::Var rho = rho_network(t, cv, z);
  if (f == nullptr) return rho;
  return t.add(relaxed_term(t, cv, z, *f), rho);
}

Tape::Var cv_eval_rebar(Tape& t, const CvLeaves& cv, Tape::Var z,
                        const RelaxedObjective& f) {
  return t.mul(cv.eta, relaxed_term(t, cv, z, f));
}

}  // namespace plgrad
