#include "plgrad/relaxed_sort.hpp"

#include <cmath>
#include <stdexcept>

namespace plgrad {

Eigen::MatrixXd relaxed_permutation_matrix(const Eigen::VectorXd& z,
                                           double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const int k = static_cast<int>(z.size());
  Eigen::VectorXd abs_colsum(k);
  for (int j = 0; j < k; ++j) {
    abs_colsum[j] = (z.array() - z[j]).abs().sum();
  }
  Eigen::MatrixXd m(k, k);
  for (int i = 0; i < k; ++i) {
    const double coeff = static_cast<double>(k - 1 - 2 * i);
    Eigen::ArrayXd logits = (coeff * z.array() - abs_colsum.array()) / tau;
    logits -= logits.maxCoeff();
    const Eigen::ArrayXd e = logits.exp();
    m.row(i) = (e / e.sum()).transpose();
  }
  return m;
}

Tape::Var relaxed_permutation_matrix(Tape& t, Tape::Var z, Tape::Var tau) {
  if (!(t.scalar_value(tau) > 0.0)) {
    throw std::invalid_argument("tau must be positive");
  }
  const int k = static_cast<int>(t.value(z).rows());
  const Eigen::MatrixXd ones_row = Eigen::MatrixXd::Ones(1, k);
  const Eigen::MatrixXd ones_col = Eigen::MatrixXd::Ones(k, 1);

  // D(i, j) = |z_i - z_j|; column sums give sum_l |z_j - z_l|.
  Tape::Var zi = t.matmul(z, t.constant(ones_row));
  Tape::Var zj = t.transpose(zi);
  Tape::Var d = t.abs(t.sub(zi, zj));
  Tape::Var colsum = t.matmul(t.constant(ones_row), d);  // 1 x k

  Eigen::MatrixXd coeffs(k, 1);
  for (int i = 0; i < k; ++i) coeffs(i, 0) = static_cast<double>(k - 1 - 2 * i);
  Tape::Var scaled = t.matmul(t.constant(coeffs), t.transpose(z));  // k x k
  Tape::Var spread = t.matmul(t.constant(ones_col), colsum);        // k x k
  Tape::Var logits = t.div(t.sub(scaled, spread), tau);
  return softmax_rows(t, logits);
}

Eigen::MatrixXd hard_permutation_matrix(const Permutation& b) {
  if (!is_permutation(b)) throw std::invalid_argument("not a permutation");
  const int k = static_cast<int>(b.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) p(i, b[i]) = 1.0;
  return p;
}

}  // namespace plgrad
