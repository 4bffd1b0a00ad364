#include "plgrad/causal.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "plgrad/random.hpp"

namespace plgrad {

bool is_acyclic(const Dag& g) { return topological_order(g).has_value(); }

std::optional<Permutation> topological_order(const Dag& g) {
  const int k = g.k;
  std::vector<int> indegree(k, 0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (g.adjacency(i, j)) ++indegree[j];
    }
  }
  Permutation order(k);
  std::vector<bool> placed(k, false);
  for (int at = 0; at < k; ++at) {
    int next = -1;
    for (int v = 0; v < k; ++v) {
      if (!placed[v] && indegree[v] == 0) {
        next = v;
        break;
      }
    }
    if (next < 0) return std::nullopt;
    placed[next] = true;
    order[at] = next;
    for (int j = 0; j < k; ++j) {
      if (g.adjacency(next, j)) --indegree[j];
    }
  }
  return order;
}

Dag gen_er_graph(int k, double edges_multiplier, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("need k >= 2");
  RandomStream stream(seed);
  const double pairs = 0.5 * k * (k - 1);
  const double p = std::min(1.0, edges_multiplier * k / pairs);

  // Uniform node order; edges point from earlier to later in the order.
  std::vector<int> rank(k);
  for (int i = 0; i < k; ++i) rank[i] = i;
  for (int i = k - 1; i > 0; --i) {
    const int j = static_cast<int>(stream.next_below(i + 1));
    std::swap(rank[i], rank[j]);
  }
  std::vector<int> pos(k);
  for (int r = 0; r < k; ++r) pos[rank[r]] = r;

  Dag g;
  g.k = k;
  g.adjacency = Eigen::MatrixXi::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (stream.uniform() < p) {
        if (pos[i] < pos[j]) {
          g.adjacency(i, j) = 1;
        } else {
          g.adjacency(j, i) = 1;
        }
      }
    }
  }
  return g;
}

Dag gen_sf_graph(int k, int m, std::uint64_t seed) {
  if (m < 1 || k <= m) throw std::invalid_argument("need k > m >= 1");
  RandomStream stream(seed);
  Dag g;
  g.k = k;
  g.adjacency = Eigen::MatrixXi::Zero(k, k);

  std::vector<int> targets(m);
  for (int i = 0; i < m; ++i) targets[i] = i;
  std::vector<int> repeated;  // one entry per edge endpoint
  for (int node = m; node < k; ++node) {
    for (int t : targets) {
      g.adjacency(t, node) = 1;
      repeated.push_back(t);
      repeated.push_back(node);
    }
    if (node + 1 < k) {
      // m distinct draws, preferential by multiplicity in `repeated`.
      std::vector<int> picked;
      std::vector<bool> taken(k, false);
      while (static_cast<int>(picked.size()) < m) {
        const int c = repeated[stream.next_below(repeated.size())];
        if (!taken[c]) {
          taken[c] = true;
          picked.push_back(c);
        }
      }
      targets = picked;
    }
  }
  return g;
}

SemData gen_sem_data(const Dag& dag, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  RandomStream stream(seed);
  const int k = dag.k;

  SemData data;
  data.sem.w = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (dag.adjacency(i, j)) {
        const double magnitude = 0.5 + 1.5 * stream.uniform();
        const double sign = (stream.next_u64() & 1) ? 1.0 : -1.0;
        data.sem.w(i, j) = sign * magnitude;
      }
    }
  }

  Eigen::MatrixXd noise(n, k);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < k; ++c) noise(r, c) = stream.gaussian();
  }
  const Eigen::MatrixXd system =
      (Eigen::MatrixXd::Identity(k, k) - data.sem.w).transpose();
  data.x = system.partialPivLu().solve(noise.transpose()).transpose();
  return data;
}

namespace {

Eigen::MatrixXd order_columns(const Permutation& order,
                              const Eigen::MatrixXd& x) {
  if (!is_permutation(order) || order.size() != x.cols()) {
    throw std::invalid_argument("order does not match data columns");
  }
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (int i = 0; i < order.size(); ++i) y.col(i) = x.col(order[i]);
  return y;
}

double power_iteration_max_eigenvalue(const Eigen::MatrixXd& s, int iters) {
  const int k = static_cast<int>(s.rows());
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * i;
  v.normalize();
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd w = s * v;
    const double norm = w.norm();
    if (norm <= 0.0) return 0.0;
    v = w / norm;
  }
  return v.dot(s * v);
}

// Soft threshold restricted to the strictly upper triangle.
Eigen::MatrixXd prox_strict_upper(const Eigen::MatrixXd& b, double threshold) {
  const int k = static_cast<int>(b.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double x = b(i, j);
      if (x > threshold) {
        out(i, j) = x - threshold;
      } else if (x < -threshold) {
        out(i, j) = x + threshold;
      }
    }
  }
  return out;
}

}  // namespace

double lambda_max(const Permutation& order, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd y = order_columns(order, x);
  const Eigen::MatrixXd s = (y.transpose() * y) / x.rows();
  double best = 0.0;
  for (int i = 0; i < s.rows(); ++i) {
    for (int j = i + 1; j < s.cols(); ++j) {
      best = std::max(best, std::abs(s(i, j)));
    }
  }
  return best;
}

OrderScoreResult score_order(const Permutation& order, const Eigen::MatrixXd& x,
                             double lambda, const FistaConfig& cfg) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const int k = static_cast<int>(order.size());
  const Eigen::MatrixXd y = order_columns(order, x);
  const Eigen::MatrixXd s = (y.transpose() * y) / x.rows();

  // (1/2n)|Y - YA|_F^2 = (1/2) tr((I - A)^T S (I - A))
  auto objective = [&](const Eigen::MatrixXd& a) {
    const Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(k, k) - a;
    return 0.5 * (residual.transpose() * s * residual).trace() +
           lambda * a.cwiseAbs().sum();
  };

  const double lip =
      std::max(1e-12, 1.05 * power_iteration_max_eigenvalue(s, cfg.power_iters));
  const double step = 1.0 / lip;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd v = a;
  double t = 1.0;
  double f_cur = objective(a);

  OrderScoreResult result;
  result.iterations_used = cfg.max_iters;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    Eigen::MatrixXd candidate =
        prox_strict_upper(v - step * (s * v - s), lambda * step);
    double f_candidate = objective(candidate);
    if (f_candidate > f_cur) {
      // Momentum overshoot: restart and take a plain descent step from a.
      t = 1.0;
      candidate = prox_strict_upper(a - step * (s * a - s), lambda * step);
      f_candidate = objective(candidate);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    v = candidate + ((t - 1.0) / t_next) * (candidate - a);
    t = t_next;

    const bool converged =
        std::abs(f_cur - f_candidate) <= cfg.tol * std::max(1.0, std::abs(f_cur));
    a = std::move(candidate);
    f_cur = f_candidate;
    if (converged) {
      result.iterations_used = it;
      break;
    }
  }

  result.q_hat = f_cur;
  result.a_star = std::move(a);
  return result;
}

PermutationObjective order_score_objective(const Eigen::MatrixXd& x,
                                           double lambda,
                                           const FistaConfig& cfg) {
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x);
        h *= 1099511628211ULL;
      }
      return h;
    }
  };
  auto data = std::make_shared<Eigen::MatrixXd>(x);
  auto cache = std::make_shared<
      std::unordered_map<std::vector<int>, double, VecHash>>();
  return [data, cache, lambda, cfg](const Permutation& b) {
    std::vector<int> key(b.data(), b.data() + b.size());
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    const double q = score_order(b, *data, lambda, cfg).q_hat;
    (*cache)[key] = q;
    return q;
  };
}

Dag recover_dag(const Permutation& order, const Eigen::MatrixXd& x,
                double lambda, double threshold, const FistaConfig& cfg) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  const OrderScoreResult fit = score_order(order, x, lambda, cfg);
  const int k = static_cast<int>(order.size());
  Dag g;
  g.k = k;
  g.adjacency = Eigen::MatrixXi::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (std::abs(fit.a_star(i, j)) > threshold) {
        g.adjacency(order[i], order[j]) = 1;
      }
    }
  }
  return g;
}

int shd(const Dag& g1, const Dag& g2) {
  if (g1.k != g2.k) throw std::invalid_argument("graph sizes differ");
  // Pair states {none, i->j, j->i}; any differing state costs one operation
  // (addition, removal, or reversal).
  int distance = 0;
  for (int i = 0; i < g1.k; ++i) {
    for (int j = i + 1; j < g1.k; ++j) {
      const int s1 = g1.adjacency(i, j) + 2 * g1.adjacency(j, i);
      const int s2 = g2.adjacency(i, j) + 2 * g2.adjacency(j, i);
      if (s1 != s2) ++distance;
    }
  }
  return distance;
}

double val_score_diff(const Permutation& learned, const Dag& truth,
                      const Eigen::MatrixXd& x_val, double lambda,
                      const FistaConfig& cfg) {
  const auto true_order = topological_order(truth);
  if (!true_order) throw std::invalid_argument("true graph has a cycle");
  const double q_learned = score_order(learned, x_val, lambda, cfg).q_hat;
  const double q_true = score_order(*true_order, x_val, lambda, cfg).q_hat;
  return q_learned - q_true;
}

Dag random_baseline(int k, double edges_multiplier, std::uint64_t seed) {
  return gen_er_graph(k, edges_multiplier, seed);
}

void write_edge_list(const Dag& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "k=" << g.k << "\n";
  for (int i = 0; i < g.k; ++i) {
    for (int j = 0; j < g.k; ++j) {
      if (g.adjacency(i, j)) out << (i + 1) << " " << (j + 1) << "\n";
    }
  }
}

Dag read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("k=", 0) != 0) {
    throw std::runtime_error("missing k=<nodes> header in " + path);
  }
  Dag g;
  g.k = std::stoi(header.substr(2));
  if (g.k < 1) throw std::runtime_error("bad node count in " + path);
  g.adjacency = Eigen::MatrixXi::Zero(g.k, g.k);
  int i = 0, j = 0;
  while (in >> i >> j) {
    if (i < 1 || i > g.k || j < 1 || j > g.k) {
      throw std::runtime_error("edge endpoint out of range in " + path);
    }
    g.adjacency(i - 1, j - 1) = 1;
  }
  return g;
}

void write_csv_matrix(const Eigen::MatrixXd& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buffer[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(i, j));
      out << buffer << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged csv in " + path);
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace plgrad
