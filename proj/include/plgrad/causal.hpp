// Causal structure learning through topological-order search on linear SEMs:
// random graph and data generation, the L1-regularized order score solved by
// accelerated proximal gradient, DAG extraction, and metrics.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "plgrad/estimators.hpp"

namespace plgrad {

struct Dag {
  int k = 0;
  Eigen::MatrixXi adjacency;  // (i, j) = 1 means edge i -> j

  int edge_count() const { return adjacency.sum(); }
};

bool is_acyclic(const Dag& g);

// Topological order (smallest index first among ready nodes); nullopt when
// the graph has a cycle.
std::optional<Permutation> topological_order(const Dag& g);

// Undirected Erdos-Renyi draw with edge probability m*k / C(k,2) (capped at
// 1), oriented by a uniformly random permutation.
Dag gen_er_graph(int k, double edges_multiplier, std::uint64_t seed);

// Preferential attachment adding m edges per new node, oriented from existing
// node to new node; edge count is exactly m*(k - m).
Dag gen_sf_graph(int k, int m, std::uint64_t seed);

struct WeightedSem {
  Eigen::MatrixXd w;  // w(i, j) is the coefficient of edge i -> j
};

struct SemData {
  WeightedSem sem;
  Eigen::MatrixXd x;  // n x k, rows are samples
};

// Edge weights uniform on [-2,-0.5] U [0.5,2]; data from x = w^T x + eps with
// standard Gaussian noise.
SemData gen_sem_data(const Dag& dag, int n, std::uint64_t seed);

struct FistaConfig {
  int max_iters = 2000;
  double tol = 1e-7;       // relative objective change
  int power_iters = 100;   // Lipschitz estimate
};

struct OrderScoreResult {
  double q_hat = 0.0;
  Eigen::MatrixXd a_star;  // strictly upper triangular, order-relative
  int iterations_used = 0;
};

// min over strictly upper triangular A of
//   (1/2n) |Y - Y A|_F^2 + lambda |vec(A)|_1,
// where column i of Y is column order[i] of X; solved by FISTA with
// function-value restarts and soft-threshold prox.
OrderScoreResult score_order(const Permutation& order, const Eigen::MatrixXd& x,
                             double lambda, const FistaConfig& cfg = {});

// Largest lambda with a nonzero solution: max abs strict-upper entry of
// (1/n) Y^T Y.
double lambda_max(const Permutation& order, const Eigen::MatrixXd& x);

// f(b) = score_order(b, x, lambda).q_hat, memoized per permutation. The
// cache is per-instance and unsynchronized; give each thread its own.
PermutationObjective order_score_objective(const Eigen::MatrixXd& x,
                                           double lambda,
                                           const FistaConfig& cfg = {});

// Edges where the fitted coefficient exceeds the threshold in magnitude;
// acyclic by construction since all edges follow the order.
Dag recover_dag(const Permutation& order, const Eigen::MatrixXd& x,
                double lambda, double threshold, const FistaConfig& cfg = {});

// Edge additions, removals, and reversals; a reversal counts once.
int shd(const Dag& g1, const Dag& g2);

// Score gap on held-out data between a learned order and a topological order
// of the true graph, both refit on x_val.
double val_score_diff(const Permutation& learned, const Dag& truth,
                      const Eigen::MatrixXd& x_val, double lambda,
                      const FistaConfig& cfg = {});

// Data-independent Erdos-Renyi baseline.
Dag random_baseline(int k, double edges_multiplier, std::uint64_t seed);

// Edge-list text format: header "k=<nodes>", then "i j" per line, 1-indexed.
void write_edge_list(const Dag& g, const std::string& path);
Dag read_edge_list(const std::string& path);

// CSV without header, n rows by k columns.
void write_csv_matrix(const Eigen::MatrixXd& m, const std::string& path);
Eigen::MatrixXd read_csv_matrix(const std::string& path);

}  // namespace plgrad
