// Command-line driver: `toy` runs the assignment benchmark, `causal` runs
// order search on synthetic linear SEMs, `diag` compares estimator means and
// variances at a fixed score vector. All randomness derives from one 64-bit
// seed through counter-based stream splitting (see README).
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "plgrad/causal.hpp"
#include "plgrad/estimators.hpp"
#include "plgrad/toy_task.hpp"
#include "plgrad/varopt.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace plgrad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitSolverNotConverged = 4;

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "reinforce") return EstimatorKind::kReinforce;
  if (name == "relax") return EstimatorKind::kRelax;
  if (name == "rebar") return EstimatorKind::kRebar;
  if (name == "exact") return EstimatorKind::kExact;
  throw CLI::ValidationError("estimator",
                             "unknown estimator '" + name + "'");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kReinforce:
      return "reinforce";
    case EstimatorKind::kRelax:
      return "relax";
    case EstimatorKind::kRebar:
      return "rebar";
    case EstimatorKind::kExact:
      return "exact";
  }
  return "?";
}

// Loads a config file and rejects unknown keys before any value is applied.
json load_config(const std::string& path, const std::set<std::string>& allowed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json config = json::parse(in);
  if (!config.is_object()) throw std::runtime_error("config must be an object");
  for (const auto& [key, value] : config.items()) {
    if (key == "command") continue;
    if (!allowed.count(key)) {
      throw std::runtime_error("unknown config key '" + key + "'");
    }
  }
  return config;
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

void write_config_echo(const json& resolved, const fs::path& out_path) {
  fs::path dir = out_path.parent_path();
  if (dir.empty()) dir = ".";
  write_json(resolved, dir / "config_echo.json");
}

void write_trace_csv(const std::vector<TraceRow>& trace, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter,objective,log_variance\n";
  for (const TraceRow& row : trace) {
    out << row.iter << "," << format_double(row.objective) << ","
        << format_double(row.log_variance) << "\n";
  }
}

// Config values apply only where the flag was not passed explicitly:
// defaults < config file < command line.
template <typename T>
void apply_config(const json& config, CLI::App* cmd, const char* key,
                  const char* flag, T& value) {
  if (config.contains(key) && cmd->count(flag) == 0) {
    value = config[key].get<T>();
  }
}

struct SummaryStat {
  double mean = 0.0;
  double stddev = 0.0;
};

SummaryStat summarize(const std::vector<double>& xs) {
  SummaryStat s;
  for (double x : xs) s.mean += x;
  s.mean /= xs.size();
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / (xs.size() - 1));
  }
  return s;
}

json order_to_json(const Permutation& b) {
  json out = json::array();
  for (int i = 0; i < b.size(); ++i) out.push_back(b[i] + 1);  // 1-indexed
  return out;
}

// ---------------------------------------------------------------------------
// toy

struct ToyOptions {
  int k = 8;
  double t = 0.05;
  std::string estimator = "relax";
  int iters = 5000;
  double lr_theta = 0.1;
  double lr_phi = 1e-3;
  int batch_size = 1;
  int hidden = 64;
  int variance_probe_n = 64;
  std::uint64_t seed = 0;
  int log_every = 50;
  std::string out = "trace.csv";
  std::string config_path;
};

int run_toy(const ToyOptions& given, CLI::App* cmd) {
  ToyOptions opt = given;
  try {
    if (!opt.config_path.empty()) {
      const json config = load_config(
          opt.config_path,
          {"k", "t", "estimator", "iters", "lr_theta", "lr_phi", "batch_size",
           "hidden", "variance_probe_n", "seed", "log_every", "out"});
      apply_config(config, cmd, "k", "--k", opt.k);
      apply_config(config, cmd, "t", "--t", opt.t);
      apply_config(config, cmd, "estimator", "--estimator", opt.estimator);
      apply_config(config, cmd, "iters", "--iters", opt.iters);
      apply_config(config, cmd, "lr_theta", "--lr-theta", opt.lr_theta);
      apply_config(config, cmd, "lr_phi", "--lr-phi", opt.lr_phi);
      apply_config(config, cmd, "batch_size", "--batch-size", opt.batch_size);
      apply_config(config, cmd, "hidden", "--hidden", opt.hidden);
      apply_config(config, cmd, "variance_probe_n", "--variance-probe-n",
                   opt.variance_probe_n);
      apply_config(config, cmd, "seed", "--seed", opt.seed);
      apply_config(config, cmd, "log_every", "--log-every", opt.log_every);
      apply_config(config, cmd, "out", "--out", opt.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  TrainConfig config;
  TargetMatrix target;
  try {
    config.estimator = parse_estimator(opt.estimator);
    config.iters = opt.iters;
    config.lr_theta = opt.lr_theta;
    config.lr_phi = opt.lr_phi;
    config.batch_size = opt.batch_size;
    config.cv_hidden = opt.hidden;
    config.variance_probe_n = opt.variance_probe_n;
    config.seed = opt.seed;
    config.log_every = opt.log_every;
    target = target_matrix(opt.k, opt.t);
    if (config.estimator == EstimatorKind::kExact && opt.k > 8) {
      throw std::invalid_argument("exact estimator requires k <= 8");
    }
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  const json echo = {{"command", "toy"},
                     {"k", opt.k},
                     {"t", opt.t},
                     {"estimator", opt.estimator},
                     {"iters", opt.iters},
                     {"lr_theta", opt.lr_theta},
                     {"lr_phi", opt.lr_phi},
                     {"batch_size", opt.batch_size},
                     {"hidden", opt.hidden},
                     {"variance_probe_n", opt.variance_probe_n},
                     {"seed", opt.seed},
                     {"log_every", opt.log_every},
                     {"out", opt.out}};

  const PermutationObjective f = toy_objective(target);
  const RelaxedObjective fr = toy_relaxed_objective(target);

  TrainResult result;
  try {
    result = train(f, &fr, opt.k, config);
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  write_trace_csv(result.trace, opt.out);
  write_config_echo(echo, opt.out);

  if (result.diverged) {
    std::cerr << "training diverged\n";
    return kExitDiverged;
  }

  double final_objective;
  if (opt.k <= 8) {
    final_objective = exact_expectation(f, result.theta);
  } else {
    RandomStream probe(RandomStream(config.seed).child_key(3));
    double mean = 0.0;
    for (int i = 0; i < 512; ++i) {
      RandomStream d = probe.child(i);
      mean += f(sample(result.theta, d).first);
    }
    final_objective = mean / 512;
  }
  std::cout << "final objective: " << format_double(final_objective) << "\n";
  if (opt.k <= 8) {
    const auto [best, best_loss] = brute_force_optimum(opt.k, opt.t);
    std::cout << "brute-force optimum: " << format_double(best_loss) << "\n";
    std::cout << "gap: " << format_double(final_objective - best_loss) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// causal

struct CausalOptions {
  int nodes = 10;
  std::string graph = "er";
  double edges_mult = 1.0;
  double lambda = 0.5;
  int n_train = 1000;
  int n_val = 1000;
  double threshold = 0.3;
  int iters = 3000;
  double lr_theta = 0.1;
  double lr_phi = 1e-3;
  int batch_size = 1;
  int hidden = 64;
  int variance_probe_n = 64;
  int seeds_count = 5;
  std::vector<std::uint64_t> seeds;  // resolved list
  std::uint64_t seed = 0;            // base for the list when not explicit
  int log_every = 200;
  int fista_max_iters = 2000;
  double fista_tol = 1e-7;
  std::string out = "result.json";
  std::string graphs_dir;
  std::string data_dir;
  std::string config_path;
};

struct CausalSeedResult {
  std::uint64_t seed = 0;
  double val_q_diff = 0.0;
  int shd_value = 0;
  Permutation order;
  int edges = 0;
  bool diverged = false;
  int nonconverged = 0;
  double random_val_q_diff = 0.0;
  int random_shd = 0;
  int random_edges = 0;
  Dag true_graph;
  Dag learned_graph;
  Eigen::MatrixXd x_train, x_val;
};

CausalSeedResult run_causal_seed(const CausalOptions& opt, std::uint64_t seed) {
  CausalSeedResult r;
  r.seed = seed;
  RandomStream root(seed);

  const Dag truth = opt.graph == "er"
                        ? gen_er_graph(opt.nodes, opt.edges_mult, root.child_key(0))
                        : gen_sf_graph(opt.nodes, static_cast<int>(opt.edges_mult),
                                       root.child_key(0));
  const SemData train_data = gen_sem_data(truth, opt.n_train, root.child_key(1));
  const SemData val_data = gen_sem_data(truth, opt.n_val, root.child_key(2));

  FistaConfig fista;
  fista.max_iters = opt.fista_max_iters;
  fista.tol = opt.fista_tol;

  // Memoized objective that also counts solver non-convergence.
  auto cache = std::make_shared<std::unordered_map<std::string, double>>();
  auto nonconverged = std::make_shared<int>(0);
  const Eigen::MatrixXd& x = train_data.x;
  const PermutationObjective f = [&x, cache, nonconverged, fista,
                                  lambda = opt.lambda](const Permutation& b) {
    std::string key(reinterpret_cast<const char*>(b.data()),
                    b.size() * sizeof(int));
    auto it = cache->find(key);
    if (it != cache->end()) return it->second;
    const OrderScoreResult fit = score_order(b, x, lambda, fista);
    if (fit.iterations_used >= fista.max_iters) ++(*nonconverged);
    (*cache)[key] = fit.q_hat;
    return fit.q_hat;
  };

  TrainConfig config;
  config.estimator = EstimatorKind::kRelax;
  config.iters = opt.iters;
  config.lr_theta = opt.lr_theta;
  config.lr_phi = opt.lr_phi;
  config.batch_size = opt.batch_size;
  config.cv_hidden = opt.hidden;
  config.variance_probe_n = opt.variance_probe_n;
  config.log_every = opt.log_every;
  config.seed = root.child_key(3);

  const TrainResult trained = train(f, nullptr, opt.nodes, config);
  r.diverged = trained.diverged;
  r.order = trained.decision;
  r.learned_graph =
      recover_dag(r.order, train_data.x, opt.lambda, opt.threshold, fista);
  r.edges = r.learned_graph.edge_count();
  r.shd_value = shd(r.learned_graph, truth);
  r.val_q_diff = val_score_diff(r.order, truth, val_data.x, opt.lambda, fista);

  const Dag random_graph =
      random_baseline(opt.nodes, opt.edges_mult, root.child_key(4));
  const auto random_order = topological_order(random_graph);
  r.random_shd = shd(random_graph, truth);
  r.random_edges = random_graph.edge_count();
  r.random_val_q_diff =
      val_score_diff(*random_order, truth, val_data.x, opt.lambda, fista);

  r.nonconverged = *nonconverged;
  r.true_graph = truth;
  r.x_train = train_data.x;
  r.x_val = val_data.x;
  return r;
}

int run_causal(const CausalOptions& given, CLI::App* cmd) {
  CausalOptions opt = given;
  try {
    if (!opt.config_path.empty()) {
      const json config = load_config(
          opt.config_path,
          {"nodes", "graph", "edges_mult", "lambda", "n_train", "n_val",
           "threshold", "iters", "lr_theta", "lr_phi", "batch_size", "hidden",
           "variance_probe_n", "seeds", "seed", "log_every", "fista_max_iters",
           "fista_tol", "out", "graphs_dir", "data_dir"});
      apply_config(config, cmd, "nodes", "--nodes", opt.nodes);
      apply_config(config, cmd, "graph", "--graph", opt.graph);
      apply_config(config, cmd, "edges_mult", "--edges-mult", opt.edges_mult);
      apply_config(config, cmd, "lambda", "--lambda", opt.lambda);
      apply_config(config, cmd, "n_train", "--n-train", opt.n_train);
      apply_config(config, cmd, "n_val", "--n-val", opt.n_val);
      apply_config(config, cmd, "threshold", "--threshold", opt.threshold);
      apply_config(config, cmd, "iters", "--iters", opt.iters);
      apply_config(config, cmd, "lr_theta", "--lr-theta", opt.lr_theta);
      apply_config(config, cmd, "lr_phi", "--lr-phi", opt.lr_phi);
      apply_config(config, cmd, "batch_size", "--batch-size", opt.batch_size);
      apply_config(config, cmd, "hidden", "--hidden", opt.hidden);
      apply_config(config, cmd, "variance_probe_n", "--variance-probe-n",
                   opt.variance_probe_n);
      apply_config(config, cmd, "seed", "--seed", opt.seed);
      apply_config(config, cmd, "log_every", "--log-every", opt.log_every);
      apply_config(config, cmd, "fista_max_iters", "--fista-max-iters",
                   opt.fista_max_iters);
      apply_config(config, cmd, "fista_tol", "--fista-tol", opt.fista_tol);
      apply_config(config, cmd, "out", "--out", opt.out);
      apply_config(config, cmd, "graphs_dir", "--graphs-dir", opt.graphs_dir);
      apply_config(config, cmd, "data_dir", "--data-dir", opt.data_dir);
      if (config.contains("seeds") && cmd->count("--seeds") == 0) {
        if (config["seeds"].is_array()) {
          opt.seeds = config["seeds"].get<std::vector<std::uint64_t>>();
        } else {
          opt.seeds_count = config["seeds"].get<int>();
        }
      }
    }
    if (opt.seeds.empty()) {
      if (opt.seeds_count < 1) throw std::runtime_error("need at least one seed");
      for (int i = 0; i < opt.seeds_count; ++i) opt.seeds.push_back(opt.seed + i);
    }
    if (opt.graph != "er" && opt.graph != "sf") {
      throw std::runtime_error("graph must be 'er' or 'sf'");
    }
    if (opt.nodes < 2 || opt.lambda < 0.0 || !(opt.threshold > 0.0) ||
        opt.n_train < 1 || opt.n_val < 1 || opt.iters < 1) {
      throw std::runtime_error("invalid experiment parameters");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  json echo = {{"command", "causal"},
               {"nodes", opt.nodes},
               {"graph", opt.graph},
               {"edges_mult", opt.edges_mult},
               {"lambda", opt.lambda},
               {"n_train", opt.n_train},
               {"n_val", opt.n_val},
               {"threshold", opt.threshold},
               {"iters", opt.iters},
               {"lr_theta", opt.lr_theta},
               {"lr_phi", opt.lr_phi},
               {"batch_size", opt.batch_size},
               {"hidden", opt.hidden},
               {"variance_probe_n", opt.variance_probe_n},
               {"seeds", opt.seeds},
               {"log_every", opt.log_every},
               {"fista_max_iters", opt.fista_max_iters},
               {"fista_tol", opt.fista_tol},
               {"out", opt.out},
               {"graphs_dir", opt.graphs_dir},
               {"data_dir", opt.data_dir}};

  // Seeds fan out across workers; results are collected in seed order.
  std::vector<std::future<CausalSeedResult>> futures;
  futures.reserve(opt.seeds.size());
  for (std::uint64_t seed : opt.seeds) {
    futures.push_back(std::async(std::launch::async,
                                 [&opt, seed] { return run_causal_seed(opt, seed); }));
  }
  std::vector<CausalSeedResult> results;
  results.reserve(futures.size());
  for (auto& future : futures) results.push_back(future.get());

  json seeds_json = json::array();
  json random_seeds_json = json::array();
  std::vector<double> v_diff, v_shd, v_edges, r_diff, r_shd, r_edges;
  int nonconverged_total = 0;
  bool any_diverged = false;
  for (const CausalSeedResult& r : results) {
    seeds_json.push_back({{"seed", r.seed},
                          {"val_q_diff", r.val_q_diff},
                          {"shd", r.shd_value},
                          {"order", order_to_json(r.order)},
                          {"edges", r.edges},
                          {"diverged", r.diverged}});
    random_seeds_json.push_back({{"seed", r.seed},
                                 {"val_q_diff", r.random_val_q_diff},
                                 {"shd", r.random_shd},
                                 {"edges", r.random_edges}});
    v_diff.push_back(r.val_q_diff);
    v_shd.push_back(r.shd_value);
    v_edges.push_back(r.edges);
    r_diff.push_back(r.random_val_q_diff);
    r_shd.push_back(r.random_shd);
    r_edges.push_back(r.random_edges);
    nonconverged_total += r.nonconverged;
    any_diverged = any_diverged || r.diverged;

    if (!opt.graphs_dir.empty()) {
      fs::create_directories(opt.graphs_dir);
      const fs::path dir(opt.graphs_dir);
      write_edge_list(r.true_graph,
                      (dir / ("true_s" + std::to_string(r.seed) + ".edges")).string());
      write_edge_list(r.learned_graph,
                      (dir / ("learned_s" + std::to_string(r.seed) + ".edges")).string());
    }
    if (!opt.data_dir.empty()) {
      fs::create_directories(opt.data_dir);
      const fs::path dir(opt.data_dir);
      write_csv_matrix(r.x_train,
                       (dir / ("train_s" + std::to_string(r.seed) + ".csv")).string());
      write_csv_matrix(r.x_val,
                       (dir / ("val_s" + std::to_string(r.seed) + ".csv")).string());
    }
  }

  auto stats_json = [](const std::vector<double>& diff,
                       const std::vector<double>& shd_values,
                       const std::vector<double>& edges) {
    return std::pair<json, json>(
        json{{"val_q_diff", summarize(diff).mean},
             {"shd", summarize(shd_values).mean},
             {"edges", summarize(edges).mean}},
        json{{"val_q_diff", summarize(diff).stddev},
             {"shd", summarize(shd_values).stddev},
             {"edges", summarize(edges).stddev}});
  };
  const auto [mean_json, std_json] = stats_json(v_diff, v_shd, v_edges);
  const auto [rmean_json, rstd_json] = stats_json(r_diff, r_shd, r_edges);

  json doc = {{"config", echo},
              {"seeds", seeds_json},
              {"mean", mean_json},
              {"std", std_json},
              {"random",
               {{"seeds", random_seeds_json},
                {"mean", rmean_json},
                {"std", rstd_json}}},
              {"nonconverged_scores", nonconverged_total}};
  write_json(doc, opt.out);
  write_config_echo(echo, opt.out);

  std::cout << "mean shd: " << format_double(mean_json["shd"].get<double>())
            << " (random: " << format_double(rmean_json["shd"].get<double>())
            << ")\n";
  std::cout << "mean val q-diff: "
            << format_double(mean_json["val_q_diff"].get<double>()) << "\n";
  if (nonconverged_total > 0) {
    std::cerr << "score solver hit its iteration cap " << nonconverged_total
              << " time(s)\n";
    return kExitSolverNotConverged;
  }
  if (any_diverged) return kExitDiverged;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// diag

struct DiagOptions {
  int k = 4;
  double t = 0.05;
  std::string estimators = "reinforce,relax";
  int n = 10000;
  int hidden = 64;
  std::uint64_t seed = 0;
  std::string out;
  std::string config_path;
};

int run_diag(const DiagOptions& given, CLI::App* cmd) {
  DiagOptions opt = given;
  std::vector<EstimatorKind> kinds;
  try {
    if (!opt.config_path.empty()) {
      const json config = load_config(
          opt.config_path,
          {"k", "t", "estimators", "n", "hidden", "seed", "out"});
      apply_config(config, cmd, "k", "--k", opt.k);
      apply_config(config, cmd, "t", "--t", opt.t);
      apply_config(config, cmd, "estimators", "--estimators", opt.estimators);
      apply_config(config, cmd, "n", "--n", opt.n);
      apply_config(config, cmd, "hidden", "--hidden", opt.hidden);
      apply_config(config, cmd, "seed", "--seed", opt.seed);
      apply_config(config, cmd, "out", "--out", opt.out);
    }
    std::stringstream ss(opt.estimators);
    std::string name;
    while (std::getline(ss, name, ',')) kinds.push_back(parse_estimator(name));
    if (kinds.empty()) throw std::runtime_error("no estimators requested");
    if (opt.n < 2) throw std::runtime_error("need n >= 2");
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  TargetMatrix target;
  try {
    target = target_matrix(opt.k, opt.t);
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  }
  const PermutationObjective f = toy_objective(target);
  const RelaxedObjective fr = toy_relaxed_objective(target);

  RandomStream root(opt.seed);
  Eigen::VectorXd theta(opt.k);
  {
    RandomStream ts = root.child(0);
    for (int i = 0; i < opt.k; ++i) theta[i] = 2.0 * ts.uniform() - 1.0;
  }
  const ControlVariateParams cv = cv_init(opt.k, opt.hidden, root.child_key(1));

  Eigen::VectorXd exact;
  if (opt.k <= 8) exact = exact_grad(f, theta);

  json estimators_json = json::object();
  std::printf("theta:");
  for (int i = 0; i < opt.k; ++i) std::printf(" %.4f", theta[i]);
  std::printf("\n%-10s %18s %12s\n", "estimator", "log total variance",
              opt.k <= 8 ? "max |z|" : "");
  for (EstimatorKind kind : kinds) {
    const VarianceDiag diag =
        variance_diag(kind, f, &fr, theta, &cv, opt.n, root.child(2));
    double max_z = 0.0;
    if (opt.k <= 8 && kind != EstimatorKind::kExact) {
      for (int c = 0; c < opt.k; ++c) {
        const double se =
            std::sqrt(diag.per_coordinate_variance[c] / opt.n);
        max_z = std::max(max_z, std::abs(diag.mean[c] - exact[c]) / se);
      }
    }
    std::printf("%-10s %18.6f %12s\n", estimator_name(kind).c_str(),
                diag.log_total_variance,
                opt.k <= 8 && kind != EstimatorKind::kExact
                    ? format_double(max_z).substr(0, 8).c_str()
                    : "");
    json entry = {{"log_total_variance", diag.log_total_variance}};
    entry["mean"] = std::vector<double>(diag.mean.data(),
                                        diag.mean.data() + diag.mean.size());
    entry["variance"] = std::vector<double>(
        diag.per_coordinate_variance.data(),
        diag.per_coordinate_variance.data() + diag.per_coordinate_variance.size());
    if (opt.k <= 8 && kind != EstimatorKind::kExact) entry["max_abs_z"] = max_z;
    estimators_json[estimator_name(kind)] = entry;
  }

  const json echo = {{"command", "diag"},     {"k", opt.k},
                     {"t", opt.t},            {"estimators", opt.estimators},
                     {"n", opt.n},            {"hidden", opt.hidden},
                     {"seed", opt.seed},      {"out", opt.out}};
  if (!opt.out.empty()) {
    json doc = {{"config", echo}, {"estimators", estimators_json}};
    write_json(doc, opt.out);
  }
  write_config_echo(echo, opt.out.empty() ? "diag" : opt.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-variance stochastic gradient estimation over permutations"};
  app.require_subcommand(1);

  ToyOptions toy;
  CLI::App* toy_cmd = app.add_subcommand("toy", "variational toy benchmark");
  toy_cmd->add_option("--k", toy.k, "number of items");
  toy_cmd->add_option("--t", toy.t, "target matrix skew");
  toy_cmd->add_option("--estimator", toy.estimator,
                      "reinforce | relax | rebar | exact");
  toy_cmd->add_option("--iters", toy.iters, "training iterations");
  toy_cmd->add_option("--lr-theta", toy.lr_theta, "score learning rate");
  toy_cmd->add_option("--lr-phi", toy.lr_phi, "variate learning rate");
  toy_cmd->add_option("--batch-size", toy.batch_size, "draws per step");
  toy_cmd->add_option("--hidden", toy.hidden, "variate hidden width");
  toy_cmd->add_option("--variance-probe-n", toy.variance_probe_n,
                      "draws per variance probe");
  toy_cmd->add_option("--seed", toy.seed, "root seed");
  toy_cmd->add_option("--log-every", toy.log_every, "trace period");
  toy_cmd->add_option("--out", toy.out, "trace csv path");
  toy_cmd->add_option("--config", toy.config_path, "json config file");

  CausalOptions causal;
  CLI::App* causal_cmd =
      app.add_subcommand("causal", "order search on synthetic linear SEMs");
  causal_cmd->add_option("--nodes", causal.nodes, "graph size");
  causal_cmd->add_option("--graph", causal.graph, "er | sf");
  causal_cmd->add_option("--edges-mult", causal.edges_mult,
                         "expected edges per node");
  causal_cmd->add_option("--lambda", causal.lambda, "l1 penalty");
  causal_cmd->add_option("--n-train", causal.n_train, "training samples");
  causal_cmd->add_option("--n-val", causal.n_val, "validation samples");
  causal_cmd->add_option("--threshold", causal.threshold,
                         "edge extraction threshold");
  causal_cmd->add_option("--iters", causal.iters, "training iterations");
  causal_cmd->add_option("--lr-theta", causal.lr_theta, "score learning rate");
  causal_cmd->add_option("--lr-phi", causal.lr_phi, "variate learning rate");
  causal_cmd->add_option("--batch-size", causal.batch_size, "draws per step");
  causal_cmd->add_option("--hidden", causal.hidden, "variate hidden width");
  causal_cmd->add_option("--seeds", causal.seeds_count, "number of seeds");
  causal_cmd->add_option("--seed", causal.seed, "first seed value");
  causal_cmd->add_option("--log-every", causal.log_every, "trace period");
  causal_cmd->add_option("--fista-max-iters", causal.fista_max_iters,
                         "score solver iteration cap");
  causal_cmd->add_option("--fista-tol", causal.fista_tol,
                         "score solver tolerance");
  causal_cmd->add_option("--out", causal.out, "result json path");
  causal_cmd->add_option("--graphs-dir", causal.graphs_dir,
                         "directory for edge-list dumps");
  causal_cmd->add_option("--data-dir", causal.data_dir,
                         "directory for csv data dumps");
  causal_cmd->add_option("--config", causal.config_path, "json config file");

  DiagOptions diag;
  CLI::App* diag_cmd =
      app.add_subcommand("diag", "estimator mean/variance diagnostics");
  diag_cmd->add_option("--k", diag.k, "number of items");
  diag_cmd->add_option("--t", diag.t, "target matrix skew");
  diag_cmd->add_option("--estimators", diag.estimators,
                       "comma-separated estimator list");
  diag_cmd->add_option("--n", diag.n, "draws per estimator");
  diag_cmd->add_option("--hidden", diag.hidden, "variate hidden width");
  diag_cmd->add_option("--seed", diag.seed, "root seed");
  diag_cmd->add_option("--out", diag.out, "optional json output");
  diag_cmd->add_option("--config", diag.config_path, "json config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (toy_cmd->parsed()) return run_toy(toy, toy_cmd);
    if (causal_cmd->parsed()) return run_causal(causal, causal_cmd);
    if (diag_cmd->parsed()) return run_diag(diag, diag_cmd);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitInvalidConfig;
}
