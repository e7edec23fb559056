#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "bdmrf/sampler.hpp"

namespace bdmrf {

struct FitConfig {
  double lambda = 0.0;  // l1 level on intra-block coefficients
  double mu = 0.0;      // l1 level on inter-block coefficients
  int max_iter = 2000;
  double tol = 1e-7;          // relative objective change at exit
  double backtrack = 0.5;     // line-search shrink factor
  double init_step = 1.0;
  bool standardize = false;   // penalize on standardized predictor scale
  bool project_nonpositive = false;  // clamp poisson-poisson intra coefs <= 0
};

// Result of one node-conditional fit. Candidate coordinate lists cover every
// other node of the block (intra) and every node of the parent blocks
// (inter); coefficients below 1e-8 are truncated to exact zeros.
struct NodeFit {
  int node = -1;
  double intercept = 0.0;
  std::vector<int> intra_candidates;
  std::vector<int> inter_candidates;
  Eigen::VectorXd theta_intra;
  Eigen::VectorXd theta_inter;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt_slack = 0.0;

  double coef_for(int other) const;  // 0 when `other` is not a candidate
};

enum class SymmetrizeRule { And, Or };
std::string rule_name(SymmetrizeRule r);

struct EstimatedEdge {
  int u = 0, v = 0;  // intra: u < v; inter: u -> v
  double weight = 0.0;
};

struct GraphEstimate {
  std::vector<EstimatedEdge> intra;
  std::vector<EstimatedEdge> inter;
  std::vector<NodeFit> node_fits;
  SymmetrizeRule rule = SymmetrizeRule::And;
  std::vector<std::string> warnings;
};

// Smooth part of the node-conditional objective (mean negative log
// likelihood, penalty excluded) and its gradient, evaluated at theta laid out
// as [intercept, intra..., inter...].
std::pair<double, Eigen::VectorXd> node_objective_grad(const Dataset& data,
                                                       const SpecSkeleton& skeleton,
                                                       int node,
                                                       const Eigen::VectorXd& theta);

NodeFit fit_node(const Dataset& data, const SpecSkeleton& skeleton, int node,
                 const FitConfig& cfg);

struct LambdaGrid {
  std::vector<double> lambdas;   // descending geometric grid
  std::vector<double> mu_scale;  // per block: mu = mu_scale[block] * lambda
  double lambda_max = 0.0;
  std::vector<std::string> warnings;
};

// Data-driven grid: lambda_max is the largest intra-coordinate gradient
// magnitude at theta = 0 over all nodes; K values decay geometrically to
// ratio * lambda_max. mu couples to lambda by sqrt(log q_i / log p_i).
LambdaGrid lambda_grid(const Dataset& data, const SpecSkeleton& skeleton, int k,
                       double ratio);

GraphEstimate fit_graph(const Dataset& data, const SpecSkeleton& skeleton,
                        const FitConfig& cfg, SymmetrizeRule rule,
                        int threads = 1);

// Caches per-node designs and warm-starts along a regularization path.
class PathFitter {
 public:
  PathFitter(const Dataset& data, const SpecSkeleton& skeleton, FitConfig base,
             SymmetrizeRule rule);

  // mu_scale: per-block coupling; nullptr means mu = base.mu for all nodes.
  GraphEstimate fit(double lambda, const std::vector<double>* mu_scale,
                    int threads);
  std::vector<GraphEstimate> fit_path(const LambdaGrid& grid, int threads);

 private:
  const Dataset& data_;
  const SpecSkeleton& skeleton_;
  FitConfig base_;
  SymmetrizeRule rule_;
  std::vector<Eigen::VectorXd> warm_;  // per node, reused across lambdas
};

struct StarsResult {
  double lambda = 0.0;
  int index = -1;                     // grid index chosen
  std::vector<double> instability;    // per grid point
  std::vector<double> sup_instability;  // running supremum from the sparse end
  bool exhausted = false;             // no stable prefix below beta
  std::vector<std::string> warnings;
};

// Stability selection over row subsamples of size min(floor(10*sqrt(n)), n-1).
// Walks the grid from lambda_max down and keeps the densest point whose
// running-supremum instability stays <= beta; with nothing ever above beta the
// sparsest point wins, and with nothing below beta the most stable point under
// the monotonized instability (again the sparse end) is returned with a
// warning.
StarsResult stars_select(const Dataset& data, const SpecSkeleton& skeleton,
                         const LambdaGrid& grid, double beta, int subsamples,
                         const FitConfig& cfg, SymmetrizeRule rule,
                         std::uint64_t seed, int threads = 1);

}  // namespace bdmrf
