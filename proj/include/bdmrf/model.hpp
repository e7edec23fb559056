#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bdmrf/family.hpp"

namespace bdmrf {

struct NodeDecl {
  std::string id;
  FamilyKind family;
  int block = 0;  // 0-based block index
};

struct IntraEdge {
  int u = 0, v = 0;  // unordered pair, same block
  double weight = 0.0;
};

struct InterEdge {
  int from = 0, to = 0;  // directed, block(from) in PA(block(to))
  double weight = 0.0;
};

// Full model: block partition, block DAG, mixed edge sets, parameters.
// Parameters live on the edges and nodes themselves (sparse by construction);
// dense matrices are only formed where a rule needs them.
struct ModelSpec {
  std::vector<NodeDecl> nodes;
  std::vector<std::vector<int>> blocks;     // node indices per block
  std::vector<std::vector<int>> block_dag;  // parent block indices per block
  std::vector<IntraEdge> intra_edges;
  std::vector<InterEdge> inter_edges;
  std::vector<double> node_weights;  // theta_s, aligned with nodes

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int node_index(const std::string& id) const;  // -1 if absent
};

// Structure-only view handed to the estimator: blocks and DAG, no edges or
// parameters. Constructed from a ModelSpec or a dataset schema.
struct SpecSkeleton {
  std::vector<NodeDecl> nodes;
  std::vector<std::vector<int>> blocks;
  std::vector<std::vector<int>> block_dag;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_blocks() const { return static_cast<int>(blocks.size()); }
};

SpecSkeleton skeleton_of(const ModelSpec& spec);

// Per-block degree and size statistics.
struct GraphStats {
  std::vector<int> p_i;       // block sizes
  std::vector<int> q_i;       // total node count across parent blocks
  std::vector<int> d_intra;   // max intra-block degree
  std::vector<int> d_inter;   // max inter-block in-degree
};

GraphStats graph_stats(const ModelSpec& spec);

// 4-neighbour grid on rows x cols nodes in row-major order.
std::vector<std::pair<int, int>> build_lattice(int rows, int cols);

// Checks every structural invariant; returns one message per violation.
std::vector<std::string> validate(const ModelSpec& spec);

// Validated model with adjacency index; immutable once built.
class Model {
 public:
  static Model build(ModelSpec spec);  // throws SpecError listing violations

  const ModelSpec& spec() const { return spec_; }

  const std::vector<std::pair<int, double>>& intra_neighbors(int node) const {
    return intra_[static_cast<std::size_t>(node)];
  }
  const std::vector<std::pair<int, double>>& parents(int node) const {
    return parents_[static_cast<std::size_t>(node)];
  }

  // eta for node s given exactly its neighbours; missing or extra entries in
  // `assignment` are errors.
  double natural_param(int s, const std::unordered_map<int, double>& assignment) const;

  // Fast path: reads neighbour entries out of a full state vector.
  double natural_param_at(int s, std::span<const double> state) const;

  // Joint log density up to the per-block conditional log partitions.
  double log_joint_unnorm(std::span<const double> x) const;

 private:
  ModelSpec spec_;
  std::vector<std::vector<std::pair<int, double>>> intra_;
  std::vector<std::vector<std::pair<int, double>>> parents_;
};

}  // namespace bdmrf
