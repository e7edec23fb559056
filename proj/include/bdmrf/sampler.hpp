#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bdmrf/model.hpp"
#include "bdmrf/normalizability.hpp"

namespace bdmrf {

enum class ChainInit { Zero, Random };
enum class VisitOrder { Forward, Reverse };

struct SamplerConfig {
  int burn_in = 500;  // sweeps before the first retained state
  int thin = 10;      // sweeps between retained states within one chain
  std::uint64_t seed = 0;
  ChainInit init = ChainInit::Zero;
  VisitOrder visit = VisitOrder::Forward;
  // Rows drawn per chain. 1 keeps rows i.i.d. (one fresh chain per row);
  // larger values thin a single chain instead. For multi-block models the
  // continuation only re-sweeps each block `thin` times after its parents
  // moved, so thinned rows are approximate there; single-block chains are
  // exact.
  int rows_per_chain = 1;
  bool force = false;  // sample even when the spec is not normalizable
};

struct ColumnSchema {
  std::string name;
  FamilyKind family;
  int block = 0;
};

struct Dataset {
  std::vector<ColumnSchema> schema;
  Eigen::MatrixXd values;  // n x p

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

std::vector<ColumnSchema> schema_of(const ModelSpec& spec);

// True when the dataset's columns carry the same (name, family, block)
// structure as the skeleton's nodes, in order.
bool schema_matches(const Dataset& data, const SpecSkeleton& skeleton);
SpecSkeleton skeleton_of(const Dataset& data);

// One Gibbs pass over a single block, conditioned on fixed parent values.
// `state` holds the full node vector; only entries of block `i` are updated.
// Runs cfg.burn_in sweeps and leaves the final state in place.
void gibbs_block(const Model& model, int block, std::vector<double>& state,
                 const SamplerConfig& cfg, RandomStream& rng);

// n rows from the block-ordered factorization. Each row runs independent
// chains per block (fresh burn-in), with a private random stream derived from
// (seed, row index). Deterministic for a given seed and any thread count.
Dataset sample_bdmrf(const Model& model, int n, const SamplerConfig& cfg,
                     int threads = 1);

struct ExactDistribution {
  std::vector<std::vector<double>> states;
  std::vector<double> log_prob;
  // per block: conditional log partition keyed by the parent-node values
  std::vector<std::map<std::vector<double>, double>> block_log_partition;

  int find_state(const std::vector<double>& x) const;  // -1 if absent
};

// Exact joint pmf for models whose families all have finite domain.
// Throws EnumerationError for infinite-domain families or state counts
// above 2^20.
ExactDistribution enumerate_exact(const Model& model);

// Total variation distance between the empirical distribution of `data` and
// the enumerated pmf.
double tv_distance(const ExactDistribution& exact, const Dataset& data);

// Consistency of the enumerated joint with the node-conditional form: for
// every node, marginalizes the joint down to P[x_s | rest of block, parents]
// and compares pointwise with the univariate family at the node's natural
// parameter. Returns the largest absolute deviation.
double max_conditional_deviation(const Model& model, const ExactDistribution& exact);

}  // namespace bdmrf
