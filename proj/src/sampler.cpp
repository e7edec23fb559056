#include "bdmrf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdmrf/errors.hpp"
#include "bdmrf/threading.hpp"

namespace bdmrf {

namespace {

double init_value(const FamilyKind& fam, ChainInit init, RandomStream& rng) {
  if (init == ChainInit::Random) {
    switch (fam.tag) {
      case FamilyTag::Gaussian: return fam.sigma * rng.normal();
      case FamilyTag::BernoulliPM: return rng.uniform() < 0.5 ? -1.0 : 1.0;
      case FamilyTag::Poisson: return std::floor(rng.uniform() * 4.0);
      case FamilyTag::Exponential: return rng.exponential(1.0);
      case FamilyTag::TruncatedPoisson:
        return std::floor(rng.uniform() * (fam.r + 1));
    }
  }
  switch (fam.tag) {
    case FamilyTag::BernoulliPM: return -1.0;
    case FamilyTag::Exponential: return 1.0;  // 0 sits on the domain boundary
    default: return 0.0;
  }
}

void sweep_block(const Model& model, const std::vector<int>& members,
                 std::vector<double>& state, VisitOrder visit, RandomStream& rng) {
  auto update = [&](int s) {
    const auto& fam = model.spec().nodes[static_cast<std::size_t>(s)].family;
    double eta = model.natural_param_at(s, state);
    if (fam.tag == FamilyTag::Exponential && eta >= -1e-8) {
      std::ostringstream os;
      os << "conditional non-normalizable at state: exponential node '"
         << model.spec().nodes[static_cast<std::size_t>(s)].id << "' reached eta="
         << eta;
      throw ChainAbort(os.str());
    }
    state[static_cast<std::size_t>(s)] = sample_conditional(fam, eta, rng);
  };
  if (visit == VisitOrder::Forward) {
    for (int s : members) update(s);
  } else {
    for (auto it = members.rbegin(); it != members.rend(); ++it) update(*it);
  }
}

// Finite per-node domains for enumeration.
std::vector<double> node_domain(const FamilyKind& fam) {
  switch (fam.tag) {
    case FamilyTag::BernoulliPM: return {-1.0, 1.0};
    case FamilyTag::TruncatedPoisson: {
      std::vector<double> d;
      for (int k = 0; k <= fam.r; ++k) d.push_back(static_cast<double>(k));
      return d;
    }
    default:
      throw EnumerationError("family " + family_name(fam) +
                             " has an infinite domain; cannot enumerate");
  }
}

double logsumexp(const std::vector<double>& v) {
  double m = *std::max_element(v.begin(), v.end());
  double z = 0.0;
  for (double x : v) z += std::exp(x - m);
  return m + std::log(z);
}

}  // namespace

std::vector<ColumnSchema> schema_of(const ModelSpec& spec) {
  std::vector<ColumnSchema> schema;
  schema.reserve(spec.nodes.size());
  for (const auto& n : spec.nodes) schema.push_back({n.id, n.family, n.block});
  return schema;
}

bool schema_matches(const Dataset& data, const SpecSkeleton& skeleton) {
  if (data.p() != skeleton.num_nodes()) return false;
  for (int j = 0; j < data.p(); ++j) {
    const auto& col = data.schema[static_cast<std::size_t>(j)];
    const auto& node = skeleton.nodes[static_cast<std::size_t>(j)];
    if (col.name != node.id || col.block != node.block ||
        !(col.family == node.family))
      return false;
  }
  return true;
}

SpecSkeleton skeleton_of(const Dataset& data) {
  SpecSkeleton sk;
  int max_block = -1;
  for (const auto& col : data.schema) max_block = std::max(max_block, col.block);
  sk.blocks.resize(static_cast<std::size_t>(max_block + 1));
  for (std::size_t j = 0; j < data.schema.size(); ++j) {
    const auto& col = data.schema[j];
    sk.nodes.push_back({col.name, col.family, col.block});
    sk.blocks[static_cast<std::size_t>(col.block)].push_back(static_cast<int>(j));
  }
  // Datasets do not record the block DAG; assume the full partial order
  // (every earlier block is a potential parent).
  sk.block_dag.resize(sk.blocks.size());
  for (std::size_t b = 0; b < sk.blocks.size(); ++b)
    for (std::size_t pb = 0; pb < b; ++pb)
      sk.block_dag[b].push_back(static_cast<int>(pb));
  return sk;
}

void gibbs_block(const Model& model, int block, std::vector<double>& state,
                 const SamplerConfig& cfg, RandomStream& rng) {
  if (cfg.burn_in < 0 || cfg.thin < 1)
    throw SpecError("sampler config: burn_in >= 0 and thin >= 1 required");
  const auto& members = model.spec().blocks[static_cast<std::size_t>(block)];
  for (int s : members) {
    state[static_cast<std::size_t>(s)] =
        init_value(model.spec().nodes[static_cast<std::size_t>(s)].family, cfg.init, rng);
  }
  for (int sweep = 0; sweep < cfg.burn_in; ++sweep)
    sweep_block(model, members, state, cfg.visit, rng);
}

Dataset sample_bdmrf(const Model& model, int n, const SamplerConfig& cfg,
                     int threads) {
  if (n < 1) throw SpecError("sample count must be >= 1");
  if (!cfg.force) {
    auto report = check_normalizability(model);
    if (!report.ok()) {
      std::string msg = "refusing to sample a spec with verdict '" +
                        verdict_name(report.verdict) + "'";
      for (const auto& r : report.reasons) msg += "\n  [" + r.rule + "] " + r.message;
      throw SpecError(msg);
    }
  }

  const int p = model.spec().num_nodes();
  const int rows_per_chain = std::max(1, cfg.rows_per_chain);
  const int chains = (n + rows_per_chain - 1) / rows_per_chain;

  Dataset data;
  data.schema = schema_of(model.spec());
  data.values.resize(n, p);

  parallel_for(chains, threads, [&](int chain) {
    RandomStream rng = derive_stream(cfg.seed, "gibbs-chain", static_cast<std::uint64_t>(chain));
    std::vector<double> state(static_cast<std::size_t>(p), 0.0);
    int first_row = chain * rows_per_chain;
    int rows = std::min(rows_per_chain, n - first_row);
    for (int r = 0; r < rows; ++r) {
      if (r == 0) {
        for (int b = 0; b < model.spec().num_blocks(); ++b)
          gibbs_block(model, b, state, cfg, rng);
      } else {
        // continue the same chain: thin sweeps per block in DAG order
        for (int b = 0; b < model.spec().num_blocks(); ++b) {
          const auto& members = model.spec().blocks[static_cast<std::size_t>(b)];
          for (int sweep = 0; sweep < cfg.thin; ++sweep)
            sweep_block(model, members, state, cfg.visit, rng);
        }
      }
      for (int j = 0; j < p; ++j)
        data.values(first_row + r, j) = state[static_cast<std::size_t>(j)];
    }
  });
  return data;
}

int ExactDistribution::find_state(const std::vector<double>& x) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == x) return static_cast<int>(i);
  return -1;
}

ExactDistribution enumerate_exact(const Model& model) {
  const ModelSpec& spec = model.spec();
  const int p = spec.num_nodes();

  std::vector<std::vector<double>> domains;
  domains.reserve(static_cast<std::size_t>(p));
  double total_states = 1.0;
  for (const auto& n : spec.nodes) {
    domains.push_back(node_domain(n.family));
    total_states *= static_cast<double>(domains.back().size());
    if (total_states > static_cast<double>(1 << 20))
      throw EnumerationError("state count exceeds 2^20");
  }

  // Parent nodes of each block, sorted, for keying the conditional
  // log-partitions.
  std::vector<std::vector<int>> block_parent_nodes(static_cast<std::size_t>(spec.num_blocks()));
  for (int b = 0; b < spec.num_blocks(); ++b) {
    for (int pb : spec.block_dag[static_cast<std::size_t>(b)])
      for (int s : spec.blocks[static_cast<std::size_t>(pb)])
        block_parent_nodes[static_cast<std::size_t>(b)].push_back(s);
    std::sort(block_parent_nodes[static_cast<std::size_t>(b)].begin(),
              block_parent_nodes[static_cast<std::size_t>(b)].end());
  }

  // Per-block unnormalized conditional log mass at a full state.
  auto block_term = [&](int b, const std::vector<double>& x) {
    double total = 0.0;
    for (int s : spec.blocks[static_cast<std::size_t>(b)]) {
      const auto& fam = spec.nodes[static_cast<std::size_t>(s)].family;
      total += model.natural_param_at(s, x) *
                   sufficient_stat(fam, x[static_cast<std::size_t>(s)]) +
               base_measure(fam, x[static_cast<std::size_t>(s)]);
    }
    // intra pair terms are counted twice through natural_param_at; subtract
    for (const auto& e : spec.intra_edges) {
      if (spec.nodes[static_cast<std::size_t>(e.u)].block != b) continue;
      total -= e.weight *
               sufficient_stat(spec.nodes[static_cast<std::size_t>(e.u)].family,
                               x[static_cast<std::size_t>(e.u)]) *
               sufficient_stat(spec.nodes[static_cast<std::size_t>(e.v)].family,
                               x[static_cast<std::size_t>(e.v)]);
    }
    return total;
  };

  // Conditional log-partition of block b given fixed parent values in x:
  // logsumexp of block_term over the block's domain.
  std::vector<std::map<std::vector<double>, double>> block_logz(
      static_cast<std::size_t>(spec.num_blocks()));
  auto conditional_logz = [&](int b, std::vector<double>& x) {
    std::vector<double> key;
    for (int s : block_parent_nodes[static_cast<std::size_t>(b)])
      key.push_back(x[static_cast<std::size_t>(s)]);
    auto& memo = block_logz[static_cast<std::size_t>(b)];
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    const auto& members = spec.blocks[static_cast<std::size_t>(b)];
    std::vector<double> terms;
    std::vector<std::size_t> idx(members.size(), 0);
    for (;;) {
      for (std::size_t i = 0; i < members.size(); ++i)
        x[static_cast<std::size_t>(members[i])] =
            domains[static_cast<std::size_t>(members[i])][idx[i]];
      terms.push_back(block_term(b, x));
      std::size_t i = 0;
      while (i < members.size()) {
        if (++idx[i] < domains[static_cast<std::size_t>(members[i])].size()) break;
        idx[i] = 0;
        ++i;
      }
      if (i == members.size()) break;
    }
    double z = logsumexp(terms);
    memo.emplace(std::move(key), z);
    return z;
  };

  ExactDistribution out;
  std::vector<double> x(static_cast<std::size_t>(p), 0.0);
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  for (;;) {
    for (int j = 0; j < p; ++j)
      x[static_cast<std::size_t>(j)] =
          domains[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    double lp = 0.0;
    {
      std::vector<double> scratch = x;
      for (int b = 0; b < spec.num_blocks(); ++b) {
        lp += block_term(b, x) - conditional_logz(b, scratch);
        // restore scratch entries mutated by conditional_logz
        scratch = x;
      }
    }
    out.states.push_back(x);
    out.log_prob.push_back(lp);
    int j = 0;
    while (j < p) {
      if (++idx[static_cast<std::size_t>(j)] <
          domains[static_cast<std::size_t>(j)].size())
        break;
      idx[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == p) break;
  }
  out.block_log_partition = std::move(block_logz);

  double mass = 0.0;
  for (double lp : out.log_prob) mass += std::exp(lp);
  if (std::fabs(mass - 1.0) > 1e-9)
    throw EnumerationError("enumerated probabilities sum to " + std::to_string(mass));
  return out;
}

double max_conditional_deviation(const Model& model, const ExactDistribution& exact) {
  const ModelSpec& spec = model.spec();
  double worst = 0.0;
  for (int s = 0; s < spec.num_nodes(); ++s) {
    const auto& fam = spec.nodes[static_cast<std::size_t>(s)].family;
    int b = spec.nodes[static_cast<std::size_t>(s)].block;

    // conditioning set: the rest of the block plus all parent-block nodes
    std::vector<int> cond;
    for (int t : spec.blocks[static_cast<std::size_t>(b)])
      if (t != s) cond.push_back(t);
    for (int pb : spec.block_dag[static_cast<std::size_t>(b)])
      for (int t : spec.blocks[static_cast<std::size_t>(pb)]) cond.push_back(t);
    std::sort(cond.begin(), cond.end());

    // everything else (other blocks) marginalizes out of the accumulation
    std::map<std::vector<double>, std::map<double, double>> table;
    for (std::size_t k = 0; k < exact.states.size(); ++k) {
      std::vector<double> key;
      key.reserve(cond.size());
      for (int t : cond) key.push_back(exact.states[k][static_cast<std::size_t>(t)]);
      table[key][exact.states[k][static_cast<std::size_t>(s)]] +=
          std::exp(exact.log_prob[k]);
    }
    for (const auto& [key, mass] : table) {
      double total = 0.0;
      for (const auto& [v, m] : mass) total += m;
      std::vector<double> full(static_cast<std::size_t>(spec.num_nodes()), 0.0);
      for (std::size_t i = 0; i < cond.size(); ++i)
        full[static_cast<std::size_t>(cond[i])] = key[i];
      double eta = model.natural_param_at(s, full);
      double logz = log_partition(fam, eta);
      for (const auto& [v, m] : mass) {
        double conditional = m / total;
        double family_pmf =
            std::exp(eta * sufficient_stat(fam, v) + base_measure(fam, v) - logz);
        worst = std::max(worst, std::fabs(conditional - family_pmf));
      }
    }
  }
  return worst;
}

double tv_distance(const ExactDistribution& exact, const Dataset& data) {
  std::map<std::vector<double>, double> counts;
  std::vector<double> row(static_cast<std::size_t>(data.p()));
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) row[static_cast<std::size_t>(j)] = data.values(i, j);
    counts[row] += 1.0;
  }
  double n = static_cast<double>(data.n());
  double tv = 0.0;
  for (std::size_t k = 0; k < exact.states.size(); ++k) {
    double emp = 0.0;
    auto it = counts.find(exact.states[k]);
    if (it != counts.end()) {
      emp = it->second / n;
      counts.erase(it);
    }
    tv += std::fabs(emp - std::exp(exact.log_prob[k]));
  }
  for (const auto& [state, c] : counts) tv += c / n;  // observed but impossible
  return 0.5 * tv;
}

}  // namespace bdmrf
