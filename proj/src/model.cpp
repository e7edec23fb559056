#include "bdmrf/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bdmrf/errors.hpp"

namespace bdmrf {

int ModelSpec::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<int>(i);
  return -1;
}

SpecSkeleton skeleton_of(const ModelSpec& spec) {
  return SpecSkeleton{spec.nodes, spec.blocks, spec.block_dag};
}

std::vector<std::pair<int, int>> build_lattice(int rows, int cols) {
  if (rows < 1 || cols < 1) throw SpecError("lattice dimensions must be >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      int id = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(id, id + 1);
      if (r + 1 < rows) edges.emplace_back(id, id + cols);
    }
  }
  return edges;
}

GraphStats graph_stats(const ModelSpec& spec) {
  GraphStats st;
  int m = spec.num_blocks();
  st.p_i.assign(static_cast<std::size_t>(m), 0);
  st.q_i.assign(static_cast<std::size_t>(m), 0);
  st.d_intra.assign(static_cast<std::size_t>(m), 0);
  st.d_inter.assign(static_cast<std::size_t>(m), 0);
  for (int b = 0; b < m; ++b) {
    st.p_i[static_cast<std::size_t>(b)] = static_cast<int>(spec.blocks[static_cast<std::size_t>(b)].size());
    for (int pb : spec.block_dag[static_cast<std::size_t>(b)])
      st.q_i[static_cast<std::size_t>(b)] += static_cast<int>(spec.blocks[static_cast<std::size_t>(pb)].size());
  }
  std::vector<int> intra_deg(spec.nodes.size(), 0);
  std::vector<int> inter_deg(spec.nodes.size(), 0);
  for (const auto& e : spec.intra_edges) {
    ++intra_deg[static_cast<std::size_t>(e.u)];
    ++intra_deg[static_cast<std::size_t>(e.v)];
  }
  for (const auto& e : spec.inter_edges) ++inter_deg[static_cast<std::size_t>(e.to)];
  for (std::size_t s = 0; s < spec.nodes.size(); ++s) {
    auto b = static_cast<std::size_t>(spec.nodes[s].block);
    st.d_intra[b] = std::max(st.d_intra[b], intra_deg[s]);
    st.d_inter[b] = std::max(st.d_inter[b], inter_deg[s]);
  }
  return st;
}

std::vector<std::string> validate(const ModelSpec& spec) {
  std::vector<std::string> errors;
  auto err = [&errors](const std::string& m) { errors.push_back(m); };

  int p = spec.num_nodes();
  int m = spec.num_blocks();
  if (p == 0) err("node list is empty");
  if (m == 0) err("block list is empty");
  if (static_cast<int>(spec.block_dag.size()) != m)
    err("block_dag must have one parent list per block");
  if (static_cast<int>(spec.node_weights.size()) != p)
    err("node_weights must align with nodes");

  std::set<std::string> ids;
  for (const auto& n : spec.nodes) {
    if (!ids.insert(n.id).second) err("duplicate node id '" + n.id + "'");
    if (n.block < 0 || n.block >= m)
      err("node '" + n.id + "' references block " + std::to_string(n.block + 1) +
          " out of range");
    if (n.family.tag == FamilyTag::Gaussian && !(n.family.sigma > 0.0))
      err("node '" + n.id + "': gaussian sigma must be positive");
    if (n.family.tag == FamilyTag::TruncatedPoisson && n.family.r < 1)
      err("node '" + n.id + "': truncation level must be >= 1");
  }

  // blocks must partition nodes exactly and agree with per-node block indices
  std::vector<int> seen(static_cast<std::size_t>(std::max(p, 1)), 0);
  for (int b = 0; b < m; ++b) {
    for (int s : spec.blocks[static_cast<std::size_t>(b)]) {
      if (s < 0 || s >= p) {
        err("block " + std::to_string(b + 1) + " references node index out of range");
        continue;
      }
      if (++seen[static_cast<std::size_t>(s)] > 1)
        err("partition violated: node '" + spec.nodes[static_cast<std::size_t>(s)].id +
            "' assigned to two blocks");
      if (spec.nodes[static_cast<std::size_t>(s)].block != b)
        err("node '" + spec.nodes[static_cast<std::size_t>(s)].id +
            "' block index disagrees with block membership");
    }
  }
  for (int s = 0; s < p; ++s)
    if (seen[static_cast<std::size_t>(s)] == 0)
      err("partition violated: node '" + spec.nodes[static_cast<std::size_t>(s)].id +
          "' belongs to no block");

  if (static_cast<int>(spec.block_dag.size()) == m) {
    for (int b = 0; b < m; ++b) {
      for (int pb : spec.block_dag[static_cast<std::size_t>(b)]) {
        if (pb < 0 || pb >= m)
          err("block_dag parent index out of range for block " + std::to_string(b + 1));
        else if (pb >= b)
          err("block_dag violates block order: block " + std::to_string(b + 1) +
              " lists parent " + std::to_string(pb + 1));
      }
    }
  }

  auto in_range = [p](int s) { return s >= 0 && s < p; };
  std::set<std::pair<int, int>> intra_seen;
  for (const auto& e : spec.intra_edges) {
    if (!in_range(e.u) || !in_range(e.v)) {
      err("intra edge references node index out of range");
      continue;
    }
    if (e.u == e.v) {
      err("self edge on node '" + spec.nodes[static_cast<std::size_t>(e.u)].id + "'");
      continue;
    }
    if (spec.nodes[static_cast<std::size_t>(e.u)].block != spec.nodes[static_cast<std::size_t>(e.v)].block)
      err("intra edge (" + spec.nodes[static_cast<std::size_t>(e.u)].id + "," +
          spec.nodes[static_cast<std::size_t>(e.v)].id + ") joins different blocks");
    auto key = std::minmax(e.u, e.v);
    if (!intra_seen.insert(key).second)
      err("duplicate intra edge (" + spec.nodes[static_cast<std::size_t>(e.u)].id + "," +
          spec.nodes[static_cast<std::size_t>(e.v)].id + ")");
  }

  std::set<std::pair<int, int>> inter_seen;
  for (const auto& e : spec.inter_edges) {
    if (!in_range(e.from) || !in_range(e.to)) {
      err("inter edge references node index out of range");
      continue;
    }
    if (e.from == e.to) {
      err("self edge on node '" + spec.nodes[static_cast<std::size_t>(e.from)].id + "'");
      continue;
    }
    int bf = spec.nodes[static_cast<std::size_t>(e.from)].block;
    int bt = spec.nodes[static_cast<std::size_t>(e.to)].block;
    if (bf >= bt) {
      err("edge violates block order: " + spec.nodes[static_cast<std::size_t>(e.from)].id +
          " -> " + spec.nodes[static_cast<std::size_t>(e.to)].id);
    } else if (static_cast<int>(spec.block_dag.size()) == m) {
      const auto& pa = spec.block_dag[static_cast<std::size_t>(bt)];
      if (std::find(pa.begin(), pa.end(), bf) == pa.end())
        err("inter edge " + spec.nodes[static_cast<std::size_t>(e.from)].id + " -> " +
            spec.nodes[static_cast<std::size_t>(e.to)].id +
            " has no corresponding block_dag parent");
    }
    if (!inter_seen.insert({e.from, e.to}).second)
      err("duplicate inter edge " + spec.nodes[static_cast<std::size_t>(e.from)].id +
          " -> " + spec.nodes[static_cast<std::size_t>(e.to)].id);
  }

  return errors;
}

Model Model::build(ModelSpec spec) {
  auto errors = validate(spec);
  if (!errors.empty()) {
    std::ostringstream os;
    os << "invalid model spec:";
    for (const auto& e : errors) os << "\n  - " << e;
    throw SpecError(os.str());
  }
  Model m;
  m.spec_ = std::move(spec);
  auto p = m.spec_.nodes.size();
  m.intra_.resize(p);
  m.parents_.resize(p);
  for (const auto& e : m.spec_.intra_edges) {
    m.intra_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.weight);
    m.intra_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.weight);
  }
  for (const auto& e : m.spec_.inter_edges)
    m.parents_[static_cast<std::size_t>(e.to)].emplace_back(e.from, e.weight);
  return m;
}

double Model::natural_param(int s,
                            const std::unordered_map<int, double>& assignment) const {
  const auto& intra = intra_[static_cast<std::size_t>(s)];
  const auto& pars = parents_[static_cast<std::size_t>(s)];
  if (assignment.size() != intra.size() + pars.size()) {
    for (const auto& [node, value] : assignment) {
      (void)value;
      bool is_neighbor =
          std::any_of(intra.begin(), intra.end(), [&](auto& e) { return e.first == node; }) ||
          std::any_of(pars.begin(), pars.end(), [&](auto& e) { return e.first == node; });
      if (!is_neighbor)
        throw SpecError("value supplied for non-neighbor node '" +
                        spec_.nodes[static_cast<std::size_t>(node)].id + "'");
    }
  }
  double eta = spec_.node_weights[static_cast<std::size_t>(s)];
  auto lookup = [&](int node) {
    auto it = assignment.find(node);
    if (it == assignment.end())
      throw SpecError("missing neighbor value for node '" +
                      spec_.nodes[static_cast<std::size_t>(node)].id + "'");
    return it->second;
  };
  for (const auto& [t, w] : pars)
    eta += w * sufficient_stat(spec_.nodes[static_cast<std::size_t>(t)].family, lookup(t));
  for (const auto& [sp, w] : intra)
    eta += w * sufficient_stat(spec_.nodes[static_cast<std::size_t>(sp)].family, lookup(sp));
  return eta;
}

double Model::natural_param_at(int s, std::span<const double> state) const {
  double eta = spec_.node_weights[static_cast<std::size_t>(s)];
  for (const auto& [t, w] : parents_[static_cast<std::size_t>(s)])
    eta += w * sufficient_stat(spec_.nodes[static_cast<std::size_t>(t)].family,
                               state[static_cast<std::size_t>(t)]);
  for (const auto& [sp, w] : intra_[static_cast<std::size_t>(s)])
    eta += w * sufficient_stat(spec_.nodes[static_cast<std::size_t>(sp)].family,
                               state[static_cast<std::size_t>(sp)]);
  return eta;
}

double Model::log_joint_unnorm(std::span<const double> x) const {
  if (x.size() != spec_.nodes.size())
    throw SpecError("state vector size does not match node count");
  double total = 0.0;
  for (std::size_t s = 0; s < spec_.nodes.size(); ++s) {
    const auto& fam = spec_.nodes[s].family;
    double bs = sufficient_stat(fam, x[s]);
    double eta_s = spec_.node_weights[s];
    for (const auto& [t, w] : parents_[s])
      eta_s += w * sufficient_stat(spec_.nodes[static_cast<std::size_t>(t)].family,
                                   x[static_cast<std::size_t>(t)]);
    total += eta_s * bs + base_measure(fam, x[s]);
  }
  for (const auto& e : spec_.intra_edges) {
    total += e.weight *
             sufficient_stat(spec_.nodes[static_cast<std::size_t>(e.u)].family,
                             x[static_cast<std::size_t>(e.u)]) *
             sufficient_stat(spec_.nodes[static_cast<std::size_t>(e.v)].family,
                             x[static_cast<std::size_t>(e.v)]);
  }
  return total;
}

}  // namespace bdmrf
