#pragma once

#include <string>
#include <vector>

#include "bdmrf/model.hpp"

namespace bdmrf::testing {

// Single-block Ising lattice with constant edge weight.
inline ModelSpec ising_lattice(int rows, int cols, double edge_w, double node_w = 0.0) {
  ModelSpec spec;
  int p = rows * cols;
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({"b" + std::to_string(i), FamilyKind::bernoulli_pm(), 0});
  spec.blocks.resize(1);
  for (int i = 0; i < p; ++i) spec.blocks[0].push_back(i);
  spec.block_dag.resize(1);
  for (auto [u, v] : build_lattice(rows, cols)) spec.intra_edges.push_back({u, v, edge_w});
  spec.node_weights.assign(static_cast<std::size_t>(p), node_w);
  return spec;
}

// Single-block Gaussian path graph.
inline ModelSpec gaussian_chain(int p, double edge_w, double sigma = 1.0) {
  ModelSpec spec;
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({"g" + std::to_string(i), FamilyKind::gaussian(sigma), 0});
  spec.blocks.resize(1);
  for (int i = 0; i < p; ++i) spec.blocks[0].push_back(i);
  spec.block_dag.resize(1);
  for (int i = 0; i + 1 < p; ++i) spec.intra_edges.push_back({i, i + 1, edge_w});
  spec.node_weights.assign(static_cast<std::size_t>(p), 0.0);
  return spec;
}

// Two stacked lattices with directed matching edges block 1 -> block 2.
inline ModelSpec two_block_lattice(int rows, int cols, const FamilyKind& fam1,
                                   double w1, const FamilyKind& fam2, double w2,
                                   double w12, const std::string& p1 = "a",
                                   const std::string& p2 = "b") {
  ModelSpec spec;
  int p = rows * cols;
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({p1 + std::to_string(i), fam1, 0});
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({p2 + std::to_string(i), fam2, 1});
  spec.blocks.resize(2);
  for (int i = 0; i < p; ++i) spec.blocks[0].push_back(i);
  for (int i = 0; i < p; ++i) spec.blocks[1].push_back(p + i);
  spec.block_dag = {{}, {0}};
  for (auto [u, v] : build_lattice(rows, cols)) {
    spec.intra_edges.push_back({u, v, w1});
    spec.intra_edges.push_back({p + u, p + v, w2});
  }
  for (int i = 0; i < p; ++i) spec.inter_edges.push_back({i, p + i, w12});
  spec.node_weights.assign(static_cast<std::size_t>(2 * p), 0.0);
  return spec;
}

// The five enumerable reference models used by the oracle checks.
inline std::vector<std::pair<std::string, ModelSpec>> enumerable_battery() {
  std::vector<std::pair<std::string, ModelSpec>> battery;

  battery.emplace_back("ising 2x2 lattice", [] {
    ModelSpec s = ising_lattice(2, 2, 0.4, 0.1);
    return s;
  }());

  battery.emplace_back("ising -> ising two-block", [] {
    ModelSpec s = two_block_lattice(1, 2, FamilyKind::bernoulli_pm(), 0.3,
                                    FamilyKind::bernoulli_pm(), 0.25, 0.35);
    s.node_weights[0] = 0.1;
    return s;
  }());

  battery.emplace_back("ising -> tpoisson(3) two-block", [] {
    ModelSpec s = two_block_lattice(1, 2, FamilyKind::bernoulli_pm(), 0.3,
                                    FamilyKind::truncated_poisson(3), -0.2, 0.2);
    s.node_weights[2] = 0.3;  // keep the count block away from degeneracy
    s.node_weights[3] = 0.3;
    return s;
  }());

  battery.emplace_back("three-block ising chain", [] {
    ModelSpec spec;
    for (int b = 0; b < 3; ++b)
      for (int i = 0; i < 2; ++i)
        spec.nodes.push_back({"c" + std::to_string(b) + std::to_string(i),
                              FamilyKind::bernoulli_pm(), b});
    spec.blocks = {{0, 1}, {2, 3}, {4, 5}};
    spec.block_dag = {{}, {0}, {1}};
    spec.intra_edges = {{0, 1, 0.3}, {2, 3, 0.3}, {4, 5, 0.3}};
    spec.inter_edges = {{0, 2, 0.4}, {1, 3, 0.4}, {2, 4, 0.4}, {3, 5, 0.4}};
    spec.node_weights.assign(6, 0.0);
    return spec;
  }());

  battery.emplace_back("mixed ising + tpoisson single block", [] {
    ModelSpec spec;
    spec.nodes = {{"b0", FamilyKind::bernoulli_pm(), 0},
                  {"b1", FamilyKind::bernoulli_pm(), 0},
                  {"t0", FamilyKind::truncated_poisson(3), 0},
                  {"t1", FamilyKind::truncated_poisson(3), 0}};
    spec.blocks = {{0, 1, 2, 3}};
    spec.block_dag = {{}};
    spec.intra_edges = {{0, 1, 0.3}, {2, 3, -0.2}, {0, 2, 0.25}, {1, 3, -0.15}};
    spec.node_weights = {0.0, 0.1, 0.4, 0.4};
    return spec;
  }());

  return battery;
}

// Table-style lattice EBDMRF: gaussian marginal block, bernoulli conditional
// block, matching directed edges.
inline ModelSpec gauss_mrf_ising_crf(int rows, int cols, double theta_xx,
                                     double theta_yy, double theta_xy) {
  return two_block_lattice(rows, cols, FamilyKind::gaussian(1.0), theta_xx,
                           FamilyKind::bernoulli_pm(), theta_yy, theta_xy, "x", "y");
}

// Three homogeneous lattice blocks ordered poisson -> gaussian -> bernoulli
// with matching directed edges along every DAG arc.
inline ModelSpec three_block_zyx(int rows, int cols, double theta_zz, double theta_yy,
                                 double theta_xx, double theta_yz, double theta_xy,
                                 double theta_xz) {
  ModelSpec spec;
  int p = rows * cols;
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({"z" + std::to_string(i), FamilyKind::poisson(), 0});
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({"y" + std::to_string(i), FamilyKind::gaussian(1.0), 1});
  for (int i = 0; i < p; ++i)
    spec.nodes.push_back({"x" + std::to_string(i), FamilyKind::bernoulli_pm(), 2});
  spec.blocks.resize(3);
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < p; ++i) spec.blocks[static_cast<std::size_t>(b)].push_back(b * p + i);
  spec.block_dag = {{}, {0}, {0, 1}};
  for (auto [u, v] : build_lattice(rows, cols)) {
    spec.intra_edges.push_back({u, v, theta_zz});
    spec.intra_edges.push_back({p + u, p + v, theta_yy});
    spec.intra_edges.push_back({2 * p + u, 2 * p + v, theta_xx});
  }
  for (int i = 0; i < p; ++i) {
    spec.inter_edges.push_back({i, p + i, theta_yz});
    spec.inter_edges.push_back({p + i, 2 * p + i, theta_xy});
    spec.inter_edges.push_back({i, 2 * p + i, theta_xz});
  }
  spec.node_weights.assign(static_cast<std::size_t>(3 * p), 0.0);
  return spec;
}

}  // namespace bdmrf::testing
