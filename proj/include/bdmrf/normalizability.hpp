#pragma once

#include <string>
#include <vector>

#include "bdmrf/model.hpp"

namespace bdmrf {

enum class Verdict { Normalizable, NotNormalizable, Unknown };

std::string verdict_name(Verdict v);

struct Finding {
  std::string rule;     // short rule id: "gaussian-theta", "poisson-intra", ...
  std::string message;  // human-readable
  std::vector<std::string> items;  // offending nodes/edges
};

struct NormalizabilityReport {
  Verdict verdict = Verdict::Normalizable;
  std::vector<Finding> reasons;

  bool ok() const { return verdict == Verdict::Normalizable; }
};

// Applies the per-block-conditional rule table:
//   (a) Gaussian sub-blocks need the interaction matrix Theta (diagonal
//       -1/sigma^2, off-diagonal theta/(sigma*sigma')) negative definite,
//       largest eigenvalue < -1e-10;
//   (b) Poisson-Poisson intra edges need theta <= 0; truncated-Poisson
//       endpoints are exempt (finite domain);
//   (c) exponential nodes need theta_s < 0, exponential-exponential intra
//       theta <= 0, and a worst-case bound keeping eta negative over all
//       neighbour/parent domains (conservative);
//   (d) Gaussian-Poisson and Gaussian-exponential intra edges with nonzero
//       weight are rejected; Poisson-Bernoulli and exponential-Bernoulli
//       intra edges need theta <= 0;
//   (e) inter-block edges are unrestricted except where (c) binds.
// Blocks made only of finite-domain families pass with any finite weights.
NormalizabilityReport check_normalizability(const Model& model);

}  // namespace bdmrf
