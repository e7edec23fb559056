#include "bdmrf/normalizability.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>

namespace bdmrf {

namespace {

constexpr double kEigenTol = 1e-10;

std::string edge_label(const ModelSpec& spec, int u, int v) {
  return spec.nodes[static_cast<std::size_t>(u)].id + "--" +
         spec.nodes[static_cast<std::size_t>(v)].id;
}

// sup over the neighbour's domain of w * B(x); +inf when unbounded.
double sup_weight_times_stat(double w, const FamilyKind& fam) {
  if (w == 0.0) return 0.0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (fam.tag) {
    case FamilyTag::BernoulliPM:
      return std::fabs(w);
    case FamilyTag::TruncatedPoisson:
      return w > 0.0 ? w * fam.r : 0.0;
    case FamilyTag::Poisson:
      return w > 0.0 ? inf : 0.0;
    case FamilyTag::Exponential:
      return w > 0.0 ? inf : 0.0;  // domain [0, inf)
    case FamilyTag::Gaussian:
      return inf;  // B unbounded on both sides
  }
  return inf;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Normalizable: return "normalizable";
    case Verdict::NotNormalizable: return "not-normalizable";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

NormalizabilityReport check_normalizability(const Model& model) {
  const ModelSpec& spec = model.spec();
  NormalizabilityReport report;
  bool unknown = false;

  auto add = [&report](const std::string& rule, const std::string& msg,
                       std::vector<std::string> items) {
    report.reasons.push_back({rule, msg, std::move(items)});
  };

  for (int b = 0; b < spec.num_blocks(); ++b) {
    const auto& members = spec.blocks[static_cast<std::size_t>(b)];

    // Gaussian sub-block interaction matrix.
    std::vector<int> gauss;
    for (int s : members)
      if (spec.nodes[static_cast<std::size_t>(s)].family.tag == FamilyTag::Gaussian)
        gauss.push_back(s);
    if (!gauss.empty()) {
      Eigen::MatrixXd theta =
          Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gauss.size()),
                                static_cast<Eigen::Index>(gauss.size()));
      std::unordered_map<int, int> pos;
      for (std::size_t i = 0; i < gauss.size(); ++i)
        pos[gauss[i]] = static_cast<int>(i);
      for (std::size_t i = 0; i < gauss.size(); ++i) {
        double sig = spec.nodes[static_cast<std::size_t>(gauss[i])].family.sigma;
        theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
            -1.0 / (sig * sig);
      }
      for (const auto& e : spec.intra_edges) {
        auto iu = pos.find(e.u);
        auto iv = pos.find(e.v);
        if (iu == pos.end() || iv == pos.end()) continue;
        double su = spec.nodes[static_cast<std::size_t>(e.u)].family.sigma;
        double sv = spec.nodes[static_cast<std::size_t>(e.v)].family.sigma;
        theta(iu->second, iv->second) = e.weight / (su * sv);
        theta(iv->second, iu->second) = e.weight / (su * sv);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta,
                                                        Eigen::EigenvaluesOnly);
      double lmax = es.eigenvalues().maxCoeff();
      if (!(lmax < -kEigenTol)) {
        std::ostringstream os;
        os << "gaussian interaction matrix of block " << (b + 1)
           << " is not negative definite (largest eigenvalue " << lmax << ")";
        if (std::fabs(lmax) <= kEigenTol) os << " [boundary]";
        add("gaussian-theta", os.str(), {"block " + std::to_string(b + 1)});
      }
    }

    // Exponential node weights.
    for (int s : members) {
      const auto& n = spec.nodes[static_cast<std::size_t>(s)];
      if (n.family.tag != FamilyTag::Exponential) continue;
      if (!(spec.node_weights[static_cast<std::size_t>(s)] < 0.0))
        add("exponential-node",
            "exponential node '" + n.id + "' needs theta_s < 0", {n.id});
      // worst-case eta over neighbour and parent domains
      double sup = spec.node_weights[static_cast<std::size_t>(s)];
      for (const auto& [t, w] : model.intra_neighbors(s))
        sup += sup_weight_times_stat(w, spec.nodes[static_cast<std::size_t>(t)].family);
      for (const auto& [t, w] : model.parents(s))
        sup += sup_weight_times_stat(w, spec.nodes[static_cast<std::size_t>(t)].family);
      if (!(sup < 0.0))
        add("exponential-eta-bound",
            "worst-case natural parameter of exponential node '" + n.id +
                "' can reach " + (std::isinf(sup) ? "+inf" : std::to_string(sup)),
            {n.id});
    }
  }

  // Intra-edge pair rules.
  for (const auto& e : spec.intra_edges) {
    auto tu = spec.nodes[static_cast<std::size_t>(e.u)].family.tag;
    auto tv = spec.nodes[static_cast<std::size_t>(e.v)].family.tag;
    auto has = [&](FamilyTag a, FamilyTag b2) {
      return (tu == a && tv == b2) || (tu == b2 && tv == a);
    };
    if (has(FamilyTag::Poisson, FamilyTag::Poisson) && e.weight > 0.0)
      add("poisson-intra",
          "poisson-poisson intra edge " + edge_label(spec, e.u, e.v) +
              " needs weight <= 0, got " + std::to_string(e.weight),
          {edge_label(spec, e.u, e.v)});
    if (has(FamilyTag::Exponential, FamilyTag::Exponential) && e.weight > 0.0)
      add("exponential-intra",
          "exponential-exponential intra edge " + edge_label(spec, e.u, e.v) +
              " needs weight <= 0",
          {edge_label(spec, e.u, e.v)});
    if (e.weight != 0.0 && (has(FamilyTag::Gaussian, FamilyTag::Poisson) ||
                            has(FamilyTag::Gaussian, FamilyTag::Exponential)))
      add("mixed-pair",
          "intra edge " + edge_label(spec, e.u, e.v) + " (" +
              (has(FamilyTag::Gaussian, FamilyTag::Poisson) ? "gaussian-poisson"
                                                            : "gaussian-exponential") +
              ") does not admit a nonzero interaction within one block",
          {edge_label(spec, e.u, e.v)});
    if (e.weight > 0.0 && (has(FamilyTag::Poisson, FamilyTag::BernoulliPM) ||
                           has(FamilyTag::Exponential, FamilyTag::BernoulliPM)))
      add("mixed-pair",
          "intra edge " + edge_label(spec, e.u, e.v) +
              " needs weight <= 0 for this family pair",
          {edge_label(spec, e.u, e.v)});
  }

  report.verdict = report.reasons.empty()
                       ? (unknown ? Verdict::Unknown : Verdict::Normalizable)
                       : Verdict::NotNormalizable;
  return report;
}

}  // namespace bdmrf
