#include "bdmrf/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "bdmrf/errors.hpp"
#include "bdmrf/threading.hpp"

namespace bdmrf {

namespace {

constexpr double kZeroTruncation = 1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Candidate predictors for a node: every other node of its block, then every
// node of its parent blocks, both in index order.
void candidates_for(const SpecSkeleton& sk, int node, std::vector<int>* intra,
                    std::vector<int>* inter) {
  int b = sk.nodes[static_cast<std::size_t>(node)].block;
  for (int s : sk.blocks[static_cast<std::size_t>(b)])
    if (s != node) intra->push_back(s);
  for (int pb : sk.block_dag[static_cast<std::size_t>(b)])
    for (int t : sk.blocks[static_cast<std::size_t>(pb)]) inter->push_back(t);
  std::sort(intra->begin(), intra->end());
  std::sort(inter->begin(), inter->end());
}

struct NodeProblem {
  int node = -1;
  FamilyKind family;
  Eigen::VectorXd b;       // B_s(x_s) per row
  Eigen::MatrixXd z;       // n x d design [1 | intra stats | inter stats]
  double mean_m = 0.0;     // mean base measure of the response column
  std::vector<int> intra;  // candidate node ids
  std::vector<int> inter;
  std::vector<bool> nonpos_mask;  // coords projected <= 0 when requested

  int dim() const { return static_cast<int>(z.cols()); }
  int n() const { return static_cast<int>(z.rows()); }
};

NodeProblem build_problem(const Dataset& data, const SpecSkeleton& sk, int node) {
  if (!schema_matches(data, sk))
    throw SpecError("dataset schema does not match the spec skeleton");
  if (node < 0 || node >= sk.num_nodes())
    throw SpecError("node index out of range");

  NodeProblem prob;
  prob.node = node;
  prob.family = sk.nodes[static_cast<std::size_t>(node)].family;
  candidates_for(sk, node, &prob.intra, &prob.inter);

  const int n = data.n();
  const int d = 1 + static_cast<int>(prob.intra.size() + prob.inter.size());
  prob.b.resize(n);
  prob.z.resize(n, d);
  prob.z.col(0).setOnes();
  for (int i = 0; i < n; ++i) {
    prob.b(i) = sufficient_stat(prob.family, data.values(i, node));
    prob.mean_m += base_measure(prob.family, data.values(i, node));
  }
  prob.mean_m /= static_cast<double>(n);
  int c = 1;
  for (int t : prob.intra) {
    const auto& fam = sk.nodes[static_cast<std::size_t>(t)].family;
    for (int i = 0; i < n; ++i) prob.z(i, c) = sufficient_stat(fam, data.values(i, t));
    ++c;
  }
  for (int t : prob.inter) {
    const auto& fam = sk.nodes[static_cast<std::size_t>(t)].family;
    for (int i = 0; i < n; ++i) prob.z(i, c) = sufficient_stat(fam, data.values(i, t));
    ++c;
  }
  prob.nonpos_mask.assign(static_cast<std::size_t>(d), false);
  if (prob.family.tag == FamilyTag::Poisson) {
    for (std::size_t k = 0; k < prob.intra.size(); ++k) {
      if (sk.nodes[static_cast<std::size_t>(prob.intra[k])].family.tag ==
          FamilyTag::Poisson)
        prob.nonpos_mask[k + 1] = true;
    }
  }
  return prob;
}

// Mean negative log likelihood and gradient; +inf (gradient unused) when an
// exponential response hits eta >= 0.
double smooth_eval(const NodeProblem& prob, const Eigen::VectorXd& theta,
                   Eigen::VectorXd* grad) {
  Eigen::VectorXd eta = prob.z * theta;
  const int n = prob.n();
  double inv_n = 1.0 / static_cast<double>(n);
  double value = 0.0;
  Eigen::VectorXd mean(n);
  switch (prob.family.tag) {
    case FamilyTag::Gaussian:
      value = 0.5 * eta.squaredNorm() * inv_n;
      mean = eta;
      break;
    case FamilyTag::BernoulliPM:
      for (int i = 0; i < n; ++i) {
        double a = std::fabs(eta(i));
        value += (a + std::log1p(std::exp(-2.0 * a))) * inv_n;
        mean(i) = std::tanh(eta(i));
      }
      break;
    case FamilyTag::Poisson:
      for (int i = 0; i < n; ++i) {
        double e = std::exp(std::clamp(eta(i), -kEtaClamp, kEtaClamp));
        value += e * inv_n;
        mean(i) = e;
      }
      break;
    case FamilyTag::Exponential:
      for (int i = 0; i < n; ++i) {
        if (eta(i) >= 0.0) return kInf;
        value += -std::log(-eta(i)) * inv_n;
        mean(i) = -1.0 / eta(i);
      }
      break;
    case FamilyTag::TruncatedPoisson:
      for (int i = 0; i < n; ++i) {
        value += log_partition(prob.family, eta(i)) * inv_n;
        mean(i) = mean_function(prob.family, eta(i));
      }
      break;
  }
  value -= eta.dot(prob.b) * inv_n + prob.mean_m;
  if (grad) *grad = prob.z.transpose() * (mean - prob.b) * inv_n;
  return value;
}

Eigen::VectorXd initial_theta(const NodeProblem& prob) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(prob.dim());
  if (prob.family.tag == FamilyTag::Exponential) {
    double mb = prob.b.mean();
    theta(0) = mb > 1e-12 ? -1.0 / mb : -1.0;
  }
  return theta;
}

struct PenaltyLayout {
  double lambda = 0.0, mu = 0.0;
  int intra_begin = 1, intra_end = 1, inter_end = 1;

  double level(int k) const {
    if (k < intra_begin) return 0.0;
    return k < intra_end ? lambda : mu;
  }
  double operator()(const Eigen::VectorXd& theta) const {
    double v = 0.0;
    for (int k = intra_begin; k < inter_end; ++k)
      v += level(k) * std::fabs(theta(k));
    return v;
  }
};

Eigen::VectorXd prox_step(const NodeProblem& prob, const PenaltyLayout& pen,
                          const Eigen::VectorXd& v, double step,
                          bool project_nonpositive) {
  Eigen::VectorXd out = v;
  for (int k = pen.intra_begin; k < pen.inter_end; ++k) {
    double t = step * pen.level(k);
    double x = v(k);
    out(k) = x > t ? x - t : (x < -t ? x + t : 0.0);
    if (project_nonpositive && prob.nonpos_mask[static_cast<std::size_t>(k)])
      out(k) = std::min(out(k), 0.0);
  }
  return out;
}

struct SolveResult {
  Eigen::VectorXd theta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Accelerated proximal gradient with backtracking line search and adaptive
// restart; the reported objective never increases across iterations.
SolveResult solve_fista(const NodeProblem& prob, const FitConfig& cfg,
                        const PenaltyLayout& pen, const Eigen::VectorXd& init) {
  SolveResult res;
  Eigen::VectorXd theta = init;
  double f_theta = smooth_eval(prob, theta, nullptr);
  if (!std::isfinite(f_theta)) {
    theta = initial_theta(prob);
    f_theta = smooth_eval(prob, theta, nullptr);
  }
  double obj = f_theta + pen(theta);

  Eigen::VectorXd y = theta;
  Eigen::VectorXd theta_prev = theta;
  double t_momentum = 1.0;
  bool at_restart = true;
  double step = cfg.init_step;
  Eigen::VectorXd grad(prob.dim());

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    double fy = smooth_eval(prob, y, &grad);
    if (!std::isfinite(fy)) {
      // momentum pushed y outside the feasible region
      y = theta;
      t_momentum = 1.0;
      at_restart = true;
      fy = smooth_eval(prob, y, &grad);
    }

    Eigen::VectorXd cand;
    double f_cand = kInf;
    for (int ls = 0; ls < 60; ++ls) {
      cand = prox_step(prob, pen, y - step * grad, step, cfg.project_nonpositive);
      f_cand = smooth_eval(prob, cand, nullptr);
      Eigen::VectorXd diff = cand - y;
      double quad = fy + grad.dot(diff) + diff.squaredNorm() / (2.0 * step);
      if (f_cand <= quad + 1e-12) break;
      step *= cfg.backtrack;
    }
    double obj_cand = f_cand + pen(cand);

    if (obj_cand > obj + 1e-15) {
      if (!at_restart) {
        // overshoot from momentum: retry as a plain proximal step
        y = theta;
        t_momentum = 1.0;
        at_restart = true;
        continue;
      }
      // a backtracked proximal step from theta cannot improve: done
      res.converged = true;
      break;
    }

    double rel_change = std::fabs(obj - obj_cand) / std::max(1.0, std::fabs(obj));
    theta_prev = theta;
    theta = cand;
    obj = obj_cand;
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    y = theta + ((t_momentum - 1.0) / t_next) * (theta - theta_prev);
    t_momentum = t_next;
    at_restart = false;
    if (rel_change < cfg.tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  res.theta = theta;
  res.objective = obj;
  res.iterations = it;
  return res;
}

double kkt_slack_of(const NodeProblem& prob, const PenaltyLayout& pen,
                    const Eigen::VectorXd& theta) {
  Eigen::VectorXd grad(prob.dim());
  double f = smooth_eval(prob, theta, &grad);
  if (!std::isfinite(f)) return kInf;
  double worst = std::fabs(grad(0));
  for (int k = pen.intra_begin; k < pen.inter_end; ++k) {
    double level = pen.level(k);
    double viol = theta(k) == 0.0
                      ? std::max(0.0, std::fabs(grad(k)) - level)
                      : std::fabs(grad(k) + level * (theta(k) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, viol);
  }
  return worst;
}

NodeFit finalize_fit(const NodeProblem& prob, const FitConfig& cfg,
                     const PenaltyLayout& pen, SolveResult solved) {
  for (int k = 1; k < prob.dim(); ++k)
    if (std::fabs(solved.theta(k)) < kZeroTruncation) solved.theta(k) = 0.0;

  NodeFit fit;
  fit.node = prob.node;
  fit.intercept = solved.theta(0);
  fit.intra_candidates = prob.intra;
  fit.inter_candidates = prob.inter;
  fit.theta_intra = solved.theta.segment(1, static_cast<Eigen::Index>(prob.intra.size()));
  fit.theta_inter = solved.theta.segment(
      1 + static_cast<Eigen::Index>(prob.intra.size()),
      static_cast<Eigen::Index>(prob.inter.size()));
  fit.objective = solved.objective;
  fit.iterations = solved.iterations;
  fit.converged = solved.converged;
  fit.kkt_slack = kkt_slack_of(prob, pen, solved.theta);
  (void)cfg;
  return fit;
}

// Standardization wrapper: fit on unit-variance predictor columns, then map
// coefficients back to the raw scale.
SolveResult solve_standardized(NodeProblem& prob, const FitConfig& cfg,
                               const PenaltyLayout& pen, Eigen::VectorXd init) {
  const int d = prob.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(d);
  for (int k = 1; k < d; ++k) {
    mean(k) = prob.z.col(k).mean();
    double sd = std::sqrt((prob.z.col(k).array() - mean(k)).square().mean());
    if (sd > 1e-12) scale(k) = sd;
    prob.z.col(k) = (prob.z.col(k).array() - mean(k)) / scale(k);
  }
  // map a raw-scale init into the standardized space
  for (int k = 1; k < d; ++k) {
    init(0) += init(k) * mean(k);
    init(k) *= scale(k);
  }
  SolveResult res = solve_fista(prob, cfg, pen, init);
  for (int k = 1; k < d; ++k) {
    res.theta(k) /= scale(k);
    res.theta(0) -= res.theta(k) * mean(k);
    prob.z.col(k) = prob.z.col(k).array() * scale(k) + mean(k);  // restore
  }
  return res;
}

PenaltyLayout layout_for(const NodeProblem& prob, double lambda, double mu) {
  PenaltyLayout pen;
  pen.lambda = lambda;
  pen.mu = mu;
  pen.intra_begin = 1;
  pen.intra_end = 1 + static_cast<int>(prob.intra.size());
  pen.inter_end = pen.intra_end + static_cast<int>(prob.inter.size());
  return pen;
}

NodeFit fit_problem(NodeProblem& prob, const FitConfig& cfg, double lambda,
                    double mu, const Eigen::VectorXd* warm) {
  if (lambda < 0 || mu < 0 || cfg.tol <= 0)
    throw SpecError("fit config: lambda, mu >= 0 and tol > 0 required");
  PenaltyLayout pen = layout_for(prob, lambda, mu);
  Eigen::VectorXd init =
      (warm && warm->size() == prob.dim()) ? *warm : initial_theta(prob);
  SolveResult solved = cfg.standardize
                           ? solve_standardized(prob, cfg, pen, std::move(init))
                           : solve_fista(prob, cfg, pen, init);
  // truncation happens on the raw scale either way
  return finalize_fit(prob, cfg, pen, std::move(solved));
}

GraphEstimate assemble(const SpecSkeleton& sk, std::vector<NodeFit> fits,
                       SymmetrizeRule rule) {
  GraphEstimate est;
  est.rule = rule;
  for (const auto& fit : fits) {
    if (!fit.converged)
      est.warnings.push_back("node '" + sk.nodes[static_cast<std::size_t>(fit.node)].id +
                             "' did not converge within max_iter");
  }
  for (std::size_t b = 0; b < sk.blocks.size(); ++b) {
    const auto& members = sk.blocks[b];
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        int s = std::min(members[i], members[j]);
        int s2 = std::max(members[i], members[j]);
        double a = fits[static_cast<std::size_t>(s)].coef_for(s2);
        double bb = fits[static_cast<std::size_t>(s2)].coef_for(s);
        bool keep = rule == SymmetrizeRule::And ? (a != 0.0 && bb != 0.0)
                                                : (a != 0.0 || bb != 0.0);
        if (!keep) continue;
        double w = (a != 0.0 && bb != 0.0) ? 0.5 * (a + bb) : (a != 0.0 ? a : bb);
        est.intra.push_back({s, s2, w});
      }
    }
  }
  for (int s = 0; s < sk.num_nodes(); ++s) {
    const auto& fit = fits[static_cast<std::size_t>(s)];
    for (std::size_t k = 0; k < fit.inter_candidates.size(); ++k) {
      double w = fit.theta_inter(static_cast<Eigen::Index>(k));
      if (w != 0.0) est.inter.push_back({fit.inter_candidates[k], s, w});
    }
  }
  est.node_fits = std::move(fits);
  return est;
}

}  // namespace

double NodeFit::coef_for(int other) const {
  for (std::size_t k = 0; k < intra_candidates.size(); ++k)
    if (intra_candidates[k] == other) return theta_intra(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < inter_candidates.size(); ++k)
    if (inter_candidates[k] == other) return theta_inter(static_cast<Eigen::Index>(k));
  return 0.0;
}

std::string rule_name(SymmetrizeRule r) {
  return r == SymmetrizeRule::And ? "and" : "or";
}

std::pair<double, Eigen::VectorXd> node_objective_grad(const Dataset& data,
                                                       const SpecSkeleton& skeleton,
                                                       int node,
                                                       const Eigen::VectorXd& theta) {
  NodeProblem prob = build_problem(data, skeleton, node);
  if (theta.size() != prob.dim())
    throw SpecError("theta has wrong dimension for node problem");
  Eigen::VectorXd grad(prob.dim());
  double value = smooth_eval(prob, theta, &grad);
  return {value, std::move(grad)};
}

NodeFit fit_node(const Dataset& data, const SpecSkeleton& skeleton, int node,
                 const FitConfig& cfg) {
  NodeProblem prob = build_problem(data, skeleton, node);
  return fit_problem(prob, cfg, cfg.lambda, cfg.mu, nullptr);
}

LambdaGrid lambda_grid(const Dataset& data, const SpecSkeleton& skeleton, int k,
                       double ratio) {
  if (k < 2 || !(ratio > 0.0 && ratio < 1.0))
    throw SpecError("lambda grid needs k >= 2 and 0 < ratio < 1");
  LambdaGrid grid;

  // flag constant predictor columns once
  std::vector<bool> degenerate(static_cast<std::size_t>(data.p()), false);
  for (int j = 0; j < data.p(); ++j) {
    double first = data.values(0, j);
    bool constant = true;
    for (int i = 1; i < data.n() && constant; ++i)
      constant = data.values(i, j) == first;
    if (constant) {
      degenerate[static_cast<std::size_t>(j)] = true;
      grid.warnings.push_back("column '" + data.schema[static_cast<std::size_t>(j)].name +
                              "' is constant; excluded from lambda_max");
    }
  }

  double lambda_max = 0.0;
  for (int s = 0; s < skeleton.num_nodes(); ++s) {
    NodeProblem prob = build_problem(data, skeleton, s);
    Eigen::VectorXd theta0 = initial_theta(prob);
    Eigen::VectorXd grad(prob.dim());
    double f = smooth_eval(prob, theta0, &grad);
    if (!std::isfinite(f)) continue;
    for (std::size_t c = 0; c < prob.intra.size(); ++c) {
      if (degenerate[static_cast<std::size_t>(prob.intra[c])]) continue;
      lambda_max = std::max(lambda_max, std::fabs(grad(1 + static_cast<Eigen::Index>(c))));
    }
  }
  if (lambda_max < 1e-12) throw DegenerateGrid("degenerate grid");

  grid.lambda_max = lambda_max;
  grid.lambdas.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    grid.lambdas[static_cast<std::size_t>(i)] =
        lambda_max * std::pow(ratio, static_cast<double>(i) / static_cast<double>(k - 1));
  grid.lambdas.front() = lambda_max;
  grid.lambdas.back() = ratio * lambda_max;

  grid.mu_scale.resize(skeleton.blocks.size(), 0.0);
  for (std::size_t b = 0; b < skeleton.blocks.size(); ++b) {
    double p_b = static_cast<double>(skeleton.blocks[b].size());
    double q_b = 0.0;
    for (int pb : skeleton.block_dag[b])
      q_b += static_cast<double>(skeleton.blocks[static_cast<std::size_t>(pb)].size());
    if (q_b == 0.0) {
      grid.mu_scale[b] = 0.0;
    } else if (p_b < 2.0) {
      grid.mu_scale[b] = 1.0;
      grid.warnings.push_back("block " + std::to_string(b + 1) +
                              " has a single node; mu coupled 1:1 to lambda");
    } else {
      grid.mu_scale[b] = std::sqrt(std::log(q_b) / std::log(p_b));
    }
  }
  return grid;
}

PathFitter::PathFitter(const Dataset& data, const SpecSkeleton& skeleton,
                       FitConfig base, SymmetrizeRule rule)
    : data_(data), skeleton_(skeleton), base_(base), rule_(rule) {
  warm_.resize(static_cast<std::size_t>(skeleton.num_nodes()));
}

GraphEstimate PathFitter::fit(double lambda, const std::vector<double>* mu_scale,
                              int threads) {
  const int p = skeleton_.num_nodes();
  std::vector<NodeFit> fits(static_cast<std::size_t>(p));
  parallel_for(p, threads, [&](int s) {
    NodeProblem prob = build_problem(data_, skeleton_, s);
    double mu = mu_scale
                    ? (*mu_scale)[static_cast<std::size_t>(
                          skeleton_.nodes[static_cast<std::size_t>(s)].block)] *
                          lambda
                    : base_.mu;
    auto& warm = warm_[static_cast<std::size_t>(s)];
    NodeFit fit = fit_problem(prob, base_, lambda, mu, warm.size() ? &warm : nullptr);
    warm.resize(prob.dim());
    warm(0) = fit.intercept;
    warm.segment(1, fit.theta_intra.size()) = fit.theta_intra;
    warm.segment(1 + fit.theta_intra.size(), fit.theta_inter.size()) = fit.theta_inter;
    fits[static_cast<std::size_t>(s)] = std::move(fit);
  });
  return assemble(skeleton_, std::move(fits), rule_);
}

std::vector<GraphEstimate> PathFitter::fit_path(const LambdaGrid& grid, int threads) {
  std::vector<GraphEstimate> path;
  path.reserve(grid.lambdas.size());
  for (double lambda : grid.lambdas)
    path.push_back(fit(lambda, &grid.mu_scale, threads));
  return path;
}

GraphEstimate fit_graph(const Dataset& data, const SpecSkeleton& skeleton,
                        const FitConfig& cfg, SymmetrizeRule rule, int threads) {
  PathFitter fitter(data, skeleton, cfg, rule);
  return fitter.fit(cfg.lambda, nullptr, threads);
}

StarsResult stars_select(const Dataset& data, const SpecSkeleton& skeleton,
                         const LambdaGrid& grid, double beta, int subsamples,
                         const FitConfig& cfg, SymmetrizeRule rule,
                         std::uint64_t seed, int threads) {
  if (subsamples < 2) throw SpecError("stability selection needs >= 2 subsamples");
  if (!(beta > 0.0 && beta < 0.5)) throw SpecError("beta must lie in (0, 0.5)");
  const int n = data.n();
  StarsResult result;

  int b_size = static_cast<int>(std::floor(10.0 * std::sqrt(static_cast<double>(n))));
  if (b_size >= n) {
    result.warnings.push_back("subsample size floor(10*sqrt(n)) >= n; clamped to n-1");
    b_size = n - 1;
  }
  b_size = std::max(b_size, 2);

  const int k = static_cast<int>(grid.lambdas.size());
  using EdgeKey = std::tuple<int, int, int>;  // (0 intra / 1 inter, u, v)
  std::vector<std::vector<std::vector<EdgeKey>>> selected(
      static_cast<std::size_t>(subsamples));

  parallel_for(subsamples, threads, [&](int bidx) {
    RandomStream rng = derive_stream(seed, "stars", static_cast<std::uint64_t>(bidx));
    // partial Fisher-Yates draw of b_size distinct rows
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < b_size; ++i) {
      int j = i + static_cast<int>(rng.uniform() * static_cast<double>(n - i));
      j = std::min(j, n - 1);
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    Dataset sub;
    sub.schema = data.schema;
    sub.values.resize(b_size, data.p());
    for (int i = 0; i < b_size; ++i)
      sub.values.row(i) = data.values.row(order[static_cast<std::size_t>(i)]);

    PathFitter fitter(sub, skeleton, cfg, rule);
    auto path = fitter.fit_path(grid, 1);
    auto& slots = selected[static_cast<std::size_t>(bidx)];
    slots.resize(static_cast<std::size_t>(k));
    for (int g = 0; g < k; ++g) {
      for (const auto& e : path[static_cast<std::size_t>(g)].intra)
        slots[static_cast<std::size_t>(g)].emplace_back(0, e.u, e.v);
      for (const auto& e : path[static_cast<std::size_t>(g)].inter)
        slots[static_cast<std::size_t>(g)].emplace_back(1, e.u, e.v);
    }
  });

  double universe = 0.0;
  for (std::size_t b = 0; b < skeleton.blocks.size(); ++b) {
    double p_b = static_cast<double>(skeleton.blocks[b].size());
    universe += p_b * (p_b - 1.0) / 2.0;
    for (int pb : skeleton.block_dag[b])
      universe += p_b * static_cast<double>(skeleton.blocks[static_cast<std::size_t>(pb)].size());
  }
  universe = std::max(universe, 1.0);

  result.instability.resize(static_cast<std::size_t>(k), 0.0);
  result.sup_instability.resize(static_cast<std::size_t>(k), 0.0);
  for (int g = 0; g < k; ++g) {
    std::map<EdgeKey, int> counts;
    for (int bidx = 0; bidx < subsamples; ++bidx)
      for (const auto& key : selected[static_cast<std::size_t>(bidx)][static_cast<std::size_t>(g)])
        ++counts[key];
    double total = 0.0;
    for (const auto& [key, c] : counts) {
      (void)key;
      double xi = static_cast<double>(c) / static_cast<double>(subsamples);
      total += 2.0 * xi * (1.0 - xi);
    }
    result.instability[static_cast<std::size_t>(g)] = total / universe;
    result.sup_instability[static_cast<std::size_t>(g)] =
        g == 0 ? result.instability[0]
               : std::max(result.sup_instability[static_cast<std::size_t>(g - 1)],
                          result.instability[static_cast<std::size_t>(g)]);
  }

  // walk from lambda_max down; keep the densest stable point
  int chosen = -1;
  for (int g = 0; g < k; ++g) {
    if (result.sup_instability[static_cast<std::size_t>(g)] <= beta)
      chosen = g;
    else
      break;
  }
  if (chosen == k - 1) {
    // never exceeded beta: nothing to distinguish, stay at the sparse end
    chosen = 0;
  } else if (chosen < 0) {
    result.exhausted = true;
    result.warnings.push_back("instability exceeds beta over the whole grid; "
                              "returning the most stable point");
    // most stable under the monotonized instability: the sparse end
    chosen = static_cast<int>(std::min_element(result.sup_instability.begin(),
                                               result.sup_instability.end()) -
                              result.sup_instability.begin());
  }
  result.index = chosen;
  result.lambda = grid.lambdas[static_cast<std::size_t>(chosen)];
  return result;
}

}  // namespace bdmrf
