#include "bdmrf/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "bdmrf/errors.hpp"
#include "bdmrf/evaluation.hpp"
#include "bdmrf/io.hpp"
#include "bdmrf/threading.hpp"
#include "bdmrf/version.hpp"

namespace bdmrf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Global {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: resolve from BDMRF_THREADS or hardware
  bool quiet = false;
  std::string config_hash;

  int resolved_threads() const { return threads >= 1 ? threads : default_thread_count(); }

  void banner(const std::string& command) const {
    if (quiet) return;
    std::cout << "bdmrf " << kVersion << " | " << command << " | seed " << seed
              << " | config " << config_hash << "\n";
  }
};

json base_summary(const Global& g, const std::string& command) {
  json j;
  j["format_version"] = kFormatVersion;
  j["version"] = kVersion;
  j["command"] = command;
  j["seed"] = g.seed;
  j["config_hash"] = g.config_hash;
  j["ok"] = true;
  return j;
}

void emit_summary(const std::string& path, const json& j) {
  if (!path.empty()) write_file(path, j.dump(2) + "\n");
}

std::string default_summary_path(const std::string& out) {
  if (out.empty()) return {};
  return out + ".summary.json";
}

json verdict_json(const NormalizabilityReport& report) {
  json j;
  j["verdict"] = verdict_name(report.verdict);
  j["reasons"] = json::array();
  for (const auto& r : report.reasons)
    j["reasons"].push_back({{"rule", r.rule}, {"message", r.message}, {"items", r.items}});
  return j;
}

json path_point_json(const ModelSpec& skeleton_spec, const GraphEstimate& est,
                     double lambda) {
  json pt;
  pt["lambda"] = lambda;
  pt["intra"] = json::array();
  for (const auto& e : est.intra)
    pt["intra"].push_back({skeleton_spec.nodes[static_cast<std::size_t>(e.u)].id,
                           skeleton_spec.nodes[static_cast<std::size_t>(e.v)].id,
                           e.weight});
  pt["inter"] = json::array();
  for (const auto& e : est.inter)
    pt["inter"].push_back({skeleton_spec.nodes[static_cast<std::size_t>(e.u)].id,
                           skeleton_spec.nodes[static_cast<std::size_t>(e.v)].id,
                           e.weight});
  return pt;
}

std::vector<GraphEstimate> path_from_json(const json& j, const ModelSpec& truth) {
  std::vector<GraphEstimate> path;
  for (const auto& pt : j.at("points")) {
    GraphEstimate est;
    for (const auto& e : pt.at("intra")) {
      int u = truth.node_index(e.at(0).get<std::string>());
      int v = truth.node_index(e.at(1).get<std::string>());
      if (u < 0 || v < 0) throw SpecError("skeleton mismatch: unknown node id in path file");
      est.intra.push_back({std::min(u, v), std::max(u, v), e.at(2).get<double>()});
    }
    for (const auto& e : pt.at("inter")) {
      int u = truth.node_index(e.at(0).get<std::string>());
      int v = truth.node_index(e.at(1).get<std::string>());
      if (u < 0 || v < 0) throw SpecError("skeleton mismatch: unknown node id in path file");
      est.inter.push_back({u, v, e.at(2).get<double>()});
    }
    path.push_back(std::move(est));
  }
  return path;
}

// ---- subcommand runners ----

int cmd_check(const Global& g, const std::string& spec_path, const std::string& out) {
  Model model = Model::build(load_spec(spec_path));
  auto report = check_normalizability(model);
  std::cout << verdict_name(report.verdict) << "\n";
  for (const auto& r : report.reasons)
    std::cout << "  [" << r.rule << "] " << r.message << "\n";
  json summary = base_summary(g, "check");
  summary["spec"] = spec_path;
  summary["report"] = verdict_json(report);
  summary["ok"] = report.ok();
  emit_summary(out, summary);
  return report.ok() ? 0 : 2;
}

int cmd_simulate(const Global& g, const std::string& spec_path, int n, int burn_in,
                 int thin, const std::string& init, bool force,
                 const std::string& out) {
  if (n < 1) throw CLI::ValidationError("--n must be >= 1");
  Model model = Model::build(load_spec(spec_path));
  auto report = check_normalizability(model);
  if (!report.ok() && !force) {
    std::cerr << "spec verdict '" << verdict_name(report.verdict)
              << "'; pass --force to sample anyway\n";
    for (const auto& r : report.reasons)
      std::cerr << "  [" << r.rule << "] " << r.message << "\n";
    return 2;
  }
  SamplerConfig cfg;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = g.seed;
  cfg.init = init == "random" ? ChainInit::Random : ChainInit::Zero;
  cfg.force = true;  // verdict already handled above
  reset_clamp_events();
  Dataset data = sample_bdmrf(model, n, cfg, g.resolved_threads());
  save_dataset(data, out);

  json summary = base_summary(g, "simulate");
  summary["spec"] = spec_path;
  summary["n"] = n;
  summary["out"] = out;
  summary["sampler"] = {{"burn_in", burn_in},
                        {"thin", thin},
                        {"init", init},
                        {"seed", g.seed},
                        {"force", force}};
  summary["report"] = verdict_json(report);
  summary["clamp_events"] = clamp_events();
  emit_summary(default_summary_path(out), summary);
  return 0;
}

int cmd_fit(const Global& g, const std::string& data_path, const std::string& spec_path,
            const FitConfig& cfg, const std::string& rule_str, bool recode01,
            const std::string& out) {
  Dataset data = load_dataset(data_path, recode01);
  ModelSpec spec = load_spec(spec_path);
  SpecSkeleton sk = skeleton_of(spec);
  if (!schema_matches(data, sk))
    throw SpecError("dataset schema does not match the spec skeleton");
  SymmetrizeRule rule = rule_str == "or" ? SymmetrizeRule::Or : SymmetrizeRule::And;
  GraphEstimate est = fit_graph(data, sk, cfg, rule, g.resolved_threads());
  save_fit(est, sk, out, out + ".diagnostics.json");

  json summary = base_summary(g, "fit");
  summary["data"] = data_path;
  summary["spec"] = spec_path;
  summary["lambda"] = cfg.lambda;
  summary["mu"] = cfg.mu;
  summary["rule"] = rule_name(rule);
  summary["intra_edges"] = est.intra.size();
  summary["inter_edges"] = est.inter.size();
  summary["warnings"] = est.warnings;
  emit_summary(default_summary_path(out), summary);
  return 0;
}

json fit_path_json(const Dataset& data, const ModelSpec& spec, const FitConfig& cfg,
                   SymmetrizeRule rule, int k, double ratio, int threads) {
  SpecSkeleton sk = skeleton_of(spec);
  if (!schema_matches(data, sk))
    throw SpecError("dataset schema does not match the spec skeleton");
  LambdaGrid grid = lambda_grid(data, sk, k, ratio);
  PathFitter fitter(data, sk, cfg, rule);
  auto path = fitter.fit_path(grid, threads);

  json out;
  out["format_version"] = kFormatVersion;
  out["lambda_max"] = grid.lambda_max;
  out["lambdas"] = grid.lambdas;
  out["mu_scale"] = grid.mu_scale;
  out["warnings"] = grid.warnings;
  out["points"] = json::array();
  for (std::size_t i = 0; i < path.size(); ++i)
    out["points"].push_back(path_point_json(spec, path[i], grid.lambdas[i]));
  return out;
}

int cmd_path(const Global& g, const std::string& data_path, const std::string& spec_path,
             const FitConfig& cfg, const std::string& rule_str, int k, double ratio,
             bool recode01, const std::string& out) {
  Dataset data = load_dataset(data_path, recode01);
  ModelSpec spec = load_spec(spec_path);
  SymmetrizeRule rule = rule_str == "or" ? SymmetrizeRule::Or : SymmetrizeRule::And;
  json path_json = fit_path_json(data, spec, cfg, rule, k, ratio, g.resolved_threads());
  write_file(out, path_json.dump(2) + "\n");
  json summary = base_summary(g, "path");
  summary["data"] = data_path;
  summary["spec"] = spec_path;
  summary["k"] = k;
  summary["ratio"] = ratio;
  summary["lambda_max"] = path_json["lambda_max"];
  summary["out"] = out;
  emit_summary(default_summary_path(out), summary);
  return 0;
}

int cmd_roc(const Global& g, const std::string& truth_path, const std::string& path_file,
            bool per_class, const std::string& out, const std::string& svg_out) {
  ModelSpec truth = load_spec(truth_path);
  json pj = json::parse(read_file(path_file));
  auto path = path_from_json(pj, truth);
  std::vector<double> lambdas = pj.at("lambdas").get<std::vector<double>>();

  RocCurve curve = roc(truth, path);
  auto rows = recovery_summary(truth, path);
  for (std::size_t i = 0; i < rows.size() && i < lambdas.size(); ++i) {
    rows[i].lambda = lambdas[i];
    curve.points[i].lambda = lambdas[i];
  }
  write_file(out, recovery_csv(rows, curve.auc));

  json summary = base_summary(g, "roc");
  summary["truth"] = truth_path;
  summary["path"] = path_file;
  summary["auc"] = curve.auc;
  if (per_class) {
    summary["auc_intra"] = roc_intra(truth, path).auc;
    summary["auc_inter"] = roc_inter(truth, path).auc;
  }
  if (!svg_out.empty()) {
    SvgSeries series;
    series.label = "auc=" + format_double(curve.auc);
    for (const auto& p : curve.points) series.points.emplace_back(p.fpr, p.tpr);
    write_file(svg_out, roc_svg({series}));
  }
  emit_summary(default_summary_path(out), summary);
  return 0;
}

int cmd_stars(const Global& g, const std::string& data_path, const std::string& spec_path,
              const FitConfig& cfg, const std::string& rule_str, int k, double ratio,
              double beta, int subsamples, bool recode01, const std::string& out_dir) {
  Dataset data = load_dataset(data_path, recode01);
  ModelSpec spec = load_spec(spec_path);
  SpecSkeleton sk = skeleton_of(spec);
  SymmetrizeRule rule = rule_str == "or" ? SymmetrizeRule::Or : SymmetrizeRule::And;
  LambdaGrid grid = lambda_grid(data, sk, k, ratio);
  StarsResult sel = stars_select(data, sk, grid, beta, subsamples, cfg, rule, g.seed,
                                 g.resolved_threads());

  // refit on the full data at the chosen point
  PathFitter fitter(data, sk, cfg, rule);
  GraphEstimate est = fitter.fit(sel.lambda, &grid.mu_scale, g.resolved_threads());
  save_fit(est, sk, (fs::path(out_dir) / "selected_fit.json").string(),
           (fs::path(out_dir) / "selected_fit.json.diagnostics.json").string());

  std::string csv = "lambda,instability,sup_instability\n";
  for (std::size_t i = 0; i < grid.lambdas.size(); ++i)
    csv += format_double(grid.lambdas[i]) + "," + format_double(sel.instability[i]) +
           "," + format_double(sel.sup_instability[i]) + "\n";
  write_file((fs::path(out_dir) / "instability.csv").string(), csv);

  if (!g.quiet)
    std::cout << "selected lambda " << sel.lambda << " (grid index " << sel.index
              << (sel.exhausted ? ", grid exhausted" : "") << ")\n";

  json summary = base_summary(g, "stars");
  summary["data"] = data_path;
  summary["spec"] = spec_path;
  summary["beta"] = beta;
  summary["subsamples"] = subsamples;
  summary["lambda"] = sel.lambda;
  summary["index"] = sel.index;
  summary["exhausted"] = sel.exhausted;
  summary["warnings"] = sel.warnings;
  emit_summary((fs::path(out_dir) / "stars.summary.json").string(), summary);
  return 0;
}

int cmd_oracle(const Global& g, const std::string& spec_path, const std::string& against,
               int samples, const std::string& out) {
  Model model = Model::build(load_spec(spec_path));
  ExactDistribution exact = enumerate_exact(model);

  json summary = base_summary(g, "oracle");
  summary["spec"] = spec_path;
  summary["against"] = against;
  summary["states"] = exact.states.size();
  bool pass = false;
  if (against == "formula") {
    double dev = max_conditional_deviation(model, exact);
    pass = dev < 1e-10;
    std::cout << "max conditional deviation " << dev << " -> "
              << (pass ? "pass" : "fail") << " (tolerance 1e-10)\n";
    summary["max_deviation"] = dev;
    summary["tolerance"] = 1e-10;
  } else if (against == "gibbs") {
    SamplerConfig cfg;
    cfg.seed = g.seed;
    Dataset data = sample_bdmrf(model, samples, cfg, g.resolved_threads());
    double tv = tv_distance(exact, data);
    pass = tv < 0.02;
    std::cout << "total variation " << tv << " over " << samples << " samples -> "
              << (pass ? "pass" : "fail") << " (tolerance 0.02)\n";
    summary["tv"] = tv;
    summary["samples"] = samples;
    summary["tolerance"] = 0.02;
  } else {
    throw CLI::ValidationError("--against must be 'formula' or 'gibbs'");
  }
  summary["ok"] = pass;
  emit_summary(out, summary);
  return pass ? 0 : 1;
}

int cmd_prepare(const Global& g, const std::string& binary_path,
                const std::string& counts_path, double min_prevalence,
                double top_variance, const std::string& out) {
  PrepareOptions opt;
  opt.min_prevalence = min_prevalence;
  opt.top_variance = top_variance;
  std::vector<std::string> log;
  Dataset data = prepare_mixed(binary_path, counts_path, opt, &log);
  save_dataset(data, out);
  if (!g.quiet)
    for (const auto& line : log) std::cout << line << "\n";
  json summary = base_summary(g, "prepare");
  summary["binary"] = binary_path;
  summary["counts"] = counts_path;
  summary["out"] = out;
  summary["n"] = data.n();
  summary["p"] = data.p();
  summary["log"] = log;
  emit_summary(default_summary_path(out), summary);
  return 0;
}

int cmd_experiment(const Global& g, const std::string& manifest_path) {
  ExperimentManifest m = load_manifest(manifest_path);
  ModelSpec spec = load_spec(m.spec_path);
  Model model = Model::build(spec);
  SpecSkeleton sk = skeleton_of(spec);
  auto report = check_normalizability(model);
  if (!report.ok() && !m.force) {
    std::cerr << "manifest spec verdict '" << verdict_name(report.verdict)
              << "'; set \"force\": true to run anyway\n";
    for (const auto& r : report.reasons)
      std::cerr << "  [" << r.rule << "] " << r.message << "\n";
    return 2;
  }

  json summary = base_summary(g, "experiment");
  summary["manifest"] = manifest_path;
  summary["report"] = verdict_json(report);
  summary["runs"] = json::array();
  summary["mean_auc"] = json::object();
  bool any_failed = false;

  std::vector<SvgSeries> svg_series;
  int threads = g.resolved_threads();
  for (std::size_t ni = 0; ni < m.n_values.size(); ++ni) {
    int n = m.n_values[static_cast<std::size_t>(ni)];
    double auc_sum = 0.0;
    int auc_count = 0;
    // per grid index, accumulated across replicates
    std::vector<double> fpr_sum, tpr_sum, lambda_sum;
    for (int rep = 0; rep < m.replicates; ++rep) {
      std::string run_name = "n" + std::to_string(n) + "_rep" + std::to_string(rep);
      fs::path run_dir = fs::path(m.out_dir) / run_name;
      json run_info;
      run_info["n"] = n;
      run_info["replicate"] = rep;
      try {
        SamplerConfig cfg = m.sampler;
        cfg.force = true;
        cfg.seed = derive_seed(m.seed_base, "run",
                               ni * static_cast<std::size_t>(m.replicates) +
                                   static_cast<std::size_t>(rep));
        Dataset data = sample_bdmrf(model, n, cfg, threads);
        save_dataset(data, (run_dir / "dataset.csv").string());

        LambdaGrid grid = lambda_grid(data, sk, m.grid_k, m.grid_ratio);
        PathFitter fitter(data, sk, m.fit, m.rule);
        auto path = fitter.fit_path(grid, threads);
        RocCurve curve = roc(spec, path);
        auto rows = recovery_summary(spec, path);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          rows[i].lambda = grid.lambdas[i];
          curve.points[i].lambda = grid.lambdas[i];
        }
        write_file((run_dir / "roc.csv").string(), recovery_csv(rows, curve.auc));

        if (fpr_sum.empty()) {
          fpr_sum.assign(curve.points.size(), 0.0);
          tpr_sum.assign(curve.points.size(), 0.0);
          lambda_sum.assign(curve.points.size(), 0.0);
        }
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
          fpr_sum[i] += curve.points[i].fpr;
          tpr_sum[i] += curve.points[i].tpr;
          lambda_sum[i] += curve.points[i].lambda;
        }
        auc_sum += curve.auc;
        ++auc_count;
        run_info["auc"] = curve.auc;
        run_info["ok"] = true;
      } catch (const std::exception& e) {
        run_info["ok"] = false;
        run_info["error"] = e.what();
        any_failed = true;
      }
      summary["runs"].push_back(std::move(run_info));
    }
    if (auc_count > 0) {
      double denom = static_cast<double>(auc_count);
      summary["mean_auc"][std::to_string(n)] = auc_sum / denom;
      std::string csv = "n,index,lambda_mean,fpr_mean,tpr_mean\n";
      SvgSeries series;
      series.label = "n=" + std::to_string(n);
      for (std::size_t i = 0; i < fpr_sum.size(); ++i) {
        csv += std::to_string(n) + "," + std::to_string(i) + "," +
               format_double(lambda_sum[i] / denom) + "," +
               format_double(fpr_sum[i] / denom) + "," +
               format_double(tpr_sum[i] / denom) + "\n";
        series.points.emplace_back(fpr_sum[i] / denom, tpr_sum[i] / denom);
      }
      write_file((fs::path(m.out_dir) / ("mean_roc_n" + std::to_string(n) + ".csv")).string(), csv);
      svg_series.push_back(std::move(series));
    }
  }
  if (m.svg && !svg_series.empty())
    write_file((fs::path(m.out_dir) / "roc.svg").string(), roc_svg(svg_series));
  summary["ok"] = !any_failed;
  emit_summary((fs::path(m.out_dir) / "experiment.summary.json").string(), summary);
  return any_failed ? 1 : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"block-directed mixed graphical models: simulation, estimation, evaluation"};
  app.fallthrough();

  Global g;
  {
    std::uint64_t h = fnv1a64("bdmrf-cli");
    for (const auto& a : args) h = (h ^ fnv1a64(a)) * 0x100000001b3ULL;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    g.config_hash = buf;
  }
  app.add_option("--seed", g.seed, "base seed for all randomness");
  app.add_option("--threads", g.threads, "worker threads (default: BDMRF_THREADS or hardware)");
  app.add_flag("--quiet", g.quiet, "suppress the reproducibility header");

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a dataset from a model spec");
  std::string sim_spec, sim_out, sim_init = "zero";
  int sim_n = 0, sim_burn = 500, sim_thin = 10;
  bool sim_force = false;
  sim->add_option("--spec", sim_spec)->required();
  sim->add_option("--n", sim_n)->required();
  sim->add_option("--burn-in", sim_burn);
  sim->add_option("--thin", sim_thin);
  sim->add_option("--init", sim_init)->check(CLI::IsMember({"zero", "random"}));
  sim->add_flag("--force", sim_force, "sample even when not normalizable");
  sim->add_option("--out", sim_out)->required();

  // check
  auto* chk = app.add_subcommand("check", "normalizability report for a spec");
  std::string chk_spec, chk_out;
  chk->add_option("--spec", chk_spec)->required();
  chk->add_option("--out", chk_out, "write the report as JSON");

  // fit
  auto* fit = app.add_subcommand("fit", "one l1-regularized graph fit");
  std::string fit_data, fit_spec, fit_rule = "and", fit_out;
  FitConfig fit_cfg;
  fit->add_option("--data", fit_data)->required();
  fit->add_option("--spec", fit_spec)->required();
  fit->add_option("--lambda", fit_cfg.lambda)->required();
  fit->add_option("--mu", fit_cfg.mu);
  fit->add_option("--rule", fit_rule)->check(CLI::IsMember({"and", "or"}));
  fit->add_option("--max-iter", fit_cfg.max_iter);
  fit->add_option("--tol", fit_cfg.tol);
  fit->add_flag("--standardize", fit_cfg.standardize);
  fit->add_flag("--project-nonpositive", fit_cfg.project_nonpositive);
  bool fit_recode01 = false;
  fit->add_flag("--recode01", fit_recode01, "map 0/1 entries of signed binary columns to -1/+1");
  fit->add_option("--out", fit_out)->required();

  // path
  auto* pth = app.add_subcommand("path", "fit a regularization path");
  std::string pth_data, pth_spec, pth_rule = "and", pth_out;
  FitConfig pth_cfg;
  int pth_k = 30;
  double pth_ratio = 0.01;
  pth->add_option("--data", pth_data)->required();
  pth->add_option("--spec", pth_spec)->required();
  pth->add_option("--k", pth_k);
  pth->add_option("--ratio", pth_ratio);
  pth->add_option("--rule", pth_rule)->check(CLI::IsMember({"and", "or"}));
  pth->add_option("--max-iter", pth_cfg.max_iter);
  pth->add_option("--tol", pth_cfg.tol);
  pth->add_flag("--standardize", pth_cfg.standardize);
  pth->add_flag("--project-nonpositive", pth_cfg.project_nonpositive);
  bool pth_recode01 = false;
  pth->add_flag("--recode01", pth_recode01, "map 0/1 entries of signed binary columns to -1/+1");
  pth->add_option("--out", pth_out)->required();

  // roc
  auto* rc = app.add_subcommand("roc", "structure-recovery metrics for a path");
  std::string roc_truth, roc_path, roc_out, roc_svg_out;
  bool roc_per_class = false;
  rc->add_option("--truth", roc_truth)->required();
  rc->add_option("--path", roc_path)->required();
  rc->add_flag("--per-class", roc_per_class);
  rc->add_option("--out", roc_out)->required();
  rc->add_option("--svg", roc_svg_out);

  // stars
  auto* st = app.add_subcommand("stars", "stability selection over a grid");
  std::string st_data, st_spec, st_rule = "and", st_out;
  FitConfig st_cfg;
  int st_k = 30, st_subsamples = 20;
  double st_ratio = 0.01, st_beta = 0.01;
  st->add_option("--data", st_data)->required();
  st->add_option("--spec", st_spec)->required();
  st->add_option("--k", st_k);
  st->add_option("--ratio", st_ratio);
  st->add_option("--beta", st_beta);
  st->add_option("--subsamples", st_subsamples);
  st->add_option("--rule", st_rule)->check(CLI::IsMember({"and", "or"}));
  bool st_recode01 = false;
  st->add_flag("--recode01", st_recode01, "map 0/1 entries of signed binary columns to -1/+1");
  st->add_option("--out-dir", st_out)->required();

  // oracle
  auto* orc = app.add_subcommand("oracle", "exact-enumeration verification");
  std::string orc_spec, orc_against = "formula", orc_out;
  int orc_samples = 50000;
  orc->add_option("--spec", orc_spec)->required();
  orc->add_option("--against", orc_against)->check(CLI::IsMember({"formula", "gibbs"}));
  orc->add_option("--samples", orc_samples);
  orc->add_option("--out", orc_out, "write the report as JSON");

  // prepare
  auto* prep = app.add_subcommand("prepare", "merge binary + count tables into a dataset");
  std::string prep_binary, prep_counts, prep_out;
  double prep_prev = 0.1, prep_var = 0.02;
  prep->add_option("--binary", prep_binary)->required();
  prep->add_option("--counts", prep_counts)->required();
  prep->add_option("--min-prevalence", prep_prev);
  prep->add_option("--top-variance", prep_var);
  prep->add_option("--out", prep_out)->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "simulate/fit/evaluate from a manifest");
  std::string exp_manifest;
  exp->add_option("--manifest", exp_manifest)->required();

  app.require_subcommand(1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*sim) {
      g.banner("simulate");
      return cmd_simulate(g, sim_spec, sim_n, sim_burn, sim_thin, sim_init, sim_force, sim_out);
    }
    if (*chk) {
      g.banner("check");
      return cmd_check(g, chk_spec, chk_out);
    }
    if (*fit) {
      g.banner("fit");
      return cmd_fit(g, fit_data, fit_spec, fit_cfg, fit_rule, fit_recode01, fit_out);
    }
    if (*pth) {
      g.banner("path");
      return cmd_path(g, pth_data, pth_spec, pth_cfg, pth_rule, pth_k, pth_ratio,
                      pth_recode01, pth_out);
    }
    if (*rc) {
      g.banner("roc");
      return cmd_roc(g, roc_truth, roc_path, roc_per_class, roc_out, roc_svg_out);
    }
    if (*st) {
      g.banner("stars");
      return cmd_stars(g, st_data, st_spec, st_cfg, st_rule, st_k, st_ratio, st_beta,
                       st_subsamples, st_recode01, st_out);
    }
    if (*orc) {
      g.banner("oracle");
      return cmd_oracle(g, orc_spec, orc_against, orc_samples, orc_out);
    }
    if (*prep) {
      g.banner("prepare");
      return cmd_prepare(g, prep_binary, prep_counts, prep_prev, prep_var, prep_out);
    }
    if (*exp) {
      g.banner("experiment");
      return cmd_experiment(g, exp_manifest);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace bdmrf
