#include "bdmrf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "bdmrf/errors.hpp"

namespace bdmrf {

namespace {

enum class EdgeClass { Intra, Inter, Both };

struct Universe {
  std::set<std::pair<int, int>> intra;  // canonical u < v
  std::set<std::pair<int, int>> inter;  // directed
  std::set<std::pair<int, int>> intra_true;
  std::set<std::pair<int, int>> inter_true;
};

Universe build_universe(const ModelSpec& truth) {
  Universe u;
  for (const auto& block : truth.blocks) {
    for (std::size_t i = 0; i < block.size(); ++i)
      for (std::size_t j = i + 1; j < block.size(); ++j)
        u.intra.insert(std::minmax(block[i], block[j]));
  }
  for (std::size_t b = 0; b < truth.blocks.size(); ++b)
    for (int pb : truth.block_dag[b])
      for (int t : truth.blocks[static_cast<std::size_t>(pb)])
        for (int s : truth.blocks[b]) u.inter.insert({t, s});
  for (const auto& e : truth.intra_edges)
    if (e.weight != 0.0) u.intra_true.insert(std::minmax(e.u, e.v));
  for (const auto& e : truth.inter_edges)
    if (e.weight != 0.0) u.inter_true.insert({e.from, e.to});
  return u;
}

ConfusionRow confusion(const Universe& u, const GraphEstimate& est) {
  ConfusionRow row;
  std::set<std::pair<int, int>> got_intra, got_inter;
  for (const auto& e : est.intra) {
    auto key = std::minmax(e.u, e.v);
    if (!u.intra.count(key)) throw SpecError("skeleton mismatch: estimated intra edge outside candidate set");
    got_intra.insert(key);
  }
  for (const auto& e : est.inter) {
    std::pair<int, int> key{e.u, e.v};
    if (!u.inter.count(key)) throw SpecError("skeleton mismatch: estimated inter edge outside candidate set");
    got_inter.insert(key);
  }
  for (const auto& e : got_intra)
    (u.intra_true.count(e) ? row.intra_tp : row.intra_fp)++;
  row.intra_fn = static_cast<long>(u.intra_true.size()) - row.intra_tp;
  for (const auto& e : got_inter)
    (u.inter_true.count(e) ? row.inter_tp : row.inter_fp)++;
  row.inter_fn = static_cast<long>(u.inter_true.size()) - row.inter_tp;

  row.tp = row.intra_tp + row.inter_tp;
  row.fp = row.intra_fp + row.inter_fp;
  row.fn = row.intra_fn + row.inter_fn;
  long positives = static_cast<long>(u.intra_true.size() + u.inter_true.size());
  long negatives = static_cast<long>(u.intra.size() + u.inter.size()) - positives;
  row.tpr = positives == 0 ? 1.0 : static_cast<double>(row.tp) / static_cast<double>(positives);
  row.fpr = negatives == 0 ? 0.0 : static_cast<double>(row.fp) / static_cast<double>(negatives);
  row.precision = (row.tp + row.fp) == 0
                      ? 1.0
                      : static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fp);
  row.recall = positives == 0 ? 1.0
                              : static_cast<double>(row.tp) / static_cast<double>(positives);
  row.f1 = (row.precision + row.recall) == 0.0
               ? 0.0
               : 2.0 * row.precision * row.recall / (row.precision + row.recall);
  row.exact = row.intra_fp == 0 && row.intra_fn == 0 && row.inter_fp == 0 &&
              row.inter_fn == 0;
  return row;
}

RocCurve roc_class(const ModelSpec& truth, const std::vector<GraphEstimate>& path,
                   EdgeClass cls) {
  Universe u = build_universe(truth);
  RocCurve curve;
  curve.intra_positives = static_cast<long>(u.intra_true.size());
  curve.intra_negatives = static_cast<long>(u.intra.size() - u.intra_true.size());
  curve.inter_positives = static_cast<long>(u.inter_true.size());
  curve.inter_negatives = static_cast<long>(u.inter.size() - u.inter_true.size());

  std::vector<std::pair<double, double>> pts;
  for (const auto& est : path) {
    ConfusionRow row = confusion(u, est);
    long tp = 0, fp = 0, pos = 0, neg = 0;
    switch (cls) {
      case EdgeClass::Intra:
        tp = row.intra_tp; fp = row.intra_fp;
        pos = curve.intra_positives; neg = curve.intra_negatives;
        break;
      case EdgeClass::Inter:
        tp = row.inter_tp; fp = row.inter_fp;
        pos = curve.inter_positives; neg = curve.inter_negatives;
        break;
      case EdgeClass::Both:
        tp = row.tp; fp = row.fp;
        pos = curve.intra_positives + curve.inter_positives;
        neg = curve.intra_negatives + curve.inter_negatives;
        break;
    }
    RocPoint pt;
    pt.tpr = pos == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pos);
    pt.fpr = neg == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(neg);
    pts.emplace_back(pt.fpr, pt.tpr);
    curve.points.push_back(pt);
  }
  curve.auc = auc_of(std::move(pts));
  return curve;
}

}  // namespace

double auc_of(std::vector<std::pair<double, double>> points) {
  points.emplace_back(0.0, 0.0);
  points.emplace_back(1.0, 1.0);
  std::sort(points.begin(), points.end());
  // step completion: monotone upper staircase in tpr
  double run = 0.0;
  std::map<double, double> by_fpr;
  for (auto& [x, y] : points) {
    run = std::max(run, y);
    auto it = by_fpr.find(x);
    if (it == by_fpr.end())
      by_fpr.emplace(x, run);
    else
      it->second = std::max(it->second, run);
  }
  double auc = 0.0;
  auto prev = by_fpr.begin();
  for (auto it = std::next(by_fpr.begin()); it != by_fpr.end(); ++it) {
    auc += (it->first - prev->first) * 0.5 * (it->second + prev->second);
    prev = it;
  }
  return auc;
}

RocCurve roc(const ModelSpec& truth, const std::vector<GraphEstimate>& path) {
  RocCurve curve = roc_class(truth, path, EdgeClass::Both);
  return curve;
}

RocCurve roc_intra(const ModelSpec& truth, const std::vector<GraphEstimate>& path) {
  return roc_class(truth, path, EdgeClass::Intra);
}

RocCurve roc_inter(const ModelSpec& truth, const std::vector<GraphEstimate>& path) {
  return roc_class(truth, path, EdgeClass::Inter);
}

std::vector<ConfusionRow> recovery_summary(const ModelSpec& truth,
                                           const std::vector<GraphEstimate>& path) {
  Universe u = build_universe(truth);
  std::vector<ConfusionRow> rows;
  rows.reserve(path.size());
  for (const auto& est : path) rows.push_back(confusion(u, est));
  return rows;
}

ParamError param_error(const ModelSpec& truth, const std::vector<NodeFit>& fits) {
  std::map<std::pair<int, int>, double> true_intra;
  std::map<std::pair<int, int>, double> true_inter;
  for (const auto& e : truth.intra_edges) true_intra[std::minmax(e.u, e.v)] = e.weight;
  for (const auto& e : truth.inter_edges) true_inter[{e.from, e.to}] = e.weight;

  ParamError err;
  for (const auto& fit : fits) {
    NodeError ne;
    ne.node = fit.node;
    double intra_sq = 0.0, inter_sq = 0.0;
    for (std::size_t k = 0; k < fit.intra_candidates.size(); ++k) {
      auto key = std::minmax(fit.node, fit.intra_candidates[k]);
      auto it = true_intra.find(key);
      double tw = it == true_intra.end() ? 0.0 : it->second;
      double d = fit.theta_intra(static_cast<Eigen::Index>(k)) - tw;
      intra_sq += d * d;
    }
    for (std::size_t k = 0; k < fit.inter_candidates.size(); ++k) {
      std::pair<int, int> key{fit.inter_candidates[k], fit.node};
      auto it = true_inter.find(key);
      double tw = it == true_inter.end() ? 0.0 : it->second;
      double d = fit.theta_inter(static_cast<Eigen::Index>(k)) - tw;
      inter_sq += d * d;
    }
    ne.intra_l2 = std::sqrt(intra_sq);
    ne.inter_l2 = std::sqrt(inter_sq);
    err.intra_max = std::max(err.intra_max, ne.intra_l2);
    err.inter_max = std::max(err.inter_max, ne.inter_l2);
    err.per_node.push_back(ne);
  }
  return err;
}

std::string recovery_csv(const std::vector<ConfusionRow>& rows, double auc) {
  std::ostringstream os;
  os << "lambda,mu,fpr,tpr,precision,recall,f1,exact\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  r.lambda, r.mu, r.fpr, r.tpr, r.precision, r.recall, r.f1,
                  r.exact ? 1 : 0);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "auc,%.17g\n", auc);
  os << buf;
  return os.str();
}

std::string roc_svg(const std::vector<SvgSeries>& series) {
  const double w = 480, h = 480, pad = 48;
  auto sx = [&](double x) { return pad + x * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - y * (h - 2 * pad); };
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                           "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
     << h << "' viewBox='0 0 " << w << " " << h << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<line x1='" << sx(0) << "' y1='" << sy(0) << "' x2='" << sx(1)
     << "' y2='" << sy(0) << "' stroke='black'/>\n";
  os << "<line x1='" << sx(0) << "' y1='" << sy(0) << "' x2='" << sx(0)
     << "' y2='" << sy(1) << "' stroke='black'/>\n";
  os << "<line x1='" << sx(0) << "' y1='" << sy(0) << "' x2='" << sx(1)
     << "' y2='" << sy(1) << "' stroke='#bbbbbb' stroke-dasharray='4,4'/>\n";
  os << "<text x='" << w / 2 << "' y='" << h - 10
     << "' text-anchor='middle' font-size='14'>FPR</text>\n";
  os << "<text x='14' y='" << h / 2
     << "' text-anchor='middle' font-size='14' transform='rotate(-90 14 "
     << h / 2 << ")'>TPR</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    auto pts = series[s].points;
    pts.emplace_back(0.0, 0.0);
    pts.emplace_back(1.0, 1.0);
    std::sort(pts.begin(), pts.end());
    os << "<polyline fill='none' stroke='" << palette[s % 6]
       << "' stroke-width='1.5' points='";
    for (const auto& [x, y] : pts) os << sx(x) << "," << sy(y) << " ";
    os << "'/>\n";
    os << "<text x='" << w - pad - 4 << "' y='" << pad + 16 * (s + 1)
       << "' text-anchor='end' font-size='12' fill='" << palette[s % 6] << "'>"
       << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace bdmrf
