#pragma once

#include <string>
#include <vector>

#include "bdmrf/estimator.hpp"
#include "bdmrf/model.hpp"

namespace bdmrf {

struct RocPoint {
  double lambda = 0.0;
  double mu = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // in path order (lambda descending)
  double auc = 0.0;
  long intra_positives = 0, intra_negatives = 0;
  long inter_positives = 0, inter_negatives = 0;
};

struct ConfusionRow {
  double lambda = 0.0, mu = 0.0;
  long tp = 0, fp = 0, fn = 0;
  long intra_tp = 0, intra_fp = 0, intra_fn = 0;
  long inter_tp = 0, inter_fp = 0, inter_fn = 0;
  double fpr = 0.0, tpr = 0.0;
  double precision = 1.0, recall = 1.0, f1 = 0.0;
  bool exact = false;
};

// Candidate edges pool intra (unordered pairs within blocks) and inter
// (directed pairs following the block DAG); a positive is a true edge with
// nonzero weight. Estimates must live inside the truth's candidate universe.
RocCurve roc(const ModelSpec& truth, const std::vector<GraphEstimate>& path);

// Per-class ROC (intra only / inter only).
RocCurve roc_intra(const ModelSpec& truth, const std::vector<GraphEstimate>& path);
RocCurve roc_inter(const ModelSpec& truth, const std::vector<GraphEstimate>& path);

std::vector<ConfusionRow> recovery_summary(const ModelSpec& truth,
                                           const std::vector<GraphEstimate>& path);

struct NodeError {
  int node = -1;
  double intra_l2 = 0.0;
  double inter_l2 = 0.0;
};

struct ParamError {
  std::vector<NodeError> per_node;
  double intra_max = 0.0;  // max over nodes
  double inter_max = 0.0;
};

// l2 distance between estimated and true coefficient vectors, split by
// coordinate class; absent edges count as zero weights.
ParamError param_error(const ModelSpec& truth, const std::vector<NodeFit>& fits);

// AUC of the step-completed curve anchored at (0,0) and (1,1).
double auc_of(std::vector<std::pair<double, double>> points);

std::string recovery_csv(const std::vector<ConfusionRow>& rows, double auc);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (fpr, tpr)
};

// Minimal line plot: axes plus one polyline per series.
std::string roc_svg(const std::vector<SvgSeries>& series);

}  // namespace bdmrf
