#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bdmrf/estimator.hpp"
#include "bdmrf/model.hpp"
#include "bdmrf/sampler.hpp"

namespace bdmrf {

inline constexpr int kFormatVersion = 1;

// Model spec text format (JSON): top-level keys format_version, nodes,
// blocks, block_dag, intra_edges, inter_edges, params. Block indices are
// 1-based in files. See docs/formats.md for the schema.
ModelSpec load_spec(const std::string& path);
ModelSpec parse_spec(const std::string& text, const std::string& origin = "<string>");
std::string spec_to_json(const ModelSpec& spec);
void save_spec(const ModelSpec& spec, const std::string& path);

// Dataset CSV: one `name:block:family[:param]` header per column (block
// 1-based; param is sigma for gaussian, the truncation level for tpoisson),
// numeric body at 17 significant digits.
Dataset load_dataset(const std::string& path, bool recode01 = false);
Dataset parse_dataset(const std::string& text, const std::string& origin = "<string>",
                      bool recode01 = false);
std::string dataset_to_csv(const Dataset& data);
void save_dataset(const Dataset& data, const std::string& path);

// Fit results reuse the model-spec format (estimated weights in params) plus
// a diagnostics sidecar with per-node solver state.
void save_fit(const GraphEstimate& est, const SpecSkeleton& skeleton,
              const std::string& path, const std::string& diagnostics_path);

struct ExperimentManifest {
  std::string spec_path;  // resolved against the manifest directory
  std::vector<int> n_values;
  int replicates = 1;
  std::uint64_t seed_base = 0;
  SamplerConfig sampler;
  int grid_k = 30;
  double grid_ratio = 0.01;
  FitConfig fit;
  SymmetrizeRule rule = SymmetrizeRule::And;
  bool force = false;
  bool svg = false;
  std::string out_dir;
};

ExperimentManifest load_manifest(const std::string& path);

struct PrepareOptions {
  double min_prevalence = 0.1;  // keep binary columns present in >= this fraction
  double top_variance = 0.02;   // keep this fraction of count columns by variance
};

// Merges a binary aberration table and a count expression table on shared
// sample identifiers (first CSV column), applies the prevalence/variance
// filters, and emits a two-block dataset: block 1 bernoulli_pm (0/1 recoded
// to -1/+1), block 2 tpoisson with per-column truncation at the max count.
Dataset prepare_mixed(const std::string& binary_csv_path,
                      const std::string& counts_csv_path,
                      const PrepareOptions& opt,
                      std::vector<std::string>* log = nullptr);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string format_double(double v);  // %.17g

}  // namespace bdmrf
