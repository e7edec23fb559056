#include "bdmrf/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "bdmrf/errors.hpp"

namespace bdmrf {

namespace {

using nlohmann::json;

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": " + e.what());
  }
}

void check_version(const json& j, const std::string& origin) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw ParseError(origin + ": missing integer 'format_version'");
  int v = j["format_version"].get<int>();
  if (v != kFormatVersion)
    throw ParseError(origin + ": unsupported format_version " + std::to_string(v));
}

FamilyKind family_from_json(const json& node, const std::string& origin) {
  std::string tag = node.at("family").get<std::string>();
  if (tag == "gaussian")
    return FamilyKind::gaussian(node.value("sigma", 1.0));
  if (tag == "bernoulli_pm") return FamilyKind::bernoulli_pm();
  if (tag == "poisson") return FamilyKind::poisson();
  if (tag == "exponential") return FamilyKind::exponential();
  if (tag == "tpoisson") {
    if (!node.contains("r"))
      throw ParseError(origin + ": tpoisson node needs a truncation level 'r'");
    return FamilyKind::truncated_poisson(node["r"].get<int>());
  }
  throw ParseError(origin + ": unknown family tag '" + tag + "'");
}

json family_to_json(const NodeDecl& n) {
  json j;
  j["id"] = n.id;
  j["family"] = family_name(n.family);
  j["block"] = n.block + 1;
  if (n.family.tag == FamilyTag::Gaussian) j["sigma"] = n.family.sigma;
  if (n.family.tag == FamilyTag::TruncatedPoisson) j["r"] = n.family.r;
  return j;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_ids;  // filled when first column is textual
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// Plain CSV with string ids in the first column and numbers elsewhere.
CsvTable read_id_table(const std::string& path) {
  std::string text = read_file(path);
  std::istringstream is(text);
  std::string line;
  CsvTable table;
  if (!std::getline(is, line)) throw ParseError(path + ": empty file");
  table.header = split(line, ',');
  if (table.header.size() < 2)
    throw ParseError(path + ": expected an id column plus data columns");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != table.header.size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": wrong field count");
    table.row_ids.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      char* end = nullptr;
      double v = std::strtod(fields[j].c_str(), &end);
      if (end == fields[j].c_str() || *end != '\0')
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad number '" +
                         fields[j] + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ModelSpec parse_spec(const std::string& text, const std::string& origin) {
  json j = parse_json(text, origin);
  check_version(j, origin);
  ModelSpec spec;
  try {
    for (const auto& jn : j.at("nodes")) {
      NodeDecl n;
      n.id = jn.at("id").get<std::string>();
      n.family = family_from_json(jn, origin);
      n.block = jn.at("block").get<int>() - 1;
      spec.nodes.push_back(std::move(n));
    }
    auto index_of = [&spec, &origin](const std::string& id) {
      int s = spec.node_index(id);
      if (s < 0) throw ParseError(origin + ": unknown node id '" + id + "'");
      return s;
    };
    for (const auto& jb : j.at("blocks")) {
      std::vector<int> block;
      for (const auto& id : jb) block.push_back(index_of(id.get<std::string>()));
      spec.blocks.push_back(std::move(block));
    }
    for (const auto& jp : j.at("block_dag")) {
      std::vector<int> parents;
      for (const auto& b : jp) parents.push_back(b.get<int>() - 1);
      spec.block_dag.push_back(std::move(parents));
    }
    const auto& params = j.at("params");
    for (const auto& je : j.at("intra_edges")) {
      IntraEdge e;
      e.u = index_of(je.at(0).get<std::string>());
      e.v = index_of(je.at(1).get<std::string>());
      spec.intra_edges.push_back(e);
    }
    for (const auto& je : j.at("inter_edges")) {
      InterEdge e;
      e.from = index_of(je.at(0).get<std::string>());
      e.to = index_of(je.at(1).get<std::string>());
      spec.inter_edges.push_back(e);
    }
    const auto& node_params = params.at("node");
    spec.node_weights.assign(spec.nodes.size(), 0.0);
    for (std::size_t s = 0; s < spec.nodes.size(); ++s) {
      if (node_params.contains(spec.nodes[s].id))
        spec.node_weights[s] = node_params.at(spec.nodes[s].id).get<double>();
    }
    const auto& intra_w = params.at("intra");
    if (intra_w.size() != spec.intra_edges.size())
      throw ParseError(origin + ": params.intra length does not match intra_edges");
    for (std::size_t i = 0; i < spec.intra_edges.size(); ++i)
      spec.intra_edges[i].weight = intra_w.at(i).get<double>();
    const auto& inter_w = params.at("inter");
    if (inter_w.size() != spec.inter_edges.size())
      throw ParseError(origin + ": params.inter length does not match inter_edges");
    for (std::size_t i = 0; i < spec.inter_edges.size(); ++i)
      spec.inter_edges[i].weight = inter_w.at(i).get<double>();
  } catch (const json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }

  auto errors = validate(spec);
  if (!errors.empty()) {
    std::ostringstream os;
    os << origin << ": invalid model spec:";
    for (const auto& e : errors) os << "\n  - " << e;
    throw SpecError(os.str());
  }
  return spec;
}

ModelSpec load_spec(const std::string& path) {
  return parse_spec(read_file(path), path);
}

std::string spec_to_json(const ModelSpec& spec) {
  json j;
  j["format_version"] = kFormatVersion;
  j["nodes"] = json::array();
  for (const auto& n : spec.nodes) j["nodes"].push_back(family_to_json(n));
  j["blocks"] = json::array();
  for (const auto& block : spec.blocks) {
    json jb = json::array();
    for (int s : block) jb.push_back(spec.nodes[static_cast<std::size_t>(s)].id);
    j["blocks"].push_back(std::move(jb));
  }
  j["block_dag"] = json::array();
  for (const auto& parents : spec.block_dag) {
    json jp = json::array();
    for (int b : parents) jp.push_back(b + 1);
    j["block_dag"].push_back(std::move(jp));
  }
  j["intra_edges"] = json::array();
  json intra_w = json::array();
  for (const auto& e : spec.intra_edges) {
    j["intra_edges"].push_back({spec.nodes[static_cast<std::size_t>(e.u)].id,
                                spec.nodes[static_cast<std::size_t>(e.v)].id});
    intra_w.push_back(e.weight);
  }
  j["inter_edges"] = json::array();
  json inter_w = json::array();
  for (const auto& e : spec.inter_edges) {
    j["inter_edges"].push_back({spec.nodes[static_cast<std::size_t>(e.from)].id,
                                spec.nodes[static_cast<std::size_t>(e.to)].id});
    inter_w.push_back(e.weight);
  }
  json node_w = json::object();
  for (std::size_t s = 0; s < spec.nodes.size(); ++s)
    node_w[spec.nodes[s].id] = spec.node_weights[s];
  j["params"] = {{"node", std::move(node_w)},
                 {"intra", std::move(intra_w)},
                 {"inter", std::move(inter_w)}};
  return j.dump(2) + "\n";
}

void save_spec(const ModelSpec& spec, const std::string& path) {
  write_file(path, spec_to_json(spec));
}

Dataset parse_dataset(const std::string& text, const std::string& origin,
                      bool recode01) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError(origin + ": empty file");
  Dataset data;
  for (const auto& col : split(line, ',')) {
    auto parts = split(col, ':');
    if (parts.size() < 3)
      throw ParseError(origin + ": bad column header '" + col +
                       "' (want name:block:family[:param])");
    ColumnSchema cs;
    cs.name = parts[0];
    cs.block = std::atoi(parts[1].c_str()) - 1;
    if (cs.block < 0)
      throw ParseError(origin + ": bad block index in header '" + col + "'");
    const std::string& fam = parts[2];
    if (fam == "gaussian") {
      cs.family = FamilyKind::gaussian(parts.size() > 3 ? std::atof(parts[3].c_str()) : 1.0);
    } else if (fam == "bernoulli_pm") {
      cs.family = FamilyKind::bernoulli_pm();
    } else if (fam == "poisson") {
      cs.family = FamilyKind::poisson();
    } else if (fam == "exponential") {
      cs.family = FamilyKind::exponential();
    } else if (fam == "tpoisson") {
      if (parts.size() < 4)
        throw ParseError(origin + ": tpoisson column '" + cs.name +
                         "' needs a truncation level");
      cs.family = FamilyKind::truncated_poisson(std::atoi(parts[3].c_str()));
    } else {
      throw ParseError(origin + ": unknown family tag '" + fam + "'");
    }
    data.schema.push_back(std::move(cs));
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != data.schema.size())
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(data.schema.size()) + " fields, got " +
                       std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      char* end = nullptr;
      double v = std::strtod(fields[j].c_str(), &end);
      if (end == fields[j].c_str() || *end != '\0')
        throw ParseError(origin + ":" + std::to_string(lineno) + ": bad number '" +
                         fields[j] + "'");
      const auto& fam = data.schema[j].family;
      if (recode01 && fam.tag == FamilyTag::BernoulliPM && (v == 0.0 || v == 1.0))
        v = v == 0.0 ? -1.0 : 1.0;
      if (!domain_check(fam, v))
        throw DomainViolation(origin + ": value " + fields[j] + " at row " +
                              std::to_string(lineno - 1) + ", column '" +
                              data.schema[j].name + "' outside domain of " +
                              family_name(fam));
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(origin + ": dataset has no rows");
  data.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(data.schema.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      data.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return data;
}

Dataset load_dataset(const std::string& path, bool recode01) {
  return parse_dataset(read_file(path), path, recode01);
}

std::string dataset_to_csv(const Dataset& data) {
  std::ostringstream os;
  for (int j = 0; j < data.p(); ++j) {
    const auto& cs = data.schema[static_cast<std::size_t>(j)];
    if (j) os << ',';
    os << cs.name << ':' << cs.block + 1 << ':' << family_name(cs.family);
    if (cs.family.tag == FamilyTag::Gaussian) os << ':' << format_double(cs.family.sigma);
    if (cs.family.tag == FamilyTag::TruncatedPoisson) os << ':' << cs.family.r;
  }
  os << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      if (j) os << ',';
      os << format_double(data.values(i, j));
    }
    os << '\n';
  }
  return os.str();
}

void save_dataset(const Dataset& data, const std::string& path) {
  write_file(path, dataset_to_csv(data));
}

void save_fit(const GraphEstimate& est, const SpecSkeleton& skeleton,
              const std::string& path, const std::string& diagnostics_path) {
  ModelSpec spec;
  spec.nodes = skeleton.nodes;
  spec.blocks = skeleton.blocks;
  spec.block_dag = skeleton.block_dag;
  spec.node_weights.assign(skeleton.nodes.size(), 0.0);
  for (const auto& fit : est.node_fits)
    spec.node_weights[static_cast<std::size_t>(fit.node)] = fit.intercept;
  for (const auto& e : est.intra) spec.intra_edges.push_back({e.u, e.v, e.weight});
  for (const auto& e : est.inter) spec.inter_edges.push_back({e.u, e.v, e.weight});
  save_spec(spec, path);

  json diag;
  diag["format_version"] = kFormatVersion;
  diag["rule"] = rule_name(est.rule);
  diag["warnings"] = est.warnings;
  diag["nodes"] = json::array();
  for (const auto& fit : est.node_fits) {
    diag["nodes"].push_back({{"id", skeleton.nodes[static_cast<std::size_t>(fit.node)].id},
                             {"iterations", fit.iterations},
                             {"converged", fit.converged},
                             {"objective", fit.objective},
                             {"kkt_slack", fit.kkt_slack}});
  }
  write_file(diagnostics_path, diag.dump(2) + "\n");
}

ExperimentManifest load_manifest(const std::string& path) {
  const std::string text = read_file(path);
  json j = parse_json(text, path);
  check_version(j, path);
  ExperimentManifest m;
  try {
    auto dir = std::filesystem::path(path).parent_path();
    m.spec_path = (dir / j.at("spec").get<std::string>()).string();
    for (const auto& n : j.at("n_values")) m.n_values.push_back(n.get<int>());
    m.replicates = j.at("replicates").get<int>();
    m.seed_base = j.at("seed_base").get<std::uint64_t>();
    if (j.contains("sampler")) {
      const auto& s = j["sampler"];
      m.sampler.burn_in = s.value("burn_in", m.sampler.burn_in);
      m.sampler.thin = s.value("thin", m.sampler.thin);
      std::string init = s.value("init", std::string("zero"));
      if (init != "zero" && init != "random")
        throw ParseError(path + ": sampler.init must be 'zero' or 'random'");
      m.sampler.init = init == "zero" ? ChainInit::Zero : ChainInit::Random;
    }
    if (j.contains("grid")) {
      m.grid_k = j["grid"].value("k", m.grid_k);
      m.grid_ratio = j["grid"].value("ratio", m.grid_ratio);
    }
    if (j.contains("fit")) {
      const auto& f = j["fit"];
      m.fit.max_iter = f.value("max_iter", m.fit.max_iter);
      m.fit.tol = f.value("tol", m.fit.tol);
      m.fit.standardize = f.value("standardize", false);
      m.fit.project_nonpositive = f.value("project_nonpositive", false);
      std::string rule = f.value("rule", std::string("and"));
      if (rule != "and" && rule != "or")
        throw ParseError(path + ": fit.rule must be 'and' or 'or'");
      m.rule = rule == "and" ? SymmetrizeRule::And : SymmetrizeRule::Or;
    }
    m.force = j.value("force", false);
    m.svg = j.value("svg", false);
    m.out_dir = (dir / j.at("out_dir").get<std::string>()).string();
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (m.n_values.empty()) throw ParseError(path + ": n_values must be non-empty");
  if (m.replicates < 1) throw ParseError(path + ": replicates must be >= 1");
  if (!std::filesystem::exists(m.spec_path))
    throw ParseError(path + ": referenced spec '" + m.spec_path + "' does not exist");
  return m;
}

Dataset prepare_mixed(const std::string& binary_csv_path,
                      const std::string& counts_csv_path,
                      const PrepareOptions& opt, std::vector<std::string>* log) {
  CsvTable binary = read_id_table(binary_csv_path);
  CsvTable counts = read_id_table(counts_csv_path);
  auto note = [log](const std::string& m) {
    if (log) log->push_back(m);
  };

  // intersect sample ids, keeping the binary file's order
  std::vector<std::pair<int, int>> matched;  // (row in binary, row in counts)
  for (std::size_t i = 0; i < binary.row_ids.size(); ++i) {
    for (std::size_t k = 0; k < counts.row_ids.size(); ++k) {
      if (binary.row_ids[i] == counts.row_ids[k]) {
        matched.emplace_back(static_cast<int>(i), static_cast<int>(k));
        break;
      }
    }
  }
  if (matched.empty())
    throw ParseError("no shared sample identifiers between the two tables");
  note("matched " + std::to_string(matched.size()) + " samples");

  const double n = static_cast<double>(matched.size());
  std::vector<int> keep_binary;
  for (std::size_t j = 0; j + 1 < binary.header.size(); ++j) {
    double ones = 0.0;
    for (const auto& [bi, ci] : matched) {
      (void)ci;
      double v = binary.rows[static_cast<std::size_t>(bi)][j];
      if (v != 0.0 && v != 1.0)
        throw DomainViolation(binary_csv_path + ": column '" + binary.header[j + 1] +
                              "' holds non-binary value " + format_double(v));
      ones += v;
    }
    if (ones / n >= opt.min_prevalence) keep_binary.push_back(static_cast<int>(j));
  }
  note("kept " + std::to_string(keep_binary.size()) + " of " +
       std::to_string(binary.header.size() - 1) + " binary columns at prevalence >= " +
       format_double(opt.min_prevalence));
  if (keep_binary.empty())
    throw SpecError("prevalence filter removed every binary column");

  std::vector<std::pair<double, int>> variances;
  for (std::size_t j = 0; j + 1 < counts.header.size(); ++j) {
    double mean = 0.0, sq = 0.0;
    for (const auto& [bi, ci] : matched) {
      (void)bi;
      double v = counts.rows[static_cast<std::size_t>(ci)][j];
      if (!(std::isfinite(v) && v >= 0.0 && std::floor(v) == v))
        throw DomainViolation(counts_csv_path + ": column '" + counts.header[j + 1] +
                              "' holds non-count value " + format_double(v));
      mean += v;
      sq += v * v;
    }
    mean /= n;
    variances.emplace_back(sq / n - mean * mean, static_cast<int>(j));
  }
  std::sort(variances.rbegin(), variances.rend());
  int keep_n = std::max(1, static_cast<int>(std::floor(
                               opt.top_variance * static_cast<double>(variances.size()))));
  std::vector<int> keep_counts;
  for (int k = 0; k < keep_n; ++k) keep_counts.push_back(variances[static_cast<std::size_t>(k)].second);
  std::sort(keep_counts.begin(), keep_counts.end());
  note("kept " + std::to_string(keep_counts.size()) + " of " +
       std::to_string(variances.size()) + " count columns by variance");

  Dataset data;
  for (int j : keep_binary)
    data.schema.push_back({binary.header[static_cast<std::size_t>(j) + 1],
                           FamilyKind::bernoulli_pm(), 0});
  for (int j : keep_counts) {
    double maxv = 0.0;
    for (const auto& [bi, ci] : matched) {
      (void)bi;
      maxv = std::max(maxv, counts.rows[static_cast<std::size_t>(ci)][static_cast<std::size_t>(j)]);
    }
    data.schema.push_back({counts.header[static_cast<std::size_t>(j) + 1],
                           FamilyKind::truncated_poisson(std::max(1, static_cast<int>(maxv))),
                           1});
  }
  data.values.resize(static_cast<Eigen::Index>(matched.size()),
                     static_cast<Eigen::Index>(data.schema.size()));
  for (std::size_t i = 0; i < matched.size(); ++i) {
    auto [bi, ci] = matched[i];
    int c = 0;
    for (int j : keep_binary)
      data.values(static_cast<Eigen::Index>(i), c++) =
          binary.rows[static_cast<std::size_t>(bi)][static_cast<std::size_t>(j)] == 0.0 ? -1.0 : 1.0;
    for (int j : keep_counts)
      data.values(static_cast<Eigen::Index>(i), c++) =
          counts.rows[static_cast<std::size_t>(ci)][static_cast<std::size_t>(j)];
  }
  return data;
}

}  // namespace bdmrf
