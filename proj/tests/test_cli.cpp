#include <doctest.h>

#include <filesystem>

#include "bdmrf/cli.hpp"
#include "bdmrf/io.hpp"
#include "fixtures.hpp"

using namespace bdmrf;
namespace fs = std::filesystem;

namespace {

const std::string kSource = BDMRF_SOURCE_DIR;

std::string temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("bdmrf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

int cli(std::vector<std::string> args) {
  args.push_back("--quiet");
  return run_cli(args);
}

}  // namespace

TEST_CASE("simulate validates its sample count") {
  std::string dir = temp_dir("usage");
  CHECK(cli({"simulate", "--spec", kSource + "/specs/ising_2x2.json", "--n", "0",
             "--out", dir + "/d.csv"}) != 0);
  CHECK(!fs::exists(dir + "/d.csv"));
}

TEST_CASE("simulate is reproducible and thread-count independent") {
  std::string dir = temp_dir("repro");
  std::string spec = kSource + "/specs/ising_2x2.json";
  CHECK(cli({"--seed", "9", "simulate", "--spec", spec, "--n", "50", "--out",
             dir + "/a.csv"}) == 0);
  CHECK(cli({"--seed", "9", "simulate", "--spec", spec, "--n", "50", "--out",
             dir + "/b.csv"}) == 0);
  CHECK(cli({"--seed", "9", "--threads", "4", "simulate", "--spec", spec, "--n", "50",
             "--out", dir + "/c.csv"}) == 0);
  CHECK(read_file(dir + "/a.csv") == read_file(dir + "/b.csv"));
  CHECK(read_file(dir + "/a.csv") == read_file(dir + "/c.csv"));
  CHECK(fs::exists(dir + "/a.csv.summary.json"));
}

TEST_CASE("check gates on the verdict") {
  CHECK(cli({"check", "--spec", kSource + "/specs/ising_2x2.json"}) == 0);
  CHECK(cli({"check", "--spec", kSource + "/specs/gauss_poisson_mixed.json"}) == 2);
  CHECK(cli({"check", "--spec", kSource + "/specs/gauss_mrf_ising_crf_6x6.json"}) == 2);
}

TEST_CASE("simulate refuses a non-normalizable spec unless forced") {
  std::string dir = temp_dir("force");
  std::string spec = kSource + "/specs/gauss_poisson_mixed.json";
  CHECK(cli({"simulate", "--spec", spec, "--n", "10", "--out", dir + "/d.csv"}) == 2);
  CHECK(!fs::exists(dir + "/d.csv"));
  CHECK(cli({"simulate", "--spec", spec, "--n", "10", "--force", "--out",
             dir + "/d.csv"}) == 0);
  CHECK(fs::exists(dir + "/d.csv"));
}

TEST_CASE("oracle subcommand verdicts") {
  CHECK(cli({"oracle", "--spec", kSource + "/specs/ising_2x2.json", "--against",
             "formula"}) == 0);
  CHECK(cli({"oracle", "--spec", kSource + "/specs/ising_2x2.json", "--against", "gibbs",
             "--samples", "20000", "--seed", "3"}) == 0);
  // gaussian chain is not enumerable
  CHECK(cli({"oracle", "--spec", kSource + "/specs/gauss_chain_4.json", "--against",
             "formula"}) == 1);
}

TEST_CASE("fit, path, roc, stars round trip through files") {
  std::string dir = temp_dir("flow");
  std::string spec = kSource + "/specs/gauss_mrf_ising_crf_3x3.json";
  REQUIRE(cli({"--seed", "4", "simulate", "--spec", spec, "--n", "150", "--out",
               dir + "/d.csv"}) == 0);

  CHECK(cli({"fit", "--data", dir + "/d.csv", "--spec", spec, "--lambda", "0.1", "--mu",
             "0.1", "--out", dir + "/fit.json"}) == 0);
  CHECK(fs::exists(dir + "/fit.json.diagnostics.json"));
  ModelSpec fitted = load_spec(dir + "/fit.json");  // fit output is a loadable spec
  CHECK(fitted.num_nodes() == 18);

  CHECK(cli({"path", "--data", dir + "/d.csv", "--spec", spec, "--k", "8", "--ratio",
             "0.05", "--out", dir + "/path.json"}) == 0);
  CHECK(cli({"roc", "--truth", spec, "--path", dir + "/path.json", "--out",
             dir + "/roc.csv", "--svg", dir + "/roc.svg"}) == 0);
  std::string roc_text = read_file(dir + "/roc.csv");
  CHECK(roc_text.find("lambda,mu,fpr,tpr") == 0);
  CHECK(roc_text.find("auc,") != std::string::npos);
  CHECK(read_file(dir + "/roc.svg").find("<svg") == 0);

  CHECK(cli({"--seed", "12", "stars", "--data", dir + "/d.csv", "--spec", spec, "--k", "6",
             "--ratio", "0.05", "--beta", "0.05", "--subsamples", "6", "--out-dir",
             dir + "/stars"}) == 0);
  CHECK(fs::exists(dir + "/stars/selected_fit.json"));
  CHECK(fs::exists(dir + "/stars/instability.csv"));
  CHECK(fs::exists(dir + "/stars/stars.summary.json"));
}

TEST_CASE("fit accepts 0/1 binary data behind --recode01") {
  std::string dir = temp_dir("recode");
  write_file(dir + "/d01.csv", "a:1:bernoulli_pm,b:1:bernoulli_pm\n1,0\n0,1\n1,1\n0,0\n");
  save_spec(testing::ising_lattice(1, 2, 0.0, 0.0), dir + "/sk.json");
  // bundled skeleton uses ids b0/b1; rewrite the header to match
  write_file(dir + "/d01.csv", "b0:1:bernoulli_pm,b1:1:bernoulli_pm\n1,0\n0,1\n1,1\n0,0\n");
  CHECK(cli({"fit", "--data", dir + "/d01.csv", "--spec", dir + "/sk.json", "--lambda",
             "0.5", "--out", dir + "/f.json"}) != 0);
  CHECK(cli({"fit", "--data", dir + "/d01.csv", "--spec", dir + "/sk.json", "--lambda",
             "0.5", "--recode01", "--out", dir + "/f.json"}) == 0);
}

TEST_CASE("experiment runs a manifest end to end") {
  std::string dir = temp_dir("exp");
  save_spec(testing::gauss_mrf_ising_crf(2, 2, 0.2, 0.3, 0.1), dir + "/spec.json");
  write_file(dir + "/m.json", R"({"format_version":1,"spec":"spec.json",
    "n_values":[40,80],"replicates":2,"seed_base":99,
    "sampler":{"burn_in":100,"thin":10,"init":"zero"},
    "grid":{"k":6,"ratio":0.05},
    "fit":{"max_iter":2000,"tol":1e-7,"rule":"and"},
    "force":false,"svg":true,"out_dir":"out"})");

  CHECK(cli({"experiment", "--manifest", dir + "/m.json"}) == 0);
  for (const char* run : {"n40_rep0", "n40_rep1", "n80_rep0", "n80_rep1"}) {
    CHECK(fs::exists(dir + "/out/" + std::string(run) + "/dataset.csv"));
    CHECK(fs::exists(dir + "/out/" + std::string(run) + "/roc.csv"));
  }
  CHECK(fs::exists(dir + "/out/mean_roc_n40.csv"));
  CHECK(fs::exists(dir + "/out/mean_roc_n80.csv"));
  CHECK(fs::exists(dir + "/out/roc.svg"));
  CHECK(fs::exists(dir + "/out/experiment.summary.json"));

  SUBCASE("re-running with another thread count is byte-identical") {
    std::string dir2 = temp_dir("exp2");
    save_spec(testing::gauss_mrf_ising_crf(2, 2, 0.2, 0.3, 0.1), dir2 + "/spec.json");
    write_file(dir2 + "/m.json", R"({"format_version":1,"spec":"spec.json",
      "n_values":[40,80],"replicates":2,"seed_base":99,
      "sampler":{"burn_in":100,"thin":10,"init":"zero"},
      "grid":{"k":6,"ratio":0.05},
      "fit":{"max_iter":2000,"tol":1e-7,"rule":"and"},
      "force":false,"svg":true,"out_dir":"out"})");
    CHECK(cli({"--threads", "4", "experiment", "--manifest", dir2 + "/m.json"}) == 0);
    for (const char* rel :
         {"n40_rep0/dataset.csv", "n80_rep1/roc.csv", "mean_roc_n40.csv", "mean_roc_n80.csv"})
      CHECK(read_file(dir + "/out/" + std::string(rel)) ==
            read_file(dir2 + "/out/" + std::string(rel)));
  }
}

TEST_CASE("experiment refuses a non-normalizable spec without force") {
  std::string dir = temp_dir("exp_refuse");
  write_file(dir + "/m.json",
             std::string(R"({"format_version":1,"spec":")") + kSource +
                 R"(/specs/gauss_poisson_mixed.json",
    "n_values":[10],"replicates":1,"seed_base":1,"out_dir":"out"})");
  CHECK(cli({"experiment", "--manifest", dir + "/m.json"}) == 2);
}

TEST_CASE("prepare + path + stars pipeline on the bundled tables") {
  std::string dir = temp_dir("prepare");
  CHECK(cli({"prepare", "--binary", kSource + "/data/synthetic_aberrations.csv",
             "--counts", kSource + "/data/synthetic_expression.csv",
             "--min-prevalence", "0.1", "--top-variance", "0.25", "--out",
             dir + "/mixed.csv"}) == 0);
  Dataset data = load_dataset(dir + "/mixed.csv");
  CHECK(data.n() == 50);
  CHECK(data.p() > 10);

  // the prepared dataset doubles as its own skeleton spec for fitting
  SpecSkeleton sk = skeleton_of(data);
  ModelSpec skeleton_spec;
  skeleton_spec.nodes = sk.nodes;
  skeleton_spec.blocks = sk.blocks;
  skeleton_spec.block_dag = sk.block_dag;
  skeleton_spec.node_weights.assign(sk.nodes.size(), 0.0);
  save_spec(skeleton_spec, dir + "/skeleton.json");

  CHECK(cli({"path", "--data", dir + "/mixed.csv", "--spec", dir + "/skeleton.json",
             "--k", "5", "--ratio", "0.1", "--out", dir + "/path.json"}) == 0);
  CHECK(cli({"--seed", "2", "stars", "--data", dir + "/mixed.csv", "--spec",
             dir + "/skeleton.json", "--k", "5", "--ratio", "0.1", "--beta", "0.01",
             "--subsamples", "5", "--out-dir", dir + "/stars"}) == 0);
}
