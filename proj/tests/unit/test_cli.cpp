#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mcde/io.hpp"
#include "mcde/synthdata.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mcde_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args, const std::string& env = "") const {
    const std::string cmd = env + " " + MCDE_CLI_PATH + " " + args + " 2>" + path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  json load(const std::string& name) const { return json::parse(mcde::read_file(path(name))); }

  void write_points(const std::string& name, const mcde::Sample& s) const {
    std::string text;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t k = 0; k < s.dim(); ++k) {
        if (k > 0) text += ",";
        text += mcde::format_double(s(i, k));
      }
      text += "\n";
    }
    mcde::write_file(path(name), text);
  }

  fs::path dir_;
};

} // namespace

TEST_F(Cli, FitTwoPointCsv) {
  mcde::write_file(path("two.csv"), "0\n1\n");
  ASSERT_EQ(run("fit --input " + path("two.csv") + " --out " + path("m.json")), 0);
  const json m = load("m.json");
  EXPECT_GT(m["h_star"].get<double>(), 0.0);
  for (const char* key : {"variant", "kernel", "b", "normalization_constant", "pointwise"}) {
    EXPECT_TRUE(m.contains(key)) << key;
  }
}

TEST_F(Cli, ScoreWithLabelsReportsAuc) {
  const auto spec = mcde::outlier_dataset(2);
  const auto ls = mcde::sample_mixture(spec.inlier, spec.outlier, spec.n_in, spec.n_out, 2, 1);
  write_points("x.csv", ls.points);
  std::string labels;
  for (bool l : ls.labels) labels += l ? "1\n" : "0\n";
  mcde::write_file(path("y.csv"), labels);
  ASSERT_EQ(run("score --input " + path("x.csv") + " --labels " + path("y.csv") + " --k 40 --out " +
                path("r.json")),
            0);
  const json r = load("r.json");
  EXPECT_EQ(r["k"], 40);
  EXPECT_EQ(r["scores"].size(), 200u);
  ASSERT_TRUE(r.contains("auc"));
  EXPECT_GT(r["auc"].get<double>(), 0.5);

  ASSERT_EQ(run("score --input " + path("x.csv") + " --labels " + path("y.csv") + " --k 5,10,40 --out " +
                path("r3.json")),
            0);
  const json r3 = load("r3.json");
  ASSERT_EQ(r3["reports"].size(), 3u);
  EXPECT_EQ(r3["reports"][2]["auc"], r["auc"]);
}

TEST_F(Cli, MissingInputIsUsageErrorWithoutOutput) {
  EXPECT_EQ(run("fit --input " + path("nope.csv") + " --out " + path("m.json")), 2);
  EXPECT_FALSE(fs::exists(path("m.json")));
  EXPECT_EQ(run("score --input " + path("nope.csv") + " --out " + path("r.json")), 2);
  EXPECT_FALSE(fs::exists(path("r.json")));
}

TEST_F(Cli, UsageErrors) {
  mcde::write_file(path("p.csv"), "0\n1\n2\n");
  EXPECT_EQ(run("fit --input " + path("p.csv") + " --bogus"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("fit --input " + path("p.csv") + " --kernel nope --out " + path("m.json")), 2);
  EXPECT_FALSE(fs::exists(path("m.json")));
  mcde::write_file(path("bad.json"), "{\"unknown\": 1}");
  EXPECT_EQ(run("fit --input " + path("p.csv") + " --config " + path("bad.json")), 2);
  EXPECT_EQ(run("fit --input " + path("p.csv") + " --out " + path("m.json"), "MCDE_SEED=abc"), 2);
}

TEST_F(Cli, DataErrorsExitOne) {
  mcde::write_file(path("bad.csv"), "1,2\n3\n");
  EXPECT_EQ(run("fit --input " + path("bad.csv") + " --out " + path("m.json")), 1);
  EXPECT_NE(mcde::read_file(path("stderr.txt")).find("line 2"), std::string::npos);
  mcde::write_file(path("p.csv"), "0\n1\n2\n");
  EXPECT_EQ(run("score --input " + path("p.csv") + " --k 5 --out " + path("r.json")), 1);
}

TEST_F(Cli, IdenticalCommandsGiveIdenticalBytes) {
  write_points("x.csv", oracle::normal_sample(150, 2, 3));
  const std::string args = "fit --input " + path("x.csv") + " --seed 11 --out ";
  ASSERT_EQ(run(args + path("a.json")), 0);
  ASSERT_EQ(run(args + path("b.json")), 0);
  EXPECT_EQ(mcde::read_file(path("a.json")), mcde::read_file(path("b.json")));
  ASSERT_EQ(run(args + path("c.json") + " --threads 1"), 0);
  ASSERT_EQ(run(args + path("d.json") + " --threads 4"), 0);
  EXPECT_EQ(mcde::read_file(path("c.json")), mcde::read_file(path("d.json")));
  EXPECT_EQ(mcde::read_file(path("a.json")), mcde::read_file(path("c.json")));
}

TEST_F(Cli, SeedPrecedence) {
  write_points("x.csv", oracle::normal_sample(60, 1, 4));
  ASSERT_EQ(run("fit --input " + path("x.csv") + " --out " + path("env.json"), "MCDE_SEED=9"), 0);
  ASSERT_EQ(run("fit --input " + path("x.csv") + " --seed 9 --out " + path("flag.json")), 0);
  EXPECT_EQ(mcde::read_file(path("env.json")), mcde::read_file(path("flag.json")));
  EXPECT_EQ(load("env.json")["mc_seed"].get<std::uint64_t>() - load("env.json")["config"]["seed"].get<std::uint64_t>(),
            load("env.json")["loss_curve"]["argmin"].get<std::uint64_t>());
  ASSERT_EQ(run("fit --input " + path("x.csv") + " --seed 3 --out " + path("both.json"), "MCDE_SEED=9"), 0);
  EXPECT_EQ(load("both.json")["config"]["seed"], 3);
  ASSERT_EQ(run("fit --input " + path("x.csv") + " --out " + path("none.json")), 0);
  EXPECT_EQ(load("none.json")["config"]["seed"], 42);
}

TEST_F(Cli, FitThenEvalReproducesPointwiseValues) {
  const mcde::Sample raw = oracle::normal_sample(120, 2, 5);
  write_points("x.csv", raw);
  ASSERT_EQ(run("fit --input " + path("x.csv") + " --out " + path("m.json")), 0);
  ASSERT_EQ(run("eval --model " + path("m.json") + " --input " + path("x.csv") + " --out " + path("e.json")), 0);
  const json m = load("m.json");
  const json e = load("e.json");
  ASSERT_EQ(e["unnormalized"].size(), 120u);
  for (std::size_t i = 0; i < 120; ++i) {
    EXPECT_NEAR(e["unnormalized"][i].get<double>(), m["pointwise"][i].get<double>(), 1e-12);
  }
  EXPECT_EQ(run("eval --model " + path("nope.json") + " --input " + path("x.csv")), 2);
}

TEST_F(Cli, BenchCommands) {
  mcde::write_file(path("de.json"),
                   R"({"dims": [1], "sizes": [40, 80], "realizations": 2, "fit": {"h_grid": {"count": 6}}})");
  ASSERT_EQ(run("bench-de --config " + path("de.json") + " --out " + path("de_out.json") + " --csv " +
                path("de.csv")),
            0);
  const json de = load("de_out.json");
  ASSERT_EQ(de["cells"].size(), 2u);
  EXPECT_TRUE(de["cells"][1].contains("performance_ratio"));
  EXPECT_TRUE(fs::exists(path("de.csv")));

  mcde::write_file(path("out.json"),
                   R"({"datasets": [2], "dims": [2], "ks": [5, 30], "realizations": 2})");
  ASSERT_EQ(run("bench-outlier --config " + path("out.json") + " --out " + path("o.json")), 0);
  const json o = load("o.json");
  ASSERT_EQ(o["cells"].size(), 2u);
  EXPECT_EQ(o["cells"][0]["below_locality"], true);
  EXPECT_EQ(o["cells"][1]["below_locality"], false);
}
