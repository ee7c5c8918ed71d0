#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rqda/cli.hpp"

namespace rqda {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rqda_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kToy = std::string(RQDA_TEST_DATA_DIR) + "/toy8.csv";
const std::string kGolden = std::string(RQDA_TEST_DATA_DIR) + "/toy8_model.golden.json";

TEST_F(CliTest, SynthIsDeterministic) {
  for (const char* tag : {"a", "b"}) {
    const auto r = run({"synth", "--p", "5", "--n-train", "100", "--n-test", "100", "--seed", "7", "--out-train",
                        path(std::string("train_") + tag + ".csv"), "--out-test", path(std::string("test_") + tag + ".csv")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("train_a.csv")), slurp(path("train_b.csv")));
  EXPECT_EQ(slurp(path("test_a.csv")), slurp(path("test_b.csv")));
  EXPECT_NE(slurp(path("train_a.csv")), slurp(path("test_a.csv")));
}

TEST_F(CliTest, SynthRejectsBoundaryPrior) {
  const auto r = run({"synth", "--p", "3", "--pi1", "1.0", "--seed", "1", "--out-train", path("a.csv"), "--out-test",
                      path("b.csv")});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  EXPECT_NE(r.err.find("pi1"), std::string::npos);
}

TEST_F(CliTest, SynthRequiresSeed) {
  const auto r = run({"synth", "--p", "3"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST_F(CliTest, CubeMarginalIsCubeOfIdentity) {
  ASSERT_EQ(run({"synth", "--p", "4", "--seed", "3", "--marginal", "identity", "--out-train", path("id.csv"),
                 "--out-test", path("id_t.csv")}).code, 0);
  ASSERT_EQ(run({"synth", "--p", "4", "--seed", "3", "--marginal", "cube", "--out-train", path("cu.csv"),
                 "--out-test", path("cu_t.csv")}).code, 0);
  const auto id = csv::split_label(csv::read(path("id.csv")), "y");
  const auto cu = csv::split_label(csv::read(path("cu.csv")), "y");
  EXPECT_EQ(id.y, cu.y);
  for (Eigen::Index i = 0; i < id.X.rows(); ++i)
    for (Eigen::Index j = 0; j < id.X.cols(); ++j) {
      const double v = id.X(i, j);
      EXPECT_EQ(cu.X(i, j), v * v * v);
    }
}

TEST_F(CliTest, SynthLatentAndBayesRisk) {
  const auto r = run({"synth", "--p", "3", "--seed", "4", "--include-latent", "--bayes-risk", "--mc-samples", "1000",
                      "--out-train", path("a.csv"), "--out-test", path("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("bayes_risk "), std::string::npos);
  const auto t = csv::read(path("a.csv"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"x1", "x2", "x3", "y", "s1", "s2", "s3"}));
  EXPECT_EQ(t.values.col(0), t.values.col(4)); // identity marginals
  const auto risk = run({"bayes-risk", "--p", "3", "--seed", "4", "--samples", "1000"});
  ASSERT_EQ(risk.code, 0);
  EXPECT_EQ(risk.out, r.out.substr(r.out.find("bayes_risk ")));
}

TEST_F(CliTest, TrainMatchesGoldenModel) {
  const auto r = run({"train", "--data", kToy, "--d", "2", "--b1", "1", "--b2", "1", "--seed", "11", "--model-out",
                      path("model.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(path("model.json")), slurp(kGolden));
}

TEST_F(CliTest, TrainFixedAlphaAndReport) {
  const auto r = run({"train", "--data", kToy, "--d", "2", "--b1", "3", "--b2", "2", "--alpha", "0.5", "--seed", "2",
                      "--model-out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_model(path("m.json")).alpha, 0.5);
  EXPECT_NE(r.out.find("alpha 0.5 (fixed)"), std::string::npos);
  EXPECT_NE(r.out.find("block 2 candidate"), std::string::npos);
  EXPECT_EQ(r.err, ""); // 4 samples per class >= d + 1
}

TEST_F(CliTest, TrainWarnsOnSmallClasses) {
  std::ofstream(path("small.csv")) << "a,b,y\n1,2,0\n3,1,0\n0,5,1\n2,-1,1\n4,4,1\n";
  const auto r = run({"train", "--data", path("small.csv"), "--d", "2", "--b1", "1", "--b2", "1", "--seed", "1",
                      "--model-out", path("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning: block 0: class 0 has fewer than d+1 samples"), std::string::npos);
  EXPECT_EQ(r.err.find("class 1"), std::string::npos);
}

TEST_F(CliTest, TrainValidation) {
  std::ofstream(path("bad.csv")) << "a,b,y\n1,2,0\n3,4,2\n";
  auto r = run({"train", "--data", path("bad.csv"), "--d", "1", "--seed", "1", "--model-out", path("m.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("labels must be 0/1"), std::string::npos);

  std::ofstream(path("one.csv")) << "a,b,y\n1,2,1\n3,4,1\n";
  r = run({"train", "--data", path("one.csv"), "--d", "1", "--seed", "1", "--model-out", path("m.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("degenerate class distribution"), std::string::npos);

  r = run({"train", "--data", kToy, "--label-col", "label", "--d", "1", "--seed", "1", "--model-out", path("m.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("label column 'label' not found"), std::string::npos);

  r = run({"train", "--data", kToy, "--d", "1", "--model-out", path("m.json")});
  EXPECT_NE(r.code, 0); // --seed is mandatory
  for (const auto& e : {r.err}) EXPECT_EQ(std::count(e.begin(), e.end(), '\n'), 1);
}

TEST_F(CliTest, EvalOnTrainingDataMatchesBlockError) {
  ASSERT_EQ(run({"synth", "--p", "4", "--n-train", "200", "--seed", "5", "--scenario", "contrast", "--marginal", "mixed",
                 "--out-train", path("tr.csv"), "--out-test", path("te.csv")}).code, 0);
  const auto t = run({"train", "--data", path("tr.csv"), "--d", "2", "--b1", "1", "--b2", "1", "--alpha", "0.5",
                      "--seed", "9", "--model-out", path("m.json")});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto model = load_model(path("m.json"));
  const auto e = run({"eval", "--model", path("m.json"), "--data", path("tr.csv")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("test_error " + csv::format_double(model.blocks[0].training_error) + "\n"), std::string::npos)
      << e.out;
  EXPECT_NE(e.out.find("confusion 0 "), std::string::npos);
  EXPECT_NE(e.out.find("alpha 0.5"), std::string::npos);
}

TEST_F(CliTest, PredictIsRankInvariant) {
  ASSERT_EQ(run({"synth", "--p", "3", "--n-train", "150", "--n-test", "80", "--seed", "6", "--out-train", path("tr.csv"),
                 "--out-test", path("te.csv")}).code, 0);
  ASSERT_EQ(run({"train", "--data", path("tr.csv"), "--d", "2", "--b1", "10", "--b2", "3", "--seed", "1", "--model-out",
                 path("m.json")}).code, 0);
  // Same data pushed through exp() per column.
  auto exp_file = [&](const std::string& in, const std::string& out) {
    const auto t = csv::read(in);
    std::ofstream f(out);
    csv::write_header(f, t.header);
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.values.cols(); ++j) {
        const bool label = t.header[static_cast<std::size_t>(j)] == "y";
        f << (j ? "," : "") << csv::format_double(label ? t.values(i, j) : std::exp(t.values(i, j)));
      }
      f << '\n';
    }
  };
  exp_file(path("tr.csv"), path("tr_exp.csv"));
  exp_file(path("te.csv"), path("te_exp.csv"));
  ASSERT_EQ(run({"train", "--data", path("tr_exp.csv"), "--d", "2", "--b1", "10", "--b2", "3", "--seed", "1",
                 "--model-out", path("m_exp.json")}).code, 0);
  ASSERT_EQ(run({"predict", "--model", path("m.json"), "--data", path("te.csv"), "--out", path("p.csv")}).code, 0);
  ASSERT_EQ(run({"predict", "--model", path("m_exp.json"), "--data", path("te_exp.csv"), "--out", path("p_exp.csv")}).code, 0);
  const auto p = slurp(path("p.csv"));
  EXPECT_EQ(p.rfind("pred,vote\n", 0), 0u);
  EXPECT_EQ(p, slurp(path("p_exp.csv")));
}

TEST_F(CliTest, PredictErrors) {
  ASSERT_EQ(run({"train", "--data", kToy, "--d", "2", "--b1", "2", "--b2", "2", "--seed", "1", "--model-out",
                 path("m.json")}).code, 0);
  std::ofstream(path("empty.csv")).flush();
  auto r = run({"predict", "--model", path("m.json"), "--data", path("empty.csv"), "--out", path("p.csv")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("empty data file"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("p.csv")));

  std::ofstream(path("narrow.csv")) << "a,b\n1,2\n";
  r = run({"predict", "--model", path("m.json"), "--data", path("narrow.csv"), "--out", path("p.csv")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("feature dimension mismatch: model expects p=3"), std::string::npos);

  std::ofstream(path("holes.csv")) << "a,b,c\n1,,2\n";
  r = run({"eval", "--model", path("m.json"), "--data", path("holes.csv")});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const std::vector<std::string> args{"train", "--data", kToy, "--d", "1", "--b1", "4", "--b2", "3", "--seed", "5",
                                      "--model-out", path("m.json")};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto ea = run({"eval", "--model", path("m.json"), "--data", kToy});
  const auto eb = run({"eval", "--model", path("m.json"), "--data", kToy});
  EXPECT_EQ(ea.out, eb.out);
}

} // namespace
} // namespace rqda
