#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "gpdistill/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "gpdistill_test_cli";

struct Result {
  int code;
  std::string err;
};

Result cli(const std::string& args) {
  fs::create_directories(kDir);
  const fs::path err = kDir / "stderr.txt";
  const std::string cmd = std::string("\"") + GPDISTILL_CLI_PATH + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string p(const std::string& name) { return (kDir / name).string(); }

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli("").code, 1);
  EXPECT_EQ(cli("frobnicate").code, 1);
  EXPECT_EQ(cli("fit --data").code, 1);
  EXPECT_EQ(cli("reproduce not-an-experiment --out-dir " + p("x")).code, 1);
  EXPECT_EQ(cli("fit --data " + p("missing.csv") + " --out " + p("m.json")).code, 1);
  EXPECT_EQ(cli("distill --method gpr-data --gammas linspace:1:2 --out " + p("m.json")).code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(cli("--help").code, 0); }

TEST(Cli, GenerateFitPredict) {
  ASSERT_EQ(cli("gen-data --kind regression --seed 4 --out " + p("reg.csv")).code, 0);
  EXPECT_EQ(gpdistill::read_dataset_csv(p("reg.csv")).size(), 10);
  ASSERT_EQ(cli("fit --method gpr --data " + p("reg.csv") + " --signal-variance 25 --noise 0.5 --out " + p("gpr.json")).code, 0);
  ASSERT_EQ(cli("predict --model " + p("gpr.json") + " --x linspace:0:10:21 --out " + p("pred.csv")).code, 0);
  EXPECT_EQ(gpdistill::read_csv(p("pred.csv")).rows.size(), 21u);

  ASSERT_EQ(cli("gen-data --kind classification --seed 4 --n 25 --out " + p("cls.csv")).code, 0);
  ASSERT_EQ(cli("distill --method gpc-data --data " + p("cls.csv") + " --steps 3 --out " + p("gpc.json")).code, 0);
  ASSERT_EQ(cli("predict --model " + p("gpc.json") + " --x=-1,0,2.5 --probability latent-mean --out " + p("pc.csv")).code, 0);
  const gpdistill::CsvTable t = gpdistill::read_csv(p("pc.csv"));
  EXPECT_EQ(t.rows.size(), 3u);
  EXPECT_NO_THROW(t.column("probability"));
}

TEST(Cli, DistillEveryMethod) {
  for (const char* m : {"gpr-data", "gpr-dist"})
    EXPECT_EQ(cli(std::string("distill --method ") + m + " --gammas linspace:0.1:1:10 --out " + p("d.json")).code, 0) << m;
  for (const char* m : {"gpc-data", "gpc-dist", "gpc-dist-scaled"})
    EXPECT_EQ(cli(std::string("distill --method ") + m + " --steps 4 --out " + p("d.json")).code, 0) << m;
}

TEST(Cli, CorruptModelIsUsageError) {
  std::ofstream(p("broken.json")) << "{\"format\": \"gpdistill-model\", ";
  EXPECT_EQ(cli("predict --model " + p("broken.json") + " --x 1 --out " + p("o.csv")).code, 1);
}

TEST(Cli, NumericalFailureExitsTwoWithDiagnostics) {
  std::ofstream(p("dup.csv")) << "x1,y\n1,0\n1,1\n1,0\n";
  const Result r = cli("fit --method gpr --data " + p("dup.csv") + " --noise 0 --out " + p("m.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("singular"), std::string::npos) << r.err;

  const Result g = cli("grid-search --data " + p("dup.csv") + " --objective gpr_nll --sigma-f 1,2 --length-scale 1 --noise 1e-20 --out " +
                       p("g.csv"));
  EXPECT_EQ(g.code, 2);
}

TEST(Cli, GridSearchWritesEveryCell) {
  ASSERT_EQ(cli("gen-data --kind regression --out " + p("r.csv")).code, 0);
  ASSERT_EQ(cli("grid-search --data " + p("r.csv") +
                " --objective gpr_nll --sigma-f logspace:0.1:10:3 --length-scale 0.5,1 --noise 0.1,1 --out " + p("g.csv"))
                .code,
            0);
  EXPECT_EQ(gpdistill::read_csv(p("g.csv")).rows.size(), 12u);
}

TEST(Cli, ReproduceWritesManifest) {
  const fs::path out = kDir / "repro";
  fs::remove_all(out);
  ASSERT_EQ(cli("reproduce cb-plots --out-dir " + out.string()).code, 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "density.csv"));
}
