#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frap/io.hpp"
#include "support.hpp"

namespace frap {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(FRAP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("frap_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  fs::path dir;
  const std::string table3 = testing::data_path("table3.json");
};

TEST_F(Cli, ValidateWorkedExample) {
  const auto r = cli("validate " + table3);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "valid\n");
}

TEST_F(Cli, ValidateReportsViolations) {
  auto doc = to_json(testing::table3().system);
  doc["tasks"][1]["priority"] = 1;  // collides with t1 on the same processor
  EXPECT_EQ(cli("validate " + write("bad.json", doc.dump())).code, 1);
}

TEST_F(Cli, MalformedInputIsParseError) {
  EXPECT_EQ(cli("validate " + write("broken.json", "{\"processors\": ")).code, 2);
  EXPECT_EQ(cli("validate " + path("missing.json")).code, 2);
  EXPECT_EQ(cli("analyze " + write("extra.json", R"({"processors":1,"time_unit":"ns","tasks":[],"resources":[],"x":0})")).code, 2);
}

TEST_F(Cli, AnalyzeWorkedExample) {
  const auto r = cli("analyze --protocol frap " + table3);
  ASSERT_EQ(r.code, 0);
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report["verdict"].get<bool>());
  for (const auto& t : report["tasks"]) {
    if (t["id"] != "t2") continue;
    EXPECT_EQ(t["blocking"], 36000);
    EXPECT_EQ(t["spin_delay"], 43000);
    EXPECT_EQ(t["response"], 157000);
  }
}

TEST_F(Cli, AnalyzeWithPresetsWritesFile) {
  for (const char* p : {"msrp", "pwlp"}) {
    const auto out = path(std::string(p) + ".json");
    ASSERT_EQ(cli(std::string("analyze --protocol ") + p + " --out " + out + " " + table3).code, 0);
    std::ifstream in(out);
    const auto report = nlohmann::json::parse(in);
    EXPECT_EQ(report["protocol"], p);
    EXPECT_EQ(report["tasks"].size(), 6u);
  }
  EXPECT_NE(cli("analyze --protocol mrsp " + table3).code, 0);
}

TEST_F(Cli, AssignEmbedsValidPriorities) {
  const auto out = path("assigned.json");
  ASSERT_EQ(cli("assign --out " + out + " " + table3).code, 0);
  const auto file = load_system(out);
  ASSERT_TRUE(file.spin_priorities.has_value());
  EXPECT_TRUE(validate(file.system, *file.spin_priorities).empty());
  EXPECT_EQ(cli("validate " + out).code, 0);
  EXPECT_EQ(cli("assign --mode exact " + table3).code, 0);
}

TEST_F(Cli, GenerateIsDeterministic) {
  const auto a = cli("generate --seed 5 -M 4 -N 3");
  const auto b = cli("generate --seed 5 -M 4 -N 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto doc = nlohmann::json::parse(a.out);
  EXPECT_EQ(doc["tasks"].size(), 12u);
  EXPECT_EQ(cli("validate " + write("gen.json", a.out)).code, 0);
  EXPECT_EQ(cli("generate --cs-lo 50 --cs-hi 10").code, 1);
}

TEST_F(Cli, ExperimentCsv) {
  const auto r = cli("experiment --vary N --values 2,3 --systems 3 -M 4 --seed 3");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param,value,protocol,total,schedulable,ratio,mean_ms,p95_ms");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(cli("experiment --vary N --values , --systems 3").code, 1);
  EXPECT_EQ(cli("experiment --vary N --values 40").code, 1);
}

TEST_F(Cli, OracleCheck) {
  const auto dump = path("counterexample.txt");
  const auto ok = cli("oracle-check --count 200 --max-items 12 --dump " + dump);
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "200/200 equal\n");
  EXPECT_FALSE(fs::exists(dump));
  EXPECT_EQ(cli("oracle-check --count 50 --max-items 0").out, "50/50 equal\n");
  EXPECT_EQ(cli("oracle-check --count 20 --inject-fault --dump " + dump).code, 1);
  EXPECT_TRUE(fs::exists(dump));
}

}  // namespace
}  // namespace frap
