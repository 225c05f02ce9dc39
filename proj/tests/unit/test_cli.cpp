#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "report.hpp"
#include "scenario.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace reebflow::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("reebflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, EightPointExitCodes) {
  EXPECT_EQ(run({"check", "eight-point", "--model", "hyperbolic_g", "--out", path("g.json")}), kPass);
  EXPECT_EQ(run({"check", "eight-point", "--model", "counterexample", "--out", path("f.json")}), kCheckFailed);
  const Json f = Json::parse(slurp(path("f.json")));
  EXPECT_EQ(f["verdict"], "fail");
  EXPECT_NEAR(f["residual"].get<double>(), 1.574e-4, 1e-6);
  EXPECT_EQ(Json::parse(slurp(path("g.json")))["verdict"], "pass");
}

TEST_F(CliTest, FourPointRowsAndCsv) {
  ASSERT_EQ(run({"check", "four-point", "--grid", "3", "--out", path("r.json")}), kPass);
  const Json r = Json::parse(slurp(path("r.json")));
  EXPECT_EQ(r["witnesses"].size(), 27u);
  EXPECT_EQ(r["k_depths"].size(), 27u);
  ASSERT_EQ(run({"check", "four-point", "--grid", "3", "--format", "csv", "--out", path("r.csv")}), kPass);
  std::ifstream in(path("r.csv"));
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 28);
}

TEST_F(CliTest, RandomGridRecordsSeedAndIsDeterministic) {
  const std::vector<std::string> base = {"check", "four-point", "--model", "counterexample", "--random", "20",
                                         "--seed", "7"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.json")});
  b.insert(b.end(), {"--out", path("b.json")});
  ASSERT_EQ(run(a), kPass);
  ASSERT_EQ(run(b), kPass);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(Json::parse(slurp(path("a.json")))["seed"], 7);
}

TEST_F(CliTest, ZeroToleranceIsACheckFailure) {
  EXPECT_EQ(run({"check", "four-point", "--grid", "2", "--tol", "0", "--kmax", "40", "--out", path("z.json")}),
            kCheckFailed);
}

TEST_F(CliTest, Section6Table) {
  ASSERT_EQ(run({"reproduce", "section6", "--out", path("s.json")}), kPass);
  const Json s = Json::parse(slurp(path("s.json")));
  ASSERT_EQ(s["rows"].size(), 8u);
  for (const auto& row : s["rows"]) {
    EXPECT_TRUE(row.contains("computed"));
    EXPECT_TRUE(row.contains("closed_form"));
  }
}

TEST_F(CliTest, SqrtSubcommand) {
  EXPECT_EQ(run({"sqrt", "--pair", "cubic", "--out", path("q.json")}), kPass);
  EXPECT_EQ(run({"sqrt", "--pair", "translation", "--grid", "5", "--out", path("t.json")}), kPass);
}

TEST_F(CliTest, FlowEvalRefusesCounterexample) {
  EXPECT_EQ(run({"flow", "eval", "--model", "counterexample", "--out", path("x.json")}), kCheckFailed);
}

TEST_F(CliTest, FlowEvalHyperbolic) {
  ASSERT_EQ(run({"flow", "eval", "--at", "0.5,1,1", "--out", path("e.json")}), kPass);
  const Json e = Json::parse(slurp(path("e.json")));
  ASSERT_FALSE(e.empty());
}

TEST_F(CliTest, PlotsAreWellFormedSvg) {
  for (const std::string kind : {"leaves", "orbit", "figure1"}) {
    const std::string out = path(kind + ".svg");
    ASSERT_EQ(run({"plot", kind, "--svg", out}), kPass) << kind;
    const std::string svg = slurp(out);
    EXPECT_EQ(svg.rfind("<svg", 0) == 0 || svg.rfind("<?xml", 0) == 0, true) << kind;
    EXPECT_NE(svg.find("</svg>"), std::string::npos) << kind;
  }
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"check", "four-point", "--model", "bogus"}), kUsage);
  EXPECT_EQ(run({"check"}), kUsage);
  EXPECT_EQ(run({"nonsense"}), kUsage);
  EXPECT_EQ(run({"check", "four-point", "--format", "xml"}), kUsage);
  EXPECT_EQ(run({"check", "four-point", "--kmax", "0"}), kUsage);
  EXPECT_EQ(run({"check", "eight-point", "--scenario", path("missing.json")}), kUsage);
  EXPECT_EQ(run({"plot", "orbit", "--point", "1,x"}), kUsage);
  EXPECT_EQ(run({"check", "eight-point", "--out", (dir_ / "no" / "such" / "dir.json").string()}), kUsage);
}

TEST_F(CliTest, ScenarioFile) {
  write("ok.json", R"({"model": "counterexample", "params": {"a": 1.0, "b": 0.7499, "c": 1.2, "d": 0.7}})");
  EXPECT_EQ(run({"check", "eight-point", "--scenario", path("ok.json"), "--out", path("o.json")}), kCheckFailed);
  write("unknown.json", R"({"model": "counterexample", "colour": 3})");
  EXPECT_EQ(run({"check", "eight-point", "--scenario", path("unknown.json")}), kUsage);
  write("bad.json", R"({"model": "counterexample", "params": {"c": 0.9}})");
  EXPECT_EQ(run({"check", "eight-point", "--scenario", path("bad.json")}), kUsage);
  write("broken.json", "{ not json");
  EXPECT_EQ(run({"check", "eight-point", "--scenario", path("broken.json")}), kUsage);
}

TEST(Report, EmptyIsEmptyArray) {
  EXPECT_EQ(render(Report{}, Format::json), "[]\n");
  const Json parsed = Json::parse(render(Report{}, Format::json));
  EXPECT_TRUE(parsed.is_array());
  EXPECT_TRUE(parsed.empty());
}

TEST(Report, SortedKeysAndFullPrecision) {
  Report r;
  r.header = Json{{"zeta", 1}, {"alpha", 0.1}};
  const std::string s = render(r, Format::json);
  EXPECT_LT(s.find("alpha"), s.find("zeta"));
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
}

TEST(Report, NonFiniteBecomesNull) { EXPECT_EQ(to_json(Json(std::numeric_limits<double>::infinity())), "null\n"); }

TEST(Report, CsvFlattensAndUnionsColumns) {
  Report r;
  r.rows = {Json{{"a", 1}, {"n", {{"x", 2}}}}, Json{{"b", 3}}};
  const std::string csv = render(r, Format::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "a,b,n.x");
  EXPECT_THROW(parse_format("xml"), std::invalid_argument);
}

TEST(Scenario, RoundTrip) {
  Scenario s;
  s.model = "counterexample";
  s.params.c = 1.3;
  const Scenario back = scenario_from_json(s.to_json());
  EXPECT_EQ(back.model, "counterexample");
  EXPECT_DOUBLE_EQ(back.params.c, 1.3);
}

TEST(Svg, CanvasProducesClosedDocument) {
  SvgCanvas c(0, 1, 0, 1, 100, 100);
  c.polyline({{0, 0}, {1, 1}}, "black", 1.0, true, true);
  c.circle(0.5, 0.5, 3, "red");
  c.text(0.1, 0.9, "a < b & c");
  const std::string s = c.str();
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_EQ(s.find("a < b"), std::string::npos);
}
