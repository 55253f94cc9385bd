#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nmqed/cli/commands.hpp"

namespace {

using namespace nmqed::cli;
using nmqed::FieldKind;
using nmqed::pi;

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (t.columns[i] == name) return i;
  }
  ADD_FAILURE() << "no column " << name;
  return 0;
}

const char* kRabi = R"(
[field]
kind = single_mode
g = 0.2
k = 1.0
[run]
horizon = 50
dt = 0.01
)";

// ---- config ----

TEST(Config, ParsesAllSections) {
  const auto cfg = parse(R"(
; comment
[field]
kind = cavity
lambda2 = 0.01
L = 2.0
epsilon = 1e-3
[atom]
omega_tilde = 1.3
[state]
x = 0.5
y_re = 0.2
[run]
horizon = 10
dt = 0.1
method = bromwich
[sweep]
omega_min = 0.2
omega_max = 3
points = 5
[oracle]
modes = 100
omega_max = 8
[output]
format = json
)");
  EXPECT_EQ(cfg.field.kind, FieldKind::Cavity);
  EXPECT_EQ(cfg.field.cavity_L, 2.0);
  EXPECT_EQ(cfg.field.epsilon, 1e-3);
  EXPECT_EQ(cfg.atom.omega_tilde, 1.3);
  EXPECT_EQ(cfg.initial.x, 0.5);
  EXPECT_EQ(cfg.initial.y, nmqed::cplx(0.2, 0.0));
  EXPECT_EQ(cfg.method, Method::Bromwich);
  EXPECT_TRUE(cfg.sweep.active);
  EXPECT_EQ(cfg.sweep.points, 5);
  EXPECT_EQ(cfg.oracle.modes, 100);
  EXPECT_EQ(cfg.format, OutputFormat::Json);
  EXPECT_TRUE(cfg.notices.empty());
}

TEST(Config, DefaultsToExcitedAtomAndCsv) {
  const auto cfg = parse(kRabi);
  EXPECT_EQ(cfg.atom.omega_tilde, 1.0);
  EXPECT_EQ(cfg.initial.excited(), 1.0);
  EXPECT_EQ(cfg.method, Method::Volterra);
  EXPECT_EQ(cfg.format, OutputFormat::Csv);
  EXPECT_FALSE(cfg.sweep.active);
}

TEST(Config, RejectsMistakes) {
  const char* bad[] = {
      "[field]\nkind = laser\n",
      "[field]\ng = 1\nk = 1\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\nlambda2 = 0.1\n",
      "[field]\nkind = single_mode\ng = 1\nk = abc\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\ncoupling = 2\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\n[extra]\na = 1\n",
      "[field]\nkind = free_space\nlambda2 = 0.01\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\n[run]\nmethod = euler\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\n[sweep]\nomega_min = 2\nomega_max = 1\npoints = 3\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\n[state]\nx = 0.5\ny_re = 0.6\n",
      "[field]\nkind = single_mode\ng = 1\nk = 1\n[output]\nformat = xml\n",
      "[field\nkind = single_mode\n",
  };
  for (const char* text : bad) EXPECT_THROW(parse(text), nmqed::ConfigError) << text;
  EXPECT_THROW(load_config("/nonexistent/run.ini"), nmqed::ConfigError);
}

TEST(Config, NudgesCavityBranchPoints) {
  const auto cfg = parse("[field]\nkind = cavity\nlambda2 = 0.01\nL = 3.141592653589793\nepsilon = 1e-3\n"
                         "[atom]\nomega_tilde = 2\n[sweep]\nomega_min = 0.5\nomega_max = 3\npoints = 6\n");
  EXPECT_EQ(cfg.atom.omega_tilde, 2.0 + 1e-9);
  ASSERT_EQ(cfg.notices.size(), 1u);
  std::vector<std::string> notes;
  const auto w = sweep_samples(cfg, notes);
  ASSERT_EQ(w.size(), 6u);
  EXPECT_EQ(w[0], 0.5);
  EXPECT_EQ(w[1], 1.0 + 1e-9);
  EXPECT_EQ(w[3], 2.0 + 1e-9);
  EXPECT_EQ(w[5], 3.0 + 1e-9);
  EXPECT_EQ(notes.size(), 3u);
}

TEST(Config, TimeGridRequiredWhereUsed) {
  const auto cfg = parse("[field]\nkind = single_mode\ng = 1\nk = 1\n");
  EXPECT_THROW(cmd_evolve(cfg), nmqed::ConfigError);
  EXPECT_THROW(cmd_scan(cfg), nmqed::ConfigError);
}

// ---- output ----

TEST(Output, CsvUsesFixedScientificFormat) {
  Table t{"demo", {"a", "b"}, {{1.0, -0.5}, {std::nan(""), 12345.678}}};
  std::ostringstream out;
  write_csv(out, t);
  EXPECT_EQ(out.str(), "a,b\n1.000000000000e+00,-5.000000000000e-01\nnan,1.234567800000e+04\n");
}

TEST(Output, JsonKeepsColumnOrderAndNullsNonFinite) {
  Table t{"demo", {"z", "a"}, {{1.5, std::nan("")}}};
  std::ostringstream out;
  write_json(out, t);
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["command"], "demo");
  EXPECT_EQ(doc["columns"][0], "z");
  EXPECT_EQ(doc["rows"][0][0], 1.5);
  EXPECT_TRUE(doc["rows"][0][1].is_null());
}

// ---- evolve ----

TEST(Evolve, DecoupledAtomKeepsUnitModulus) {
  const auto res = cmd_evolve(parse("[field]\nkind = free_space\nlambda2 = 0\nepsilon = 1e-3\n"
                                    "[run]\nhorizon = 20\ndt = 0.05\n"));
  const auto& t = res.table;
  ASSERT_EQ(t.rows.size(), 401u);
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    EXPECT_EQ(cells[column(t, "abs_u")], "1.000000000000e+00");
    EXPECT_EQ(cells[column(t, "p_emit")], "0.000000000000e+00");
  }
}

TEST(Evolve, ResonantModeFollowsCosineSquared) {
  const auto res = cmd_evolve(parse(kRabi));
  const auto& t = res.table;
  for (const auto& row : t.rows) {
    const double time = row[column(t, "t")];
    const double c = std::cos(0.2 * time);
    EXPECT_NEAR(row[column(t, "abs_u")] * row[column(t, "abs_u")], c * c, 1e-6);
  }
}

TEST(Evolve, FreeSpaceRateSettlesToGoldenRule) {
  const auto res = cmd_evolve(parse("[field]\nkind = free_space\nlambda2 = 0.01\nepsilon = 1e-4\n"
                                    "[run]\nhorizon = 300\ndt = 0.05\n"));
  const auto& t = res.table;
  const double golden = 0.01 / pi;
  for (std::size_t n = t.rows.size() / 2; n < t.rows.size(); ++n) {
    EXPECT_NEAR(t.rows[n][column(t, "gamma")], golden, 0.05 * golden);
  }
}

TEST(Evolve, BromwichMethodAgrees) {
  auto cfg = parse(kRabi);
  const auto volterra = cmd_evolve(cfg);
  cfg.method = Method::Bromwich;
  const auto bromwich = cmd_evolve(cfg);
  ASSERT_EQ(volterra.table.rows.size(), bromwich.table.rows.size());
  for (std::size_t n = 0; n < volterra.table.rows.size(); ++n) {
    EXPECT_NEAR(volterra.table.rows[n][1], bromwich.table.rows[n][1], 1e-8);
    EXPECT_NEAR(volterra.table.rows[n][2], bromwich.table.rows[n][2], 1e-8);
  }
}

// ---- scan ----

TEST(Scan, NoDissipationOutsideTheBand) {
  const auto res = cmd_scan(parse("[field]\nkind = band\nlambda2 = 0.01\nomega1 = 0.5\nomega2 = 0.8\n"
                                  "[sweep]\nomega_min = 0.9\nomega_max = 2\npoints = 12\n"));
  EXPECT_EQ(res.exit_code, kOk);
  for (const auto& row : res.table.rows) {
    EXPECT_LT(row[column(res.table, "gamma")], 1e-10);
    EXPECT_TRUE(std::isnan(row[column(res.table, "delta_omega")]));
  }
}

TEST(Scan, FreeSpaceShiftIsZero) {
  const auto res = cmd_scan(parse("[field]\nkind = free_space\nlambda2 = 0.01\nepsilon = 1e-3\n"
                                  "[sweep]\nomega_min = 0.5\nomega_max = 2\npoints = 7\n"));
  for (const auto& row : res.table.rows) EXPECT_EQ(row[column(res.table, "delta_omega")], 0.0);
}

TEST(Scan, OutputIndependentOfThreadCount) {
  const auto cfg = parse("[field]\nkind = cavity\nlambda2 = 0.01\nL = 3.141592653589793\nepsilon = 5e-3\n"
                         "[sweep]\nomega_min = 0.2\nomega_max = 4.8\npoints = 47\n");
  std::ostringstream one, many;
  write_csv(one, cmd_scan(cfg, 1).table);
  write_csv(many, cmd_scan(cfg, 6).table);
  EXPECT_EQ(one.str(), many.str());
}

TEST(Scan, BranchPointSampleIsFlagged) {
  const auto res = cmd_scan(parse("[field]\nkind = band\nlambda2 = 0.01\nomega1 = 0.5\nomega2 = 0.8\n"
                                  "[sweep]\nomega_min = 0.3\nomega_max = 0.7\npoints = 3\n"));
  EXPECT_EQ(res.exit_code, kPartialSweep);
  EXPECT_EQ(res.table.rows[1][column(res.table, "converged")], 0.0);
  EXPECT_TRUE(std::isnan(res.table.rows[1][column(res.table, "gamma")]));
  EXPECT_EQ(res.table.rows[0][column(res.table, "converged")], 1.0);
}

// ---- poles and oracle ----

TEST(Poles, SingleRowReport) {
  const auto res = cmd_poles(parse("[field]\nkind = free_space\nlambda2 = 0.01\nepsilon = 1e-4\n"));
  ASSERT_EQ(res.table.rows.size(), 1u);
  EXPECT_NEAR(res.table.rows[0][column(res.table, "gamma")], 0.003130892113975496, 1e-13);
}

TEST(OracleCheck, SingleModePassesTightly) {
  const auto res = cmd_oracle_check(parse(kRabi));
  EXPECT_EQ(res.exit_code, kOk);
  EXPECT_LT(res.table.rows[0][column(res.table, "max_dev_volterra")], 1e-8);
  EXPECT_LT(res.table.rows[0][column(res.table, "max_dev_bromwich")], 1e-8);
}

TEST(OracleCheck, OneModeDiscretizationReportsContinuumGap) {
  const auto res = cmd_oracle_check(parse("[field]\nkind = free_space\nlambda2 = 0.01\nepsilon = 1e-3\n"
                                          "[run]\nhorizon = 100\ndt = 0.05\n[oracle]\nmodes = 1\n"));
  EXPECT_EQ(res.exit_code, kOk);
  EXPECT_GT(res.table.rows[0][column(res.table, "continuum_gap")], 0.1);
}

// ---- the executable ----

int run_tool(const std::string& args) {
  const std::string cmd = std::string(NMQED_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("nmqed_test_" + name);
  std::ofstream(path) << text;
  return path;
}

TEST(Tool, ExitCodes) {
  const auto good = write_temp("good.ini", kRabi);
  const auto bad = write_temp("bad.ini", "[field]\nkind = laser\n");
  const auto edge = write_temp("edge.ini", "[field]\nkind = band\nlambda2 = 0.01\nomega1 = 0.5\nomega2 = 0.8\n"
                                           "[sweep]\nomega_min = 0.5\nomega_max = 0.6\npoints = 2\n");
  const auto mismatch = write_temp("mismatch.ini", "[field]\nkind = free_space\nlambda2 = 0.01\nepsilon = 1e-3\n"
                                                   "[run]\nhorizon = 20\ndt = 2\n[oracle]\nmodes = 50\n");
  const auto fail = write_temp("fail.ini", "[field]\nkind = band\nlambda2 = 0.01\nomega1 = 0.5\nomega2 = 0.8\n"
                                           "[atom]\nomega_tilde = 0.5\n");
  EXPECT_EQ(run_tool("evolve --config " + good.string()), kOk);
  EXPECT_EQ(run_tool("poles --config " + good.string() + " --format json"), kOk);
  EXPECT_EQ(run_tool("evolve"), kConfigError);
  EXPECT_EQ(run_tool("evolve --config " + bad.string()), kConfigError);
  EXPECT_EQ(run_tool("evolve --config " + good.string() + " --format xml"), kConfigError);
  EXPECT_EQ(run_tool("poles --config " + fail.string()), kSolverFailure);
  EXPECT_EQ(run_tool("scan --config " + edge.string()), kPartialSweep);
  EXPECT_EQ(run_tool("oracle-check --config " + mismatch.string()), kOracleMismatch);
}

TEST(Tool, ByteDeterministicOutput) {
  const auto good = write_temp("det.ini", kRabi);
  const auto a = std::filesystem::temp_directory_path() / "nmqed_test_a.csv";
  const auto b = std::filesystem::temp_directory_path() / "nmqed_test_b.csv";
  ASSERT_EQ(run_tool("evolve --config " + good.string() + " --out " + a.string()), kOk);
  ASSERT_EQ(run_tool("evolve --config " + good.string() + " --out " + b.string()), kOk);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string first = slurp(a);
  EXPECT_FALSE(first.empty());
  EXPECT_EQ(first, slurp(b));
  EXPECT_EQ(first.substr(0, first.find('\n')), "t,re_u,im_u,abs_u,p_emit,x,re_y,im_y,gamma,omega");
}

} // namespace
