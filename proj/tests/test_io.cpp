#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlcl/io.hpp"

using namespace nlcl;

namespace {

json shock_config() {
  return json::parse(R"({
    "grid": {"x_min": -1.0, "x_max": 1.0, "h": 0.01},
    "kernel": "linear",
    "weights": "exact",
    "velocity": "greenshields",
    "lambda": 0.25,
    "epsilon": 0.05,
    "initial_data": "riemann_shock",
    "T": 0.1
  })");
}

std::string reason(const json& j) {
  try {
    parse_run_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RunConfigParse, ValidShockConfig) {
  const auto rc = parse_run_config(shock_config());
  EXPECT_EQ(rc.grid.num_cells, 200u);
  EXPECT_EQ(rc.kernel.family(), KernelFamily::Linear);
  EXPECT_EQ(rc.weight_family, WeightFamily::Exact);
  EXPECT_EQ(rc.snapshots, (std::vector<double>{0.0, 0.1}));
  EXPECT_TRUE(rc.diagnostics.enabled);
  EXPECT_EQ(rc.cfl_variant, CflVariant::Main);
  EXPECT_EQ(rc.source["output_dir"], "out");
}

TEST(RunConfigParse, MissingKernel) {
  auto j = shock_config();
  j.erase("kernel");
  EXPECT_NE(reason(j).find("missing-field:kernel"), std::string::npos);
}

TEST(RunConfigParse, ReportsEveryProblem) {
  auto j = shock_config();
  j.erase("kernel");
  j["lambda"] = 0.6;
  j["bogus"] = 1;
  j["grid"]["h"] = 0.3;
  const auto r = reason(j);
  EXPECT_NE(r.find("missing-field:kernel"), std::string::npos) << r;
  EXPECT_NE(r.find("cfl-violation"), std::string::npos) << r;
  EXPECT_NE(r.find("unknown-key:bogus"), std::string::npos) << r;
  EXPECT_NE(r.find("grid-divisibility"), std::string::npos) << r;
}

TEST(RunConfigParse, CflVariantKey) {
  auto j = shock_config();
  j["lambda"] = 0.45;
  EXPECT_NE(reason(j).find("cfl-violation"), std::string::npos);
  j["cfl_variant"] = "max_principle";
  EXPECT_EQ(reason(j), "");
  j["cfl_variant"] = "sideways";
  EXPECT_NE(reason(j).find("unknown-cfl-variant:sideways"), std::string::npos);
}

TEST(RunConfigParse, ObjectForms) {
  auto j = shock_config();
  j["weights"] = {{"family", "geometric"}, {"gamma0", 0.3}};
  j["kernel"] = "exponential";
  j["initial_data"] = {{"kind", "tv_increase"}, {"delta", 0.2}};
  j["diagnostics"] = {{"enabled", false}, {"c", 0.25}};
  const auto rc = parse_run_config(j);
  EXPECT_EQ(rc.weight_family, WeightFamily::Geometric);
  EXPECT_EQ(*rc.gamma0, 0.3);
  EXPECT_FALSE(rc.diagnostics.enabled);
  EXPECT_EQ(rc.diagnostics.c, 0.25);
  EXPECT_EQ(rc.initial_data.kind, InitialDataSpec::Kind::TvIncrease);
}

TEST(RunConfigParse, OutOfRangeData) {
  auto j = shock_config();
  j["initial_data"] = {{"kind", "constant"}, {"value", 1.5}};
  EXPECT_NE(reason(j).find("data-out-of-range"), std::string::npos);
}

TEST(RunConfigParse, CustomKernelTableRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "nlcl_io_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "stairs.csv");
    out << "z_left,z_right,value\n-1,-0.5,0.5\n-0.5,0,1.5\n";
  }
  auto j = shock_config();
  j["kernel"] = {{"family", "custom"}, {"table", "stairs.csv"}};
  const auto rc = parse_run_config(j, dir);
  EXPECT_EQ(rc.kernel.family(), KernelFamily::CustomTable);
  j["kernel"]["table"] = "missing.csv";
  try {
    parse_run_config(j, dir);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("unreadable-file"), std::string::npos);
  }
}

TEST(StudyConfigParse, DefaultsAndOverrides) {
  std::vector<WeightFamily> fams;
  const auto s = parse_study_spec(
      json::parse(R"({"kernel": "linear", "path": "eps_equals_sqrt_h", "h_list": [0.004, 0.002],
                     "velocity": "clipped_greenshields", "families": ["exact", "riemann"]})"),
      ".", &fams);
  EXPECT_EQ(s.path, LimitPath::EpsEqualsSqrtH);
  EXPECT_EQ(s.h_list.size(), 2u);
  EXPECT_EQ(fams.size(), 2u);
  EXPECT_THROW(parse_study_spec(json::parse(R"({"families": ["exact"]})"), "."),
               ValidationError);
  EXPECT_THROW(parse_study_spec(json::parse(R"({"h_list": [0.001, 0.002]})"), "."),
               ValidationError);
}

TEST(Csv, StudyShape) {
  StudyResult r;
  r.rows.resize(5);
  std::ostringstream os;
  write_study_csv(os, r, false);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "h,epsilon,tau,l1_error,wall_time_s");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Csv, EntropyTableShape) {
  EntropyTable t;
  t.config.kernels = {Kernel::linear()};
  t.config.data = {InitialDataSpec::riemann_shock(), InitialDataSpec::bell_shaped()};
  t.config.epsilons = {0.2, 0.02};
  t.cells.resize(4);
  std::ostringstream os;
  write_entropy_table_csv(os, t);
  EXPECT_EQ(os.str(),
            "epsilon,linear_riemann_shock_rho,linear_riemann_shock_W,linear_bell_shaped_rho,"
            "linear_bell_shaped_W\n0.20000000000000001,0,0,0,0\n0.02,0,0,0,0\n");
}

TEST(Csv, SnapshotRoundTripAndDiagnose) {
  const auto g = GridSpec::make(0.0, 1.0, 0.25);
  SolutionField a{0, 0.0, {0.0, 0.0, 0.7, 0.7}, {0.0, 0.35, 0.7, 0.7}};
  SolutionField b{1, 0.1, {0.0, 0.1, 0.6, 0.7}, {0.05, 0.35, 0.65, 0.7}};
  std::ostringstream os;
  write_snapshots_csv(os, g, {a, b});
  std::istringstream in(os.str());
  const auto frames = read_snapshots_csv(in);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1].rho, b.rho);
  EXPECT_EQ(frames[0].x[1], 0.375);
  const auto d = diagnose_frames(frames, VelocityModel::greenshields(), 0.5);
  EXPECT_NEAR(d[0].tv_rho, 0.7, 1e-15);
  EXPECT_NEAR(d[1].tv_time_increment, 0.05 + 0.05, 1e-15);
  EXPECT_NEAR(d[1].mass, 1.4 * 0.25, 1e-15);

  std::istringstream tiny("t,x_center,rho,W\n0,0.1,0.2,1.4821969375237396e-323\n");
  EXPECT_EQ(read_snapshots_csv(tiny)[0].w[0], 1.4821969375237396e-323);

  std::istringstream bad("t,x_center,rho,W\n0,0.1,0.2\n");
  EXPECT_THROW(read_snapshots_csv(bad), ValidationError);
}

TEST(Json, ReportAndFormatting) {
  const auto q = exact_weights(Kernel::constant(), 1.0, 0.25);
  const auto j = report_json(verify_weight_conditions(q, 0.5), 0.5, q);
  EXPECT_EQ(j["convex"], false);
  EXPECT_EQ(j["K"], 3);
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
}
