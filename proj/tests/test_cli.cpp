#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clachar/cli.hpp"
#include "reference_rows.hpp"

using namespace clachar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// Fresh scratch directory per test.
fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "clachar_cli_test" / info->name();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

fs::path params_dir() { return fs::path(CLACHAR_SOURCE_DIR) / "params"; }

}  // namespace

TEST(CntInfo, Defaults) {
  const auto r = invoke({"cnt-info"});
  EXPECT_EQ(r.code, 0) << r.err;
  const double d = 0.142 * std::sqrt(3.0) / M_PI * 17.0;
  const double vth = std::sqrt(3.0) / 3.0 * 0.249 * 3.033 / d;
  char buf[64];
  std::snprintf(buf, sizeof buf, "CNFET V_th (V)         %.3f\n", vth);
  EXPECT_NE(r.out.find("Chirality              (17,0)\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Diameter (nm)          1.331\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Chiral angle (deg)     0.000\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Structure              Zigzag\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Pitch (nm)             3.834\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(buf), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("warning"), std::string::npos);
}

TEST(CntInfo, MetallicTubeWarns) {
  const auto r = invoke({"cnt-info", "--n", "5", "--m", "5"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Chiral angle (deg)     30.000\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("warning: (5,5) is Metallic, not usable as FET channel"), std::string::npos) << r.out;
}

TEST(CntInfo, SingleTubeHasNoPitch) {
  const auto r = invoke({"cnt-info", "--tubes", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  EXPECT_EQ(invoke({"cnt-info", "--n", "0", "--m", "0"}).code, 1);
  EXPECT_EQ(invoke({"cnt-info", "--n", "x"}).code, 1);
}

TEST(Run, SmallSweepWritesCsvAndTable) {
  const auto dir = scratch();
  const auto csv = dir / "out.csv";
  const auto r = invoke({"run", "--bits", "8", "--style", "np,domino", "--tech", "si,cnt", "--vectors", "4", "--out",
                      csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(slurp(csv));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].style, Style::Np);
  EXPECT_EQ(rows[2].style, Style::Domino);
  EXPECT_NE(r.out.find("NP dynamic CLA, 8-bit\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Domino CLA, 8-bit\n"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("Hybrid"), std::string::npos);
}

TEST(Run, CsvToStdout) {
  const auto r = invoke({"run", "--bits", "8", "--style", "np", "--tech", "cnt", "--vectors", "0", "--out", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind(std::string(kCsvHeader) + "\n8,np,cnt,", 0), 0u) << r.out;
}

TEST(Run, CheckTrendsNeedsComparisonCells) {
  const auto dir = scratch();
  const auto r = invoke({"run", "--bits", "8", "--style", "np", "--tech", "hybrid", "--check-trends", "--out",
                      (dir / "x.csv").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("8/np/si"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("8/np/cnt"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.find("8/np/hybrid"), std::string::npos) << r.err;
}

TEST(Run, FullDefaultSweep) {
  const auto dir = scratch();
  const auto csv = dir / "default.csv";
  const auto r = invoke({"run", "--check-trends", "--out", csv.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("trend check: all orderings hold"), std::string::npos);
  const auto rows = parse_csv(slurp(csv));
  ASSERT_EQ(rows.size(), 24u);
  for (const auto& row : rows) {
    const double product = row.avg_power_w * row.tpd_s;
    EXPECT_LT(std::abs(row.pdp_j - product) / product, 2e-5) << row.bits;
  }
}

TEST(Run, InvalidStyle) {
  const auto r = invoke({"run", "--style", "nora"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("unknown style 'nora'"), std::string::npos) << r.err;
  EXPECT_EQ(invoke({"run", "--bits", "12"}).code, 1);
  EXPECT_EQ(invoke({"run", "--vdd", "-1"}).code, 1);
  EXPECT_EQ(invoke({"run", "--frobnicate"}).code, 1);
  EXPECT_EQ(invoke({}).code, 1);
}

TEST(Export, RoundTripsAndUsesHybridKinds) {
  const auto dir = scratch();
  const auto file = dir / "np8.net";
  const auto r = invoke({"run", "--bits", "8", "--style", "np", "--tech", "hybrid", "--export-netlist", file.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(file);
  const auto nl = parse_netlist(text);
  const auto tech = TechnologyConfig::defaults(Flavor::Hybrid);
  EXPECT_EQ(nl, map_np_dynamic(build_cla(8), tech));
  EXPECT_EQ(text.find("SiP"), std::string::npos);
  EXPECT_EQ(text.find("CntN"), std::string::npos);
  EXPECT_NE(text.find("CntP"), std::string::npos);
}

TEST(Export, NeedsSingleCell) {
  const auto r = invoke({"run", "--bits", "8,16", "--style", "np", "--tech", "si", "--export-netlist", "-"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("exactly one"), std::string::npos);
}

TEST(Config, CommandLineBeatsFileBeatsDefaults) {
  const auto file = cli::parse_config_text("# sweep\nbits = 16\nvdd = 0.8\nclock_hz = 2e9\n", "test.cfg");
  const auto rc = cli::merge_run_config(file, {{"bits", "8"}});
  EXPECT_EQ(rc.bits, (std::vector<int>{8}));
  EXPECT_DOUBLE_EQ(rc.vdd_v, 0.8);
  EXPECT_DOUBLE_EQ(rc.clock_hz, 2e9);
  EXPECT_EQ(rc.vectors, 64);
  EXPECT_EQ(rc.seed, 0xC1Au);
  EXPECT_EQ(rc.out, "results.csv");
}

TEST(Config, FileThroughCli) {
  const auto dir = scratch();
  spit(dir / "run.cfg", "bits = 16\nstyle = np\ntech = cnt\nvectors = 2\nout = " + (dir / "a.csv").string() + "\n");
  const auto r = invoke({"run", "--config", (dir / "run.cfg").string(), "--bits", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(slurp(dir / "a.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].bits, 8);
}

TEST(Config, Errors) {
  EXPECT_THROW(cli::parse_config_text("colour = red\n", "x.cfg"), ValidationError);
  EXPECT_THROW(cli::parse_config_text("bits\n", "x.cfg"), ValidationError);
  EXPECT_THROW(cli::merge_run_config({{"check-trends", "maybe"}}, {}), ValidationError);
  EXPECT_EQ(invoke({"run", "--config", "/nonexistent/run.cfg"}).code, 1);
}

TEST(Config, ParamsDirFromEnvironment) {
  const auto dir = scratch();
  fs::copy(params_dir(), dir / "params");
  ::setenv("CLACHAR_PARAMS_DIR", (dir / "params").c_str(), 1);
  EXPECT_EQ(cli::merge_run_config({}, {}).params_dir, (dir / "params").string());
  EXPECT_EQ(cli::merge_run_config({}, {{"params-dir", "/elsewhere"}}).params_dir, "/elsewhere");
  ::unsetenv("CLACHAR_PARAMS_DIR");
  EXPECT_FALSE(cli::merge_run_config({}, {}).params_dir.has_value());
}

TEST(Config, CustomParamsDirMatchesBundledCopy) {
  const auto dir = scratch();
  fs::copy(params_dir(), dir / "params");
  const std::vector<std::string> base{"run", "--bits", "8", "--style", "np", "--vectors", "2", "--out", "-"};
  auto with_dir = base;
  with_dir.insert(with_dir.end(), {"--params-dir", (dir / "params").string()});
  const auto bundled = invoke(base);
  const auto copied = invoke(with_dir);
  ASSERT_EQ(bundled.code, 0) << bundled.err;
  EXPECT_EQ(copied.out, bundled.out);

  // a slower silicon n device changes the silicon rows only
  std::string si = slurp(dir / "params" / "si.params");
  const auto at = si.find("r_on_ohm = 12000");
  ASSERT_NE(at, std::string::npos);
  si.replace(at, 16, "r_on_ohm = 24000");
  spit(dir / "params" / "si.params", si);
  const auto slower = invoke(with_dir);
  ASSERT_EQ(slower.code, 0) << slower.err;
  const auto a = parse_csv(bundled.out.substr(0, bundled.out.find("NP dynamic")));
  const auto b = parse_csv(slower.out.substr(0, slower.out.find("NP dynamic")));
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_GT(b[0].tpd_s, a[0].tpd_s);
  EXPECT_EQ(b[1].tpd_s, a[1].tpd_s);
}

TEST(Config, ParamsTypoIsAValidationError) {
  const auto dir = scratch();
  fs::copy(params_dir(), dir / "params");
  std::string cnt = slurp(dir / "params" / "cnt.params");
  const auto at = cnt.find("i_off_a");
  ASSERT_NE(at, std::string::npos);
  cnt.replace(at, 7, "i_of_a");
  spit(dir / "params" / "cnt.params", cnt);
  const auto r = invoke({"run", "--bits", "8", "--tech", "cnt", "--params-dir", (dir / "params").string(), "--out", "-"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("i_of_a"), std::string::npos) << r.err;
}

TEST(Table, ReferenceRowsGolden) {
  const std::string table = cli::render_table(clachar::testing::reference_np_rows());
  const auto golden = slurp(fs::path(CLACHAR_SOURCE_DIR) / "tests" / "golden" / "np_reference_table.txt");
  EXPECT_EQ(table, golden);
}

TEST(Table, MissingAndFailedCells) {
  std::vector<MetricsRecord> rows{MetricsRecord::make(8, Style::Np, Flavor::Si, 1e-6, 2e-6, 3e-12),
                                  MetricsRecord::failed(8, Style::Np, Flavor::Cnt, "x"),
                                  MetricsRecord::make(16, Style::Np, Flavor::Si, 1e-6, 2e-6, 4e-12)};
  const std::string t = cli::render_table(rows);
  EXPECT_NE(t.find("Propagation delay (s)             3.00000e-12         error\n"), std::string::npos) << t;
  EXPECT_NE(t.find("Propagation delay (s)             4.00000e-12             -\n"), std::string::npos) << t;
}
