#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "photonbound/channel/forward.hpp"
#include "photonbound/cli/commands.hpp"
#include "photonbound/cli/config.hpp"
#include "photonbound/cli/table_csv.hpp"

using namespace photonbound;
using namespace photonbound::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("photonbound_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "photonbound");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

MeasurementTable fixture() {
  const ThresholdResponse resp(ThresholdDetector{1e-6, 1.0, {0.94, 0.96, 0.98, 1.0}});
  return loss_table(0.1, PoissonSource{{1e-3, 1e-2, 0.5}}, resp);
}

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse(
      "# comment\n"
      "source.intensities = 0.001, 0.01 ,0.5  # trailing\n"
      "\n"
      "estimator.n0=3\n"
      "qkd.protocols = bb84\n");
  CHECK(c.get_doubles("source.intensities", {}) == std::vector<double>{0.001, 0.01, 0.5});
  CHECK(c.get_int("estimator.n0", 0) == 3);
  CHECK(c.get_int("estimator.m0", 7) == 7);
  CHECK(c.get_strings("qkd.protocols", {}) == std::vector<std::string>{"bb84"});
  CHECK_NOTHROW(c.check_keys({"source.intensities", "estimator.n0", "qkd.protocols"}));
  CHECK_THROWS_AS(c.check_keys({"source.intensities"}), ConfigError);

  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("nodot = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a.b = 1\na.b = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a.b = x\n").get_double("a.b", 0.0), ConfigError);
  CHECK_THROWS_AS(Config::parse("a.b = 1.5\n").get_int("a.b", 0), ConfigError);
  try {
    Config::parse("a.b = 1\n\nc.d = oops\n", "cfg.txt").get_double("c.d", 0.0);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.txt:3") != std::string::npos);
  }
}

TEST_CASE("table csv round trip") {
  const MeasurementTable t = fixture();
  std::stringstream ss;
  write_table(ss, t);
  const MeasurementTable back = read_table(ss);
  CHECK(back.kind == t.kind);
  CHECK(back.intensities == t.intensities);
  CHECK(back.attenuations == t.attenuations);
  CHECK(back.parameters == t.parameters);
  CHECK(back.values == t.values);  // bit exact

  const HomodyneResponse hom(HomodyneDetector::uniform(0.9, 4.0, 5), 40);
  const MeasurementTable h = loss_table(0.3, PoissonSource{{1e-3, 1e-2, 0.5}}, hom);
  std::stringstream hs;
  write_table(hs, h);
  const MeasurementTable hb = read_table(hs);
  CHECK(hb.kind == TableKind::Homodyne);
  CHECK(hb.bin_edges == h.bin_edges);
  CHECK(hb.values == h.values);

  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("malformed tables") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_table(in, "t.csv");
  };
  CHECK_THROWS_AS(parse(""), ConfigError);
  CHECK_THROWS_AS(parse("x,1\n0.5,0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse("# detector=laser\nx,1\n0.5,0.3\n"), ConfigError);
  CHECK_THROWS_AS(parse("# detector=threshold\nx,1\n"), ConfigError);
  CHECK_THROWS_AS(parse("# detector=homodyne eta=1\nx,0:1,2:3\n0.5,0.1,0.1\n"), ConfigError);
  try {
    parse("# detector=threshold p_dc=0 eta_det=1\nx,1,0.5\n0.5,0.3,0.2\n0.1,0.9,abc\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("t.csv:4:3") != std::string::npos);
  }
}

TEST_CASE("estimate command") {
  TempDir dir("estimate");
  const std::string table = dir.file("table.csv");
  {
    std::ofstream os(table);
    write_table(os, fixture());
  }
  CHECK(run({"--out", dir.file("both"), "--method", "both", "estimate", table}) == 0);
  const auto rows = read_csv(dir.file("both/estimate.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][0] == "target");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][0] == "1|1");
    const double lo = std::stod(rows[i][2]);
    const double hi = std::stod(rows[i][3]);
    CHECK(lo <= 0.1);
    CHECK(hi >= 0.1);
  }
  CHECK(rows[1][1] == "analytical");
  CHECK(rows[2][1] == "lp");

  const std::string cfg = dir.file("empty.cfg");
  write_file(cfg, "estimator.targets =\nestimate.table = " + table + "\n");
  CHECK(run({"--config", cfg, "--out", dir.file("empty"), "estimate"}) == 0);
  CHECK(read_csv(dir.file("empty/estimate.csv")).size() == 1);

  const std::string bad = dir.file("bad.csv");
  write_file(bad, "# detector=threshold p_dc=0 eta_det=1\nx,1\n0.5,zz\n");
  CHECK(run({"--out", dir.file("bad"), "estimate", bad}) == 2);
  CHECK(run({"--out", dir.file("missing"), "estimate", dir.file("nope.csv")}) == 2);

  const std::string targets = dir.file("targets.cfg");
  write_file(targets, "estimator.targets = 1-1\n");
  CHECK(run({"--config", targets, "--out", dir.file("t"), "estimate", table}) == 2);
}

TEST_CASE("usage errors") {
  TempDir dir("usage");
  CHECK(run({"--out", dir.file("d"), "demo", "fig9"}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"--method", "simplex", "demo", "fig3"}) == 2);
  const std::string unknown = dir.file("unknown.cfg");
  write_file(unknown, "estimator.nzero = 2\n");
  CHECK(run({"--config", unknown, "demo", "fig3"}) == 2);
  CHECK(run({"--config", dir.file("absent.cfg"), "demo", "fig3"}) == 2);

  const std::string gaps = dir.file("gaps.cfg");
  write_file(gaps, "detector.bin_edges = 0.5, 1, 2, 3, 4, 5, 6, 7\n");
  CHECK(run({"--config", gaps, "--out", dir.file("g"), "simulate-tcspc"}) == 2);

  const std::string mismatch = dir.file("type.cfg");
  write_file(mismatch, "detector.type = threshold\n");
  CHECK(run({"--config", mismatch, "--out", dir.file("m"), "simulate-tcspc"}) == 2);
  write_file(mismatch, "detector.type = photodiode\n");
  CHECK(run({"--config", mismatch, "--out", dir.file("m"), "simulate-qkd"}) == 2);
}

TEST_CASE("numerical failure exit code") {
  TempDir dir("numeric");
  MeasurementTable t = fixture();
  t.values(2, 0) = 0.2;  // no channel explains this row
  const std::string table = dir.file("table.csv");
  {
    std::ofstream os(table);
    write_table(os, t);
  }
  CHECK(run({"--out", dir.file("o"), "--method", "lp", "estimate", table}) == 3);
}

TEST_CASE("simulate-qkd") {
  TempDir dir("qkd");
  const std::string cfg = dir.file("qkd.cfg");
  write_file(cfg, "channel.flip_probability = 0.5\nchannel.loss_db = 0, 10, 20\n");
  REQUIRE(run({"--config", cfg, "--out", dir.path.string(), "simulate-qkd"}) == 0);
  const auto rows = read_csv(dir.file("qkd.csv"));
  REQUIRE(rows.size() == 7);
  const auto& header = rows[0];
  const auto col = std::find(header.begin(), header.end(), "single_photon_term") - header.begin();
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][static_cast<std::size_t>(col)]) == 0.0);

  write_file(cfg, "qkd.protocols = bb84, e91\n");
  CHECK(run({"--config", cfg, "--out", dir.path.string(), "simulate-qkd"}) == 2);
}

TEST_CASE("simulate-tcspc") {
  TempDir dir("tcspc");
  REQUIRE(run({"--out", dir.file("default"), "simulate-tcspc"}) == 0);
  auto rows = read_csv(dir.file("default/tcspc.csv"));
  REQUIRE(rows.size() == 101);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][6] == "true");
    CHECK(rows[i][10] == "true");
    CHECK(rows[i][17] == "true");
  }

  const std::string cfg = dir.file("dark.cfg");
  write_file(cfg, "scene.excitation_coefficient = 0\n");
  REQUIRE(run({"--config", cfg, "--out", dir.file("dark"), "simulate-tcspc"}) == 0);
  rows = read_csv(dir.file("dark/tcspc.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][3]) <= 0.0);
    CHECK(std::stod(rows[i][4]) >= 0.0);
  }
}

TEST_CASE("demo outputs") {
  TempDir dir("demo");
  REQUIRE(run({"--out", dir.path.string(), "demo", "fig5"}) == 0);
  for (const char* name : {"fig5.csv", "fig5_q1_exact.dat", "fig5_q1_lo.dat", "fig5_q1_hi.dat", "fig5_q2_exact.dat",
                           "fig5_q2_lo.dat", "fig5_q2_hi.dat"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir.path / name));
  }
  const std::string lo = read_file(dir.file("fig5_q1_lo.dat"));
  CHECK(std::count(lo.begin(), lo.end(), '\n') == 100);
}
