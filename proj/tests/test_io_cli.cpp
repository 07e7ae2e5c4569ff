#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wgqed/commands.hpp"
#include "wgqed/config.hpp"
#include "wgqed/table_io.hpp"

namespace fs = std::filesystem;
using namespace wgqed;

namespace {

const fs::path kSource = WGQED_SOURCE_DIR;

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("wgqed_test_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& f) const { return dir / f; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reference device on coarse grids so that the fit finishes quickly.
std::string small_config(int max_iterations = 200) {
  std::string text = slurp(kSource / "configs" / "reference.ini");
  auto set = [&](const std::string& key, const std::string& value) {
    const auto at = text.find("\n" + key + " =");
    REQUIRE(at != std::string::npos);
    const auto eol = text.find('\n', at + 1);
    text.replace(at + 1, eol - at - 1, key + " = " + value);
  };
  set("scan_points", "31");
  set("tau_points", "41");
  set("scan_powers_uW", "5, 100");
  set("max_iterations", std::to_string(max_iterations));
  text += "gh_order = 15\nprofile_at_bounds = false\n";
  return text;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WGQED_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config errors name the offending line") {
  const std::string bad = "[emitter]\nbeta = 0.5\ngamma_tot = abc\n";
  try {
    parse_config(bad, "x.ini");
    FAIL("no error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("x.ini") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
    CHECK(msg.find("gamma_tot") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[emitter]\nbeta = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[nosuch]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[emitter]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("beta = 0.5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/wgqed.ini"), ConfigError);
}

TEST_CASE("shipped config is the reference device") {
  const Config a = load_config(kSource / "configs" / "reference.ini");
  const Config b = reference_config();
  CHECK(a.emitter.beta == b.emitter.beta);
  CHECK(a.emitter.gamma_tot == b.emitter.gamma_tot);
  CHECK(a.emitter.xi == b.emitter.xi);
  CHECK(a.noise.sigma_short == b.noise.sigma_short);
  CHECK(a.noise.sigma_long == b.noise.sigma_long);
  CHECK(a.noise.sigma_irf == b.noise.sigma_irf);
  CHECK(a.noise.background_for(PortPair::rr) == b.noise.background_for(PortPair::rr));
  CHECK(a.drive.eta == b.drive.eta);
  CHECK(a.drive.scan_powers == b.drive.scan_powers);
  CHECK(a.grids.scan_half_span == doctest::Approx(angular_from_linear(8.0)));
  CHECK(a.fit.free == b.fit.free);
}

TEST_CASE("csv tables round trip") {
  Scratch s("csv");
  io::CsvTable t;
  t.metadata = {{"gamma_tot", "7.65"}};
  t.header = {"a", "b"};
  t.rows = {{io::format_number(0.1), io::format_number(1.0 / 3.0)}, {"2", "-1e-300"}};
  io::write_csv(s / "t.csv", t);
  const auto r = io::read_csv(s / "t.csv");
  CHECK(r.meta("gamma_tot") == "7.65");
  CHECK(r.meta("missing").empty());
  CHECK(r.header == t.header);
  REQUIRE(r.rows.size() == 2);
  CHECK(std::stod(r.rows[0][1]) == 1.0 / 3.0);

  write_file(s / "bad.csv", "a,b\n1,2\n3\n");
  try {
    io::read_csv(s / "bad.csv");
    FAIL("no error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(io::read_csv(s / "missing.csv"), DataError);
  write_file(s / "intensity.csv", "power_uW,detuning_GHz,I_t,counts\n5,0,abc,1\n");
  CHECK_THROWS_AS(io::read_intensity(s / "intensity.csv"), DataError);
}

TEST_CASE("simulate, fit, reconstruct and predict") {
  Scratch s("pipeline");
  write_file(s / "cfg.ini", small_config());
  std::ostringstream log;
  REQUIRE(cli::cmd_simulate(s / "cfg.ini", 3, s / "data", log) == cli::kOk);
  CHECK(fs::exists(s / "data" / "intensity.csv"));
  CHECK(fs::exists(s / "data" / "g2_w000.csv"));
  CHECK(fs::exists(s / "data" / "truth.json"));

  SUBCASE("a seed reproduces its data") {
    REQUIRE(cli::cmd_simulate(s / "cfg.ini", 3, s / "again", log) == cli::kOk);
    REQUIRE(cli::cmd_simulate(s / "cfg.ini", 4, s / "other", log) == cli::kOk);
    CHECK(slurp(s / "data" / "intensity.csv") == slurp(s / "again" / "intensity.csv"));
    CHECK(slurp(s / "data" / "g2_w000.csv") == slurp(s / "again" / "g2_w000.csv"));
    CHECK(slurp(s / "data" / "intensity.csv") != slurp(s / "other" / "intensity.csv"));
    const auto set = io::read_measurement_set(s / "data");
    CHECK(set.intensity_scans.size() == 2);
    CHECK(set.g2_traces.size() == 3);
    CHECK(set.intensity_scans[0].omega.size() == 31);
  }
  SUBCASE("fit recovers the device and feeds reconstruction") {
    REQUIRE(cli::cmd_fit(s / "data", s / "cfg.ini", s / "fit", log) == cli::kOk);
    const auto p = cli::read_params(s / "fit" / "fit_result.json");
    CHECK(p.emitter.beta == doctest::Approx(0.87).epsilon(0.05));
    CHECK(p.emitter.xi == doctest::Approx(-0.26).epsilon(0.1));
    CHECK(slurp(s / "fit" / "fit_report.txt").find("beta") != std::string::npos);
    REQUIRE(cli::cmd_reconstruct(s / "data", s / "fit" / "fit_result.json", s / "rec", log) == cli::kOk);
    for (const char* f : {"response_G.csv", "single_t.csv", "single_r.csv", "t_real.csv"})
      CHECK(fs::exists(s / "rec" / f));
    // One drive frequency: no frequency completion, so no sector.
    CHECK_FALSE(fs::exists(s / "rec" / "sector.csv"));
    CHECK(log.str().find("single drive frequency") != std::string::npos);
    const auto t = io::read_csv(s / "rec" / "single_t.csv");
    CHECK(t.rows.size() == 31);
  }
  SUBCASE("missing reflection data is a data error") {
    fs::copy(s / "data", s / "nor");
    const auto path = s / "nor" / "g2_w000.csv";
    std::istringstream in(slurp(path));
    std::string line, kept;
    while (std::getline(in, line))
      if (line.rfind("rr,", 0) != 0) kept += line + "\n";
    write_file(path, kept);
    CHECK(cli::guarded([&] { return cli::cmd_fit(s / "nor", s / "cfg.ini", s / "nofit", log); }, log) == cli::kDataError);
  }
  SUBCASE("iteration cap reports non-convergence") {
    write_file(s / "cap.ini", small_config(1));
    CHECK(cli::cmd_fit(s / "data", s / "cap.ini", s / "capfit", log) == cli::kNotConverged);
  }
  SUBCASE("truth parameters survive the json round trip") {
    const auto p = cli::read_params(s / "data" / "truth.json");
    const auto want = reference_config().model();
    CHECK(p.emitter.beta == want.emitter.beta);
    CHECK(p.noise.sigma_long == want.noise.sigma_long);
    CHECK(p.eta == want.eta);
  }
}

TEST_CASE("predict honours the imperfection toggles") {
  Scratch s("predict");
  write_file(s / "cfg.ini", small_config());
  std::ostringstream log;
  auto g0 = [&](const std::string& toggles) {
    const auto out = s / ("p_" + toggles);
    REQUIRE(cli::cmd_predict(s / "cfg.ini", toggles, out, log) == cli::kOk);
    const auto t = io::read_csv(out / "g2_model.csv");
    std::size_t col_pair = 0, col_tau = 0, col_g = 0;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (t.header[i] == "pair") col_pair = i;
      if (t.header[i] == "tau_ns") col_tau = i;
      if (t.header[i] == "g2") col_g = i;
    }
    for (const auto& row : t.rows)
      if (row[col_pair] == "tt" && std::abs(std::stod(row[col_tau])) < 1e-12) return std::stod(row[col_g]);
    FAIL("no tt(0) row");
    return 0.0;
  };
  const double all = g0("all");
  const double none = g0("none");
  CHECK(all < none);
  CHECK(g0("sd,bg") > all);
  CHECK(fs::exists(s / "p_all" / "sector.csv"));
  CHECK(cli::guarded([&] { return cli::cmd_predict(s / "cfg.ini", "sd,warp", s / "bad", log); }, log) ==
        cli::kConfigError);
}

TEST_CASE("command-line exit codes") {
  Scratch s("exit");
  write_file(s / "cfg.ini", small_config());
  write_file(s / "broken.ini", "[emitter]\nbeta = nope\n");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == cli::kConfigError);
  CHECK(run_cli("simulate --config " + (s / "broken.ini").string() + " --out " + (s / "o").string()) ==
        cli::kConfigError);
  CHECK(run_cli("fit --data " + (s / "nodata").string() + " --config " + (s / "cfg.ini").string() + " --out " +
                (s / "o").string()) == cli::kDataError);
  CHECK(run_cli("predict --config " + (s / "cfg.ini").string() + " --toggles bogus --out " + (s / "o").string()) ==
        cli::kConfigError);
  CHECK(run_cli("simulate --config " + (s / "cfg.ini").string() + " --seed 9 --out " + (s / "sim").string()) == 0);
  CHECK(fs::exists(s / "sim" / "intensity.csv"));
}
