#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "cda/config.hpp"
#include "cda/errors.hpp"
#include "cda/output.hpp"

using namespace cda;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cda_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int cli(const std::string& args) {
  const std::string cmd = std::string(CDA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& yaml) {
  try {
    parse_config_string(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kQuickKse = R"(
preset: kse-paper
method: {kind: nudging, mu: 100}
run: {spin_up_time: 10, horizon: 2, record_stride: 10, seed: 3}
)";

}  // namespace

TEST_CASE("presets") {
  const auto k = preset_config("kse-paper").twin;
  CHECK(k.model == ModelKind::kse);
  CHECK(k.kse.lambda == 0.5);
  CHECK(k.kse.domain_length == doctest::Approx(32 * std::numbers::pi).epsilon(1e-15));
  CHECK(k.kse.n == 256);
  CHECK(k.kse.dt == 0.01);
  CHECK(k.observed_modes == 16);
  CHECK_NOTHROW(k.validate());

  const auto n = preset_config("nse-paper").twin;
  CHECK(n.model == ModelKind::nse);
  CHECK(n.nse.nu == 0.01);
  CHECK(n.nse.f0 == 50.0);
  CHECK(n.nse.k_f[0] == 5);
  CHECK(n.nse.k_f[1] == 5);
  CHECK(n.nse.n == 128);
  CHECK(n.observed_modes == 10);
  CHECK(n.mu == 100.0);
  CHECK_NOTHROW(n.validate());

  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("parsing and validation") {
  SUBCASE("keys override the preset") {
    const auto c = parse_config_string("model: {kind: kse, domain_length: 16pi}\nmethod: {gain: real}\n");
    CHECK(c.preset == "kse-paper");
    CHECK(c.twin.kse.domain_length == doctest::Approx(16 * std::numbers::pi));
    CHECK(c.twin.gain_form == GainForm::real);
    CHECK(parse_config_string("model: {kind: nse}").preset == "nse-paper");
  }
  SUBCASE("errors name the offending key") {
    CHECK(error_of("observations: {sigma_O2: -1}").find("observations.sigma_O2") != std::string::npos);
    CHECK(error_of("method: {bogus: 1}").find("method.bogus") != std::string::npos);
    CHECK(error_of("mystery: 3").find("mystery") != std::string::npos);
    CHECK(error_of("method: {kind: magic}").find("method.kind") != std::string::npos);
    CHECK(error_of("run: {horizon: 1.005}").find("horizon") != std::string::npos);
    CHECK(error_of("sweep: {sigma_O2: [1, -2]}").find("sweep.sigma_O2") != std::string::npos);
    CHECK(error_of("preset: nse-paper\nmodel: {kind: kse}").find("conflicts") != std::string::npos);
    CHECK(!error_of("method: [").empty());
  }
}

TEST_CASE("sweep expansion") {
  auto c = parse_config_string("sweep: {mu: [1, 10, 100], sigma_O2: [0, 1e-10]}");
  const auto pts = expand_sweep(c);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].dir == "p000");
  CHECK(pts[5].dir == "p005");
  CHECK(pts[0].label == "mu=1,sigma_O2=0");
  CHECK(pts[5].label == "mu=100,sigma_O2=1e-10");
  CHECK(pts[3].twin.mu == 10.0);
  CHECK(pts[3].twin.sigma_O2 == 1e-10);
  c.sweep = {};
  const auto one = expand_sweep(c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].dir == "run");
}

TEST_CASE("resolved config round trip") {
  const auto a = parse_config_string(
      "preset: nse-paper\nobservations: {M: 5, field: vorticity}\nmethod: {kind: enkf, K: 170}\n"
      "sweep: {sigma_I2: [1e-13, 1e-12]}\n");
  const auto text = config_to_json(a).dump();
  const auto b = parse_config_string(text);
  CHECK(config_to_json(b) == config_to_json(a));
  CHECK(b.twin.observed_field == ObservedField::vorticity);
  CHECK(b.twin.members == 170);
}

TEST_CASE("CSV output") {
  const auto dir = scratch("csv");
  std::vector<ErrorRecord> recs{{0.0, 0.1, 0.2, 0.22360679774997896},
                                {0.1, 1.0 / 3.0, 2.220446049250313e-16, 1e-300}};
  write_error_csv(dir / "e.csv", recs);
  const auto text = slurp(dir / "e.csv");
  CHECK(text.rfind("time,err_observed,err_unobserved,err_total\n", 0) == 0);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  const auto back = read_error_csv(dir / "e.csv");
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].time == recs[i].time);
    CHECK(back[i].err_observed == recs[i].err_observed);
    CHECK(back[i].err_unobserved == recs[i].err_unobserved);
    CHECK(back[i].err_total == recs[i].err_total);
  }
  CHECK(!fs::exists(dir / "e.csv.tmp"));
}

TEST_CASE("SVG plot") {
  const auto svg = render_error_plot_svg({{"a", {{0, 1e-3, 1e-4, 1e-3}, {1, 1e-12, 1e-13, 1e-12}}}}, "t<1>");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("t&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("unobserved modes") != std::string::npos);
}

TEST_CASE("run and emit") {
  const auto dir = scratch("emit");
  auto cfg = parse_config_string(kQuickKse);
  cfg.output_dir = (dir / "a").string();
  RunOptions quiet;
  quiet.quiet = true;
  quiet.emit_plots = true;
  REQUIRE(run_and_emit(cfg, quiet) == kExitOk);
  const auto run = dir / "a" / "run";
  for (const char* f : {"errors.csv", "manifest.json", "config.json", "errors.svg"})
    CHECK(fs::exists(run / f));
  CHECK(fs::exists(dir / "a" / "comparison.svg"));
  const auto recs = read_error_csv(run / "errors.csv");
  CHECK(recs.size() == std::size_t(2.0 / (0.01 * 10)) + 1);
  const auto manifest = nlohmann::json::parse(slurp(run / "manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["termination"]["status"] == "completed");
  CHECK(manifest["derived"]["dealias_cutoff"] == 85);
  CHECK(parse_config(run / "config.json").twin.seed == 3);

  cfg.output_dir = (dir / "b").string();
  REQUIRE(run_and_emit(cfg, quiet) == kExitOk);
  CHECK(slurp(run / "errors.csv") == slurp(dir / "b" / "run" / "errors.csv"));

  SUBCASE("a blow-up is a numerical failure") {
    cfg.twin.mu = 400;
    cfg.twin.horizon = 100;
    cfg.twin.record_stride = 100;
    cfg.output_dir = (dir / "c").string();
    CHECK(run_and_emit(cfg, quiet) == kExitNumerical);
    quiet.allow_failures = true;
    CHECK(run_and_emit(cfg, quiet) == kExitOk);
    const auto m = nlohmann::json::parse(slurp(dir / "c" / "run" / "manifest.json"));
    CHECK(m["termination"]["status"] == "blow_up");
  }
  SUBCASE("sweep points with several workers match a single worker") {
    cfg.sweep.mu = {10, 100};
    cfg.workers = 2;
    cfg.output_dir = (dir / "d").string();
    REQUIRE(run_and_emit(cfg, quiet) == kExitOk);
    cfg.workers = 1;
    cfg.output_dir = (dir / "e").string();
    REQUIRE(run_and_emit(cfg, quiet) == kExitOk);
    for (const char* p : {"p000", "p001"})
      CHECK(slurp(dir / "d" / p / "errors.csv") == slurp(dir / "e" / p / "errors.csv"));
  }
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  spit(dir / "ok.yaml", kQuickKse);
  spit(dir / "bad.yaml", "observations: {sigma_O2: -1}\n");
  spit(dir / "sweep.yaml", std::string(kQuickKse) + "sweep: {mu: [10, 100]}\n");
  spit(dir / "boom.yaml", "method: {mu: 400}\nrun: {spin_up_time: 10, horizon: 100, record_stride: 100}\n");
  const std::string out = " --out " + (dir / "out").string();

  CHECK(cli("presets") == 0);
  CHECK(cli("validate " + (dir / "ok.yaml").string()) == 0);
  CHECK(cli("validate " + (dir / "bad.yaml").string()) == 1);
  CHECK(cli("validate " + (dir / "missing.yaml").string()) == 1);
  CHECK(cli("run " + (dir / "ok.yaml").string() + out) == 0);
  CHECK(cli("run " + (dir / "ok.yaml").string() + out + " --seed 9") == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "out" / "run" / "manifest.json"))["seed"] == 9);
  CHECK(cli("run " + (dir / "sweep.yaml").string() + out) == 1);
  CHECK(cli("sweep " + (dir / "sweep.yaml").string() + out) == 0);
  CHECK(cli("run " + (dir / "boom.yaml").string() + out) == 2);
  CHECK(cli("run " + (dir / "boom.yaml").string() + out + " --allow-failures") == 0);
  CHECK(cli("frobnicate") != 0);
}

TEST_CASE("shipped example configs validate") {
  for (const auto& e : fs::directory_iterator(fs::path(CDA_SOURCE_DIR) / "configs")) {
    INFO(e.path().string());
    CHECK_NOTHROW(parse_config(e.path()));
  }
}
