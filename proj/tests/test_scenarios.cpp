// Scenario runner plumbing: configs, determinism, artifacts, verdict shape.

#include <catch2/catch_amalgamated.hpp>

#include <flatflow/scenarios.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace flatflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("scenario names round trip") {
  for (Scenario s :
       {Scenario::stationary_disks, Scenario::tangent_disks_neck,
        Scenario::long_time_forcing, Scenario::ellipse_pair, Scenario::custom})
    CHECK(scenario_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(scenario_from_string("bogus"), FlatFlowError);
}

TEST_CASE("RunConfig from JSON applies defaults and overrides") {
  RunConfig c = RunConfig::from_json({{"scenario", "stationary_disks"}});
  CHECK(c.scenario == Scenario::stationary_disks);
  CHECK(c.grid_n == 512);
  CHECK(c.h == 1e-3);
  CHECK(c.T == 1.0);

  nlohmann::json j = {
      {"scenario", "long_time_forcing"},
      {"grid_n", 256},
      {"T", 10.0},
      {"forcing", {{"kind", "exp_relax"}, {"c0", 2.0}, {"amplitude", 0.3}, {"rate", 1.5}}},
      {"solver", {{"tol_gap", 1e-6}}},
      {"tracker", {{"a", 1.4}, {"vertices", 128}}}};
  c = RunConfig::from_json(j);
  CHECK(c.grid_n == 256);
  CHECK(c.T == 10.0);
  CHECK(c.forcing.kind == ForcingKind::exp_relax);
  CHECK(c.forcing.c0 == 2.0);
  CHECK(c.tol.tol_gap == 1e-6);
  CHECK(c.tracker_a == 1.4);
  CHECK(c.tracker_vertices == 128);
  CHECK_THROWS_AS(
      RunConfig::from_json({{"forcing", {{"kind", "sinusoid"}}}}),
      FlatFlowError);
}

TEST_CASE("fit_line recovers an exact line") {
  std::vector<std::pair<double, double>> xy;
  for (int i = 0; i < 20; ++i) xy.emplace_back(i, 3.0 - 0.5 * i);
  LineFit f = fit_line(xy);
  CHECK(f.slope == Catch::Approx(-0.5).margin(1e-12));
  CHECK(f.intercept == Catch::Approx(3.0).margin(1e-12));
  CHECK(f.r2 == Catch::Approx(1.0).margin(1e-12));
  CHECK(fit_line({}).n == 0);
}

TEST_CASE("canonical masks") {
  GridSpec g = GridSpec::centered(2.6, 256);
  SetMask tri = stationary_disks_mask(g);
  CHECK(extract_contours(tri).size() == 3);
  CHECK(area(tri) == Catch::Approx(3.0 * M_PI).epsilon(0.02));

  SetMask blobs = blob_pair_mask(GridSpec::centered(2.8, 256), 1);
  CHECK(extract_contours(blobs).size() == 2);
  CHECK(area(blobs) == Catch::Approx(2.0 * M_PI).epsilon(0.02));
}

TEST_CASE("neck metrics at t = 0") {
  GridSpec g = GridSpec::centered(2.2, 256);
  SetMask e0 = tangent_disks_mask(g);
  NeckMetrics m = neck_metrics_of(e0, e0, 0.0);
  CHECK(m.grown_area == 0.0);
  // the continuum tangency is measure-zero, but cell centers sit at
  // x = +-cell/2 and the true disks contain that whole column up to
  // |y| ~ sqrt(cell), so the raster set starts with a sqrt(cell) neck
  CHECK(m.inscribed_radius_at_origin <= 1.1 * std::sqrt(g.cell));
  CHECK(m.component_count >= 1);
}

TEST_CASE("custom scenario writes artifacts and a verdict", "[slow]") {
  TempDir dir("flatflow_test_custom");
  RunConfig cfg = RunConfig::defaults_for(Scenario::custom);
  cfg.grid_half = 1.5;
  cfg.grid_n = 128;
  cfg.h = 2e-3;
  cfg.T = 0.02;
  cfg.snapshot_every = 5;
  cfg.out_dir = dir.str();

  nlohmann::json verdict = run_scenario(cfg);
  CHECK(verdict.at("scenario") == "custom");
  CHECK(verdict.at("pass").get<bool>());
  REQUIRE(verdict.contains("checks"));
  for (const auto& c : verdict.at("checks")) {
    CHECK(c.contains("name"));
    CHECK(c.contains("margin"));
    CHECK(c.contains("pass"));
  }
  CHECK(fs::exists(dir.path / "verdict.json"));
  CHECK(fs::exists(dir.path / "series.csv"));
  CHECK(fs::exists(dir.path / "initial.pgm"));
  CHECK(fs::exists(dir.path / "final.pgm"));
  CHECK(fs::exists(dir.path / "mask_000000.pgm"));
  CHECK(fs::exists(dir.path / "mask_000005.pgm"));

  // series header is pinned
  std::ifstream csv(dir.path / "series.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "k,t,fbar,area,perimeter,energy,dissipation,el_residual,"
        "displacement_sup,objective_drop");
}

TEST_CASE("scenario runs are deterministic", "[slow]") {
  auto run_once = [](const std::string& out) {
    RunConfig cfg = RunConfig::defaults_for(Scenario::custom);
    cfg.grid_half = 1.5;
    cfg.grid_n = 96;
    cfg.h = 2e-3;
    cfg.T = 0.02;
    cfg.out_dir = out;
    run_scenario(cfg);
  };
  TempDir d1("flatflow_det_a"), d2("flatflow_det_b");
  run_once(d1.str());
  run_once(d2.str());
  CHECK(slurp(d1.str() + "/series.csv") == slurp(d2.str() + "/series.csv"));
  CHECK(slurp(d1.str() + "/final.pgm") == slurp(d2.str() + "/final.pgm"));
}

TEST_CASE("errors surface as failed checks, not exceptions") {
  TempDir dir("flatflow_test_err");
  RunConfig cfg = RunConfig::defaults_for(Scenario::custom);
  cfg.grid_half = 0.9;  // unit disk touches the margin
  cfg.grid_n = 96;
  cfg.h = 2e-3;
  cfg.T = 0.02;
  cfg.out_dir = dir.str();
  nlohmann::json verdict = run_scenario(cfg);
  CHECK_FALSE(verdict.at("pass").get<bool>());
}

TEST_CASE("stationary scenario at reduced scale", "[slow]") {
  TempDir dir("flatflow_test_stationary");
  RunConfig cfg = RunConfig::defaults_for(Scenario::stationary_disks);
  cfg.grid_n = 192;
  cfg.h = 2e-3;
  cfg.T = 0.05;
  cfg.out_dir = dir.str();
  nlohmann::json verdict = run_scenario(cfg);
  CHECK(verdict.at("pass").get<bool>());
  bool saw_excess = false;
  for (const auto& c : verdict.at("checks"))
    if (c.at("name") == "stationary_hausdorff_excess") {
      saw_excess = true;
      CHECK(c.at("pass").get<bool>());
    }
  CHECK(saw_excess);
}
