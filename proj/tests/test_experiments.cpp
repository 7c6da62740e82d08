#include <cmath>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "rssdgeo/error.hpp"
#include "rssdgeo/experiments.hpp"
#include "rssdgeo/fim.hpp"
#include "rssdgeo/scenario_io.hpp"
#include "support.hpp"

using namespace rssdgeo;
namespace ts = testsupport;

namespace {

ScenarioDocument load_case(const char* name) {
  return load_scenario(std::string(RSSDGEO_DATA_DIR) + "/" + name);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  FAIL("no column " << name);
  return 0;
}

double cell(const Table& t, std::size_t row, const std::string& name) {
  return std::stod(t.rows[row][column(t, name)]);
}

Placement parse_placement(const std::string& text) {
  const auto parts = split(text, ';');
  Eigen::VectorXd a(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) a(static_cast<Eigen::Index>(i)) = std::stod(parts[i]) * ts::kPi / 180;
  return Placement::from_angles(a);
}

}  // namespace

TEST_CASE("shipped case files match the documented setup") {
  const ScenarioDocument a = load_case("caseA.json");
  const ScenarioDocument b = load_case("caseB.json");
  for (const ScenarioDocument* d : {&a, &b}) {
    CHECK(d->scenario.size() == 8);
    CHECK(d->scenario.gamma == 2.0);
    CHECK(d->scenario.samples_per_position == 10);
    CHECK(d->scenario.beta_max == doctest::Approx(ts::rad(120)));
    CHECK((d->scenario.horiz_dist.array() == 1000.0).all());
    CHECK((d->scenario.vert_dist.array() == 100.0).all());
  }
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(a.scenario.noise_std(i) * a.scenario.noise_std(i) == doctest::Approx(i < 4 ? 8.0 : 2.0));
    CHECK(b.scenario.noise_std(i) * b.scenario.noise_std(i) == doctest::Approx(4.0));
  }
}

TEST_CASE("validate report for case A") {
  const ValidationReport r = validate_scenario(load_case("caseA.json"));
  CHECK(r.n == 8);
  for (Eigen::Index i = 0; i < 8; ++i) CHECK(r.weights(i) == doctest::Approx(i < 4 ? 0.05 : 0.2).epsilon(1e-14));
  CHECK(r.b_rank == 7);
  CHECK(r.g0.x() == doctest::Approx(-0.5));
  CHECK(r.g0.y() == doctest::Approx(0.0));
  const std::string text = format_report(r);
  CHECK(text.find("weights: 0.05 0.05 0.05 0.05 0.2 0.2 0.2 0.2") != std::string::npos);
}

TEST_CASE("resample_sensors keeps the template proportions") {
  const Scenario base = ts::case_a();
  const Scenario s4 = resample_sensors(base, 4);
  CHECK(s4.noise_std(0) * s4.noise_std(0) == doctest::Approx(8.0));
  CHECK(s4.noise_std(1) * s4.noise_std(1) == doctest::Approx(8.0));
  CHECK(s4.noise_std(2) * s4.noise_std(2) == doctest::Approx(2.0));
  const Scenario s16 = resample_sensors(base, 16);
  CHECK((s16.noise_std.head(8).array() == base.noise_std(0)).all());
  CHECK((s16.noise_std.tail(8).array() == base.noise_std(7)).all());
  CHECK_THROWS_AS(resample_sensors(base, 0), InvalidArgument);
}

TEST_CASE("parallel_for runs every index once and propagates errors") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("convergence table: first row per angle is the uniform start") {
  const ScenarioDocument doc = load_case("caseB.json");
  const std::vector<double> betas{ts::rad(120), ts::rad(360)};
  const Table t = run_convergence(doc, betas, {}, {});
  CHECK(t.header[0] == "beta_max_deg");
  CHECK(t.header[1] == "iter");
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string b = t.rows[r][0];
    if (seen.insert(b).second) {
      CHECK(t.rows[r][1] == "0");
      Scenario s = doc.scenario;
      s.beta_max = b == "120.000000" ? ts::rad(120) : ts::rad(360);
      const double uniform = fim_full(s, uniform_init(8, s.beta_max), {}).lb_rmse;
      CHECK(cell(t, r, "lb_rmse_m") == doctest::Approx(uniform).epsilon(1e-11));
    }
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("sweep-n: bound falls with N and the optimizer never loses") {
  const ScenarioDocument doc = load_case("caseA.json");
  const Table t = run_sweep_n(doc, {4, 8, 12, 16}, {ts::rad(120)}, {}, {});
  REQUIRE(t.rows.size() == 4);
  double imp_min = 1e9, imp_max = -1e9;
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(cell(t, r, "lb_rmse_opt_m") <= cell(t, r, "lb_rmse_uniform_m"));
    if (r > 0) {
      CHECK(cell(t, r, "lb_rmse_opt_m") < cell(t, r - 1, "lb_rmse_opt_m"));
      CHECK(cell(t, r, "lb_rmse_uniform_m") < cell(t, r - 1, "lb_rmse_uniform_m"));
    }
    imp_min = std::min(imp_min, cell(t, r, "improvement_pct"));
    imp_max = std::max(imp_max, cell(t, r, "improvement_pct"));
  }
  CHECK(imp_max - imp_min < 10.0);
  CHECK_THROWS_AS(run_sweep_n(doc, {2}, {ts::rad(120)}, {}, {}), InvalidArgument);
}

TEST_CASE("sweep-angle: optimized never above uniform") {
  const ScenarioDocument doc = load_case("caseA.json");
  std::vector<double> grid;
  for (double d = 60; d <= 360; d += 30) grid.push_back(ts::rad(d));
  const Table t = run_sweep_angle(doc, grid, {}, {});
  REQUIRE(t.rows.size() == grid.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    CHECK(cell(t, r, "lb_rmse_opt_m") <= cell(t, r, "lb_rmse_uniform_m"));
}

TEST_CASE("practical with a zero prior equals the theoretical bound") {
  const ScenarioDocument doc = load_case("caseA.json");
  PracticalConfig pc;
  pc.prior_std = 0.0;
  pc.trials = 5;
  const Table t = run_practical(doc, pc, {}, {});
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows.back()[0] == "mean");
  for (const auto& row : t.rows) {
    CHECK(row[column(t, "lb_rmse_practical_m")] == row[column(t, "lb_rmse_theoretical_m")]);
    CHECK(std::stod(row[column(t, "prior_err_m")]) == 0.0);
  }
}

TEST_CASE("practical is deterministic for a fixed seed and independent of the worker count") {
  const ScenarioDocument doc = load_case("caseB.json");
  PracticalConfig pc;
  pc.prior_std = std::sqrt(12500.0);
  pc.trials = 12;
  pc.run_mle = true;
  RunConfig one{7, 1}, many{7, 4}, other{8, 4};
  const std::string a = run_practical(doc, pc, {}, one).to_csv();
  CHECK(a == run_practical(doc, pc, {}, many).to_csv());
  CHECK(a != run_practical(doc, pc, {}, other).to_csv());
}

TEST_CASE("CSV rows round-trip through the placement column") {
  const ScenarioDocument doc = load_case("caseA.json");
  std::vector<double> grid{ts::rad(90), ts::rad(200), ts::rad(300)};
  const Table t = run_sweep_angle(doc, grid, {}, {});
  const auto lines = split(t.to_csv(), '\n');
  CHECK(split(lines[0], ',') == t.header);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const auto cells = split(lines[r + 1], ',');
    REQUIRE(cells.size() == t.header.size());
    Scenario s = doc.scenario;
    s.beta_max = grid[r];
    const Placement p = parse_placement(cells[column(t, "placement_deg")]);
    const double lb = fim_full(s, p, {}).lb_rmse;
    // six decimals in degrees leaves about 1e-8 rad of rounding per angle
    CHECK(lb == doctest::Approx(std::stod(cells[column(t, "lb_rmse_opt_m")])).epsilon(1e-6));
    for (Eigen::Index i = 0; i < p.angles().size(); ++i) CHECK(p.angles()(i) <= grid[r] + 1e-7);
  }
}

TEST_CASE("optimize table columns") {
  const Table t = run_optimize(load_case("caseA.json"), {}, {3, 1});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header.front() == "beta_max_deg");
  CHECK(t.rows[0][column(t, "seed")] == "3");
  CHECK(t.rows[0][column(t, "scenario_hash")].size() == 16);
  CHECK(cell(t, 0, "improvement_pct") > 20.0);
}
