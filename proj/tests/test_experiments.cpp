#include "helpers.hpp"

#include "dfrc/experiments.hpp"

using namespace dfrc;
using testing::rel;

TEST_SUITE("experiments") {

TEST_CASE("config JSON round trip and strict keys") {
  ExperimentConfig c;
  c.experiment = "fig5";
  c.seed = 77;
  c.users_levels = {3, 5};
  c.sinr_sweep_db = {1.0, 2.5};
  ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(back.experiment == "fig5");
  CHECK(back.seed == 77u);
  CHECK(back.users_levels == std::vector<int>{3, 5});
  CHECK(back.sinr_sweep_db == std::vector<double>{1.0, 2.5});
  CHECK(config_hash(back) == config_hash(c));

  CHECK_THROWS_AS(config_from_json(R"({"n_tx": 16, "bogus": 1})"), Error);
  CHECK_THROWS_AS(config_from_json("{not json"), Error);
  CHECK_THROWS_AS(config_from_json(R"({"n_tx": "sixteen"})"), Error);
}

TEST_CASE("config hash tracks numeric settings only") {
  ExperimentConfig a, b;
  b.output = "/tmp/elsewhere.csv";
  b.threads = 3;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("defaults per experiment and validation") {
  ExperimentConfig c;
  c.experiment = "fig2";
  ExperimentConfig r = c.resolved();
  CHECK(r.users == 1);
  CHECK(r.sinr_sweep_db.front() == 0.0);
  CHECK(r.sinr_sweep_db.back() == 40.0);
  c.experiment = "fig4";
  CHECK(c.resolved().trials == 1000);
  c.experiment = "fig7";
  CHECK(c.resolved().users_sweep.size() == 7u);

  ExperimentConfig bad;
  bad.experiment = "fig9";
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.experiment = "fig2";
  bad.n_tx = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.n_tx = 16;
  bad.format = "xml";
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("scenario channels are nested in the user count") {
  ExperimentConfig c;
  Scenario s2 = make_scenario(c, 2, 10.0);
  Scenario s5 = make_scenario(c, 5, 10.0);
  CHECK(rel(CMatrix(s5.channels.topRows(2)), s2.channels) == 0.0);
  CHECK(s5.power_budget == doctest::Approx(1000.0));
  CHECK(s5.sinr_thresholds[3] == doctest::Approx(10.0));
}

TEST_CASE("table formats") {
  ResultTable t;
  t.columns = {"x", "y"};
  t.set_meta("seed", "3");
  t.add_row({1.0, std::numeric_limits<double>::quiet_NaN()});
  t.add_row({0.5, 2.0});
  CHECK_THROWS_AS(t.add_row({1.0}), Error);
  std::string csv = t.to_csv();
  CHECK(csv.find("# seed: 3\n") == 0);
  CHECK(csv.find("x,y\n") != std::string::npos);
  CHECK(csv.find("1.0000000000e+00,nan") != std::string::npos);
  std::string js = t.to_json();
  CHECK(js.find("null") != std::string::npos);
  CHECK(t.column("y") == 1u);
  CHECK_THROWS_AS(t.column("z"), Error);
}

TEST_CASE("fig3 beampatterns peak at the target") {
  ExperimentConfig c;
  c.experiment = "fig3";
  ResultTable t = run_experiment(c);
  std::size_t th = t.column("theta_deg"), p = t.column("pattern");
  double best = -1, at = 99;
  for (const auto& row : t.rows)
    if (row[p] > best) best = row[p], at = row[th];
  CHECK(std::abs(at) < 1e-9);
}

TEST_CASE("fig2 on a short sweep: closed forms agree with the relaxations") {
  ExperimentConfig c;
  c.experiment = "fig2";
  c.sinr_sweep_db = {0.0, 20.0, 30.0};
  ResultTable t = run_experiment(c);
  REQUIRE(t.rows.size() == 3u);
  for (const auto& row : t.rows) {
    CHECK(row[t.column("rel_diff_point")] <= 1e-4);
    CHECK(row[t.column("rel_diff_extended")] <= 1e-4);
  }
  // flat at low thresholds
  CHECK(rel(t.rows[0][t.column("rcrb_closed_deg")], t.rows[1][t.column("rcrb_closed_deg")]) < 1e-12);
}

TEST_CASE("tables are reproducible and carry provenance metadata") {
  ExperimentConfig c;
  c.experiment = "fig5";
  c.sinr_sweep_db = {4.0, 8.0};
  c.users_levels = {2, 3};
  std::string a = run_experiment(c).to_csv();
  c.threads = 1;
  std::string b = run_experiment(c).to_csv();
  CHECK(a == b);
  CHECK(a.find("# config_hash:") != std::string::npos);
  CHECK(a.find("# seed: 1") != std::string::npos);
}

TEST_CASE("infeasible sweep points become gaps") {
  ExperimentConfig c;
  c.experiment = "fig5";
  c.sinr_sweep_db = {10.0, 60.0};
  c.users_levels = {2};
  ResultTable t = run_experiment(c);
  REQUIRE(t.rows.size() == 2u);
  CHECK(std::isnan(t.rows[1][t.column("rcrb_deg")]));
  bool found = false;
  for (const auto& [k, v] : t.metadata)
    if (k == "infeasible_points") found = (v == "1");
  CHECK(found);
}

TEST_CASE("saved solutions round trip") {
  ExperimentConfig c;
  Scenario s = make_scenario(c, 3, 10.0);
  DesignSolution d = design_point_multi(s);
  SavedSolution back = solution_from_json(solution_to_json(s, d, "point"));
  CHECK(back.kind == "point");
  CHECK(rel(back.scenario.channels, s.channels) == 0.0);
  CHECK(rel(back.solution.covariance, d.covariance) == 0.0);
  REQUIRE(back.solution.duals.has_value());
  CHECK(back.solution.duals->mu == d.duals->mu);
  CHECK(back.solution.relaxed_blocks.size() == 3u);
  CHECK_THROWS_AS(solution_from_json("{}"), Error);
}

}  // TEST_SUITE
