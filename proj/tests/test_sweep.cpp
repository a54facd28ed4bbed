#include "qglab/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qg;

TEST_SUITE("sweep") {
  TEST_CASE("log-log slope") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3 * std::pow(v, 0.75));
    const auto f = loglog_slope(x, y);
    CHECK(f.fitted);
    CHECK(f.slope == doctest::Approx(0.75));
    CHECK_FALSE(loglog_slope({1.0}, {1.0}).fitted);
  }

  TEST_CASE("config validation") {
    SweepConfig c;
    c.graph = graphs::single_edge(1.0);
    c.eps = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), Error);
    c.eps = {0.2, 0.1};
    c.k = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    CHECK_THROWS_AS(sweep_config_from_json(nlohmann::json{{"eps", {0.2}}}), Error);
  }

  TEST_CASE("config from the data directory") {
    const auto c = load_sweep_config(std::string(QGLAB_DATA_DIR) + "/configs/star3.json");
    CHECK(c.graph.num_edges() == 3);
    c.validate();
  }

  TEST_CASE("small sweep is deterministic") {
    SweepConfig c;
    c.graph = graphs::star({1.0, 1.0, 1.0});
    c.eps = {0.3, 0.2};
    c.k = 4;
    c.h_cap = 0.05;
    c.reference_h = 5e-3;
    const auto a = run_sweep(c);
    REQUIRE(a.rows.size() == 2);
    for (const auto& row : a.rows) {
      CHECK(row.ok());
      CHECK(row.residuals_ok);
      CHECK(row.eigen.size() == 3);
    }
    std::ostringstream s1, s2;
    a.write_csv(s1);
    run_sweep(c).write_csv(s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().rfind(kSweepCsvHeader, 0) == 0);
  }
}
