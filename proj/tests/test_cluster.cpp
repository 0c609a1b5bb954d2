#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "madogram/cluster.hpp"

using namespace madogram;

namespace {

const char* kTinyCsv =
    "year,A,B,C\n"
    "x,0.0,1.0,5.0\n"
    "y,0.0,0.5,5.0\n"
    "1950,1.2,NA,3.0\n"
    "1951,0.8,2.1,NA\n"
    "1952,NA,1.9,2.5\n";

/// Partition of {0..n-1} induced by an assignment, as sorted member lists.
std::vector<std::vector<int>> groups_of(const std::vector<int>& assign) {
  const int k = 1 + *std::max_element(assign.begin(), assign.end());
  std::vector<std::vector<int>> g(k);
  for (int i = 0; i < static_cast<int>(assign.size()); ++i)
    g[assign[i]].push_back(i);
  return g;
}

}  // namespace

TEST_CASE("station table: parsing, coordinates, NA cells") {
  std::stringstream ss(kTinyCsv);
  const StationTable t = load_station_table(ss);
  REQUIRE(t.n_stations() == 3);
  CHECK(t.station_ids == std::vector<std::string>{"A", "B", "C"});
  CHECK(t.years == std::vector<int>{1950, 1951, 1952});
  CHECK(t.coords(1, 0) == 1.0);
  CHECK(t.coords(1, 1) == 0.5);
  CHECK(t.data.values(0, 0) == 1.2);
  CHECK(!t.data.observed(0, 1));
  CHECK(t.data.observed(1, 1));
  CHECK(t.dropped.empty());
  CHECK(t.data.complete_count() == 0);
}

TEST_CASE("station table: zero-coverage stations are dropped") {
  std::stringstream ss(
      "year,A,B,C\n"
      "1950,1.0,NA,2.0\n"
      "1951,1.5,NA,2.5\n");
  const StationTable t = load_station_table(ss);
  CHECK(t.n_stations() == 2);
  CHECK(t.station_ids == std::vector<std::string>{"A", "C"});
  CHECK(t.dropped == std::vector<std::string>{"B"});
}

TEST_CASE("station table: malformed inputs") {
  std::stringstream a("year,A,B\n1950,1.0,2.0\n1950,1.1,2.1\n");
  CHECK_THROWS(load_station_table(a));  // duplicate year
  std::stringstream b("year,A,B\nx,0,1\n1950,1.0,2.0\n");
  CHECK_THROWS(load_station_table(b));  // x without y
  std::stringstream c("time,A,B\n1950,1.0,2.0\n");
  CHECK_THROWS(load_station_table(c));  // bad header
  std::stringstream d("year,A,B\n1950,1.0\n");
  CHECK_THROWS(load_station_table(d));  // ragged row
  std::stringstream e("year,A,B\n");
  CHECK_THROWS(load_station_table(e));  // no years
}

TEST_CASE("station table: CSV round trip") {
  std::stringstream ss(kTinyCsv);
  const StationTable t = load_station_table(ss);
  const auto path =
      (std::filesystem::temp_directory_path() / "madogram_stations.csv")
          .string();
  write_station_csv(path, t);
  const StationTable back = load_station_csv(path);
  CHECK(back.station_ids == t.station_ids);
  CHECK(back.years == t.years);
  CHECK(back.coords == t.coords);
  CHECK((back.data.observed == t.data.observed).all());
  for (Eigen::Index i = 0; i < t.data.rows(); ++i)
    for (Eigen::Index j = 0; j < t.data.cols(); ++j)
      if (t.data.observed(i, j))
        CHECK(back.data.values(i, j) == t.data.values(i, j));
  std::filesystem::remove(path);
}

TEST_CASE("constrained k-means: separated pairs") {
  Eigen::MatrixXd coords(4, 2);
  coords << 0, 0, 0, 1, 10, 0, 10, 1;
  const auto assign = constrained_kmeans(coords, 2, 2, 3);
  CHECK(assign[0] == assign[1]);
  CHECK(assign[2] == assign[3]);
  CHECK(assign[0] != assign[2]);
}

TEST_CASE("constrained k-means: collinear adjacent pairs") {
  Eigen::MatrixXd coords(6, 2);
  coords << 0, 0, 1, 0, 10, 0, 11, 0, 20, 0, 21, 0;
  const auto assign = constrained_kmeans(coords, 3, 2, 17);
  CHECK(assign[0] == assign[1]);
  CHECK(assign[2] == assign[3]);
  CHECK(assign[4] == assign[5]);
  CHECK(assign[0] != assign[2]);
  CHECK(assign[2] != assign[4]);
  CHECK(assign[0] != assign[4]);
}

TEST_CASE("constrained k-means: balance, determinism, validation") {
  Eigen::MatrixXd coords(12, 2);
  // Deliberately unbalanced geometry: 9 points near the origin, 3 far away.
  for (int i = 0; i < 9; ++i) coords.row(i) << 0.1 * i, 0.2 * (i % 3);
  for (int i = 9; i < 12; ++i) coords.row(i) << 50.0 + i, 1.0;
  const auto assign = constrained_kmeans(coords, 3, 4, 7);
  for (const auto& g : groups_of(assign)) CHECK(g.size() == 4);
  CHECK(assign == constrained_kmeans(coords, 3, 4, 7));

  CHECK_THROWS(constrained_kmeans(coords, 3, 5, 7));  // 15 != 12
  CHECK_THROWS(constrained_kmeans(Eigen::MatrixXd::Zero(4, 3), 2, 2, 7));

  const auto one = constrained_kmeans(coords, 1, 12, 7);
  for (int a : one) CHECK(a == 0);
}

TEST_CASE("synthetic fixture geometry is recovered") {
  const StationTable t =
      synthetic_station_fixture(3, 4, 60, {2.0, 3.0, 1.5}, 0.9, 21);
  REQUIRE(t.n_stations() == 12);
  REQUIRE(t.years.size() == 60);
  const auto assign = constrained_kmeans(t.coords, 3, 4, 5);
  // Stations 4c..4c+3 share a cluster center, so the partition must match.
  for (int c = 0; c < 3; ++c)
    for (int a = 1; a < 4; ++a) CHECK(assign[4 * c + a] == assign[4 * c]);
}

TEST_CASE("cluster report: estimates recover the extremal coefficients") {
  // theta-hat estimates d^(1/theta) for the symmetric logistic.
  const StationTable t =
      synthetic_station_fixture(2, 7, 500, {2.0, 1.0}, 1.0, 33);
  std::vector<int> assign(14);
  for (int j = 0; j < 14; ++j) assign[j] = j / 7;
  const auto reports = cluster_report(t, assign, 50);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.retained);
    CHECK(r.overlap == 500);
    CHECK(r.stations.size() == 7);
  }
  CHECK(reports[0].theta == doctest::Approx(std::sqrt(7.0)).epsilon(0.06));
  CHECK(reports[1].theta == doctest::Approx(7.0).epsilon(0.06));
}

TEST_CASE("cluster report: drop reasons") {
  const StationTable t =
      synthetic_station_fixture(2, 3, 40, {2.0, 2.0}, 0.5, 8);
  std::vector<int> assign = {0, 0, 0, 1, 1, 1};
  const auto drop = cluster_report(t, assign, 10000);
  for (const auto& r : drop) {
    CHECK(!r.retained);
    CHECK(r.reason == "insufficient overlap");
  }

  // A singleton cluster cannot carry a dependence estimate.
  std::vector<int> lonely = {0, 0, 0, 1, 1, 2};
  const auto rep = cluster_report(t, lonely, 2);
  REQUIRE(rep.size() == 3);
  CHECK(!rep[2].retained);
  CHECK(rep[2].reason == "cluster has fewer than 2 stations");

  CHECK_THROWS(cluster_report(t, {0, 1}, 2));
  CHECK_THROWS(synthetic_station_fixture(2, 3, 40, {2.0}, 0.5, 8));
}
