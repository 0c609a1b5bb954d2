#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "madogram/masked_data.hpp"

namespace madogram {

/// Station annual maxima with gaps; rows are years, columns are stations.
struct StationTable {
  std::vector<std::string> station_ids;
  std::vector<int> years;
  Eigen::MatrixXd coords;  // n_stations x 2, planar
  MaskedMatrix data;       // years x stations
  std::vector<std::string> dropped;  // stations removed for zero coverage

  int n_stations() const { return static_cast<int>(station_ids.size()); }
};

/// Header: year,<station ids>; cells numeric or literal NA. Stations with no
/// observed year are dropped (recorded in `dropped`).
StationTable load_station_csv(const std::string& path);
StationTable load_station_table(std::istream& is);
void write_station_csv(const std::string& path, const StationTable& table);

/// Equal-size k-means on planar coordinates: seeded k-means++ start, then
/// alternating exact balanced assignment (min-cost matching) and centroid
/// updates. coords is n x 2; requires n == k * size.
std::vector<int> constrained_kmeans(const Eigen::MatrixXd& coords, int k,
                                    int size, std::uint64_t seed);

struct ClusterReport {
  int cluster = 0;
  std::vector<std::string> stations;
  int overlap = 0;          // complete rows N
  bool retained = false;
  std::string reason;       // set when dropped
  double nu_corrected = 0.0;
  double theta = 0.0;       // d * A-hat, clipped into [1, d]
  bool clipped = false;
};

std::vector<ClusterReport> cluster_report(const StationTable& table,
                                          const std::vector<int>& assignment,
                                          int min_overlap);

/// Ground-truth fixture: k clusters of `size` stations each, cluster c drawn
/// from the symmetric logistic model with parameter thetas[c], with an MCAR
/// mask of the given observation probability.
StationTable synthetic_station_fixture(int k, int size, int years,
                                       const std::vector<double>& thetas,
                                       double p_obs, std::uint64_t seed);

}  // namespace madogram
