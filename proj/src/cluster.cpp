#include "madogram/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "madogram/estimation.hpp"
#include "madogram/rng.hpp"
#include "madogram/samplers.hpp"

namespace madogram {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string()
                                         : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

StationTable load_station_table(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("load_station_table: empty input");
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "year")
    throw std::runtime_error(
        "load_station_table: header must start with 'year'");
  const int ns = static_cast<int>(header.size()) - 1;
  std::vector<std::string> ids(header.begin() + 1, header.end());

  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(ns, 2);
  bool have_x = false, have_y = false;
  std::vector<int> years;
  std::vector<std::vector<double>> vals;
  std::vector<std::vector<bool>> obs;
  std::set<int> seen;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (static_cast<int>(cells.size()) != ns + 1)
      throw std::runtime_error("load_station_table: ragged row");
    if (cells[0] == "x" || cells[0] == "y") {
      const int c = cells[0] == "x" ? 0 : 1;
      (c == 0 ? have_x : have_y) = true;
      for (int j = 0; j < ns; ++j) coords(j, c) = std::stod(cells[j + 1]);
      continue;
    }
    const int year = std::stoi(cells[0]);
    if (!seen.insert(year).second)
      throw std::runtime_error("load_station_table: duplicate year " +
                               std::to_string(year));
    years.push_back(year);
    std::vector<double> row(ns, 0.0);
    std::vector<bool> mask(ns, false);
    for (int j = 0; j < ns; ++j) {
      if (cells[j + 1] == "NA" || cells[j + 1].empty()) continue;
      row[j] = std::stod(cells[j + 1]);
      mask[j] = true;
    }
    vals.push_back(std::move(row));
    obs.push_back(std::move(mask));
  }
  if (years.empty()) throw std::runtime_error("load_station_table: no years");
  if (have_x != have_y)
    throw std::runtime_error("load_station_table: need both x and y rows");

  // Drop zero-coverage stations.
  std::vector<int> keep;
  StationTable out;
  for (int j = 0; j < ns; ++j) {
    bool any = false;
    for (const auto& m : obs)
      if (m[j]) {
        any = true;
        break;
      }
    if (any)
      keep.push_back(j);
    else
      out.dropped.push_back(ids[j]);
  }
  const int nk = static_cast<int>(keep.size());
  if (nk < 2)
    throw std::runtime_error("load_station_table: fewer than 2 usable stations");
  out.years = std::move(years);
  out.coords.resize(nk, 2);
  const Eigen::Index ny = static_cast<Eigen::Index>(out.years.size());
  Eigen::MatrixXd values(ny, nk);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(ny, nk);
  for (int a = 0; a < nk; ++a) {
    const int j = keep[a];
    out.station_ids.push_back(ids[j]);
    out.coords.row(a) = coords.row(j);
    for (Eigen::Index i = 0; i < ny; ++i) {
      values(i, a) = vals[i][j];
      mask(i, a) = obs[i][j];
    }
  }
  out.data = MaskedMatrix(std::move(values), std::move(mask));
  return out;
}

StationTable load_station_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_station_csv: cannot open " + path);
  return load_station_table(is);
}

void write_station_csv(const std::string& path, const StationTable& table) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_station_csv: cannot open " + path);
  os << std::setprecision(17);
  os << "year";
  for (const auto& id : table.station_ids) os << ',' << id;
  os << '\n';
  for (int c = 0; c < 2; ++c) {
    os << (c == 0 ? 'x' : 'y');
    for (int j = 0; j < table.n_stations(); ++j) os << ',' << table.coords(j, c);
    os << '\n';
  }
  for (std::size_t i = 0; i < table.years.size(); ++i) {
    os << table.years[i];
    for (int j = 0; j < table.n_stations(); ++j) {
      os << ',';
      if (table.data.observed(i, j))
        os << table.data.values(i, j);
      else
        os << "NA";
    }
    os << '\n';
  }
}

namespace {

/// Exact min-cost assignment (Hungarian with potentials), square n x n.
/// Returns col match for each row.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) match[p[j] - 1] = j - 1;
  return match;
}

}  // namespace

std::vector<int> constrained_kmeans(const Eigen::MatrixXd& coords, int k,
                                    int size, std::uint64_t seed) {
  const int n = static_cast<int>(coords.rows());
  if (k < 1 || size < 1 || k * size != n)
    throw std::invalid_argument(
        "constrained_kmeans: requires k * size == point count");
  if (coords.cols() != 2)
    throw std::invalid_argument("constrained_kmeans: coords must be n x 2");

  // Seeded k-means++ initialization.
  Stream rng(seed, 0);
  Eigen::MatrixXd centers(k, 2);
  centers.row(0) = coords.row(static_cast<int>(rng.next_u64() % n));
  Eigen::VectorXd dist2 = Eigen::VectorXd::Constant(n, 0.0);
  for (int c = 1; c < k; ++c) {
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int cc = 0; cc < c; ++cc)
        best = std::min(best,
                        (coords.row(i) - centers.row(cc)).squaredNorm());
      dist2[i] = best;
    }
    const double total = dist2.sum();
    int pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total, acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.next_u64() % n);
    }
    centers.row(c) = coords.row(pick);
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    // Balanced assignment: station -> slot, slot s belongs to cluster s/size.
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < n; ++s)
        cost(i, s) = (coords.row(i) - centers.row(s / size)).squaredNorm();
    const auto match = hungarian(cost);
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) next[i] = match[i] / size;
    if (next == assign) break;
    assign = std::move(next);
    for (int c = 0; c < k; ++c) {
      Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
      for (int i = 0; i < n; ++i)
        if (assign[i] == c) mean += coords.row(i);
      centers.row(c) = mean / size;
    }
  }
  return assign;
}

std::vector<ClusterReport> cluster_report(const StationTable& table,
                                          const std::vector<int>& assignment,
                                          int min_overlap) {
  if (static_cast<int>(assignment.size()) != table.n_stations())
    throw std::invalid_argument("cluster_report: assignment size mismatch");
  const int k =
      1 + *std::max_element(assignment.begin(), assignment.end());
  std::vector<ClusterReport> reports;
  for (int c = 0; c < k; ++c) {
    ClusterReport rep;
    rep.cluster = c;
    std::vector<int> members;
    for (int j = 0; j < table.n_stations(); ++j)
      if (assignment[j] == c) {
        members.push_back(j);
        rep.stations.push_back(table.station_ids[j]);
      }
    const int d = static_cast<int>(members.size());
    if (d < 2) {
      rep.reason = "cluster has fewer than 2 stations";
      reports.push_back(std::move(rep));
      continue;
    }
    const Eigen::Index ny = table.data.rows();
    Eigen::MatrixXd values(ny, d);
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(ny, d);
    for (int a = 0; a < d; ++a) {
      values.col(a) = table.data.values.col(members[a]);
      mask.col(a) = table.data.observed.col(members[a]);
    }
    MaskedMatrix sub(std::move(values), std::move(mask));
    rep.overlap = sub.complete_count();
    if (rep.overlap < min_overlap) {
      rep.reason = "insufficient overlap";
      reports.push_back(std::move(rep));
      continue;
    }
    const EstimateReport est = estimate_all(sub, Weights::equal(d));
    rep.nu_corrected = est.nu_corrected;
    rep.theta = std::clamp(d * est.pickands, 1.0, static_cast<double>(d));
    rep.clipped = est.clipped || rep.theta != d * est.pickands;
    rep.retained = true;
    reports.push_back(std::move(rep));
  }
  return reports;
}

StationTable synthetic_station_fixture(int k, int size, int years,
                                       const std::vector<double>& thetas,
                                       double p_obs, std::uint64_t seed) {
  if (static_cast<int>(thetas.size()) != k)
    throw std::invalid_argument(
        "synthetic_station_fixture: need one theta per cluster");
  const int n = k * size;
  StationTable out;
  out.coords.resize(n, 2);
  Eigen::MatrixXd values(years, n);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(years, n);
  Stream jitter(seed, 0xC0C0ULL);
  for (int c = 0; c < k; ++c) {
    MaskedMatrix block = sample_symmetric_logistic(
        size, thetas[c], years, detail::splitmix64(seed + 1000 + c));
    if (p_obs < 1.0)
      block = apply_mcar_mask(block,
                              MissingnessProfile::independent(size, p_obs),
                              detail::splitmix64(seed + 2000 + c));
    for (int a = 0; a < size; ++a) {
      const int j = c * size + a;
      out.station_ids.push_back("S" + std::to_string(j + 1));
      // Well-separated cluster centers with mild jitter.
      out.coords(j, 0) = 10.0 * (c % 3) + jitter.uniform();
      out.coords(j, 1) = 10.0 * (c / 3) + jitter.uniform();
      values.col(j) = block.values.col(a);
      mask.col(j) = block.observed.col(a);
    }
  }
  for (int y = 0; y < years; ++y) out.years.push_back(1950 + y);
  out.data = MaskedMatrix(std::move(values), std::move(mask));
  return out;
}

}  // namespace madogram
