#include "madogram/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "madogram/rng.hpp"

namespace madogram {

void ExperimentSpec::validate() const {
  if (n < 2 || n_iter < 2)
    throw std::invalid_argument("ExperimentSpec: need n >= 2 and n_iter >= 2");
  if (group_size < 2)
    throw std::invalid_argument("ExperimentSpec: group_size must be >= 2");
  if (w_grid.empty())
    throw std::invalid_argument("ExperimentSpec: empty w grid");
  for (const auto& w : w_grid) {
    if (w.dim() != model.dim())
      throw std::invalid_argument("ExperimentSpec: grid dimension mismatch");
    if (w.min_entry() < 1e-3)
      throw std::invalid_argument("ExperimentSpec: grid must be interior");
  }
  profile.validate();
  lambda.validate(model.dim());
}

double empirical_variance(const Eigen::VectorXd& estimates, double nu_true,
                          int n) {
  const auto m = estimates.size();
  if (m < 2)
    throw std::invalid_argument("empirical_variance: need >= 2 replicates");
  const Eigen::VectorXd err =
      std::sqrt(static_cast<double>(n)) *
      (estimates.array() - nu_true).matrix();
  const double mean = err.mean();
  return (err.array() - mean).square().sum() / static_cast<double>(m - 1);
}

double mise_from_estimates(const Eigen::MatrixXd& estimates,
                           const Eigen::VectorXd& nu_true,
                           const Eigen::VectorXd& theory, int n,
                           int group_size) {
  const auto n_iter = estimates.rows();
  const auto grid = estimates.cols();
  if (n_iter % group_size != 0)
    throw std::invalid_argument(
        "mise_from_estimates: n_iter must be divisible by group_size");
  const auto groups = n_iter / group_size;
  double acc = 0.0;
  for (Eigen::Index l = 0; l < groups; ++l) {
    for (Eigen::Index g = 0; g < grid; ++g) {
      const double e = empirical_variance(
          estimates.block(l * group_size, g, group_size, 1), nu_true[g], n);
      const double dlt = e - theory[g];
      acc += dlt * dlt;
    }
  }
  return acc / static_cast<double>(groups * grid);
}

double delta_ratio(double empirical, double theory) {
  if (theory == 0.0) throw std::invalid_argument("delta_ratio: theory is 0");
  return std::abs(empirical - theory) / theory;
}

namespace {

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return detail::splitmix64(detail::splitmix64(seed ^ detail::splitmix64(a)) +
                            b);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int grid = static_cast<int>(spec.w_grid.size());

  ExperimentResult out;
  out.w_grid = spec.w_grid;
  out.seed = spec.seed;
  out.est_hybrid.resize(spec.n_iter, grid);
  out.est_corrected.resize(spec.n_iter, grid);
  out.nu_true.resize(grid);
  out.theory_hybrid.resize(grid);
  out.theory_corrected.resize(grid);
  for (int g = 0; g < grid; ++g) {
    const Weights& w = spec.w_grid[g];
    out.nu_true[g] = pickands_to_mado(pickands(spec.model, w), w);
    out.theory_hybrid[g] =
        variance_hybrid(spec.model, spec.profile, w).S;
    out.theory_corrected[g] =
        variance_corrected(spec.model, spec.profile, w, spec.lambda).S;
  }

  std::atomic<int> next{0};
  std::atomic<int> resampled{0};
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= spec.n_iter) return;
      ScaledRanks ranks;
      for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t s = derive(spec.seed, r, attempt);
        MaskedMatrix data = sample_model(spec.model, spec.n, s);
        data = apply_mcar_mask(data, spec.profile, detail::splitmix64(s));
        if (data.complete_count() >= 1) {
          ranks = scaled_ranks(data);
          break;
        }
        resampled.fetch_add(1);
      }
      for (int g = 0; g < grid; ++g) {
        out.est_hybrid(r, g) = hybrid_madogram(ranks, spec.w_grid[g]);
        out.est_corrected(r, g) =
            corrected_madogram(ranks, spec.w_grid[g], spec.lambda);
      }
    }
  };
  int nworkers = spec.workers > 0
                     ? spec.workers
                     : static_cast<int>(std::thread::hardware_concurrency());
  if (nworkers < 1) nworkers = 1;
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  out.resampled = resampled.load();

  out.empirical_hybrid.resize(grid);
  out.empirical_corrected.resize(grid);
  out.delta.resize(grid);
  for (int g = 0; g < grid; ++g) {
    out.empirical_hybrid[g] =
        empirical_variance(out.est_hybrid.col(g), out.nu_true[g], spec.n);
    out.empirical_corrected[g] =
        empirical_variance(out.est_corrected.col(g), out.nu_true[g], spec.n);
    out.delta[g] = delta_ratio(out.empirical_hybrid[g], out.theory_hybrid[g]);
  }

  if (spec.n_iter % spec.group_size == 0) {
    out.mise_hybrid = mise_from_estimates(out.est_hybrid, out.nu_true,
                                          out.theory_hybrid, spec.n,
                                          spec.group_size);
    out.mise_corrected = mise_from_estimates(out.est_corrected, out.nu_true,
                                             out.theory_corrected, spec.n,
                                             spec.group_size);
  } else {
    out.mise_hybrid = std::numeric_limits<double>::quiet_NaN();
    out.mise_corrected = std::numeric_limits<double>::quiet_NaN();
  }

  out.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return out;
}

std::vector<Weights> sample_simplex_grid(int d, int count,
                                         std::uint64_t seed) {
  std::vector<Weights> out;
  out.reserve(count);
  for (std::uint64_t i = 0; out.size() < static_cast<std::size_t>(count);
       ++i) {
    Stream rng(seed, i);
    Eigen::VectorXd e(d);
    for (int j = 0; j < d; ++j) e[j] = rng.exponential();
    e /= e.sum();
    if (e.minCoeff() < 1e-3) continue;
    out.emplace_back(std::move(e));
  }
  return out;
}

std::vector<Weights> bivariate_grid(int m) {
  std::vector<Weights> out;
  out.reserve(m);
  for (int k = 1; k <= m; ++k)
    out.push_back(Weights::bivariate(static_cast<double>(k) / (m + 1)));
  return out;
}

ExperimentSpec experiment_preset(const std::string& name) {
  auto make = [](PickandsModel model, MissingnessProfile profile,
                 std::vector<Weights> grid, int n, int n_iter) {
    ExperimentSpec s{std::move(model), std::move(profile)};
    s.w_grid = std::move(grid);
    s.n = n;
    s.n_iter = n_iter;
    s.seed = 42;
    return s;
  };
  if (name == "e1")
    return make({SymmetricLogistic{2.5}, 2}, MissingnessProfile::independent(2, 0.75),
                bivariate_grid(199), 1024, 300);
  if (name == "desk-e1")
    return make({SymmetricLogistic{2.5}, 2}, MissingnessProfile::independent(2, 0.75),
                bivariate_grid(39), 1024, 300);
  if (name == "e2")
    return make({SymmetricLogistic{2.0}, 3}, MissingnessProfile::independent(3, 0.9),
                sample_simplex_grid(3, 199, 7), 512, 300);
  if (name == "e2-100")
    return make({SymmetricLogistic{2.0}, 3}, MissingnessProfile::independent(3, 0.9),
                sample_simplex_grid(3, 199, 7), 512, 100);
  if (name == "desk-e2")
    return make({SymmetricLogistic{2.0}, 3}, MissingnessProfile::independent(3, 0.9),
                sample_simplex_grid(3, 50, 7), 512, 300);
  if (name == "e3")
    return make({SymmetricLogistic{2.0}, 5}, MissingnessProfile::complete(5),
                sample_simplex_grid(5, 300, 11), 1024, 100);
  if (name == "desk-e3")
    return make({SymmetricLogistic{2.0}, 5}, MissingnessProfile::complete(5),
                sample_simplex_grid(5, 50, 11), 1024, 100);
  throw std::invalid_argument("experiment_preset: unknown preset '" + name +
                              "'");
}

void write_result_csv(const std::string& path,
                      const ExperimentResult& result) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_result_csv: cannot open " + path);
  os << std::setprecision(17);
  const int d = result.w_grid.empty() ? 0 : result.w_grid.front().dim();
  for (int j = 0; j < d; ++j) os << "w" << (j + 1) << ",";
  os << "E_H,E_Hstar,S_H,S_Hstar,delta\n";
  for (std::size_t g = 0; g < result.w_grid.size(); ++g) {
    for (int j = 0; j < d; ++j) os << result.w_grid[g][j] << ",";
    os << result.empirical_hybrid[g] << ',' << result.empirical_corrected[g]
       << ',' << result.theory_hybrid[g] << ',' << result.theory_corrected[g]
       << ',' << result.delta[g] << '\n';
  }
}

void write_summary_json(const std::string& path, const ExperimentSpec& spec,
                        const ExperimentResult& result) {
  nlohmann::json j;
  j["model"] = model_to_json(spec.model);
  j["n"] = spec.n;
  j["n_iter"] = spec.n_iter;
  j["group_size"] = spec.group_size;
  j["grid_size"] = result.w_grid.size();
  j["seed"] = result.seed;
  if (std::isnan(result.mise_hybrid)) {
    j["mise_hybrid"] = nullptr;
    j["mise_corrected"] = nullptr;
  } else {
    j["mise_hybrid"] = result.mise_hybrid;
    j["mise_corrected"] = result.mise_corrected;
  }
  j["median_delta"] = [&] {
    std::vector<double> dd(result.delta.data(),
                           result.delta.data() + result.delta.size());
    std::sort(dd.begin(), dd.end());
    const auto m = dd.size();
    return m % 2 ? dd[m / 2] : 0.5 * (dd[m / 2 - 1] + dd[m / 2]);
  }();
  j["resampled"] = result.resampled;
  j["seconds"] = result.seconds;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_summary_json: cannot open " + path);
  os << j.dump(2) << '\n';
}

}  // namespace madogram
