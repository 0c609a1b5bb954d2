#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "madogram/estimation.hpp"
#include "madogram/ev_models.hpp"
#include "madogram/masked_data.hpp"
#include "madogram/samplers.hpp"
#include "madogram/variance.hpp"

namespace madogram {

struct ExperimentSpec {
  PickandsModel model;
  MissingnessProfile profile;
  int n = 1024;
  int n_iter = 300;
  int group_size = 30;  // replicates per empirical-variance group
  std::vector<Weights> w_grid;
  std::uint64_t seed = 0;
  LambdaScheme lambda;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct ExperimentResult {
  std::vector<Weights> w_grid;
  // n_iter x grid replicate estimates (kept for group recomputation).
  Eigen::MatrixXd est_hybrid;
  Eigen::MatrixXd est_corrected;
  Eigen::VectorXd nu_true;
  Eigen::VectorXd empirical_hybrid;     // E^H per grid point
  Eigen::VectorXd empirical_corrected;  // E^{H*}
  Eigen::VectorXd theory_hybrid;        // S^H
  Eigen::VectorXd theory_corrected;     // S^{H*}
  Eigen::VectorXd delta;                // |E^H - S^H| / S^H
  double mise_hybrid = 0.0;    // NaN when n_iter is not group-divisible
  double mise_corrected = 0.0;
  int resampled = 0;  // replicates redrawn after an all-missing sample
  double seconds = 0.0;
  std::uint64_t seed = 0;
};

/// Unbiased (divisor m-1) variance of sqrt(n)(nu-hat - nu) over replicates.
double empirical_variance(const Eigen::VectorXd& estimates, double nu_true,
                          int n);

/// Two-level MISE: groups of group_size replicates, squared deviation of the
/// per-group empirical variance from the theoretical value, averaged over
/// groups and the grid.
double mise_from_estimates(const Eigen::MatrixXd& estimates,
                           const Eigen::VectorXd& nu_true,
                           const Eigen::VectorXd& theory, int n,
                           int group_size);

double delta_ratio(double empirical, double theory);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Uniform interior simplex points (Dirichlet(1,...,1), min entry >= 1e-3).
std::vector<Weights> sample_simplex_grid(int d, int count, std::uint64_t seed);

/// Regular bivariate grid {k/(m+1)}, k = 1..m.
std::vector<Weights> bivariate_grid(int m);

/// Presets: e1, desk-e1, e2, e2-100, desk-e2, e3, desk-e3.
ExperimentSpec experiment_preset(const std::string& name);

void write_result_csv(const std::string& path, const ExperimentResult& result);
void write_summary_json(const std::string& path, const ExperimentSpec& spec,
                        const ExperimentResult& result);

}  // namespace madogram
