#pragma once

#include <functional>
#include <vector>

#include "madogram/masked_data.hpp"
#include "madogram/weights.hpp"

namespace madogram {

/// Per-cell scaled ranks rank/(n_j+1), defined only where observed.
struct ScaledRanks {
  Eigen::MatrixXd u;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed;
  std::vector<int> n_j;
  std::vector<Eigen::Index> complete_rows;
};

/// The endpoint-correction weights lambda_j; must satisfy
/// lambda_j(e_k) = delta_{jk}. The default is lambda_j(w) = w_j.
struct LambdaScheme {
  std::function<double(const Weights&, int)> fn = [](const Weights& w, int j) {
    return w[j];
  };

  double operator()(const Weights& w, int j) const { return fn(w, j); }
  /// Checks the Kronecker constraint at every vertex of the simplex.
  void validate(int d) const;
};

double marginal_ecdf(const MaskedMatrix& data, int j, double x);
double joint_ecdf(const MaskedMatrix& data, const Eigen::VectorXd& x);

/// Average-rank tie handling; unobserved cells are left undefined.
ScaledRanks scaled_ranks(const MaskedMatrix& data);

/// Mean over complete rows of max_j u^{1/w_j} - d^{-1} sum_j u^{1/w_j}.
/// w_j = 0 contributes 0 (the u^{1/0} = 0 convention).
double hybrid_madogram(const MaskedMatrix& data, const Weights& w);
double hybrid_madogram(const ScaledRanks& ranks, const Weights& w);

/// Endpoint-corrected estimator; exactly (d-1)/(2d) at simplex vertices.
double corrected_madogram(const MaskedMatrix& data, const Weights& w,
                          const LambdaScheme& lambda = {});
double corrected_madogram(const ScaledRanks& ranks, const Weights& w,
                          const LambdaScheme& lambda = {});

struct EstimateReport {
  double nu_hybrid = 0.0;
  double nu_corrected = 0.0;
  double pickands = 0.0;  // after clipping
  bool clipped = false;
  int N = 0;
  std::vector<int> n_j;
};

EstimateReport estimate_all(const MaskedMatrix& data, const Weights& w,
                            const LambdaScheme& lambda = {});

/// Corrected-madogram Pickands estimate, clipped into [max_j w_j, 1].
double pickands_estimate(const MaskedMatrix& data, const Weights& w,
                         const LambdaScheme& lambda = {},
                         bool* clipped = nullptr);

/// theta-hat = d * A-hat at equal weights, clipped into [1, d].
double extremal_coefficient_estimate(const MaskedMatrix& data,
                                     bool* clipped = nullptr);

/// Rank-based copula estimator over complete rows.
double rank_copula(const MaskedMatrix& data, const Eigen::VectorXd& u);
double rank_copula(const ScaledRanks& ranks, const Eigen::VectorXd& u);

}  // namespace madogram
