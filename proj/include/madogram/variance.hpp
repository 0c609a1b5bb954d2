#pragma once

#include "madogram/estimation.hpp"
#include "madogram/ev_models.hpp"
#include "madogram/masked_data.hpp"
#include "madogram/quadrature.hpp"
#include "madogram/weights.hpp"

namespace madogram {

/// All components of the closed-form asymptotic variance, plus the totals.
struct VarianceBreakdown {
  double A = 0.0;
  Eigen::VectorXd mu;          // stdf partials at w
  Eigen::VectorXd sigma_sq;    // sigma_j^2, closed form
  double gamma1_sq = 0.0;
  Eigen::VectorXd gammaj_sq;
  Eigen::VectorXd gamma_1j;
  Eigen::MatrixXd tau;         // symmetric, zero diagonal
  Eigen::MatrixXd sigma_jk;    // symmetric, zero diagonal
  Eigen::VectorXd sigma_j1;    // sigma_j^(1)
  Eigen::MatrixXd sigma_jk2;   // sigma_jk^(2), zero diagonal
  double sigma_dplus1_sq = 0.0;
  double S = 0.0;              // S^H or S^{H*} depending on the lambda factors
  double quad_error = 0.0;     // summed quadrature error estimates
};

/// sigma_j^2 = (1/(1+w_j)^2) * w_j/(2+w_j); w_j = 0 gives 0.
double sigma_j_sq(const Weights& w, int j);

double gamma1_sq(const PickandsModel& model, const Weights& w);
double gammaj_sq(const PickandsModel& model, const Weights& w, int j);
double gamma_1j(const PickandsModel& model, const Weights& w, int j,
                const QuadratureSpec& spec = {});
double tau_jk(const PickandsModel& model, const Weights& w, int j, int k,
              const QuadratureSpec& spec = {});
double sigma_jk(const PickandsModel& model, const Weights& w, int j, int k,
                const QuadratureSpec& spec = {});
double sigma_j1(const PickandsModel& model, const Weights& w, int j,
                const QuadratureSpec& spec = {});
/// sigma_jk^(2); exactly 0 when j == k.
double sigma_jk2(const PickandsModel& model, const Weights& w, int j, int k,
                 const QuadratureSpec& spec = {});

/// Variance of the integrated limit process S_C.
double sigma_dplus1_sq(const PickandsModel& model,
                       const MissingnessProfile& profile, const Weights& w,
                       const QuadratureSpec& spec = {});

/// Asymptotic variance of sqrt(n)(nu-hat^H - nu).
VarianceBreakdown variance_hybrid(const PickandsModel& model,
                                  const MissingnessProfile& profile,
                                  const Weights& w,
                                  const QuadratureSpec& spec = {});

/// Same for the corrected estimator: per-j factors 1 + lambda_j(w)(d-1).
VarianceBreakdown variance_corrected(const PickandsModel& model,
                                     const MissingnessProfile& profile,
                                     const Weights& w,
                                     const LambdaScheme& lambda = {},
                                     const QuadratureSpec& spec = {});

/// V = (1+A)^4 * S^{H*}.
double pickands_variance(const PickandsModel& model,
                         const MissingnessProfile& profile, const Weights& w,
                         const LambdaScheme& lambda = {},
                         const QuadratureSpec& spec = {});

enum class Lemma1Kind {
  beta_beta_same,
  beta_beta_cross,
  alpha_alpha,
  alpha_beta
};

/// Limit-process covariances, used as Monte Carlo oracles.
///  beta_beta_same:  cov(beta_j(u), beta_j(v)),     args (j, u, v)
///  beta_beta_cross: cov(beta_j(u_j), beta_k(v_k)), args (j, k, u_j, v_k)
///  alpha_alpha:     cov(alpha(u), alpha(v)),       vectors u, v
///  alpha_beta:      cov(alpha(u), beta_j(v_j)),    args (j, v_j), vector u
double lemma1_covariance(Lemma1Kind kind, const PickandsModel& model,
                         const MissingnessProfile& profile, int j, int k,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v);

}  // namespace madogram
