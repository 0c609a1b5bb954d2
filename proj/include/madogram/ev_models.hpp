#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include <json.hpp>

#include "madogram/weights.hpp"

namespace madogram {

// Parametric extreme-value copula families. Bivariate families follow the
// convention that the scalar weight is w = x_2/(x_1+x_2), i.e. the weight of
// the second coordinate.

struct SymmetricLogistic {
  double theta;  // in [1, inf); theta = 1 is independence
};

struct AsymmetricLogistic {
  struct Subset {
    std::vector<int> members;    // 0-based coordinate indices
    double theta;                // in [1, inf) when |members| >= 2
    std::vector<double> coeffs;  // asymmetry weights, one per member, in [0,1]
  };
  std::vector<Subset> subsets;

  // The (theta, psi1, psi2) parameterization of the bivariate model.
  static AsymmetricLogistic bivariate(double theta, double psi1, double psi2);
};

struct AsymmetricNegativeLogistic {
  double theta;  // in (0, inf)
  double psi1;   // in (0, 1]
  double psi2;   // in (0, 1]; psi1 = psi2 = 1 is the Galambos model
};

struct AsymmetricMixed {
  double theta;
  double kappa;  // theta >= 0, theta+3k >= 0, theta+k <= 1, theta+2k <= 1
};

struct HuslerReiss {
  double theta;  // in (0, inf); dependence increases as theta -> 0
};

struct StudentTEV {
  double theta;   // in (-1, 1)
  double nu_dof;  // > 0
};

struct Independence {};

using ModelVariant =
    std::variant<SymmetricLogistic, AsymmetricLogistic,
                 AsymmetricNegativeLogistic, AsymmetricMixed, HuslerReiss,
                 StudentTEV, Independence>;

class PickandsModel {
 public:
  PickandsModel(ModelVariant variant, int d);

  int dim() const { return d_; }
  const ModelVariant& variant() const { return variant_; }

  /// True when mu has a closed form (no finite differences needed).
  bool analytic_mu() const;

 private:
  ModelVariant variant_;
  int d_;
};

/// Pickands dependence function A(w) in [max_j w_j, 1].
double pickands(const PickandsModel& model, const Weights& w);

/// Stable tail dependence function; homogeneous of order one.
double stdf(const PickandsModel& model, const Eigen::VectorXd& x);

/// j-th first-order partial derivative of the stable tail dependence
/// function, evaluated at w (degree-0 homogeneous, so the scale of the
/// argument is irrelevant).
double mu(const PickandsModel& model, const Weights& w, int j);

/// C(u) = exp(-l(-ln u_1, ..., -ln u_d)).
double copula_cdf(const PickandsModel& model, const Eigen::VectorXd& u);

/// First-order partial derivative of the copula with respect to u_j.
double copula_partial(const PickandsModel& model, const Eigen::VectorXd& u,
                      int j);

/// c(w) = d^{-1} sum_j w_j/(1+w_j), the endpoint constant of the
/// madogram-Pickands identity.
double c_correction(const Weights& w);

/// A = (nu + c)/(1 - nu - c). Throws when nu + c >= 1.
double mado_to_pickands(double nu, const Weights& w);

/// nu = A/(1+A) - c(w); inverse of mado_to_pickands.
double pickands_to_mado(double A, const Weights& w);

/// Extremal coefficient d * A(1/d, ..., 1/d), in [1, d].
double extremal_coefficient(const PickandsModel& model);
double extremal_coefficient(double pickands_at_center, int d);

/// Parse {"family": ..., "d": ..., "params": {...}}.
PickandsModel model_from_json(const nlohmann::json& spec);
nlohmann::json model_to_json(const PickandsModel& model);

}  // namespace madogram
