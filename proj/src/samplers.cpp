#include "madogram/samplers.hpp"

#include <cmath>
#include <stdexcept>

#include "madogram/rng.hpp"

namespace madogram {

namespace {

/// Chambers-Mallows-Stuck positive alpha-stable draw, alpha in (0,1).
double positive_stable(Stream& rng, double alpha) {
  const double v = 3.141592653589793 * rng.uniform_open();
  const double w = rng.exponential();
  const double a = std::sin(alpha * v) / std::pow(std::sin(v), 1.0 / alpha);
  const double b = std::sin((1.0 - alpha) * v) / w;
  return a * std::pow(b, (1.0 - alpha) / alpha);
}

/// One symmetric-logistic row on uniform margins.
void gumbel_row(Stream& rng, double theta, Eigen::VectorXd& out) {
  const auto d = out.size();
  if (theta == 1.0) {
    for (Eigen::Index j = 0; j < d; ++j) out[j] = rng.uniform_open();
    return;
  }
  const double alpha = 1.0 / theta;
  const double s = positive_stable(rng, alpha);
  for (Eigen::Index j = 0; j < d; ++j)
    out[j] = std::exp(-std::pow(rng.exponential() / s, alpha));
}

}  // namespace

MaskedMatrix sample_symmetric_logistic(int d, double theta, int n,
                                       std::uint64_t seed) {
  if (theta < 1.0)
    throw std::invalid_argument("sample_symmetric_logistic: theta must be >= 1");
  if (d < 2 || n < 1)
    throw std::invalid_argument("sample_symmetric_logistic: bad d or n");
  Eigen::MatrixXd values(n, d);
  Eigen::VectorXd row(d);
  for (int i = 0; i < n; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    gumbel_row(rng, theta, row);
    values.row(i) = row;
  }
  return MaskedMatrix(std::move(values));
}

MaskedMatrix sample_asymmetric_logistic(int d, const AsymmetricLogistic& model,
                                        int n, std::uint64_t seed) {
  [[maybe_unused]] PickandsModel validated(model, d);  // parameter checks
  if (n < 1) throw std::invalid_argument("sample_asymmetric_logistic: n < 1");
  Eigen::MatrixXd values(n, d);
  for (int i = 0; i < n; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    // Frechet-scale maxima over per-subset frailty blocks.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
    for (const auto& b : model.subsets) {
      if (b.members.size() == 1 || b.theta == 1.0) {
        for (std::size_t m = 0; m < b.members.size(); ++m) {
          const double t = 1.0 / rng.exponential();
          x[b.members[m]] = std::max(x[b.members[m]], b.coeffs[m] * t);
        }
      } else {
        const double alpha = 1.0 / b.theta;
        const double s = positive_stable(rng, alpha);
        for (std::size_t m = 0; m < b.members.size(); ++m) {
          const double t = std::pow(s / rng.exponential(), alpha);
          x[b.members[m]] = std::max(x[b.members[m]], b.coeffs[m] * t);
        }
      }
    }
    for (int j = 0; j < d; ++j)
      values(i, j) = x[j] > 0.0 ? std::exp(-1.0 / x[j]) : 0.0;
  }
  return MaskedMatrix(std::move(values));
}

namespace {

/// Conditional CDF of U2 given U1 = u1; strictly increasing in v.
double conditional_cdf(const PickandsModel& model, double u1, double v) {
  if (v >= 1.0 - 1e-13) return 1.0;
  if (v <= 0.0) return 0.0;
  double x0 = -std::log(u1);
  double x1 = -std::log(v);
  // Keep the simplex point away from the vertices where the derivative is
  // undefined; the perturbation is far below the bisection tolerance.
  x0 = std::max(x0, 1e-8 * x1);
  x1 = std::max(x1, 1e-8 * x0);
  const double s = x0 + x1;
  Eigen::VectorXd xv(2);
  xv << x0, x1;
  const double l = stdf(model, xv);
  const double m1 = mu(model, Weights(xv / s), 0);
  return std::exp(-l) / u1 * m1;
}

}  // namespace

MaskedMatrix sample_bivariate_conditional(const PickandsModel& model, int n,
                                          std::uint64_t seed) {
  if (model.dim() != 2)
    throw std::invalid_argument("sample_bivariate_conditional: d must be 2");
  if (n < 1) throw std::invalid_argument("sample_bivariate_conditional: n < 1");
  Eigen::MatrixXd values(n, 2);
  for (int i = 0; i < n; ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    const double u1 = rng.uniform_open();
    const double target = rng.uniform_open();
    double lo = 0.0, hi = 1.0, mid = 0.5;
    for (int step = 0; step < 200; ++step) {
      mid = 0.5 * (lo + hi);
      const double c = conditional_cdf(model, u1, mid);
      if (std::abs(c - target) <= 1e-10) break;
      (c < target ? lo : hi) = mid;
    }
    values(i, 0) = u1;
    values(i, 1) = mid;
  }
  return MaskedMatrix(std::move(values));
}

MaskedMatrix sample_model(const PickandsModel& model, int n,
                          std::uint64_t seed) {
  if (auto* m = std::get_if<SymmetricLogistic>(&model.variant()))
    return sample_symmetric_logistic(model.dim(), m->theta, n, seed);
  if (auto* m = std::get_if<AsymmetricLogistic>(&model.variant()))
    return sample_asymmetric_logistic(model.dim(), *m, n, seed);
  if (std::holds_alternative<Independence>(model.variant()))
    return sample_symmetric_logistic(model.dim(), 1.0, n, seed);
  return sample_bivariate_conditional(model, n, seed);
}

MaskedMatrix apply_mcar_mask(const MaskedMatrix& data,
                             const MissingnessProfile& profile,
                             std::uint64_t seed) {
  profile.validate();
  if (profile.dim() != data.cols())
    throw std::invalid_argument("apply_mcar_mask: dimension mismatch");
  if (profile.mode == MissingnessProfile::Mode::custom)
    throw std::invalid_argument(
        "apply_mcar_mask: custom profiles carry no sampling mechanism");
  MaskedMatrix out = data;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    if (profile.mode == MissingnessProfile::Mode::all_or_none) {
      const bool keep = rng.bernoulli(profile.p_complete);
      for (Eigen::Index j = 0; j < data.cols(); ++j)
        out.observed(i, j) = out.observed(i, j) && keep;
    } else {
      for (Eigen::Index j = 0; j < data.cols(); ++j)
        out.observed(i, j) =
            out.observed(i, j) && rng.bernoulli(profile.p_marginal[j]);
    }
  }
  return out;
}

MaskedMatrix to_frechet(const MaskedMatrix& data) {
  MaskedMatrix out = data;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < data.cols(); ++j)
      if (out.observed(i, j))
        out.values(i, j) = -1.0 / std::log(out.values(i, j));
  return out;
}

}  // namespace madogram
