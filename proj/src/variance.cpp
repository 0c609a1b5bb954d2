#include "madogram/variance.hpp"

#include <cmath>
#include <stdexcept>

namespace madogram {

namespace {

constexpr double kInteriorEps = 1e-3;

void require_interior(const Weights& w) {
  if (w.min_entry() < kInteriorEps)
    throw std::invalid_argument(
        "variance: w must be interior (min_j w_j >= 1e-3)");
}

double A_at(const PickandsModel& model, Eigen::VectorXd z) {
  return pickands(model, Weights(std::move(z)));
}

/// z(s): coordinate j set to 1-s, the rest proportional to w with total s.
Eigen::VectorXd zvec(const Weights& w, int j, double s) {
  Eigen::VectorXd z = w.vec() * (s / (1.0 - w[j]));
  z[j] = 1.0 - s;
  return z;
}

/// Simplex point with mass 1-s on coordinate j and s on coordinate k.
Eigen::VectorXd zero_jk(int d, int j, int k, double s) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  z[j] = 1.0 - s;
  z[k] = s;
  return z;
}

}  // namespace

double sigma_j_sq(const Weights& w, int j) {
  const double wj = w[j];
  if (wj == 0.0) return 0.0;
  return wj / ((1.0 + wj) * (1.0 + wj) * (2.0 + wj));
}

double gamma1_sq(const PickandsModel& model, const Weights& w) {
  const double A = pickands(model, w);
  return A / ((1.0 + A) * (1.0 + A) * (2.0 + A));
}

double gammaj_sq(const PickandsModel& model, const Weights& w, int j) {
  require_interior(w);
  const double A = pickands(model, w);
  const double m = mu(model, w, j);
  const double r = m / (1.0 + A);
  return r * r * w[j] / (2.0 * A + 2.0 - w[j]);
}

double gamma_1j(const PickandsModel& model, const Weights& w, int j,
                const QuadratureSpec& spec) {
  require_interior(w);
  const double A = pickands(model, w);
  const double m = mu(model, w, j);
  const double wj = w[j];
  const double Aj = A / wj;
  const auto q = integrate(
      [&](double s) {
        const double t = A_at(model, zvec(w, j, s)) +
                         (1.0 - s) * (Aj + (1.0 - wj) / wj - 1.0) +
                         s * wj / (1.0 - wj) + 1.0;
        return 1.0 / (t * t);
      },
      0.0, 1.0 - wj, spec);
  const double one_pA2 = (1.0 + A) * (1.0 + A);
  return m * wj / (2.0 * one_pA2 * (2.0 * A + 2.0 - wj)) +
         m / (wj * (1.0 - wj)) * q.value - m / (2.0 * one_pA2);
}

double tau_jk(const PickandsModel& model, const Weights& w, int j, int k,
              const QuadratureSpec& spec) {
  require_interior(w);
  if (j == k) throw std::invalid_argument("tau_jk: need j != k");
  const double A = pickands(model, w);
  const double mj = mu(model, w, j);
  const double mk = mu(model, w, k);
  const double wj = w[j], wk = w[k];
  const double Aj = A / wj, Ak = A / wk;
  const auto q = integrate(
      [&](double s) {
        const double t = A_at(model, zero_jk(w.dim(), j, k, s)) +
                         (1.0 - s) * (Aj + (1.0 - wj) / wj - 1.0) +
                         s * (Ak + (1.0 - wk) / wk - 1.0) + 1.0;
        return 1.0 / (t * t);
      },
      0.0, 1.0, spec);
  return mj * mk / (wj * wk) * q.value - mj * mk / ((1.0 + A) * (1.0 + A));
}

double sigma_jk(const PickandsModel& model, const Weights& w, int j, int k,
                const QuadratureSpec& spec) {
  require_interior(w);
  if (j == k) throw std::invalid_argument("sigma_jk: need j != k");
  const double wj = w[j], wk = w[k];
  const auto q = integrate(
      [&](double s) {
        const double t = A_at(model, zero_jk(w.dim(), j, k, s)) +
                         (1.0 - s) * (1.0 - wj) / wj +
                         s * (1.0 - wk) / wk + 1.0;
        return 1.0 / (t * t);
      },
      0.0, 1.0, spec);
  return q.value / (wj * wk) - 1.0 / ((1.0 + wj) * (1.0 + wk));
}

double sigma_j1(const PickandsModel& model, const Weights& w, int j,
                const QuadratureSpec& spec) {
  require_interior(w);
  const double A = pickands(model, w);
  const double wj = w[j];
  const auto q = integrate(
      [&](double s) {
        const double t = A_at(model, zvec(w, j, s)) +
                         (1.0 - s) * (1.0 - wj) / wj +
                         s * wj / (1.0 - wj) + 1.0;
        return 1.0 / (t * t);
      },
      0.0, 1.0 - wj, spec);
  return q.value / (wj * (1.0 - wj)) +
         (1.0 / (1.0 + A)) * (1.0 / (2.0 + A) - 1.0 / (1.0 + wj));
}

double sigma_jk2(const PickandsModel& model, const Weights& w, int j, int k,
                 const QuadratureSpec& spec) {
  require_interior(w);
  if (j == k) return 0.0;
  const double A = pickands(model, w);
  const double mk = mu(model, w, k);
  const double wj = w[j], wk = w[k];
  const double Ak = A / wk;
  const auto q = integrate(
      [&](double s) {
        const double t = A_at(model, zero_jk(w.dim(), j, k, s)) +
                         (1.0 - s) * (1.0 - wj) / wj +
                         s * (Ak + (1.0 - wk) / wk - 1.0) + 1.0;
        return 1.0 / (t * t);
      },
      0.0, 1.0, spec);
  return mk / (wj * wk) * q.value - mk / ((1.0 + A) * (1.0 + wj));
}

namespace {

VarianceBreakdown assemble(const PickandsModel& model,
                           const MissingnessProfile& profile, const Weights& w,
                           const Eigen::VectorXd& f,
                           const QuadratureSpec& spec) {
  require_interior(w);
  profile.validate();
  const int d = model.dim();
  if (w.dim() != d || profile.dim() != d)
    throw std::invalid_argument("variance: dimension mismatch");

  VarianceBreakdown out;
  out.A = pickands(model, w);
  out.mu.resize(d);
  out.sigma_sq.resize(d);
  out.gammaj_sq.resize(d);
  out.gamma_1j.resize(d);
  out.sigma_j1.resize(d);
  out.tau = Eigen::MatrixXd::Zero(d, d);
  out.sigma_jk = Eigen::MatrixXd::Zero(d, d);
  out.sigma_jk2 = Eigen::MatrixXd::Zero(d, d);
  out.gamma1_sq = gamma1_sq(model, w);
  for (int j = 0; j < d; ++j) {
    out.mu[j] = mu(model, w, j);
    out.sigma_sq[j] = sigma_j_sq(w, j);
    out.gammaj_sq[j] = gammaj_sq(model, w, j);
    out.gamma_1j[j] = gamma_1j(model, w, j, spec);
    out.sigma_j1[j] = sigma_j1(model, w, j, spec);
    for (int k = 0; k < d; ++k) {
      if (k == j) continue;
      out.sigma_jk2(j, k) = sigma_jk2(model, w, j, k, spec);
      if (k > j) {
        out.tau(j, k) = out.tau(k, j) = tau_jk(model, w, j, k, spec);
        out.sigma_jk(j, k) = out.sigma_jk(k, j) = sigma_jk(model, w, j, k, spec);
      }
    }
  }

  const double p = profile.p_complete;
  const Eigen::VectorXd& pj = profile.p_marginal;
  const Eigen::MatrixXd& pjk = profile.p_pair;

  double sd1 = out.gamma1_sq / p;
  for (int j = 0; j < d; ++j)
    sd1 += out.gammaj_sq[j] / pj[j] - 2.0 * out.gamma_1j[j] / pj[j];
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      sd1 += 2.0 * pjk(j, k) / (pj[j] * pj[k]) * out.tau(j, k);
  out.sigma_dplus1_sq = sd1;

  double S = sd1;
  for (int j = 0; j < d; ++j)
    S += (1.0 / p - 1.0 / pj[j]) * f[j] * f[j] * out.sigma_sq[j] /
         (static_cast<double>(d) * d);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      S += 2.0 / (static_cast<double>(d) * d) *
           (1.0 / p - 1.0 / pj[j] - 1.0 / pj[k] + pjk(j, k) / (pj[j] * pj[k])) *
           f[j] * f[k] * out.sigma_jk(j, k);
  for (int j = 0; j < d; ++j)
    S -= 2.0 / d * (1.0 / p - 1.0 / pj[j]) * f[j] * out.sigma_j1[j];
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      if (k == j) continue;
      S += 2.0 / d * (1.0 / pj[k] - pjk(j, k) / (pj[j] * pj[k])) * f[j] *
           out.sigma_jk2(j, k);
    }
  out.S = S;
  // One bound per adaptive integral: 2d one-dimensional plus the pairwise
  // blocks (tau, sigma_jk, sigma_jk2).
  out.quad_error =
      (2.0 * d + 2.0 * d * (d - 1.0)) * std::max(spec.abs_tol, 1e-16);
  return out;
}

}  // namespace

double sigma_dplus1_sq(const PickandsModel& model,
                       const MissingnessProfile& profile, const Weights& w,
                       const QuadratureSpec& spec) {
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(model.dim());
  return assemble(model, profile, w, f, spec).sigma_dplus1_sq;
}

VarianceBreakdown variance_hybrid(const PickandsModel& model,
                                  const MissingnessProfile& profile,
                                  const Weights& w,
                                  const QuadratureSpec& spec) {
  const Eigen::VectorXd f = Eigen::VectorXd::Ones(model.dim());
  return assemble(model, profile, w, f, spec);
}

VarianceBreakdown variance_corrected(const PickandsModel& model,
                                     const MissingnessProfile& profile,
                                     const Weights& w,
                                     const LambdaScheme& lambda,
                                     const QuadratureSpec& spec) {
  const int d = model.dim();
  lambda.validate(d);
  Eigen::VectorXd f(d);
  for (int j = 0; j < d; ++j) f[j] = 1.0 + lambda(w, j) * (d - 1.0);
  return assemble(model, profile, w, f, spec);
}

double pickands_variance(const PickandsModel& model,
                         const MissingnessProfile& profile, const Weights& w,
                         const LambdaScheme& lambda,
                         const QuadratureSpec& spec) {
  const VarianceBreakdown b = variance_corrected(model, profile, w, lambda, spec);
  const double g = 1.0 + b.A;
  return g * g * g * g * b.S;
}

double lemma1_covariance(Lemma1Kind kind, const PickandsModel& model,
                         const MissingnessProfile& profile, int j, int k,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  profile.validate();
  const int d = model.dim();
  switch (kind) {
    case Lemma1Kind::beta_beta_same: {
      const double a = u[0], b = v[0];
      return (std::min(a, b) - a * b) / profile.p_marginal[j];
    }
    case Lemma1Kind::beta_beta_cross: {
      const double a = u[0], b = v[0];
      Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
      ones[j] = a;
      ones[k] = b;
      return profile.p_pair(j, k) /
             (profile.p_marginal[j] * profile.p_marginal[k]) *
             (copula_cdf(model, ones) - a * b);
    }
    case Lemma1Kind::alpha_alpha: {
      const Eigen::VectorXd m = u.cwiseMin(v);
      return (copula_cdf(model, m) -
              copula_cdf(model, u) * copula_cdf(model, v)) /
             profile.p_complete;
    }
    case Lemma1Kind::alpha_beta: {
      Eigen::VectorXd m = u;
      m[j] = std::min(u[j], v[0]);
      return (copula_cdf(model, m) - copula_cdf(model, u) * v[0]) /
             profile.p_marginal[j];
    }
  }
  throw std::invalid_argument("lemma1_covariance: invalid kind");
}

}  // namespace madogram
