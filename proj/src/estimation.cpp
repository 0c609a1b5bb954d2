#include "madogram/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "madogram/ev_models.hpp"

namespace madogram {

namespace {

/// u^{1/w}; w = 0 gives 0 since u < 1.
double pow_inv_w(double u, double w) {
  if (w == 0.0) return 0.0;
  if (w == 1.0) return u;
  return std::pow(u, 1.0 / w);
}

}  // namespace

void LambdaScheme::validate(int d) const {
  for (int k = 0; k < d; ++k) {
    const Weights e = Weights::vertex(d, k);
    for (int j = 0; j < d; ++j) {
      const double want = j == k ? 1.0 : 0.0;
      if (std::abs(fn(e, j) - want) > 1e-12)
        throw std::invalid_argument(
            "LambdaScheme: lambda_j(e_k) must equal the Kronecker delta");
    }
  }
}

double marginal_ecdf(const MaskedMatrix& data, int j, double x) {
  int n = 0, le = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!data.observed(i, j)) continue;
    ++n;
    if (data.values(i, j) <= x) ++le;
  }
  if (n == 0)
    throw std::runtime_error("marginal_ecdf: column has no observed values");
  return static_cast<double>(le) / n;
}

double joint_ecdf(const MaskedMatrix& data, const Eigen::VectorXd& x) {
  if (x.size() != data.cols())
    throw std::invalid_argument("joint_ecdf: dimension mismatch");
  int n = 0, le = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!data.row_complete(i)) continue;
    ++n;
    bool all = true;
    for (Eigen::Index j = 0; j < data.cols(); ++j)
      if (data.values(i, j) > x[j]) {
        all = false;
        break;
      }
    if (all) ++le;
  }
  if (n == 0) throw std::runtime_error("joint_ecdf: no complete rows");
  return static_cast<double>(le) / n;
}

ScaledRanks scaled_ranks(const MaskedMatrix& data) {
  const auto n = data.rows();
  const auto d = data.cols();
  ScaledRanks out;
  out.u = Eigen::MatrixXd::Zero(n, d);
  out.observed = data.observed;
  out.n_j.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (data.observed(i, j)) idx.push_back(i);
    const int nj = static_cast<int>(idx.size());
    out.n_j[j] = nj;
    if (nj == 0)
      throw std::runtime_error("scaled_ranks: column has no observed values");
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      return data.values(a, j) < data.values(b, j);
    });
    // Average ranks over tie runs.
    for (int a = 0; a < nj;) {
      int b = a;
      while (b + 1 < nj &&
             data.values(idx[b + 1], j) == data.values(idx[a], j))
        ++b;
      const double r = 0.5 * (a + b) + 1.0;  // mean of ranks a+1..b+1
      for (int t = a; t <= b; ++t) out.u(idx[t], j) = r / (nj + 1);
      a = b + 1;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (data.row_complete(i)) out.complete_rows.push_back(i);
  return out;
}

double hybrid_madogram(const ScaledRanks& ranks, const Weights& w) {
  if (w.dim() != ranks.u.cols())
    throw std::invalid_argument("hybrid_madogram: dimension mismatch");
  if (ranks.complete_rows.empty())
    throw std::runtime_error("hybrid_madogram: no complete rows");
  const int d = w.dim();
  double acc = 0.0;
  for (Eigen::Index i : ranks.complete_rows) {
    double mx = 0.0, sum = 0.0;
    for (int j = 0; j < d; ++j) {
      const double v = pow_inv_w(ranks.u(i, j), w[j]);
      mx = std::max(mx, v);
      sum += v;
    }
    acc += mx - sum / d;
  }
  return acc / static_cast<double>(ranks.complete_rows.size());
}

double hybrid_madogram(const MaskedMatrix& data, const Weights& w) {
  return hybrid_madogram(scaled_ranks(data), w);
}

double corrected_madogram(const ScaledRanks& ranks, const Weights& w,
                          const LambdaScheme& lambda) {
  const int d = w.dim();
  lambda.validate(d);
  double nu = hybrid_madogram(ranks, w);
  const double N = static_cast<double>(ranks.complete_rows.size());
  for (int j = 0; j < d; ++j) {
    const double lam = lambda(w, j);
    if (lam == 0.0) continue;
    double mean = 0.0;
    for (Eigen::Index i : ranks.complete_rows)
      mean += pow_inv_w(ranks.u(i, j), w[j]);
    mean /= N;
    nu -= lam * (d - 1.0) / d * (mean - w[j] / (1.0 + w[j]));
  }
  return nu;
}

double corrected_madogram(const MaskedMatrix& data, const Weights& w,
                          const LambdaScheme& lambda) {
  return corrected_madogram(scaled_ranks(data), w, lambda);
}

EstimateReport estimate_all(const MaskedMatrix& data, const Weights& w,
                            const LambdaScheme& lambda) {
  const ScaledRanks ranks = scaled_ranks(data);
  EstimateReport rep;
  rep.nu_hybrid = hybrid_madogram(ranks, w);
  rep.nu_corrected = corrected_madogram(ranks, w, lambda);
  rep.N = static_cast<int>(ranks.complete_rows.size());
  rep.n_j = ranks.n_j;

  const double c = c_correction(w);
  const double denom = 1.0 - rep.nu_corrected - c;
  double a;
  if (denom <= 1e-12)
    a = std::numeric_limits<double>::infinity();
  else
    a = (rep.nu_corrected + c) / denom;
  const double lo = w.max_entry();
  rep.pickands = std::clamp(a, lo, 1.0);
  rep.clipped = rep.pickands != a;
  return rep;
}

double pickands_estimate(const MaskedMatrix& data, const Weights& w,
                         const LambdaScheme& lambda, bool* clipped) {
  const EstimateReport rep = estimate_all(data, w, lambda);
  if (clipped) *clipped = rep.clipped;
  return rep.pickands;
}

double extremal_coefficient_estimate(const MaskedMatrix& data, bool* clipped) {
  const int d = static_cast<int>(data.cols());
  const double a = pickands_estimate(data, Weights::equal(d), {}, clipped);
  return std::clamp(d * a, 1.0, static_cast<double>(d));
}

double rank_copula(const ScaledRanks& ranks, const Eigen::VectorXd& u) {
  if (u.size() != ranks.u.cols())
    throw std::invalid_argument("rank_copula: dimension mismatch");
  if (ranks.complete_rows.empty())
    throw std::runtime_error("rank_copula: no complete rows");
  int le = 0;
  for (Eigen::Index i : ranks.complete_rows) {
    bool all = true;
    for (Eigen::Index j = 0; j < u.size(); ++j)
      if (ranks.u(i, j) > u[j]) {
        all = false;
        break;
      }
    if (all) ++le;
  }
  return static_cast<double>(le) /
         static_cast<double>(ranks.complete_rows.size());
}

double rank_copula(const MaskedMatrix& data, const Eigen::VectorXd& u) {
  return rank_copula(scaled_ranks(data), u);
}

}  // namespace madogram
