#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "madogram/cluster.hpp"
#include "madogram/estimation.hpp"
#include "madogram/ev_models.hpp"
#include "madogram/experiments.hpp"
#include "madogram/quadrature.hpp"
#include "madogram/rng.hpp"
#include "madogram/samplers.hpp"
#include "madogram/variance.hpp"

using namespace madogram;

namespace {

/// Aggregates the pass/fail state of one criterion and prints a single
/// verdict line at the end of the case.
struct Gate {
  int id;
  const char* name;
  bool ok = true;

  Gate(int id_, const char* name_) : id(id_), name(name_) {}
  void expect(bool cond) {
    ok = ok && cond;
    CHECK(cond);
  }
  void near(double a, double b, double tol) { expect(std::abs(a - b) <= tol); }
  ~Gate() {
    std::printf("criterion %d (%s): %s\n", id, name, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
  }
};

// ---------------------------------------------------------------------------
// 2-D oracles: the defining double integrals of the variance components.

template <class F2>
double square2d(const F2& f, bool split_at_diag) {
  QuadratureSpec tight{1e-11, 1e-10, 60};
  auto outer = [&](double v) {
    if (!split_at_diag)
      return integrate([&](double u) { return f(u, v); }, 0.0, 1.0, tight)
          .value;
    return integrate([&](double u) { return f(u, v); }, 0.0, v, tight).value +
           integrate([&](double u) { return f(u, v); }, v, 1.0, tight).value;
  };
  return integrate(outer, 0.0, 1.0, tight).value;
}

double cop_at(const PickandsModel& m, const Weights& w, int j, double u,
              double r) {
  Eigen::VectorXd x(w.dim());
  for (int i = 0; i < w.dim(); ++i) x[i] = std::pow(u, w[i]);
  x[j] = r;
  return copula_cdf(m, x);
}

double cop_pair(const PickandsModel& m, int d, int j, int k, double a,
                double b) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(d);
  x[j] = a;
  x[k] = b;
  return copula_cdf(m, x);
}

double oracle_sigma_j_sq(const Weights& w, int j) {
  return square2d(
      [&](double u, double v) {
        return std::pow(std::min(u, v), w[j]) - std::pow(u * v, w[j]);
      },
      true);
}

double oracle_gamma1_sq(const PickandsModel& m, const Weights& w) {
  const double A = pickands(m, w);
  return square2d(
      [&](double u, double v) {
        return std::pow(std::min(u, v), A) - std::pow(u * v, A);
      },
      true);
}

double oracle_gammaj_sq(const PickandsModel& m, const Weights& w, int j) {
  const double A = pickands(m, w);
  const double mj = mu(m, w, j);
  return mj * mj *
         square2d(
             [&](double u, double v) {
               return std::pow(u * v, A - w[j]) *
                      (std::pow(std::min(u, v), w[j]) - std::pow(u * v, w[j]));
             },
             true);
}

double oracle_gamma_1j(const PickandsModel& m, const Weights& w, int j) {
  const double A = pickands(m, w);
  const double mj = mu(m, w, j);
  return mj * square2d(
                  [&](double u, double v) {
                    const double r = std::pow(std::min(u, v), w[j]);
                    return std::pow(v, A - w[j]) *
                           (cop_at(m, w, j, u, r) -
                            std::pow(u, A) * std::pow(v, w[j]));
                  },
                  true);
}

double oracle_sigma_j1(const PickandsModel& m, const Weights& w, int j) {
  const double A = pickands(m, w);
  return square2d(
      [&](double u, double v) {
        const double r = std::pow(std::min(u, v), w[j]);
        return cop_at(m, w, j, u, r) - std::pow(u, A) * std::pow(v, w[j]);
      },
      true);
}

double oracle_tau_jk(const PickandsModel& m, const Weights& w, int j, int k) {
  const double A = pickands(m, w);
  const double mj = mu(m, w, j), mk = mu(m, w, k);
  return mj * mk *
         square2d(
             [&](double u, double v) {
               const double a = std::pow(u, w[j]), b = std::pow(v, w[k]);
               return std::pow(u, A - w[j]) * std::pow(v, A - w[k]) *
                      (cop_pair(m, w.dim(), j, k, a, b) - a * b);
             },
             false);
}

double oracle_sigma_jk(const PickandsModel& m, const Weights& w, int j,
                       int k) {
  return square2d(
      [&](double u, double v) {
        const double a = std::pow(u, w[j]), b = std::pow(v, w[k]);
        return cop_pair(m, w.dim(), j, k, a, b) - a * b;
      },
      false);
}

double oracle_sigma_jk2(const PickandsModel& m, const Weights& w, int j,
                        int k) {
  const double A = pickands(m, w);
  const double mk = mu(m, w, k);
  return mk * square2d(
                  [&](double u, double v) {
                    const double a = std::pow(u, w[j]), b = std::pow(v, w[k]);
                    return std::pow(v, A - w[k]) *
                           (cop_pair(m, w.dim(), j, k, a, b) - a * b);
                  },
                  false);
}

std::vector<Weights> interior_points(int d) {
  std::vector<Weights> out;
  if (d == 2) {
    for (int k = 1; k <= 15; ++k)
      out.push_back(Weights::bivariate(k / 16.0));
  } else {
    for (int i = 1; i <= 4 && out.size() < 15; ++i)
      for (int j = 1; j <= 4 && out.size() < 15; ++j) {
        Eigen::VectorXd w(3);
        w << i / 12.0, j / 12.0, (12 - i - j) / 12.0;
        out.emplace_back(std::move(w));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampler fidelity helpers (empirical copula against the model).

double copula_sup_error(const MaskedMatrix& data, const PickandsModel& model) {
  const int d = static_cast<int>(data.cols());
  const int n = static_cast<int>(data.rows());
  double sup = 0.0;
  std::vector<int> idx(d, 1);
  for (;;) {
    Eigen::VectorXd u(d);
    for (int j = 0; j < d; ++j) u[j] = idx[j] / 10.0;
    int cnt = 0;
    for (int i = 0; i < n; ++i) {
      bool all = true;
      for (int j = 0; j < d; ++j)
        if (data.values(i, j) > u[j]) {
          all = false;
          break;
        }
      if (all) ++cnt;
    }
    sup = std::max(sup, std::abs(static_cast<double>(cnt) / n -
                                 copula_cdf(model, u)));
    int j = 0;
    while (j < d && ++idx[j] > 9) idx[j++] = 1;
    if (j == d) break;
  }
  return sup;
}

double margin_sup_error(const MaskedMatrix& data) {
  const int n = static_cast<int>(data.rows());
  double worst = 0.0;
  for (int j = 0; j < data.cols(); ++j) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = data.values(i, j);
    std::sort(col.begin(), col.end());
    double sup = 0.0;
    for (int i = 0; i < n; ++i) {
      sup = std::max(sup, std::abs((i + 1.0) / n - col[i]));
      sup = std::max(sup, std::abs(static_cast<double>(i) / n - col[i]));
    }
    worst = std::max(worst, sup);
  }
  return worst;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

TEST_CASE("criterion-1 closed forms vs defining integrals") {
  Gate gate(1, "closed forms vs oracle");
  const double tol = 1e-6;
  for (int d : {2, 3}) {
    for (double theta : {1.0, 2.0}) {
      const PickandsModel m =
          theta == 1.0 ? PickandsModel({Independence{}}, d)
                       : PickandsModel({SymmetricLogistic{theta}}, d);
      for (const Weights& w : interior_points(d)) {
        gate.near(gamma1_sq(m, w), oracle_gamma1_sq(m, w), tol);
        for (int j = 0; j < d; ++j) {
          gate.near(sigma_j_sq(w, j), oracle_sigma_j_sq(w, j), tol);
          gate.near(gammaj_sq(m, w, j), oracle_gammaj_sq(m, w, j), tol);
          gate.near(gamma_1j(m, w, j), oracle_gamma_1j(m, w, j), tol);
          gate.near(sigma_j1(m, w, j), oracle_sigma_j1(m, w, j), tol);
          for (int k = j + 1; k < d; ++k) {
            gate.near(tau_jk(m, w, j, k), oracle_tau_jk(m, w, j, k), tol);
            gate.near(sigma_jk(m, w, j, k), oracle_sigma_jk(m, w, j, k), tol);
            gate.near(sigma_jk2(m, w, j, k), oracle_sigma_jk2(m, w, j, k),
                      tol);
            gate.near(sigma_jk2(m, w, k, j), oracle_sigma_jk2(m, w, k, j),
                      tol);
          }
        }
      }
    }
    // Independent-copula closed forms, general missingness path.
    const PickandsModel ind({Independence{}}, d);
    const auto prof = MissingnessProfile::independent(d, 0.75);
    for (const Weights& w : interior_points(d)) {
      double closed = 1.0 / (3.0 * prof.p_complete);
      for (int j = 0; j < d; ++j)
        closed -= w[j] / ((4.0 - w[j]) * prof.p_marginal[j]);
      closed *= 0.25;
      gate.near(sigma_dplus1_sq(ind, prof, w), closed, 1e-9);
      for (int j = 0; j < d; ++j) {
        gate.near(sigma_j1(ind, w, j), w[j] / (6.0 * (1.0 + w[j])), 1e-9);
        for (int k = j + 1; k < d; ++k) {
          gate.near(sigma_jk(ind, w, j, k), 0.0, 1e-9);
          gate.near(sigma_jk2(ind, w, j, k), 0.0, 1e-9);
          gate.near(sigma_jk2(ind, w, k, j), 0.0, 1e-9);
        }
      }
    }
  }
}

TEST_CASE("criterion-2 variance formulas vs Monte Carlo") {
  Gate gate(2, "variance formulas vs Monte Carlo");
  struct Config {
    PickandsModel model;
    const char* label;
  };
  const std::vector<Config> configs = {
      {PickandsModel({HuslerReiss{1.0}}, 2), "HR theta=1.0"},
      {PickandsModel({SymmetricLogistic{2.5}}, 2), "Gumbel theta=2.5"}};
  for (const auto& cfg : configs) {
    ExperimentSpec spec{cfg.model, MissingnessProfile::independent(2, 0.75)};
    spec.n = 1024;
    spec.n_iter = 5000;
    spec.group_size = 100;
    spec.w_grid = {Weights::bivariate(0.2), Weights::bivariate(0.5),
                   Weights::bivariate(0.8)};
    spec.seed = 42;
    const auto r = run_experiment(spec);
    for (int g = 0; g < 3; ++g) {
      const double dh =
          delta_ratio(r.empirical_hybrid[g], r.theory_hybrid[g]);
      const double dc =
          delta_ratio(r.empirical_corrected[g], r.theory_corrected[g]);
      INFO(cfg.label << " w=" << spec.w_grid[g][1] << " delta_H=" << dh
                     << " delta_H*=" << dc);
      gate.expect(dh <= 0.10);
      gate.expect(dc <= 0.10);
    }
  }
}

TEST_CASE("criterion-3 desk-scale MISE") {
  Gate gate(3, "desk-scale MISE");
  for (const char* preset : {"desk-e1", "desk-e2"}) {
    const auto r = run_experiment(experiment_preset(preset));
    INFO(preset << " mise_H=" << r.mise_hybrid
                << " mise_H*=" << r.mise_corrected);
    gate.expect(std::isfinite(r.mise_hybrid));
    gate.expect(r.mise_hybrid <= 5e-4);
    gate.expect(r.mise_corrected <= 5e-4);
  }
}

TEST_CASE("criterion-4 endpoint identities") {
  Gate gate(4, "endpoint identities");
  for (int d : {2, 3}) {
    for (std::uint64_t f = 0; f < 5; ++f) {
      auto data = sample_symmetric_logistic(d, 1.5, 30, 300 + f);
      data = apply_mcar_mask(data, MissingnessProfile::independent(d, 0.7),
                             400 + f);
      if (data.complete_count() < 1) continue;
      for (int j = 0; j < d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e[j] = 1.0;
        const Weights w{e};
        gate.near(corrected_madogram(data, w), (d - 1.0) / (2.0 * d), 1e-12);
        gate.near(pickands_estimate(data, w), 1.0, 1e-12);
      }
    }
  }
}

TEST_CASE("criterion-5 integral representation") {
  Gate gate(5, "integral representation");
  int checked = 0;
  for (int fixture = 0; fixture < 20; ++fixture) {
    auto data = sample_symmetric_logistic(2, 1.0 + fixture * 0.1, 40,
                                          1000 + fixture);
    data = apply_mcar_mask(data, MissingnessProfile::independent(2, 0.85),
                           2000 + fixture);
    if (data.complete_count() == 0) continue;
    const auto r = scaled_ranks(data);
    const Weights w = Weights::bivariate(0.1 + 0.04 * fixture);

    std::vector<double> g1, g2;
    for (auto i : r.complete_rows) {
      g1.push_back(r.u(i, 0));
      g2.push_back(r.u(i, 1));
    }
    auto uniq = [](std::vector<double>& g) {
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
    };
    uniq(g1);
    uniq(g2);
    auto C = [&](int a, int b) {
      if (a < 0 || b < 0) return 0.0;
      Eigen::VectorXd u(2);
      u << g1[a], g2[b];
      return rank_copula(r, u);
    };
    double integral = 0.0;
    for (int a = 0; a < static_cast<int>(g1.size()); ++a)
      for (int b = 0; b < static_cast<int>(g2.size()); ++b) {
        const double mass =
            C(a, b) - C(a - 1, b) - C(a, b - 1) + C(a - 1, b - 1);
        if (mass == 0.0) continue;
        const double p1 = std::pow(g1[a], 1.0 / w[0]);
        const double p2 = std::pow(g2[b], 1.0 / w[1]);
        integral += mass * (std::max(p1, p2) - 0.5 * (p1 + p2));
      }
    gate.near(integral, hybrid_madogram(r, w), 1e-12);
    ++checked;
  }
  gate.expect(checked == 20);
}

TEST_CASE("criterion-6 consistency trend") {
  Gate gate(6, "consistency trend");
  const PickandsModel gum({SymmetricLogistic{2.0}}, 2);
  const Weights half = Weights::bivariate(0.5);
  const double nu = pickands_to_mado(pickands(gum, half), half);
  for (bool masked : {false, true}) {
    std::vector<double> medians;
    for (int n : {100, 400, 1600, 6400}) {
      std::vector<double> errs;
      for (std::uint64_t r = 0; r < 50; ++r) {
        const std::uint64_t s =
            detail::splitmix64(9000 + 100 * n + r + (masked ? 1 : 0));
        auto data = sample_symmetric_logistic(2, 2.0, n, s);
        if (masked)
          data = apply_mcar_mask(
              data, MissingnessProfile::independent(2, 0.75),
              detail::splitmix64(s));
        errs.push_back(std::abs(corrected_madogram(data, half) - nu));
      }
      medians.push_back(median(errs));
    }
    INFO((masked ? "p=0.75" : "complete")
         << " medians " << medians[0] << " " << medians[1] << " "
         << medians[2] << " " << medians[3]);
    for (std::size_t i = 1; i < medians.size(); ++i)
      gate.expect(medians[i] < medians[i - 1]);
  }
}

TEST_CASE("criterion-7 higher-dimensional delta") {
  Gate gate(7, "higher-dimensional delta");
  // The delta trend is a small finite-n bias (about -5% at n=216 falling to
  // about -1% at n=1024); resolving it against Monte Carlo noise needs far
  // more replicates than the production presets use.
  for (int d : {5, 10}) {
    std::vector<double> med;
    for (int n : {216, 512, 1024}) {
      ExperimentSpec spec{PickandsModel({SymmetricLogistic{2.0}}, d),
                          MissingnessProfile::complete(d)};
      spec.n = n;
      spec.n_iter = d == 5 ? 1000 : 2000;
      spec.group_size = spec.n_iter;
      spec.w_grid = sample_simplex_grid(d, 50, 11);
      spec.seed = 314;
      const auto r = run_experiment(spec);
      med.push_back(median(
          std::vector<double>(r.delta.data(), r.delta.data() + r.delta.size())));
    }
    INFO("d=" << d << " medians " << med[0] << " " << med[1] << " "
              << med[2]);
    gate.expect(med[2] <= 0.25);
    gate.expect(med[1] < med[0]);
    gate.expect(med[2] < med[1]);
  }
}

TEST_CASE("criterion-8 sampler fidelity") {
  Gate gate(8, "sampler fidelity");
  constexpr int n = 100000;
  const double dkw = std::sqrt(std::log(2.0 / 1e-3) / (2.0 * n));

  std::vector<PickandsModel> models;
  models.emplace_back(PickandsModel({Independence{}}, 2));
  models.emplace_back(PickandsModel({SymmetricLogistic{2.0}}, 2));
  models.emplace_back(PickandsModel({SymmetricLogistic{1.5}}, 3));
  models.emplace_back(
      PickandsModel({AsymmetricLogistic::bivariate(2.5, 0.1, 1.0)}, 2));
  {
    AsymmetricLogistic tri;
    tri.subsets.push_back({{0}, 1.0, {0.4}});
    tri.subsets.push_back({{1}, 1.0, {0.1}});
    tri.subsets.push_back({{2}, 1.0, {0.6}});
    tri.subsets.push_back({{0, 1}, 1.0 / 0.6, {0.3, 0.2}});
    tri.subsets.push_back({{0, 2}, 1.0 / 0.5, {0.1, 0.1}});
    tri.subsets.push_back({{1, 2}, 1.0 / 0.8, {0.4, 0.1}});
    tri.subsets.push_back({{0, 1, 2}, 1.0 / 0.3, {0.2, 0.3, 0.2}});
    models.emplace_back(PickandsModel({tri}, 3));
  }
  models.emplace_back(PickandsModel({AsymmetricNegativeLogistic{1.5, 0.8, 0.6}}, 2));
  models.emplace_back(PickandsModel({AsymmetricMixed{4.0 / 3.0, -1.0 / 3.0}}, 2));
  models.emplace_back(PickandsModel({HuslerReiss{1.0}}, 2));
  models.emplace_back(PickandsModel({StudentTEV{0.8, 0.2}}, 2));

  std::uint64_t seed = 8800;
  for (const auto& m : models) {
    const auto data = sample_model(m, n, seed++);
    const double margin = margin_sup_error(data);
    const double sup = copula_sup_error(data, m);
    INFO("d=" << m.dim() << " margin=" << margin << " sup=" << sup);
    gate.expect(margin <= dkw);
    gate.expect(sup <= 0.015);
  }
}

TEST_CASE("criterion-9 cluster pipeline") {
  Gate gate(9, "cluster pipeline");
  const std::vector<double> thetas = {1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4};
  int good_seeds = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const StationTable t =
        synthetic_station_fixture(7, 7, 2000, thetas, 1.0, seed);
    const auto assign = constrained_kmeans(t.coords, 7, 7, seed);
    std::vector<int> counts(7, 0);
    for (int a : assign) ++counts[a];
    for (int c = 0; c < 7; ++c) gate.expect(counts[c] == 7);

    const auto reports = cluster_report(t, assign, 10);
    bool clean = reports.size() == 7;
    // theta-hat per ground-truth block; blocks are stations 7b..7b+6.
    std::vector<double> that(7, -1.0);
    for (const auto& rep : reports) {
      if (!rep.retained) {
        clean = false;
        break;
      }
      int block = -1;
      for (int j = 0; j < 49; ++j)
        if (assign[j] == rep.cluster) {
          const int b = j / 7;
          if (block == -1) block = b;
          if (b != block) clean = false;  // geometry not recovered
        }
      if (!clean) break;
      that[block] = rep.theta;
    }
    if (!clean) continue;
    // True extremal coefficients 7^(1/theta) decrease with the block index,
    // so sorting theta-hat descending should reproduce the block order.
    std::vector<int> order(7);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return that[a] > that[b]; });
    int matches = 0;
    for (int i = 0; i < 7; ++i)
      if (order[i] == i) ++matches;
    if (matches >= 6) ++good_seeds;
  }
  INFO("ranking matched in " << good_seeds << "/20 seeds");
  gate.expect(good_seeds >= 16);

  // Sparse fixture: every cluster falls below the overlap threshold.
  const StationTable sparse =
      synthetic_station_fixture(2, 4, 20, {2.0, 2.0}, 0.4, 77);
  std::vector<int> direct(8);
  for (int j = 0; j < 8; ++j) direct[j] = j / 4;
  const auto dropped = cluster_report(sparse, direct, 10);
  for (const auto& rep : dropped) {
    gate.expect(!rep.retained);
    gate.expect(rep.reason == "insufficient overlap");
  }
}
