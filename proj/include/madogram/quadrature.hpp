#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace madogram {

/// Tolerances for the adaptive panel integrator.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_splits = 60;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // accumulated error estimate
};

namespace detail {

// Gauss-Kronrod 7-15 pair; all nodes interior (open rule).
// {node, gauss weight, kronrod weight}
inline constexpr double kGK15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529}};

template <class F>
inline void gk15_panel(const F& f, double a, double b, double& value,
                       double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double g7 = kGK15[0][1] * f0;
  double k15 = kGK15[0][2] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kGK15[i][0];
    const double fi = f(mid + dx) + f(mid - dx);
    g7 += kGK15[i][1] * fi;
    k15 += kGK15[i][2] * fi;
  }
  g7 *= half;
  k15 *= half;
  const double diff = 200.0 * std::abs(g7 - k15);
  value = k15;
  err = diff * std::sqrt(diff);
}

}  // namespace detail

/// Adaptive integration of f over [a, b]; splits the worst panel until the
/// summed error estimate meets the spec.
template <class F>
QuadratureResult integrate(const F& f, double a, double b,
                           const QuadratureSpec& spec = {}) {
  struct Panel {
    double a, b, value, err;
  };
  std::vector<Panel> panels;
  {
    double v, e;
    detail::gk15_panel(f, a, b, v, e);
    panels.push_back({a, b, v, e});
  }
  for (int split = 0; split < spec.max_splits * 8; ++split) {
    double total = 0.0, toterr = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      toterr += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (toterr <= spec.abs_tol || toterr <= spec.rel_tol * std::abs(total))
      return {total, toterr};
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    double v1, e1, v2, e2;
    detail::gk15_panel(f, p.a, mid, v1, e1);
    detail::gk15_panel(f, mid, p.b, v2, e2);
    panels[worst] = {p.a, mid, v1, e1};
    panels.push_back({mid, p.b, v2, e2});
  }
  throw std::runtime_error("integrate: adaptive quadrature did not converge");
}

/// Double integral of f over [alo,ahi] x [blo,bhi] by nested adaptive rules.
/// Used mainly by test oracles that integrate the raw (pre-substitution)
/// covariance integrands.
template <class F2>
QuadratureResult integrate2d(const F2& f, double alo, double ahi, double blo,
                             double bhi, const QuadratureSpec& outer = {},
                             const QuadratureSpec& inner = {}) {
  double inner_err = 0.0;
  auto outer_fn = [&](double v) {
    auto res = integrate([&](double u) { return f(u, v); }, alo, ahi, inner);
    inner_err = std::max(inner_err, res.error);
    return res.value;
  };
  auto res = integrate(outer_fn, blo, bhi, outer);
  res.error += inner_err * (bhi - blo);
  return res;
}

}  // namespace madogram
