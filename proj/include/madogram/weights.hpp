#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace madogram {

/// A point on the unit simplex: the argument of every madogram quantity.
class Weights {
 public:
  explicit Weights(Eigen::VectorXd entries) : entries_(std::move(entries)) {
    if (entries_.size() < 2) throw std::invalid_argument("Weights: need d >= 2");
    double sum = 0.0;
    for (Eigen::Index j = 0; j < entries_.size(); ++j) {
      const double w = entries_[j];
      if (!(w >= 0.0 && w <= 1.0))
        throw std::invalid_argument("Weights: entry outside [0,1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("Weights: entries must sum to 1");
  }

  static Weights equal(int d) {
    return Weights(Eigen::VectorXd::Constant(d, 1.0 / d));
  }
  static Weights vertex(int d, int j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[j] = 1.0;
    return Weights(std::move(e));
  }
  /// Bivariate convention: the scalar w is the weight of the second coordinate.
  static Weights bivariate(double w) {
    Eigen::VectorXd v(2);
    v << 1.0 - w, w;
    return Weights(std::move(v));
  }

  int dim() const { return static_cast<int>(entries_.size()); }
  double operator[](int j) const { return entries_[j]; }
  const Eigen::VectorXd& vec() const { return entries_; }
  double max_entry() const { return entries_.maxCoeff(); }
  double min_entry() const { return entries_.minCoeff(); }

  bool has_vertex(double eps = 1e-9) const {
    return entries_.maxCoeff() >= 1.0 - eps;
  }
  bool interior(double eps = 1e-9) const { return entries_.minCoeff() > eps; }

 private:
  Eigen::VectorXd entries_;
};

}  // namespace madogram
