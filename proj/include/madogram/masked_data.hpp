#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace madogram {

/// n x d observation matrix with an observedness mask. values(i,j) is
/// meaningful only where observed(i,j); serialized cells carry literal NA
/// when unobserved.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed;

  MaskedMatrix() = default;
  MaskedMatrix(Eigen::MatrixXd v,
               Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> m);
  /// Fully observed matrix.
  explicit MaskedMatrix(Eigen::MatrixXd v);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  /// Observed count of column j.
  int col_count(int j) const;
  std::vector<int> col_counts() const;
  /// Number of fully observed rows.
  int complete_count() const;
  bool row_complete(Eigen::Index i) const;
};

/// Observedness probabilities p_j, p, and pairwise p_{jk}.
struct MissingnessProfile {
  enum class Mode { independent, all_or_none, custom };

  Mode mode = Mode::independent;
  Eigen::VectorXd p_marginal;  // p_1 .. p_d
  double p_complete = 1.0;     // p
  Eigen::MatrixXd p_pair;      // p_{jk}; diagonal holds p_j

  static MissingnessProfile independent(const Eigen::VectorXd& p_marginal);
  static MissingnessProfile independent(int d, double p);
  static MissingnessProfile all_or_none(int d, double p);
  static MissingnessProfile complete(int d);
  static MissingnessProfile custom(Eigen::VectorXd p_marginal,
                                   Eigen::MatrixXd p_pair, double p_complete);

  int dim() const { return static_cast<int>(p_marginal.size()); }
  /// Throws unless p <= p_jk <= min(p_j, p_k) and all entries lie in (0,1].
  void validate() const;
};

MissingnessProfile profile_from_json(const std::string& text);
std::string profile_to_json(const MissingnessProfile& profile);

/// NA-CSV round-trip. Header "x1,...,xd" is written and ignored on read
/// (any header accepted); unobserved cells are the literal token NA.
void write_na_csv(std::ostream& os, const MaskedMatrix& data);
void write_na_csv(const std::string& path, const MaskedMatrix& data);
MaskedMatrix read_na_csv(std::istream& is);
MaskedMatrix read_na_csv_file(const std::string& path);

}  // namespace madogram
