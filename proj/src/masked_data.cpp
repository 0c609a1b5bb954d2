#include "madogram/masked_data.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace madogram {

MaskedMatrix::MaskedMatrix(
    Eigen::MatrixXd v, Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> m)
    : values(std::move(v)), observed(std::move(m)) {
  if (values.rows() != observed.rows() || values.cols() != observed.cols())
    throw std::invalid_argument("MaskedMatrix: mask shape mismatch");
}

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd v) : values(std::move(v)) {
  observed.setConstant(values.rows(), values.cols(), true);
}

int MaskedMatrix::col_count(int j) const {
  return static_cast<int>(observed.col(j).count());
}

std::vector<int> MaskedMatrix::col_counts() const {
  std::vector<int> out(cols());
  for (Eigen::Index j = 0; j < cols(); ++j)
    out[j] = col_count(static_cast<int>(j));
  return out;
}

bool MaskedMatrix::row_complete(Eigen::Index i) const {
  return observed.row(i).all();
}

int MaskedMatrix::complete_count() const {
  int n = 0;
  for (Eigen::Index i = 0; i < rows(); ++i)
    if (row_complete(i)) ++n;
  return n;
}

MissingnessProfile MissingnessProfile::independent(
    const Eigen::VectorXd& p_marginal) {
  MissingnessProfile pr;
  pr.mode = Mode::independent;
  pr.p_marginal = p_marginal;
  pr.p_complete = p_marginal.prod();
  pr.p_pair = p_marginal * p_marginal.transpose();
  pr.p_pair.diagonal() = p_marginal;
  pr.validate();
  return pr;
}

MissingnessProfile MissingnessProfile::independent(int d, double p) {
  return independent(Eigen::VectorXd::Constant(d, p));
}

MissingnessProfile MissingnessProfile::all_or_none(int d, double p) {
  MissingnessProfile pr;
  pr.mode = Mode::all_or_none;
  pr.p_marginal = Eigen::VectorXd::Constant(d, p);
  pr.p_complete = p;
  pr.p_pair = Eigen::MatrixXd::Constant(d, d, p);
  pr.validate();
  return pr;
}

MissingnessProfile MissingnessProfile::complete(int d) {
  return independent(d, 1.0);
}

MissingnessProfile MissingnessProfile::custom(Eigen::VectorXd p_marginal,
                                              Eigen::MatrixXd p_pair,
                                              double p_complete) {
  MissingnessProfile pr;
  pr.mode = Mode::custom;
  pr.p_marginal = std::move(p_marginal);
  pr.p_pair = std::move(p_pair);
  pr.p_complete = p_complete;
  pr.validate();
  return pr;
}

void MissingnessProfile::validate() const {
  const int d = dim();
  if (d < 2) throw std::invalid_argument("MissingnessProfile: need d >= 2");
  if (p_pair.rows() != d || p_pair.cols() != d)
    throw std::invalid_argument("MissingnessProfile: p_pair shape mismatch");
  if (!(p_complete > 0.0 && p_complete <= 1.0))
    throw std::invalid_argument("MissingnessProfile: p must lie in (0,1]");
  for (int j = 0; j < d; ++j) {
    if (!(p_marginal[j] > 0.0 && p_marginal[j] <= 1.0))
      throw std::invalid_argument("MissingnessProfile: p_j must lie in (0,1]");
    for (int k = 0; k < d; ++k) {
      if (j == k) continue;
      const double pjk = p_pair(j, k);
      const double ub = std::min(p_marginal[j], p_marginal[k]);
      if (!(pjk >= p_complete - 1e-12 && pjk <= ub + 1e-12))
        throw std::invalid_argument(
            "MissingnessProfile: requires p <= p_jk <= min(p_j, p_k)");
      if (std::abs(p_pair(j, k) - p_pair(k, j)) > 1e-12)
        throw std::invalid_argument("MissingnessProfile: p_pair not symmetric");
    }
  }
}

MissingnessProfile profile_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const std::string mode = j.value("mode", "independent");
  if (mode == "independent") {
    if (j.at("p").is_array()) {
      const auto v = j.at("p").get<std::vector<double>>();
      return MissingnessProfile::independent(
          Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    }
    return MissingnessProfile::independent(j.at("d").get<int>(),
                                           j.at("p").get<double>());
  }
  if (mode == "all-or-none")
    return MissingnessProfile::all_or_none(j.at("d").get<int>(),
                                           j.at("p").get<double>());
  if (mode == "custom") {
    const auto pm = j.at("p_marginal").get<std::vector<double>>();
    const auto pp = j.at("p_pair").get<std::vector<std::vector<double>>>();
    const int d = static_cast<int>(pm.size());
    Eigen::MatrixXd pair(d, d);
    if (static_cast<int>(pp.size()) != d)
      throw std::invalid_argument("profile_from_json: p_pair shape mismatch");
    for (int a = 0; a < d; ++a) {
      if (static_cast<int>(pp[a].size()) != d)
        throw std::invalid_argument("profile_from_json: p_pair shape mismatch");
      for (int b = 0; b < d; ++b) pair(a, b) = pp[a][b];
    }
    return MissingnessProfile::custom(
        Eigen::Map<const Eigen::VectorXd>(pm.data(), d), std::move(pair),
        j.at("p_complete").get<double>());
  }
  throw std::invalid_argument("profile_from_json: unknown mode '" + mode + "'");
}

std::string profile_to_json(const MissingnessProfile& profile) {
  nlohmann::json j;
  const int d = profile.dim();
  switch (profile.mode) {
    case MissingnessProfile::Mode::independent:
      j["mode"] = "independent";
      j["p"] = std::vector<double>(profile.p_marginal.data(),
                                   profile.p_marginal.data() + d);
      break;
    case MissingnessProfile::Mode::all_or_none:
      j["mode"] = "all-or-none";
      j["d"] = d;
      j["p"] = profile.p_complete;
      break;
    case MissingnessProfile::Mode::custom: {
      j["mode"] = "custom";
      j["p_marginal"] = std::vector<double>(profile.p_marginal.data(),
                                            profile.p_marginal.data() + d);
      std::vector<std::vector<double>> pp(d, std::vector<double>(d));
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) pp[a][b] = profile.p_pair(a, b);
      j["p_pair"] = pp;
      j["p_complete"] = profile.p_complete;
      break;
    }
  }
  return j.dump();
}

void write_na_csv(std::ostream& os, const MaskedMatrix& data) {
  os << std::setprecision(17);
  for (Eigen::Index jj = 0; jj < data.cols(); ++jj)
    os << (jj ? ",x" : "x") << (jj + 1);
  os << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index jj = 0; jj < data.cols(); ++jj) {
      if (jj) os << ',';
      if (data.observed(i, jj))
        os << data.values(i, jj);
      else
        os << "NA";
    }
    os << '\n';
  }
}

void write_na_csv(const std::string& path, const MaskedMatrix& data) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_na_csv: cannot open " + path);
  write_na_csv(os, data);
}

MaskedMatrix read_na_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("read_na_csv: empty input");
  std::vector<std::vector<double>> vals;
  std::vector<std::vector<bool>> obs;
  std::size_t d = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::vector<bool> mask;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      const std::string tok =
          b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
      if (tok == "NA" || tok.empty()) {
        row.push_back(0.0);
        mask.push_back(false);
      } else {
        std::size_t pos = 0;
        double v;
        try {
          v = std::stod(tok, &pos);
        } catch (const std::exception&) {
          throw std::runtime_error("read_na_csv: bad cell '" + tok + "'");
        }
        if (pos != tok.size())
          throw std::runtime_error("read_na_csv: bad cell '" + tok + "'");
        row.push_back(v);
        mask.push_back(true);
      }
    }
    if (d == 0) d = row.size();
    if (row.size() != d)
      throw std::runtime_error("read_na_csv: ragged row");
    vals.push_back(std::move(row));
    obs.push_back(std::move(mask));
  }
  if (vals.empty() || d < 2)
    throw std::runtime_error("read_na_csv: need at least one row and d >= 2");
  const Eigen::Index n = static_cast<Eigen::Index>(vals.size());
  Eigen::MatrixXd values(n, d);
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t jj = 0; jj < d; ++jj) {
      values(i, jj) = vals[i][jj];
      mask(i, jj) = obs[i][jj];
    }
  return {std::move(values), std::move(mask)};
}

MaskedMatrix read_na_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_na_csv: cannot open " + path);
  return read_na_csv(is);
}

}  // namespace madogram
