#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "madogram/cluster.hpp"
#include "madogram/estimation.hpp"
#include "madogram/ev_models.hpp"
#include "madogram/experiments.hpp"
#include "madogram/masked_data.hpp"
#include "madogram/samplers.hpp"
#include "madogram/variance.hpp"

namespace {

using madogram::MaskedMatrix;
using madogram::MissingnessProfile;
using madogram::PickandsModel;
using madogram::Weights;

constexpr int kExitComputation = 1;
constexpr int kExitSchema = 2;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SchemaError("cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

PickandsModel model_from_args(const std::string& model_path,
                              const std::string& family, int d, double theta,
                              double psi1, double psi2, double kappa,
                              double nu_dof) {
  if (!model_path.empty()) {
    try {
      return madogram::model_from_json(nlohmann::json::parse(read_file(model_path)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("model json: ") + e.what());
    }
  }
  nlohmann::json spec;
  spec["family"] = family;
  spec["d"] = d;
  nlohmann::json params;
  if (family == "symmetric-logistic" || family == "husler-reiss")
    params["theta"] = theta;
  else if (family == "asymmetric-logistic" ||
           family == "asymmetric-negative-logistic") {
    params["theta"] = theta;
    params["psi1"] = psi1;
    params["psi2"] = psi2;
  } else if (family == "asymmetric-mixed") {
    params["theta"] = theta;
    params["kappa"] = kappa;
  } else if (family == "student-t-ev") {
    params["theta"] = theta;
    params["nu"] = nu_dof;
  }
  spec["params"] = params;
  return madogram::model_from_json(spec);
}

Weights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() < 2) throw SchemaError("--w needs at least two entries");
  return Weights(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
}

int cmd_sample(const std::string& model_path, const std::string& family, int d,
               double theta, double psi1, double psi2, double kappa,
               double nu_dof, int n, std::uint64_t seed, double p,
               const std::string& mode, bool frechet,
               const std::string& output) {
  const PickandsModel model = model_from_args(model_path, family, d, theta,
                                              psi1, psi2, kappa, nu_dof);
  MaskedMatrix data = madogram::sample_model(model, n, seed);
  if (p < 1.0) {
    const auto profile =
        mode == "all-or-none"
            ? MissingnessProfile::all_or_none(model.dim(), p)
            : MissingnessProfile::independent(model.dim(), p);
    data = madogram::apply_mcar_mask(data, profile, seed ^ 0x6d61736bULL);
  }
  if (frechet) data = madogram::to_frechet(data);
  if (output.empty() || output == "-")
    madogram::write_na_csv(std::cout, data);
  else
    madogram::write_na_csv(output, data);
  return 0;
}

int cmd_estimate(const std::string& input, const std::string& w_text) {
  const MaskedMatrix data = [&] {
    if (input == "-") return madogram::read_na_csv(std::cin);
    std::ifstream is(input);
    if (!is) throw SchemaError("cannot open " + input);
    return madogram::read_na_csv(is);
  }();
  const Weights w = parse_weights(w_text);
  if (w.dim() != data.cols())
    throw SchemaError("--w dimension does not match the input columns");
  const auto rep = madogram::estimate_all(data, w);
  nlohmann::json out;
  out["w"] = std::vector<double>(w.vec().data(), w.vec().data() + w.dim());
  out["nu_hybrid"] = rep.nu_hybrid;
  out["nu_corrected"] = rep.nu_corrected;
  out["pickands"] = rep.pickands;
  out["clipped"] = rep.clipped;
  out["N"] = rep.N;
  out["n_j"] = rep.n_j;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_variance(const std::string& model_path, const std::string& profile_path,
                 int grid, const std::string& w_text,
                 const std::string& output) {
  PickandsModel model = [&] {
    try {
      return madogram::model_from_json(
          nlohmann::json::parse(read_file(model_path)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("model json: ") + e.what());
    }
  }();
  MissingnessProfile profile =
      profile_path.empty()
          ? MissingnessProfile::complete(model.dim())
          : madogram::profile_from_json(read_file(profile_path));

  std::vector<Weights> points;
  if (!w_text.empty()) {
    points.push_back(parse_weights(w_text));
  } else {
    if (model.dim() != 2)
      throw SchemaError("--grid requires a bivariate model; use --w for d > 2");
    points = madogram::bivariate_grid(grid);
  }

  std::ostringstream os;
  os << std::setprecision(17);
  const int d = model.dim();
  for (int j = 0; j < d; ++j) os << "w" << (j + 1) << ",";
  os << "S_H,S_Hstar,V,A,sigma_dplus1_sq,gamma1_sq";
  for (int j = 0; j < d; ++j) os << ",sigma_sq_" << (j + 1);
  for (int j = 0; j < d; ++j) os << ",gammaj_sq_" << (j + 1);
  for (int j = 0; j < d; ++j) os << ",gamma_1j_" << (j + 1);
  for (int j = 0; j < d; ++j) os << ",sigma_j1_" << (j + 1);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k)
      os << ",tau_" << (j + 1) << (k + 1) << ",sigma_jk_" << (j + 1) << (k + 1);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if (j != k) os << ",sigma_jk2_" << (j + 1) << (k + 1);
  os << '\n';
  for (const auto& w : points) {
    const auto h = madogram::variance_hybrid(model, profile, w);
    const auto c = madogram::variance_corrected(model, profile, w);
    const double g = 1.0 + c.A;
    for (int j = 0; j < d; ++j) os << w[j] << ",";
    os << h.S << ',' << c.S << ',' << g * g * g * g * c.S << ',' << h.A << ','
       << h.sigma_dplus1_sq << ',' << h.gamma1_sq;
    for (int j = 0; j < d; ++j) os << ',' << h.sigma_sq[j];
    for (int j = 0; j < d; ++j) os << ',' << h.gammaj_sq[j];
    for (int j = 0; j < d; ++j) os << ',' << h.gamma_1j[j];
    for (int j = 0; j < d; ++j) os << ',' << h.sigma_j1[j];
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k)
        os << ',' << h.tau(j, k) << ',' << h.sigma_jk(j, k);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        if (j != k) os << ',' << h.sigma_jk2(j, k);
    os << '\n';
  }
  if (output.empty() || output == "-") {
    std::cout << os.str();
  } else {
    std::ofstream f(output);
    if (!f) throw std::runtime_error("cannot open " + output);
    f << os.str();
  }
  return 0;
}

madogram::ExperimentSpec spec_from_json(const nlohmann::json& j) {
  PickandsModel model = madogram::model_from_json(j.at("model"));
  MissingnessProfile profile =
      j.contains("profile")
          ? madogram::profile_from_json(j.at("profile").dump())
          : MissingnessProfile::complete(model.dim());
  madogram::ExperimentSpec spec{std::move(model), std::move(profile)};
  spec.n = j.value("n", 1024);
  spec.n_iter = j.value("n_iter", 300);
  spec.group_size = j.value("group_size", 30);
  spec.seed = j.value("seed", 42ULL);
  if (j.contains("w_grid")) {
    for (const auto& row : j.at("w_grid")) {
      const auto v = row.get<std::vector<double>>();
      spec.w_grid.emplace_back(
          Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
    }
  } else if (j.contains("grid")) {
    if (spec.model.dim() == 2)
      spec.w_grid = madogram::bivariate_grid(j.at("grid").get<int>());
    else
      spec.w_grid = madogram::sample_simplex_grid(
          spec.model.dim(), j.at("grid").get<int>(), spec.seed ^ 0x67726964ULL);
  } else {
    throw SchemaError("experiment spec: need w_grid or grid");
  }
  return spec;
}

int cmd_experiment(const std::string& preset, const std::string& spec_path,
                   const std::string& outdir, std::uint64_t seed,
                   bool seed_given, int workers) {
  madogram::ExperimentSpec spec =
      !preset.empty() ? madogram::experiment_preset(preset) : [&] {
        try {
          return spec_from_json(nlohmann::json::parse(read_file(spec_path)));
        } catch (const nlohmann::json::exception& e) {
          throw SchemaError(std::string("experiment spec: ") + e.what());
        }
      }();
  if (seed_given) spec.seed = seed;
  spec.workers = workers;
  std::filesystem::create_directories(outdir);
  const auto result = madogram::run_experiment(spec);
  madogram::write_result_csv(outdir + "/result.csv", result);
  madogram::write_summary_json(outdir + "/summary.json", spec, result);
  std::cout << "wrote " << outdir << "/result.csv and " << outdir
            << "/summary.json\n";
  return 0;
}

int cmd_clusters(const std::string& input, int k, int size, int min_overlap,
                 std::uint64_t seed, const std::string& outdir) {
  const madogram::StationTable table = madogram::load_station_csv(input);
  if (k * size != table.n_stations())
    throw SchemaError("--k * --size must equal the usable station count");
  const auto assign =
      madogram::constrained_kmeans(table.coords, k, size, seed);
  const auto reports = madogram::cluster_report(table, assign, min_overlap);

  std::filesystem::create_directories(outdir);
  nlohmann::json out;
  out["seed"] = seed;
  out["dropped_stations"] = table.dropped;
  out["clusters"] = nlohmann::json::array();
  for (const auto& rep : reports) {
    nlohmann::json c;
    c["cluster"] = rep.cluster;
    c["stations"] = rep.stations;
    c["overlap"] = rep.overlap;
    c["retained"] = rep.retained;
    if (rep.retained) {
      c["theta"] = rep.theta;
      c["nu_corrected"] = rep.nu_corrected;
      c["clipped"] = rep.clipped;
    } else {
      c["reason"] = rep.reason;
    }
    out["clusters"].push_back(c);
  }
  {
    std::ofstream f(outdir + "/clusters.json");
    f << out.dump(2) << '\n';
  }
  {
    std::ofstream f(outdir + "/clusters.csv");
    f << std::setprecision(17)
      << "cluster,stations,overlap,retained,theta,clipped,reason\n";
    for (const auto& rep : reports) {
      f << rep.cluster << ',';
      for (std::size_t i = 0; i < rep.stations.size(); ++i)
        f << (i ? ";" : "") << rep.stations[i];
      f << ',' << rep.overlap << ',' << (rep.retained ? 1 : 0) << ',';
      if (rep.retained)
        f << rep.theta << ',' << (rep.clipped ? 1 : 0) << ',';
      else
        f << ",," << rep.reason;
      f << '\n';
    }
  }
  std::cout << "wrote " << outdir << "/clusters.json and " << outdir
            << "/clusters.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric w-madogram and Pickands estimation under MCAR "
               "missing data"};
  app.require_subcommand(1);

  // sample
  std::string s_model, s_family = "symmetric-logistic", s_mode = "independent",
              s_output;
  int s_d = 2, s_n = 1000;
  double s_theta = 2.0, s_psi1 = 1.0, s_psi2 = 1.0, s_kappa = 0.0,
         s_nu = 4.0, s_p = 1.0;
  std::uint64_t s_seed = 0;
  bool s_frechet = false;
  auto* sample = app.add_subcommand("sample", "Draw samples from an EV copula");
  sample->add_option("--model", s_model, "Model JSON file");
  sample->add_option("--family", s_family, "Model family name");
  sample->add_option("--d", s_d, "Dimension");
  sample->add_option("--theta", s_theta, "Dependence parameter");
  sample->add_option("--psi1", s_psi1, "Asymmetry parameter 1");
  sample->add_option("--psi2", s_psi2, "Asymmetry parameter 2");
  sample->add_option("--kappa", s_kappa, "Mixed-model parameter");
  sample->add_option("--nu", s_nu, "Student-t degrees of freedom");
  sample->add_option("--n", s_n, "Sample size")->required();
  sample->add_option("--seed", s_seed, "RNG seed")->required();
  sample->add_option("--p", s_p, "MCAR observation probability");
  sample->add_option("--mode", s_mode, "MCAR mode: independent | all-or-none");
  sample->add_flag("--frechet", s_frechet, "Emit unit-Frechet margins");
  sample->add_option("--output,-o", s_output, "Output CSV (default stdout)");

  // estimate
  std::string e_input, e_w;
  auto* estimate =
      app.add_subcommand("estimate", "Estimate the w-madogram and Pickands");
  estimate->add_option("--input,-i", e_input, "NA-CSV input ('-' for stdin)")
      ->required();
  estimate->add_option("--w", e_w, "Comma-separated simplex weights")
      ->required();

  // variance
  std::string v_model, v_profile, v_w, v_output;
  int v_grid = 19;
  auto* variance =
      app.add_subcommand("variance", "Closed-form asymptotic variances");
  variance->add_option("--model", v_model, "Model JSON file")->required();
  variance->add_option("--profile", v_profile, "Missingness profile JSON");
  variance->add_option("--grid", v_grid, "Bivariate grid size");
  variance->add_option("--w", v_w, "Single w (comma-separated)");
  variance->add_option("--output,-o", v_output, "Output CSV (default stdout)");

  // experiment
  std::string x_preset, x_spec, x_out = "experiment-out";
  std::uint64_t x_seed = 0;
  int x_workers = 0;
  auto* experiment =
      app.add_subcommand("experiment", "Monte Carlo validation experiments");
  experiment->add_option("--preset", x_preset,
                         "e1|desk-e1|e2|e2-100|desk-e2|e3|desk-e3");
  experiment->add_option("--spec", x_spec, "Experiment spec JSON");
  experiment->add_option("--out", x_out, "Output directory");
  auto* x_seed_opt = experiment->add_option("--seed", x_seed, "RNG seed");
  experiment->add_option("--workers", x_workers, "Worker threads (0 = auto)");

  // clusters
  std::string c_input, c_out = "clusters-out";
  int c_k = 0, c_size = 0, c_min_overlap = 10;
  std::uint64_t c_seed = 0;
  auto* clusters =
      app.add_subcommand("clusters", "Equal-size cluster extremal analysis");
  clusters->add_option("--input,-i", c_input, "Station NA-CSV")->required();
  clusters->add_option("--k", c_k, "Cluster count")->required();
  clusters->add_option("--size", c_size, "Stations per cluster")->required();
  clusters->add_option("--min-overlap", c_min_overlap,
                       "Minimum overlapping maxima (default 10)");
  clusters->add_option("--seed", c_seed, "RNG seed")->required();
  clusters->add_option("--out", c_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", e.what()}, {"type", "schema"}}.dump()
              << '\n';
    return kExitSchema;
  }

  try {
    if (*sample)
      return cmd_sample(s_model, s_family, s_d, s_theta, s_psi1, s_psi2,
                        s_kappa, s_nu, s_n, s_seed, s_p, s_mode, s_frechet,
                        s_output);
    if (*estimate) return cmd_estimate(e_input, e_w);
    if (*variance) return cmd_variance(v_model, v_profile, v_grid, v_w,
                                       v_output);
    if (*experiment) {
      if (x_preset.empty() == x_spec.empty())
        throw SchemaError("experiment: give exactly one of --preset, --spec");
      return cmd_experiment(x_preset, x_spec, x_out, x_seed,
                            x_seed_opt->count() > 0, x_workers);
    }
    if (*clusters)
      return cmd_clusters(c_input, c_k, c_size, c_min_overlap, c_seed, c_out);
  } catch (const SchemaError& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"type", "schema"}}.dump()
              << '\n';
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"type", "schema"}}.dump()
              << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", e.what()}, {"type", "computation"}}
                     .dump()
              << '\n';
    return kExitComputation;
  }
  return 0;
}
