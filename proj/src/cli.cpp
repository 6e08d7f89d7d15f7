#include "cgcv/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cgcv/asymptotics.hpp"
#include "cgcv/datagen.hpp"
#include "cgcv/ensemble.hpp"
#include "cgcv/errors.hpp"
#include "cgcv/harness.hpp"
#include "cgcv/risk.hpp"
#include "cgcv/sampling.hpp"

namespace cgcv {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const Estimate& e) {
  json j = {{"value", number_or_null(e.value)}, {"status", std::string(to_string(e.status))}};
  if (!e.message.empty()) j["message"] = e.message;
  return j;
}

json to_json(const Eigen::MatrixXd& A) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(number_or_null(A(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RiskReport& r) {
  json j;
  j["n"] = r.n;
  j["M"] = r.M;
  j["tdf"] = r.tdf;
  j["gcv_full_data"] = to_json(r.gcv_full_data);
  j["gcv_union"] = to_json(r.gcv_union);
  j["r_sub"] = r.r_sub ? to_json(*r.r_sub) : json(nullptr);
  j["r_full"] = r.r_full ? to_json(*r.r_full) : json(nullptr);
  j["cgcv_sub"] = to_json(r.cgcv_sub);
  j["cgcv_full"] = to_json(r.cgcv_full);
  j["correction_sub"] = to_json(r.correction_sub);
  j["correction_full"] = to_json(r.correction_full);
  j["component_matrix_sub"] = to_json(r.component_matrix_sub);
  j["component_matrix_full"] = to_json(r.component_matrix_full);
  return j;
}

// --threads wins, then CGCV_THREADS, then 1.
int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw Error(ErrorKind::Config, "--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CGCV_THREADS"); env && *env) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end != '\0' || t < 1 || t > 4096) {
      throw Error(ErrorKind::Config, std::string("CGCV_THREADS must be a positive integer, got '") +
                                         env + "'");
    }
    return static_cast<int>(t);
  }
  return 1;
}

PenaltyConfig penalty_from_flags(const std::string& kind, double lambda,
                                 std::optional<double> lambda2) {
  PenaltyConfig p;
  if (kind == "ridge") {
    p = PenaltyConfig::ridge(lambda);
  } else if (kind == "ridgeless") {
    p = PenaltyConfig::ridgeless();
  } else if (kind == "lasso") {
    p = PenaltyConfig::lasso(lambda);
  } else if (kind == "elastic_net") {
    if (!lambda2) throw Error(ErrorKind::Config, "elastic_net needs --lambda2");
    p = PenaltyConfig::elastic_net(lambda, *lambda2);
  } else {
    throw Error(ErrorKind::Config, "unknown penalty '" + kind + "'");
  }
  if (lambda2 && kind != "elastic_net") {
    throw Error(ErrorKind::Config, "--lambda2 only applies to elastic_net");
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return p;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subsampled ensemble risk estimation: GCV, corrected GCV and their limits", "cgcv"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo sweep and write a CSV table");
  std::string sim_config;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  std::optional<int> sim_threads;
  simulate->add_option("--config", sim_config, "JSON experiment config")->required();
  simulate->add_option("--out", sim_out, "Output CSV path")->required();
  simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--threads", sim_threads, "Worker threads (default: $CGCV_THREADS or 1)");

  // fixedpoint
  auto* fixedpoint = app.add_subcommand("fixedpoint", "Solve the ridge fixed-point equation for v");
  double fp_lambda = 0.0;
  double fp_theta = 0.0;
  std::string fp_spectrum;
  fixedpoint->add_option("--lambda", fp_lambda, "Regularization level, >= 0")->required();
  fixedpoint->add_option("--theta", fp_theta, "Aspect ratio p/k, > 0")->required();
  fixedpoint->add_option("--spectrum", fp_spectrum,
                         "CSV of eigenvalue,weight rows (default: point mass at 1)")
      ->check(CLI::ExistingFile);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit an ensemble on a dataset and print its risk report");
  std::string fit_data;
  std::string fit_penalty;
  double fit_lambda = 0.0;
  std::optional<double> fit_lambda2;
  int fit_k = 0;
  int fit_M = 1;
  std::uint64_t fit_seed = 0;
  bool fit_no_intermediates = false;
  fit->add_option("--data", fit_data, "CSV with columns x_0..x_{p-1},y")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--penalty", fit_penalty, "ridge | ridgeless | lasso | elastic_net")->required();
  fit->add_option("--lambda", fit_lambda, "Penalty level (lambda1 for elastic_net)");
  fit->add_option("--lambda2", fit_lambda2, "Elastic net l2 level");
  fit->add_option("--k", fit_k, "Subsample size")->required();
  fit->add_option("--M", fit_M, "Ensemble size");
  fit->add_option("--seed", fit_seed, "Subsample seed");
  fit->add_flag("--no-intermediates", fit_no_intermediates,
                "Skip the O(M^2) intermediate estimators");

  // generate
  auto* generate = app.add_subcommand("generate", "Write the training set of one sweep repetition");
  std::string gen_config;
  std::string gen_out;
  std::optional<std::uint64_t> gen_seed;
  int gen_rep = 0;
  generate->add_option("--config", gen_config, "JSON experiment config")->required();
  generate->add_option("--out", gen_out, "Output CSV path")->required();
  generate->add_option("--seed", gen_seed, "Override the config seed");
  generate->add_option("--rep", gen_rep, "Repetition index");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (*simulate) {
      ExperimentConfig config = load_experiment_config(sim_config);
      if (sim_seed) config.seed = *sim_seed;
      const int threads = resolve_threads(sim_threads);
      CsvWriter writer(sim_out);
      run_sweep(config, threads, [&](const ResultRow& row) { writer.write(row); });
      writer.close();
    } else if (*fixedpoint) {
      const SpectralDistribution H = fp_spectrum.empty()
                                         ? SpectralDistribution::point_mass(1.0)
                                         : read_spectrum_csv(fp_spectrum);
      const FixedPointSolution s = solve_v(fp_lambda, fp_theta, H);
      json j = {{"lambda", fp_lambda},
                {"theta", fp_theta},
                {"v", number_or_null(s.v)},
                {"finite", s.finite()},
                {"residual", s.residual}};
      out << j.dump() << '\n';
    } else if (*fit) {
      const PenaltyConfig penalty = penalty_from_flags(fit_penalty, fit_lambda, fit_lambda2);
      const Dataset data = read_dataset_csv(fit_data);
      const int n = static_cast<int>(data.X.rows());
      if (fit_k < 1 || fit_k > n) {
        throw Error(ErrorKind::Config, "--k must lie in [1, " + std::to_string(n) + "]");
      }
      if (fit_M < 1) throw Error(ErrorKind::Config, "--M must be >= 1");
      const auto subsets = draw_subsamples(n, fit_k, fit_M, fit_seed);
      const EnsembleFit ens = fit_ensemble(data.X, data.y, penalty, subsets);
      ReportOptions opts;
      opts.intermediates = !fit_no_intermediates;
      json j = to_json(risk_report(ens, opts));
      j["k"] = fit_k;
      j["penalty"] = to_string(penalty.kind);
      j["lambda"] = penalty.primary_lambda();
      out << j.dump(2) << '\n';
    } else if (*generate) {
      ExperimentConfig config = load_experiment_config(gen_config);
      if (gen_seed) config.seed = *gen_seed;
      if (gen_rep < 0 || gen_rep >= config.reps) {
        throw Error(ErrorKind::Config, "--rep must lie in [0, reps)");
      }
      write_dataset_csv(gen_out, sweep_dataset(config, gen_rep));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Config ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace cgcv
