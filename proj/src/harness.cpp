#include "cgcv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cgcv/asymptotics.hpp"
#include "cgcv/ensemble.hpp"
#include "cgcv/oracle.hpp"
#include "cgcv/risk.hpp"
#include "cgcv/sampling.hpp"

namespace cgcv {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Top-level stream tags under the sweep seed.
enum : std::uint64_t { kDataStream = 0, kSubsetStream = 1 };

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::Config, msg); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + ": expected an object");
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return item.key() == a; });
    if (!known) config_error(where + ": unknown key '" + item.key() + "'");
  }
}

void require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where + ": missing key '" + key + "'");
}

double get_double(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) config_error(where + "." + key + ": expected a number");
  return v.get<double>();
}

int get_int(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) config_error(where + "." + key + ": expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    config_error(where + "." + key + ": out of range");
  }
  return static_cast<int>(x);
}

std::string get_string(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) config_error(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_doubles(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) config_error(where + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(where + "." + key + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> get_ints(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) config_error(where + "." + key + ": expected an array");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) config_error(where + "." + key + ": expected integers");
    out.push_back(x.get<int>());
  }
  return out;
}

SpectrumSpec parse_spectrum(const json& j) {
  const std::string where = "design.spectrum";
  require(j, "type", where);
  const std::string type = get_string(j, "type", where);
  SpectrumSpec s;
  if (type == "evenly_spaced") {
    check_keys(j, {"type", "lo", "hi"}, where);
    s.kind = SpectrumSpec::Kind::EvenlySpaced;
    if (j.contains("lo")) s.lo = get_double(j, "lo", where);
    if (j.contains("hi")) s.hi = get_double(j, "hi", where);
  } else if (type == "isotropic") {
    check_keys(j, {"type"}, where);
    s.kind = SpectrumSpec::Kind::Isotropic;
  } else if (type == "custom") {
    check_keys(j, {"type", "eigenvalues"}, where);
    require(j, "eigenvalues", where);
    s.kind = SpectrumSpec::Kind::Custom;
    s.eigenvalues = get_doubles(j, "eigenvalues", where);
  } else {
    config_error(where + ".type: unknown spectrum '" + type + "'");
  }
  return s;
}

DesignSpec parse_design(const json& j) {
  const std::string where = "design";
  if (!j.is_object()) config_error("design: expected an object");
  require(j, "type", where);
  const std::string type = get_string(j, "type", where);
  if (type == "gaussian_linear") {
    check_keys(j, {"type", "n", "p", "snr", "sigma2", "spectrum", "sparsity_tail"}, where);
    require(j, "n", where);
    require(j, "p", where);
    GaussianLinearSpec s;
    s.n = get_int(j, "n", where);
    s.p = get_int(j, "p", where);
    if (j.contains("snr")) s.snr = get_double(j, "snr", where);
    if (j.contains("sigma2")) s.sigma2 = get_double(j, "sigma2", where);
    if (j.contains("spectrum")) s.spectrum = parse_spectrum(j.at("spectrum"));
    if (j.contains("sparsity_tail")) s.sparsity_tail = get_int(j, "sparsity_tail", where);
    return s;
  }
  if (type == "nonlinear_ar1") {
    check_keys(j, {"type", "n", "p", "rho", "feature_law", "noise_sigma2"}, where);
    require(j, "n", where);
    require(j, "p", where);
    NonlinearAR1Spec s;
    s.n = get_int(j, "n", where);
    s.p = get_int(j, "p", where);
    if (j.contains("rho")) s.rho = get_double(j, "rho", where);
    if (j.contains("noise_sigma2")) s.noise_sigma2 = get_double(j, "noise_sigma2", where);
    if (j.contains("feature_law")) {
      const json& f = j.at("feature_law");
      const std::string fw = "design.feature_law";
      check_keys(f, {"type", "dof"}, fw);
      require(f, "type", fw);
      const std::string law = get_string(f, "type", fw);
      if (law == "gaussian") {
        if (f.contains("dof")) config_error(fw + ": dof only applies to heavy_tail");
        s.feature_law.kind = FeatureLaw::Kind::Gaussian;
      } else if (law == "heavy_tail") {
        s.feature_law.kind = FeatureLaw::Kind::ScaledHeavyTail;
        if (f.contains("dof")) s.feature_law.dof = get_double(f, "dof", fw);
      } else {
        config_error(fw + ".type: unknown feature law '" + law + "'");
      }
    }
    return s;
  }
  config_error("design.type: unknown design '" + type + "'");
}

PenaltyGrid parse_penalty(const json& j) {
  const std::string where = "penalty";
  check_keys(j, {"kind", "lambdas", "lambda2"}, where);
  require(j, "kind", where);
  const std::string kind = get_string(j, "kind", where);
  PenaltyGrid g;
  if (kind == "ridge") {
    g.kind = PenaltyKind::Ridge;
  } else if (kind == "ridgeless") {
    g.kind = PenaltyKind::Ridgeless;
  } else if (kind == "lasso") {
    g.kind = PenaltyKind::Lasso;
  } else if (kind == "elastic_net") {
    g.kind = PenaltyKind::ElasticNet;
  } else {
    config_error("penalty.kind: unknown penalty '" + kind + "'");
  }
  if (g.kind == PenaltyKind::Ridgeless) {
    if (j.contains("lambdas")) {
      g.lambdas = get_doubles(j, "lambdas", where);
    } else {
      g.lambdas = {0.0};
    }
  } else {
    require(j, "lambdas", where);
    g.lambdas = get_doubles(j, "lambdas", where);
  }
  if (j.contains("lambda2")) {
    if (g.kind != PenaltyKind::ElasticNet) config_error("penalty.lambda2: elastic_net only");
    g.lambda2 = get_double(j, "lambda2", where);
  } else if (g.kind == PenaltyKind::ElasticNet) {
    config_error("penalty: elastic_net needs lambda2");
  }
  return g;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Status parse_status(const std::string& s) {
  for (Status st : {Status::Ok, Status::Degenerate, Status::EmptyOverlap, Status::NonConverged}) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorKind::InvalidInput, "unknown status '" + s + "'");
}

// State shared read-only by every repetition.
struct SweepShared {
  std::optional<SpectralDistribution> spectrum;  // only with the asymptotic estimator
  Beta0Quadratic nonlinear_quadratic;            // nonlinear design: beta0 is fixed
  bool wants(const std::string& name) const {
    return std::find(estimators.begin(), estimators.end(), name) != estimators.end();
  }
  std::vector<std::string> estimators;
};

struct RepData {
  Dataset train;
  std::optional<LinearModelOracle> oracle;
  TestSet test;
  double fnl_energy = 0.0;
  Beta0Quadratic quadratic;
};

RepData make_rep_data(const ExperimentConfig& config, int rep, const SweepShared* shared) {
  const std::uint64_t seed = derive_seed(config.seed, {kDataStream, static_cast<std::uint64_t>(rep)});
  RepData d;
  if (const auto* lin = std::get_if<GaussianLinearSpec>(&config.design)) {
    auto draw = gen_gaussian_linear(*lin, seed, config.effective_n_test());
    d.train = std::move(draw.train);
    d.test = std::move(draw.test);
    d.fnl_energy = draw.oracle.sigma2;
    if (shared && shared->spectrum) {
      d.quadratic = exact_beta0_quadratic(draw.oracle.Sigma, draw.oracle.beta0);
    }
    d.oracle = std::move(draw.oracle);
  } else {
    const auto& nl = std::get<NonlinearAR1Spec>(config.design);
    auto draw = gen_nonlinear_ar1(nl, seed, config.effective_n_test());
    d.train = std::move(draw.train);
    d.test = std::move(draw.test);
    d.fnl_energy = draw.fnl_energy;
    if (shared) d.quadratic = shared->nonlinear_quadratic;
  }
  return d;
}

SweepShared make_shared(const ExperimentConfig& config) {
  SweepShared s;
  s.estimators = config.estimators;
  if (!s.wants("asymptotic")) return s;
  if (const auto* lin = std::get_if<GaussianLinearSpec>(&config.design)) {
    s.spectrum = SpectralDistribution::empirical(lin->spectrum.diagonal(lin->p));
  } else {
    const auto& nl = std::get<NonlinearAR1Spec>(config.design);
    const MatrixXd Sigma = ar1_covariance(nl.p, nl.rho);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sigma, Eigen::EigenvaluesOnly);
    s.spectrum = SpectralDistribution::empirical(es.eigenvalues().cwiseMax(1e-300));
    s.nonlinear_quadratic =
        exact_beta0_quadratic(Sigma, ar1_top_eigen_direction(Sigma, nl.rho));
  }
  return s;
}

// A fitted component, or the reason it could not be fitted.
struct ComponentSlot {
  std::optional<EnsembleComponent> component;
  Status status = Status::Ok;
};

std::vector<ResultRow> run_rep(const ExperimentConfig& config, int rep, const SweepShared& shared) {
  const RepData data = make_rep_data(config, rep, &shared);
  const MatrixXd& X = data.train.X;
  const VectorXd& y = data.train.y;
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int M_max = *std::max_element(config.M_grid.begin(), config.M_grid.end());
  const std::size_t L = config.penalty.lambdas.size();

  const bool want_report = shared.wants("gcv") || shared.wants("gcv_union") ||
                           shared.wants("sub") || shared.wants("full") ||
                           shared.wants("cgcv_sub") || shared.wants("cgcv_full");
  ReportOptions report_opts;
  report_opts.intermediates = shared.wants("sub") || shared.wants("full");

  std::vector<ResultRow> rows;
  for (int k : config.k_grid) {
    const auto subsets = draw_subsamples(
        n, k, M_max,
        derive_seed(config.seed, {kSubsetStream, static_cast<std::uint64_t>(rep),
                                  static_cast<std::uint64_t>(k)}));

    // slots[l][m]: component m at lambda index l.
    std::vector<std::vector<ComponentSlot>> slots(L, std::vector<ComponentSlot>(M_max));
    for (int m = 0; m < M_max; ++m) {
      const auto& subset = subsets[static_cast<std::size_t>(m)];
      MatrixXd X_sub = take_rows(X, subset);
      VectorXd y_sub = take_rows(y, subset);
      const bool ridge_family = config.penalty.kind == PenaltyKind::Ridge ||
                                config.penalty.kind == PenaltyKind::Ridgeless;
      std::optional<RidgeSolver> ridge;
      if (ridge_family) ridge.emplace(X_sub, y_sub);
      std::optional<VectorXd> warm;
      for (std::size_t l = 0; l < L; ++l) {
        auto& slot = slots[l][static_cast<std::size_t>(m)];
        try {
          const PenaltyConfig pen = config.penalty.at(l);
          FitResult fit = ridge_family
                              ? ridge->fit(pen.kind == PenaltyKind::Ridgeless ? 0.0 : pen.lambda)
                              : fit_penalized(X_sub, y_sub, pen, config.solver,
                                              warm ? &*warm : nullptr);
          if (!ridge_family) warm = fit.beta;
          slot.component = make_component(X, y, subset, std::move(fit));
        } catch (const ConvergenceError& e) {
          slot.status = Status::NonConverged;
          warm = e.iterate();
        } catch (const Error& e) {
          slot.status = status_from(e.kind());
        }
      }
    }

    for (std::size_t l = 0; l < L; ++l) {
      const double lambda = config.penalty.at(l).primary_lambda();

      // Ensemble limit sR_M = diag / M + (M - 1) / M * offdiag.
      Status asym_status = Status::Ok;
      double asym_diag = kNaN;
      double asym_off = kNaN;
      if (shared.wants("asymptotic")) {
        try {
          const auto eq = deterministic_equivalents(lambda, static_cast<double>(p) / n,
                                                    static_cast<double>(p) / k, *shared.spectrum,
                                                    data.quadratic, data.fnl_energy);
          asym_diag = eq.sR_diag;
          asym_off = eq.sR_offdiag;
        } catch (const Error& e) {
          asym_status = status_from(e.kind());
        }
      }

      const auto& comp_slots = slots[l];
      int ok_prefix = 0;
      while (ok_prefix < M_max && comp_slots[static_cast<std::size_t>(ok_prefix)].component) {
        ++ok_prefix;
      }
      std::optional<EnsembleFit> largest;
      if (ok_prefix > 0) {
        std::vector<EnsembleComponent> comps;
        for (int m = 0; m < ok_prefix; ++m) comps.push_back(*comp_slots[static_cast<std::size_t>(m)].component);
        largest = EnsembleFit::assemble(std::move(comps));
      }

      for (int M : config.M_grid) {
        auto emit = [&](const std::string& name, double value, Status status) {
          if (status == Status::Ok && !std::isfinite(value)) status = Status::Degenerate;
          if (status != Status::Ok) value = kNaN;
          rows.push_back({rep, lambda, k, M, name, value, status});
        };
        if (M > ok_prefix) {
          const Status failed = comp_slots[static_cast<std::size_t>(ok_prefix)].status;
          for (const auto& name : config.estimators) emit(name, kNaN, failed);
          continue;
        }
        const EnsembleFit ens = M == largest->M() ? *largest : largest->prefix(M);
        std::optional<RiskReport> report;
        if (want_report) report = risk_report(ens, report_opts);
        auto emit_estimate = [&](const std::string& name, const Estimate& e) {
          emit(name, e.value, e.status);
        };
        for (const auto& name : config.estimators) {
          if (name == "risk") {
            const double r = data.oracle ? true_risk(*data.oracle, ens)
                                         : empirical_risk(data.test, ens);
            emit(name, r, Status::Ok);
          } else if (name == "gcv") {
            emit_estimate(name, report->gcv_full_data);
          } else if (name == "gcv_union") {
            emit_estimate(name, report->gcv_union);
          } else if (name == "sub") {
            emit_estimate(name, *report->r_sub);
          } else if (name == "full") {
            emit_estimate(name, *report->r_full);
          } else if (name == "cgcv_sub") {
            emit_estimate(name, report->cgcv_sub);
          } else if (name == "cgcv_full") {
            emit_estimate(name, report->cgcv_full);
          } else if (name == "tdf") {
            emit(name, ens.tdf(), Status::Ok);
          } else if (name == "asymptotic") {
            emit(name, asym_diag / M + (M - 1.0) / M * asym_off, asym_status);
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace

PenaltyConfig PenaltyGrid::at(std::size_t i) const {
  const double lam = lambdas.at(i);
  switch (kind) {
    case PenaltyKind::Ridge: return PenaltyConfig::ridge(lam);
    case PenaltyKind::Ridgeless: return PenaltyConfig::ridgeless();
    case PenaltyKind::Lasso: return PenaltyConfig::lasso(lam);
    case PenaltyKind::ElasticNet: return PenaltyConfig::elastic_net(lam, lambda2);
  }
  throw Error(ErrorKind::InvalidInput, "unknown penalty kind");
}

const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names = {"risk", "gcv",       "gcv_union",  "sub", "full",
                                                 "cgcv_sub", "cgcv_full", "asymptotic", "tdf"};
  return names;
}

int ExperimentConfig::n() const {
  return std::visit([](const auto& d) { return d.n; }, design);
}

int ExperimentConfig::p() const {
  return std::visit([](const auto& d) { return d.p; }, design);
}

int ExperimentConfig::effective_n_test() const {
  if (n_test >= 0) return n_test;
  return std::holds_alternative<NonlinearAR1Spec>(design) ? 10 * n() : 0;
}

void ExperimentConfig::validate() const {
  try {
    std::visit([](const auto& d) { d.validate(); }, design);
  } catch (const Error& e) {
    config_error(std::string("design: ") + e.what());
  }
  if (penalty.lambdas.empty()) config_error("penalty.lambdas must be nonempty");
  for (std::size_t i = 0; i < penalty.lambdas.size(); ++i) {
    try {
      penalty.at(i).validate();
    } catch (const Error& e) {
      config_error(std::string("penalty: ") + e.what());
    }
  }
  if (penalty.kind == PenaltyKind::Ridgeless &&
      std::any_of(penalty.lambdas.begin(), penalty.lambdas.end(), [](double x) { return x != 0.0; })) {
    config_error("penalty: ridgeless lambdas must be 0");
  }
  if (k_grid.empty()) config_error("k_grid must be nonempty");
  if (M_grid.empty()) config_error("M_grid must be nonempty");
  for (int k : k_grid) {
    if (k < 1 || k > n()) config_error("k_grid entries must lie in [1, n]");
  }
  for (int M : M_grid) {
    if (M < 1) config_error("M_grid entries must be >= 1");
  }
  if (reps < 1) config_error("reps must be >= 1");
  if (n_test < -1) config_error("n_test must be >= 0");
  if (estimators.empty()) config_error("estimators must be nonempty");
  std::set<std::string> seen;
  for (const auto& e : estimators) {
    const auto& known = known_estimators();
    if (std::find(known.begin(), known.end(), e) == known.end()) {
      config_error("unknown estimator '" + e + "'");
    }
    if (!seen.insert(e).second) config_error("duplicate estimator '" + e + "'");
  }
  if (seen.count("asymptotic") && penalty.kind != PenaltyKind::Ridge &&
      penalty.kind != PenaltyKind::Ridgeless) {
    config_error("the asymptotic estimator needs a ridge or ridgeless penalty");
  }
  if (seen.count("risk") && std::holds_alternative<NonlinearAR1Spec>(design) &&
      effective_n_test() < 1) {
    config_error("risk on the nonlinear design needs n_test >= 1");
  }
  if (!(solver.tol > 0.0) || solver.max_iter < 1) config_error("solver: need tol > 0, max_iter >= 1");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  const std::string where = "config";
  check_keys(j, {"design", "penalty", "k_grid", "M_grid", "reps", "seed", "estimators", "n_test",
                 "solver"},
             where);
  for (const char* key : {"design", "penalty", "k_grid", "M_grid", "estimators"}) {
    require(j, key, where);
  }
  ExperimentConfig c;
  c.design = parse_design(j.at("design"));
  c.penalty = parse_penalty(j.at("penalty"));
  c.k_grid = get_ints(j, "k_grid", where);
  c.M_grid = get_ints(j, "M_grid", where);
  if (j.contains("reps")) c.reps = get_int(j, "reps", where);
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else if (s.is_number_integer() && s.get<std::int64_t>() >= 0) {
      c.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
    } else {
      config_error("config.seed: expected a nonnegative integer");
    }
  }
  const json& est = j.at("estimators");
  if (!est.is_array()) config_error("config.estimators: expected an array");
  for (const auto& e : est) {
    if (!e.is_string()) config_error("config.estimators: expected strings");
    c.estimators.push_back(e.get<std::string>());
  }
  if (j.contains("n_test")) c.n_test = get_int(j, "n_test", where);
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    check_keys(s, {"tol", "max_iter"}, "solver");
    if (s.contains("tol")) c.solver.tol = get_double(s, "tol", "solver");
    if (s.contains("max_iter")) c.solver.max_iter = get_int(s, "max_iter", "solver");
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_experiment_config(ss.str());
  } catch (const Error& e) {
    config_error(path + ": " + e.what());
  }
}

Dataset sweep_dataset(const ExperimentConfig& config, int rep) {
  config.validate();
  return make_rep_data(config, rep, nullptr).train;
}

void run_sweep(const ExperimentConfig& config, int threads, const RowSink& sink) {
  config.validate();
  const SweepShared shared = make_shared(config);
  const int reps = config.reps;
  threads = std::clamp(threads, 1, reps);

  if (threads == 1) {
    for (int r = 0; r < reps; ++r) {
      for (const auto& row : run_rep(config, r, shared)) sink(row);
    }
    return;
  }

  // Workers fill per-rep slots; this thread drains them in rep order. A
  // worker does not start rep r until r is within a window of the drained
  // position, which bounds the buffered rows.
  const int window = 2 * threads;
  std::vector<std::optional<std::vector<ResultRow>>> done(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(reps));
  std::mutex mu;
  std::condition_variable cv;
  int next = 0;
  int drained = 0;
  bool stop = false;

  auto worker = [&] {
    for (;;) {
      int r;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return stop || next >= reps || next < drained + window; });
        if (stop || next >= reps) return;
        r = next++;
      }
      std::optional<std::vector<ResultRow>> rows;
      std::exception_ptr err;
      try {
        rows = run_rep(config, r, shared);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mu);
        done[static_cast<std::size_t>(r)] = std::move(rows);
        failures[static_cast<std::size_t>(r)] = err;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  auto shutdown = [&] {
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    cv.notify_all();
    for (auto& th : pool) th.join();
  };

  try {
    for (int r = 0; r < reps; ++r) {
      std::vector<ResultRow> rows;
      {
        std::unique_lock lock(mu);
        const auto i = static_cast<std::size_t>(r);
        cv.wait(lock, [&] { return done[i].has_value() || failures[i]; });
        if (failures[i]) std::rethrow_exception(failures[i]);
        rows = std::move(*done[i]);
        done[i].reset();
      }
      for (const auto& row : rows) sink(row);
      {
        std::lock_guard lock(mu);
        drained = r + 1;
      }
      cv.notify_all();
    }
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config, int threads) {
  std::vector<ResultRow> rows;
  run_sweep(config, threads, [&](const ResultRow& r) { rows.push_back(r); });
  return rows;
}

std::string format_row(const ResultRow& row) {
  std::string s;
  s += std::to_string(row.rep);
  s += ',';
  s += format_double(row.lambda);
  s += ',';
  s += std::to_string(row.k);
  s += ',';
  s += std::to_string(row.M);
  s += ',';
  s += row.estimator;
  s += ',';
  s += format_double(row.value);
  s += ',';
  s += to_string(row.status);
  return s;
}

CsvWriter::CsvWriter(const std::string& path) : path_(path), os_(path, std::ios::binary) {
  if (!os_) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  os_ << kCsvHeader << '\n';
}

void CsvWriter::write(const ResultRow& row) {
  os_ << format_row(row) << '\n';
  if (!os_) throw Error(ErrorKind::Io, "write failed for " + path_);
}

void CsvWriter::close() {
  os_.flush();
  if (!os_) throw Error(ErrorKind::Io, "write failed for " + path_);
  os_.close();
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  CsvWriter w(path);
  for (const auto& r : rows) w.write(r);
  w.close();
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw Error(ErrorKind::InvalidInput, path + ": unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw Error(ErrorKind::InvalidInput, path + ": bad row '" + line + "'");
    ResultRow r;
    r.rep = std::stoi(cells[0]);
    r.lambda = std::strtod(cells[1].c_str(), nullptr);
    r.k = std::stoi(cells[2]);
    r.M = std::stoi(cells[3]);
    r.estimator = cells[4];
    r.value = std::strtod(cells[5].c_str(), nullptr);
    r.status = parse_status(cells[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace cgcv
