#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cgcv/asymptotics.hpp"
#include "cgcv/datagen.hpp"
#include "cgcv/ensemble.hpp"
#include "cgcv/errors.hpp"
#include "cgcv/harness.hpp"
#include "cgcv/oracle.hpp"
#include "cgcv/risk.hpp"
#include "cgcv/sampling.hpp"
#include "cgcv/solvers.hpp"

namespace py = pybind11;
using namespace cgcv;

namespace {

PenaltyConfig make_penalty(const std::string& kind, double lambda, std::optional<double> lambda2) {
  if (kind == "ridge") return PenaltyConfig::ridge(lambda);
  if (kind == "ridgeless") return PenaltyConfig::ridgeless();
  if (kind == "lasso") return PenaltyConfig::lasso(lambda);
  if (kind == "elastic_net") {
    if (!lambda2) throw Error(ErrorKind::InvalidInput, "elastic_net needs lambda2");
    return PenaltyConfig::elastic_net(lambda, *lambda2);
  }
  throw Error(ErrorKind::InvalidInput, "unknown penalty '" + kind + "'");
}

std::vector<IndexSet> to_index_sets(const std::vector<std::vector<int>>& subsets, int n) {
  std::vector<IndexSet> out;
  out.reserve(subsets.size());
  for (const auto& s : subsets) out.emplace_back(s, n);
  return out;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["status"] = std::string(to_string(e.status));
  d["message"] = e.message;
  return d;
}

py::dict report_dict(const RiskReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["M"] = r.M;
  d["tdf"] = r.tdf;
  d["gcv_full_data"] = estimate_dict(r.gcv_full_data);
  d["gcv_union"] = estimate_dict(r.gcv_union);
  d["r_sub"] = r.r_sub ? py::object(estimate_dict(*r.r_sub)) : py::none();
  d["r_full"] = r.r_full ? py::object(estimate_dict(*r.r_full)) : py::none();
  d["cgcv_sub"] = estimate_dict(r.cgcv_sub);
  d["cgcv_full"] = estimate_dict(r.cgcv_full);
  d["correction_sub"] = estimate_dict(r.correction_sub);
  d["correction_full"] = estimate_dict(r.correction_full);
  d["component_matrix_sub"] = r.component_matrix_sub;
  d["component_matrix_full"] = r.component_matrix_full;
  return d;
}

Variant parse_variant(const std::string& v) {
  if (v == "sub") return Variant::Sub;
  if (v == "full") return Variant::Full;
  throw Error(ErrorKind::InvalidInput, "variant must be 'sub' or 'full'");
}

SpectralDistribution make_spectrum(std::optional<std::vector<double>> eigenvalues,
                                   std::optional<std::vector<double>> weights) {
  if (!eigenvalues) return SpectralDistribution::point_mass(1.0);
  if (!weights) {
    return SpectralDistribution::empirical(
        Eigen::Map<const Eigen::VectorXd>(eigenvalues->data(), eigenvalues->size()));
  }
  return SpectralDistribution(*eigenvalues, *weights);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Risk estimation for subsampled penalized-regression ensembles";

  static py::exception<Error> error_type(m, "CgcvError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(error_type.ptr(), msg.c_str());
    }
  });

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("beta", &FitResult::beta)
      .def_readonly("df", &FitResult::df)
      .def_readonly("active_set", &FitResult::active_set)
      .def_readonly("objective_value", &FitResult::objective_value)
      .def_readonly("kkt_residual", &FitResult::kkt_residual)
      .def_readonly("iterations", &FitResult::iterations);

  m.def("fit_ridge", &fit_ridge, py::arg("X"), py::arg("y"), py::arg("lam"));
  m.def(
      "fit_lasso",
      [](const MatrixXd& X, const VectorXd& y, double lam, double tol, int max_iter) {
        SolverOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        return fit_lasso(X, y, lam, o);
      },
      py::arg("X"), py::arg("y"), py::arg("lam"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 100000);
  m.def(
      "fit_elastic_net",
      [](const MatrixXd& X, const VectorXd& y, double lam1, double lam2, double tol, int max_iter) {
        SolverOptions o;
        o.tol = tol;
        o.max_iter = max_iter;
        return fit_elastic_net(X, y, lam1, lam2, o);
      },
      py::arg("X"), py::arg("y"), py::arg("lam1"), py::arg("lam2"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 100000);

  m.def(
      "draw_subsamples",
      [](int n, int k, int M, std::uint64_t seed) {
        std::vector<std::vector<int>> out;
        for (const auto& s : draw_subsamples(n, k, M, seed)) out.push_back(s.indices());
        return out;
      },
      py::arg("n"), py::arg("k"), py::arg("M"), py::arg("seed"));

  py::class_<EnsembleFit>(m, "EnsembleFit")
      .def_property_readonly("M", &EnsembleFit::M)
      .def_property_readonly("n", &EnsembleFit::n)
      .def_property_readonly("tdf", &EnsembleFit::tdf)
      .def_property_readonly("beta", &EnsembleFit::ensemble_beta)
      .def_property_readonly("residual", &EnsembleFit::ensemble_residual)
      .def("component_beta", [](const EnsembleFit& e, int i) { return e[i].fit.beta; })
      .def("component_df", [](const EnsembleFit& e, int i) { return e[i].fit.df; })
      .def("subset", [](const EnsembleFit& e, int i) { return e[i].subset.indices(); })
      .def("prefix", &EnsembleFit::prefix)
      .def("gcv", &gcv_full_data)
      .def("gcv_union", &gcv_union)
      .def("cgcv",
           [](const EnsembleFit& e, const std::string& v) {
             return cgcv::cgcv(e, parse_variant(v));
           },
           py::arg("variant") = "full")
      .def("intermediate",
           [](const EnsembleFit& e, const std::string& v) {
             return intermediate_estimator(e, parse_variant(v));
           },
           py::arg("variant"))
      .def("report",
           [](const EnsembleFit& e, bool intermediates) {
             ReportOptions o;
             o.intermediates = intermediates;
             return report_dict(risk_report(e, o));
           },
           py::arg("intermediates") = true);

  m.def(
      "fit_ensemble",
      [](const MatrixXd& X, const VectorXd& y, const std::vector<std::vector<int>>& subsets,
         const std::string& penalty, double lam, std::optional<double> lam2) {
        return fit_ensemble(X, y, make_penalty(penalty, lam, lam2),
                            to_index_sets(subsets, static_cast<int>(X.rows())));
      },
      py::arg("X"), py::arg("y"), py::arg("subsets"), py::arg("penalty") = "ridge",
      py::arg("lam") = 1.0, py::arg("lam2") = py::none());

  m.def(
      "true_risk",
      [](const MatrixXd& Sigma, const VectorXd& beta0, double sigma2, const VectorXd& beta) {
        return true_risk(LinearModelOracle{Sigma, beta0, sigma2}, beta);
      },
      py::arg("Sigma"), py::arg("beta0"), py::arg("sigma2"), py::arg("beta"));

  m.def(
      "solve_v",
      [](double lam, double theta, std::optional<std::vector<double>> eigenvalues,
         std::optional<std::vector<double>> weights) {
        const auto s = solve_v(lam, theta, make_spectrum(eigenvalues, weights));
        return py::make_tuple(s.v, s.residual);
      },
      py::arg("lam"), py::arg("theta"), py::arg("eigenvalues") = py::none(),
      py::arg("weights") = py::none(),
      "Returns (v, residual). Without eigenvalues the spectrum is a point mass at 1.");

  m.def(
      "deterministic_equivalents",
      [](double lam, double phi, double psi, const std::vector<double>& eigenvalues,
         double beta0_norm2, double fnl_energy, int M) {
        const auto H = make_spectrum(eigenvalues, std::nullopt);
        const auto eq = deterministic_equivalents(lam, phi, psi, H,
                                                  isotropic_beta0_quadratic(beta0_norm2, H),
                                                  fnl_energy);
        py::dict d;
        d["v"] = eq.v;
        d["tv_diag"] = eq.tv_diag;
        d["tv_offdiag"] = eq.tv_offdiag;
        d["tc"] = eq.tc;
        d["sR_diag"] = eq.sR_diag;
        d["sR_offdiag"] = eq.sR_offdiag;
        d["sD_sub"] = eq.sD_sub;
        d["sD_full_diag"] = eq.sD_full_diag;
        d["sD_full_offdiag"] = eq.sD_full_offdiag;
        d["ensemble_risk"] = asymptotic_ensemble_risk(eq, M);
        d["gcv_gap"] = asymptotic_gcv_gap(eq, M);
        d["df_fraction"] = asymptotic_df_fraction(eq);
        return d;
      },
      py::arg("lam"), py::arg("phi"), py::arg("psi"), py::arg("eigenvalues"),
      py::arg("beta0_norm2"), py::arg("fnl_energy"), py::arg("M") = 1,
      "Limits for a ridge ensemble with beta0 spread evenly over the eigendirections.");

  m.def(
      "gen_gaussian_linear",
      [](int n, int p, double snr, double sigma2, int sparsity_tail, std::uint64_t seed) {
        GaussianLinearSpec spec;
        spec.n = n;
        spec.p = p;
        spec.snr = snr;
        spec.sigma2 = sigma2;
        spec.sparsity_tail = sparsity_tail;
        auto d = gen_gaussian_linear(spec, seed);
        py::dict out;
        out["X"] = d.train.X;
        out["y"] = d.train.y;
        out["beta0"] = d.oracle.beta0;
        out["Sigma"] = d.oracle.Sigma;
        out["sigma2"] = d.oracle.sigma2;
        return out;
      },
      py::arg("n"), py::arg("p"), py::arg("snr") = 1.0, py::arg("sigma2") = 1.0,
      py::arg("sparsity_tail") = 0, py::arg("seed") = 0);

  m.def(
      "run_sweep",
      [](const std::string& config_json, int threads) {
        const ExperimentConfig c = parse_experiment_config(config_json);
        std::vector<ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(c, threads);
        }
        py::list out;
        for (const auto& r : rows) {
          out.append(py::make_tuple(r.rep, r.lambda, r.k, r.M, r.estimator, r.value,
                                    std::string(to_string(r.status))));
        }
        return out;
      },
      py::arg("config_json"), py::arg("threads") = 1,
      "Rows as (rep, lambda, k, M, estimator, value, status) tuples.");
}
