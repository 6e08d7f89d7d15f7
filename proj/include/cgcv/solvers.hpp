#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cgcv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class PenaltyKind { Ridge, Ridgeless, Lasso, ElasticNet };

std::string to_string(PenaltyKind kind);

/// Penalty of a single component fit. All lambdas are on the scale of the
/// objective (1/(2k))||y - Xb||^2 + g(b). A lambda of +infinity is the null
/// predictor.
struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::Ridge;
  double lambda = 0.0;   // ridge / lasso
  double lambda1 = 0.0;  // elastic net l1 weight
  double lambda2 = 0.0;  // elastic net l2 weight, > 0

  static PenaltyConfig ridge(double lambda) { return {PenaltyKind::Ridge, lambda, 0, 0}; }
  static PenaltyConfig ridgeless() { return {PenaltyKind::Ridgeless, 0, 0, 0}; }
  static PenaltyConfig lasso(double lambda) { return {PenaltyKind::Lasso, lambda, 0, 0}; }
  static PenaltyConfig elastic_net(double lambda1, double lambda2) {
    return {PenaltyKind::ElasticNet, 0, lambda1, lambda2};
  }

  // Throws InvalidInput when the invariants of the kind are violated.
  void validate() const;
  // Primary tuning value: lambda, or lambda1 for the elastic net.
  double primary_lambda() const;
};

struct FitResult {
  VectorXd beta;
  double df = 0.0;
  std::vector<int> active_set;  // filled for lasso / elastic net
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;               // max coefficient change per sweep
  int max_iter = 100000;           // full coordinate sweeps
  double active_threshold = 1e-10; // |beta_j| above this is active
};

FitResult fit_ridge(const MatrixXd& X_sub, const VectorXd& y_sub, double lambda);

FitResult fit_lasso(const MatrixXd& X_sub, const VectorXd& y_sub, double lambda,
                    const SolverOptions& opts = {},
                    const VectorXd* warm_start = nullptr);

FitResult fit_elastic_net(const MatrixXd& X_sub, const VectorXd& y_sub,
                          double lambda1, double lambda2,
                          const SolverOptions& opts = {},
                          const VectorXd* warm_start = nullptr);

FitResult fit_penalized(const MatrixXd& X_sub, const VectorXd& y_sub,
                        const PenaltyConfig& penalty,
                        const SolverOptions& opts = {},
                        const VectorXd* warm_start = nullptr);

/// Ridge fits on one subsample for many lambdas. The spectral decomposition
/// of the subsample is computed once (lazily) and shared by every lambda > 0;
/// lambda = 0 goes through an SVD of the design.
class RidgeSolver {
 public:
  RidgeSolver(MatrixXd X_sub, VectorXd y_sub);

  FitResult fit(double lambda) const;

 private:
  void ensure_spectrum() const;
  FitResult fit_ridgeless() const;
  FitResult finish(VectorXd beta, double df, double lambda) const;

  MatrixXd X_;
  VectorXd y_;
  // Gram route (k >= p): G/k = V diag(d) V^T, coef = V^T X^T y / k.
  // Kernel route (k < p): X X^T / k = U diag(d) U^T, coef = U^T y / k.
  mutable bool have_spectrum_ = false;
  mutable bool kernel_route_ = false;
  mutable VectorXd evals_;
  mutable MatrixXd evecs_;
  mutable VectorXd proj_;
};

/// Trace of A (A + lambda I)^{-1} for symmetric PSD A, i.e. the ridge
/// degrees of freedom when A = X^T X / k.
double ridge_trace(const MatrixXd& gram_over_k, double lambda);

using Fitter = std::function<FitResult(const MatrixXd&, const VectorXd&)>;

/// Finite-difference Stein df: sum_i [(X b(y + eps e_i))_i - (X b(y))_i] / eps.
/// Throws NonGenericPoint if a perturbation changes the active set.
double df_finite_difference_oracle(const Fitter& fitter, const MatrixXd& X_sub,
                                   const VectorXd& y_sub, double eps);

}  // namespace cgcv
