#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cgcv {

/// Discrete spectral distribution of a covariance: atoms r_i > 0 with
/// weights summing to one.
class SpectralDistribution {
 public:
  // Throws InvalidInput unless r_i > 0, w_i >= 0 and |sum w - 1| <= 1e-12.
  SpectralDistribution(std::vector<double> eigenvalues, std::vector<double> weights);

  static SpectralDistribution point_mass(double r);
  // Equal weight 1/p on each eigenvalue.
  static SpectralDistribution empirical(const Eigen::VectorXd& eigenvalues);

  const std::vector<double>& eigenvalues() const noexcept { return r_; }
  const std::vector<double>& weights() const noexcept { return w_; }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_.size(); ++i) s += w_[i] * f(r_[i]);
    return s;
  }

 private:
  std::vector<double> r_;
  std::vector<double> w_;
};

/// Reads `eigenvalue,weight` rows (optional header). Weights are
/// renormalized to sum to one.
SpectralDistribution read_spectrum_csv(const std::string& path);

struct FixedPointSolution {
  double v = 0.0;  // +infinity when lambda = 0 and theta <= 1
  double lambda = 0.0;
  double theta = 0.0;
  double residual = 0.0;

  bool finite() const noexcept;
};

/// 1/v - lambda - theta * int r / (1 + v r) dH(r).
double fixed_point_residual(double v, double lambda, double theta, const SpectralDistribution& H);

/// Unique nonnegative root of the ridge fixed-point equation
///   1/v = lambda + theta * int r / (1 + v r) dH(r),
/// found by bisection on the decreasing residual. At lambda = 0 the root is
/// the lambda -> 0+ limit for theta > 1 and +infinity otherwise.
FixedPointSolution solve_v(double lambda, double theta, const SpectralDistribution& H);

/// v -> beta0^T (v Sigma + I)^{-1} Sigma (v Sigma + I)^{-1} beta0.
using Beta0Quadratic = std::function<double(double v)>;

Beta0Quadratic exact_beta0_quadratic(const Eigen::MatrixXd& Sigma, const Eigen::VectorXd& beta0);

/// Approximation for when only the spectrum is known: ||beta0||^2 spread
/// evenly over the eigendirections.
Beta0Quadratic isotropic_beta0_quadratic(double beta0_norm2, const SpectralDistribution& H);

/// Limits of the ridge-ensemble risk and of the numerators / denominators of
/// both per-pair estimators, at phi = p/n and psi = p/k. "diag" is m = l,
/// "offdiag" is m != l.
struct DeterministicEquivalents {
  double lambda = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double v = 0.0;            // v(-lambda; psi)
  double lambda_v = 0.0;     // lambda * v; tr(S_m)/k -> 1 - lambda v
  double tv_diag = 0.0;      // tv(-lambda; psi, psi)
  double tv_offdiag = 0.0;   // tv(-lambda; phi, psi)
  double tc = 0.0;           // tc(-lambda; psi)
  double fnl_energy = 0.0;   // nonlinear + noise energy (sigma^2 for a linear model)
  double sR_diag = 0.0;
  double sR_offdiag = 0.0;
  double sD_sub = 0.0;
  double sD_full_diag = 0.0;
  double sD_full_offdiag = 0.0;
  double d_p_diag = 0.0;
  double d_p_offdiag = 0.0;
};

DeterministicEquivalents deterministic_equivalents(double lambda, double phi, double psi,
                                                   const SpectralDistribution& H,
                                                   const Beta0Quadratic& beta0_quadratic,
                                                   double fnl_energy);

/// Limit of R_M: sR_diag / M + (M - 1) sR_offdiag / M.
double asymptotic_ensemble_risk(const DeterministicEquivalents& eq, int M);

/// Limit of R_M minus the ensemble GCV (nonpositive: GCV over-estimates).
double asymptotic_gcv_gap(const DeterministicEquivalents& eq, int M);

/// Limit of tdf / n: (phi / psi) (1 - lambda v).
double asymptotic_df_fraction(const DeterministicEquivalents& eq);

}  // namespace cgcv
