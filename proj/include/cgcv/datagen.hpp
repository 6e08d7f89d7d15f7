#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cgcv/oracle.hpp"

namespace cgcv {

struct Dataset {
  MatrixXd X;
  VectorXd y;
};

/// Eigenvalues of a diagonal covariance.
struct SpectrumSpec {
  enum class Kind { EvenlySpaced, Isotropic, Custom };
  Kind kind = Kind::EvenlySpaced;
  double lo = 0.1;
  double hi = 10.0;
  std::vector<double> eigenvalues;  // Custom only, length p

  VectorXd diagonal(int p) const;
};

struct GaussianLinearSpec {
  int n = 0;
  int p = 0;
  double snr = 1.0;
  double sigma2 = 1.0;
  SpectrumSpec spectrum;
  int sparsity_tail = 100;  // trailing zero coefficients

  void validate() const;
};

struct FeatureLaw {
  enum class Kind { Gaussian, ScaledHeavyTail };
  Kind kind = Kind::Gaussian;
  double dof = 6.0;  // Student t degrees of freedom, > 4
};

struct NonlinearAR1Spec {
  int n = 0;
  int p = 0;
  double rho = 0.25;
  FeatureLaw feature_law;
  double noise_sigma2 = 1.0;

  void validate() const;
};

struct GaussianLinearDraw {
  Dataset train;
  LinearModelOracle oracle;
  TestSet test;
};

struct NonlinearDraw {
  Dataset train;
  TestSet test;
  MatrixXd Sigma;
  VectorXd beta0;     // best linear projection
  double fnl_energy;  // E[(y - x^T beta0)^2]
};

/// x ~ N(0, Sigma) with diagonal Sigma from the spectrum; beta0 has
/// p - sparsity_tail leading N(0,1) entries rescaled to beta0^T Sigma beta0 =
/// snr * sigma2; y = X beta0 + N(0, sigma2). `n_test` extra rows form the
/// held-out set.
GaussianLinearDraw gen_gaussian_linear(const GaussianLinearSpec& spec, std::uint64_t seed,
                                       int n_test = 0);

/// x = Sigma^{1/2} z with AR(1) Sigma; y = x^T beta0 + (||x||^2/p - 1) + eps.
/// beta0 is the unit-norm direction of the mean of the top-5 eigenvectors
/// (each signed so its first nonzero entry is positive; rho = 0 uses e_0..e_4).
NonlinearDraw gen_nonlinear_ar1(const NonlinearAR1Spec& spec, std::uint64_t seed,
                                int n_test = 0);

/// (rho^{|i-j|})_{i,j}.
MatrixXd ar1_covariance(int p, double rho);

/// Best-linear-projection beta0 used by gen_nonlinear_ar1.
VectorXd ar1_top_eigen_direction(const MatrixXd& Sigma, double rho, int count = 5);

void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

}  // namespace cgcv
